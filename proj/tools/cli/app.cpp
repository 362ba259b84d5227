#include "app.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "promptsent/aggregate.hpp"
#include "promptsent/backend.hpp"
#include "promptsent/corpus.hpp"
#include "promptsent/csv.hpp"
#include "promptsent/errors.hpp"
#include "promptsent/evalmeta.hpp"
#include "promptsent/forest.hpp"
#include "promptsent/forest_analysis.hpp"
#include "promptsent/forest_io.hpp"
#include "promptsent/http_backend.hpp"
#include "promptsent/lexical.hpp"
#include "promptsent/parallel.hpp"
#include "promptsent/prompt.hpp"
#include "promptsent/prompt_spec.hpp"
#include "promptsent/regression_grid.hpp"

namespace promptsent::cli {
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  std::string backend = "mock";
  fs::path out = "out";
  unsigned jobs = 1;
  std::string endpoint;
  std::string model;
  std::string tokenize_url;
  std::size_t context_size = 0;
  std::string auth_env = "PROMPTSENT_API_TOKEN";
  int timeout_ms = 30000;
  int max_retries = 3;
  int top_logprobs = 20;
  double rate_limit = 0.0;
  bool no_variants = false;
};

struct ScoreOptions {
  fs::path corpus;
  std::string format;
  std::vector<fs::path> prompts;
  fs::path lexicon;
  fs::path stopwords;
  bool stem = false;
  std::size_t chunk_words = 0;
  fs::path instruct_prompt;
  std::string output = "scores.csv";
};

struct EvalOptions {
  fs::path corpus;
  std::string format;
  fs::path prompt;
  std::string gold;
  std::string name;
};

struct AggregateOptions {
  fs::path corpus;
  std::string format;
  fs::path scores;
  ScoreColumns columns;
  std::string output = "aggregates.csv";
};

struct RegressOptions {
  fs::path grid;
  std::vector<std::string> measures;
};

struct ForestOptions {
  fs::path data;
  std::string outcome;
  std::vector<std::string> features;
  std::vector<std::string> categorical;
  std::size_t max_depth = 6;
  std::size_t min_split = 21;
  std::size_t min_leaf = 8;
  std::size_t trees = 120;
  std::size_t mtry = 0;
  std::string weighting = "inverse_probability";
  std::size_t repeats = 30;
  std::string importance_mode = "shuffle_only";
  std::vector<std::string> pd;
  std::string positive_class;
};

struct PdOptions {
  fs::path forest;
  fs::path data;
  std::vector<std::string> features;
  std::vector<std::string> grids;
  std::string positive_class;
};

// Writes through a temporary file and a rename.
void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write '" + path.string() + "'");
    f << content;
    if (!f.flush()) throw InvalidArgument("cannot write '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

CorpusFormat format_of(const std::string& name, const fs::path& path) {
  return name.empty() ? corpus_format_for(path) : parse_corpus_format(name);
}

BackendConfig backend_config(const Globals& g) {
  BackendConfig c;
  c.endpoint_url = g.endpoint;
  c.model_name = g.model;
  c.timeout = std::chrono::milliseconds(g.timeout_ms);
  c.max_retries = g.max_retries;
  c.top_logprobs = g.top_logprobs;
  c.auth_token = auth_token_from_env(g.auth_env);
  c.tokenize_url = g.tokenize_url;
  if (g.context_size) c.context_size = g.context_size;
  if (g.no_variants) c.variants = {false, false};
  c.max_requests_per_second = g.rate_limit;
  return c;
}

std::unique_ptr<Backend> make_backend(const Globals& g) {
  if (g.backend == "mock") return std::make_unique<MockBackend>(g.seed, g.context_size ? g.context_size : 8192);
  if (g.backend == "http") return std::make_unique<CompletionBackend>(backend_config(g));
  throw InvalidArgument("backend '" + g.backend + "' cannot score prompt specs");
}

std::vector<std::string> score_header(const PromptSpec& spec, const std::string& prefix,
                                      const LabelDistribution& sample) {
  std::vector<std::string> h;
  for (const auto& l : spec.verbalizer.labels()) h.push_back(prefix + "mass_" + l);
  h.push_back(prefix + "total_mass");
  if (has_polarity_labels(sample)) h.push_back(prefix + "polarity");
  if (has_standout_labels(sample)) h.push_back(prefix + "net_standout");
  return h;
}

std::vector<std::string> score_cells(const LabelDistribution& d) {
  std::vector<std::string> c;
  for (const auto& m : d.masses) c.push_back(csv::format_double(m.mass));
  c.push_back(csv::format_double(d.total_mass));
  if (has_polarity_labels(d)) c.push_back(csv::format_double(polarity(d)));
  if (has_standout_labels(d)) c.push_back(csv::format_double(net_standout(d)));
  return c;
}

fs::path data_dir() {
  if (const char* env = std::getenv("PROMPTSENT_DATA_DIR"); env && *env) return env;
  return PROMPTSENT_DEFAULT_DATA_DIR;
}

void cmd_score(const Globals& g, const ScoreOptions& o, std::ostream& log) {
  const auto corpus = load_corpus(o.corpus, format_of(o.format, o.corpus));
  const auto& docs = corpus.documents();
  std::ostringstream body;
  csv::Writer w(body);
  std::vector<std::string> header = {"id", "candidate_id", "word_count"};

  if (g.backend == "instruct") {
    if (!o.prompts.empty() || !o.lexicon.empty())
      throw InvalidArgument("the instruct backend scores letters directly; drop --prompt/--lexicon");
    const InstructClient client(backend_config(g));
    const auto prompt =
        load_instruct_prompt(o.instruct_prompt.empty() ? data_dir() / "prompts" / "instruct.json" : o.instruct_prompt);
    std::vector<double> scores(docs.size());
    parallel_for(docs.size(), g.jobs, [&](std::size_t i) { scores[i] = instruct_score(client, prompt, docs[i]); });
    header.push_back("score");
    w.row(header);
    for (std::size_t i = 0; i < docs.size(); ++i)
      w.row({docs[i].id, docs[i].candidate_id, std::to_string(docs[i].word_count), csv::format_double(scores[i])});
  } else if (!o.lexicon.empty()) {
    if (!o.prompts.empty()) throw InvalidArgument("--lexicon and --prompt are exclusive");
    auto lexicon = load_lexicon(o.lexicon);
    if (o.stem) lexicon = lexicon.stemmed();
    const StopwordSet stop = o.stopwords.empty() ? StopwordSet{} : load_stopwords(o.stopwords);
    header.insert(header.end(), {"n_positive", "n_negative", "polarity"});
    w.row(header);
    for (const auto& d : docs) {
      const auto terms = preprocess(d.text, stop, o.stem);
      std::size_t pos = 0, neg = 0;
      for (const auto& t : terms) {
        const auto s = lexicon.score(t);
        if (s && *s > 0) ++pos;
        if (s && *s < 0) ++neg;
      }
      std::optional<double> pol;
      if (o.chunk_words > 0) {
        pol = chunked_average(
            [&](std::string_view text) { return lexical_polarity(preprocess(text, stop, o.stem), lexicon); }, d.text,
            o.chunk_words, ChunkUnit::word);
      } else {
        pol = lexical_polarity(terms, lexicon);
      }
      w.row({d.id, d.candidate_id, std::to_string(d.word_count), std::to_string(pos), std::to_string(neg),
             csv::format_optional(pol)});
    }
  } else {
    if (o.prompts.empty()) throw InvalidArgument("score needs --prompt, --lexicon or the instruct backend");
    const auto backend = make_backend(g);
    std::vector<std::unique_ptr<PromptScorer>> scorers;
    std::vector<std::vector<DocumentScore>> results;
    for (const auto& p : o.prompts) {
      scorers.push_back(std::make_unique<PromptScorer>(*backend, load_prompt_spec(p)));
      for (const auto& warn : scorers.back()->warnings()) log << "warning: " << warn << "\n";
      results.push_back(scorers.back()->score_all(docs, g.jobs));
    }
    const bool prefixed = scorers.size() > 1;
    for (std::size_t s = 0; s < scorers.size(); ++s) {
      const auto& spec = scorers[s]->spec();
      const LabelDistribution probe = results[s].empty() ? LabelDistribution{} : results[s].front().distribution;
      auto h = score_header(spec, prefixed ? spec.name + "." : "", probe);
      header.insert(header.end(), h.begin(), h.end());
    }
    w.row(header);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      std::vector<std::string> row = {docs[i].id, docs[i].candidate_id, std::to_string(docs[i].word_count)};
      for (const auto& r : results) {
        auto c = score_cells(r[i].distribution);
        row.insert(row.end(), c.begin(), c.end());
      }
      w.row(row);
    }
  }
  write_file(g.out / o.output, body.str());
  log << "wrote " << (g.out / o.output).string() << " (" << docs.size() << " documents)\n";
}

void cmd_evalmeta(const Globals& g, const EvalOptions& o, std::ostream& log) {
  const auto corpus = load_corpus(o.corpus, format_of(o.format, o.corpus));
  const auto backend = make_backend(g);
  const PromptScorer scorer(*backend, load_prompt_spec(o.prompt));
  const auto& verbalizer = scorer.spec().verbalizer;
  std::vector<std::string> gold;
  for (const auto& d : corpus) {
    const auto it = d.meta.find(o.gold);
    if (it == d.meta.end()) throw InvalidArgument("metadata key '" + o.gold + "' missing on document " + d.id);
    if (!verbalizer.has_label(it->second)) throw MissingLabelError(it->second);
    gold.push_back(it->second);
  }
  const auto scores = scorer.score_all(corpus.documents(), g.jobs);
  std::vector<std::string> predicted;
  for (const auto& s : scores) predicted.push_back(classify(s.distribution));

  const auto rep = report(confusion(predicted, gold, verbalizer.labels()));
  const std::string name = o.name.empty() ? scorer.spec().name : o.name;
  std::ostringstream csv_out, pred_out;
  write_report_csv(rep, csv_out);
  csv::Writer pw(pred_out);
  pw.row({"id", "gold", "predicted"});
  for (std::size_t i = 0; i < gold.size(); ++i) pw.row({corpus[i].id, gold[i], predicted[i]});
  const auto text = render_report(rep);
  write_file(g.out / ("evalmeta_" + name + ".txt"), text);
  write_file(g.out / ("evalmeta_" + name + ".csv"), csv_out.str());
  write_file(g.out / ("evalmeta_" + name + "_predictions.csv"), pred_out.str());
  log << text;
}

void cmd_aggregate(const Globals& g, const AggregateOptions& o, std::ostream& log) {
  const auto corpus = load_corpus(o.corpus, format_of(o.format, o.corpus));
  const auto scores_path = o.scores.empty() ? g.out / "scores.csv" : o.scores;
  const auto table = csv::Table::read_file(scores_path.string());
  if (!table.column(o.columns.polarity))
    throw InvalidArgument("scores file has no column '" + o.columns.polarity + "'");
  const auto letters = letters_from_scores(corpus, table, o.columns);
  const auto candidates = aggregate(letters);
  std::ostringstream body;
  write_aggregates_csv(candidates, body);
  write_file(g.out / o.output, body.str());
  log << "wrote " << (g.out / o.output).string() << " (" << candidates.size() << " candidates, "
      << complete_applications(candidates).size() << " complete applications)\n";
}

void cmd_regress(const Globals& g, const RegressOptions& o, std::ostream& log) {
  auto spec = load_grid_spec(o.grid);
  for (const auto& m : o.measures) {
    const auto eq = m.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--measure expects NAME=PATH, got '" + m + "'");
    spec.measures[m.substr(0, eq)] = m.substr(eq + 1);
  }
  const auto cells = run_grid(spec, g.jobs);
  const auto summary = summarize_pvalues(spec, cells);
  std::ostringstream coef, pvals, sum;
  write_coefficients_csv(cells, coef);
  write_pvalues_csv(spec, cells, pvals);
  write_summary_csv(summary, sum);
  write_file(g.out / "regression_coefficients.csv", coef.str());
  write_file(g.out / "regression_pvalues.csv", pvals.str());
  write_file(g.out / "pvalue_summary.csv", sum.str());
  std::size_t failed = 0;
  for (const auto& c : cells) failed += c.error.has_value();
  log << "fitted " << cells.size() << " grid cells (" << failed << " failed)\n";
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t positive_index(const Forest& f, const std::string& name) {
  if (name.empty()) return f.class_names.size() - 1;
  for (std::size_t c = 0; c < f.class_names.size(); ++c)
    if (f.class_names[c] == name) return c;
  throw MissingLabelError(name);
}

std::vector<double> parse_grid(const Forest& forest, std::size_t feature, const std::string& text) {
  std::vector<double> grid;
  const auto& info = forest.features[feature];
  for (const auto& item : split_list(text)) {
    if (info.kind == FeatureKind::categorical) {
      const auto it = std::find(info.levels.begin(), info.levels.end(), item);
      if (it == info.levels.end()) throw InvalidArgument("'" + item + "' is not a level of '" + info.name + "'");
      grid.push_back(static_cast<double>(it - info.levels.begin()));
    } else {
      const auto v = csv::parse_double(item);
      if (!v) throw InvalidArgument("grid value '" + item + "' is not a number");
      grid.push_back(*v);
    }
  }
  if (grid.empty()) throw InvalidArgument("empty grid for '" + info.name + "'");
  return grid;
}

std::string pd_file_name(const std::vector<std::string>& features) {
  std::string name = "pd";
  for (const auto& f : features) name += "_" + f;
  return name + ".csv";
}

void run_pd(const Globals& g, const Forest& forest, const Dataset& data, const std::vector<std::string>& features,
            const std::vector<std::string>& grids, const std::string& positive, std::ostream& log) {
  std::vector<std::size_t> idx;
  std::vector<std::vector<double>> grid_values;
  for (std::size_t a = 0; a < features.size(); ++a) {
    idx.push_back(forest.feature_index(features[a]));
    grid_values.push_back(a < grids.size() ? parse_grid(forest, idx.back(), grids[a])
                                           : default_pd_grid(data, idx.back()));
  }
  const auto pd = partial_dependence(forest, data, idx, grid_values, positive_index(forest, positive));
  for (const auto& w : pd.warnings) log << "warning: " << w << "\n";
  std::ostringstream body;
  write_pd_csv(pd, forest, body);
  write_file(g.out / pd_file_name(features), body.str());
}

void cmd_forest(const Globals& g, const ForestOptions& o, std::ostream& log) {
  const auto table = csv::Table::read_file(o.data.string());
  const auto data = make_dataset(table, o.outcome, o.features, o.categorical);
  if (data.dropped) log << "dropped " << data.dropped << " rows with missing values\n";
  RFConfig cfg;
  cfg.max_depth = o.max_depth;
  cfg.min_split = o.min_split;
  cfg.min_leaf = o.min_leaf;
  cfg.n_trees = o.trees;
  if (o.mtry) cfg.features_per_split = o.mtry;
  cfg.seed = g.seed;
  cfg.class_weighting = parse_class_weighting(o.weighting);
  cfg.jobs = g.jobs;
  const auto forest = fit_forest(data, cfg);
  const auto mode = parse_importance_mode(o.importance_mode);

  const auto oob = oob_report(forest, data);
  std::ostringstream oob_csv, imp;
  write_report_csv(oob.report, oob_csv);
  std::string oob_text = render_report(oob.report);
  oob_text += "\nevaluated " + std::to_string(oob.evaluated) + ", never out of bag " + std::to_string(oob.excluded) + "\n";

  csv::Writer iw(imp);
  iw.row({"feature", "repeat", "decrease"});
  for (std::size_t f = 0; f < data.features.size(); ++f) {
    const auto dec = permutation_importance(forest, data, f, o.repeats, mode, g.seed);
    for (std::size_t r = 0; r < dec.size(); ++r)
      iw.row({data.features[f].name, std::to_string(r), csv::format_double(dec[r])});
  }

  write_file(g.out / "forest.json", serialize_forest(forest));
  write_file(g.out / "oob_report.txt", oob_text);
  write_file(g.out / "oob_report.csv", oob_csv.str());
  write_file(g.out / "importance.csv", imp.str());
  std::vector<std::vector<std::string>> pd_specs;
  if (o.pd.empty()) {
    for (const auto& f : o.features) pd_specs.push_back({f});
  } else {
    for (const auto& s : o.pd) pd_specs.push_back(split_list(s, ':'));
  }
  for (const auto& spec : pd_specs) run_pd(g, forest, data, spec, {}, o.positive_class, log);
  log << oob_text;
}

void cmd_pd(const Globals& g, const PdOptions& o, std::ostream& log) {
  const auto forest = load_forest(o.forest);
  const auto table = csv::Table::read_file(o.data.string());
  const auto data = encode_for_forest(forest, table, std::nullopt);
  if (o.features.empty() || o.features.size() > 2)
    throw UnsupportedCapabilityError("pd takes one or two --feature values");
  if (o.grids.size() > o.features.size()) throw InvalidArgument("more --grid values than features");
  run_pd(g, forest, data, o.features, o.grids, o.positive_class, log);
  log << "wrote " << (g.out / pd_file_name(o.features)).string() << "\n";
}

std::string error_record(std::string_view kind, const std::string& message, const std::string& command) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  j["command"] = command;
  return j.dump();
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prompt-based sentiment scoring and outcome analysis for recommendation letters"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with option values");

  Globals g;
  app.add_option("--seed", g.seed, "Seed for the mock backend, forests and permutations")->capture_default_str();
  app.add_option("--backend", g.backend, "Language-model backend")
      ->check(CLI::IsMember({"mock", "http", "instruct"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--endpoint", g.endpoint, "Completion or chat endpoint URL (http/instruct backends)");
  app.add_option("--model", g.model, "Model name sent to the endpoint");
  app.add_option("--tokenize-url", g.tokenize_url, "Tokenizer endpoint for vocabulary and context checks");
  app.add_option("--context-size", g.context_size, "Context window in tokens");
  app.add_option("--auth-env", g.auth_env, "Environment variable holding the bearer token")->capture_default_str();
  app.add_option("--timeout-ms", g.timeout_ms, "Request timeout")->capture_default_str();
  app.add_option("--max-retries", g.max_retries, "Retries per request")->capture_default_str();
  app.add_option("--top-logprobs", g.top_logprobs, "Top-k logprobs requested")->capture_default_str();
  app.add_option("--rate-limit", g.rate_limit, "Maximum requests per second, 0 for none")->capture_default_str();
  app.add_flag("--no-variants", g.no_variants, "Query only the bare spelling of each surface");

  ScoreOptions so;
  auto* score = app.add_subcommand("score", "Score letters with prompt specs, a lexicon or an instruct model");
  score->add_option("--corpus", so.corpus, "Corpus file (.jsonl or .csv)")->required();
  score->add_option("--format", so.format, "Corpus format override")->check(CLI::IsMember({"jsonl", "csv"}));
  score->add_option("--prompt", so.prompts, "Prompt-spec JSON (repeatable)");
  score->add_option("--lexicon", so.lexicon, "Lexicon CSV (term,score)");
  score->add_option("--stopwords", so.stopwords, "Stopword list for lexicon scoring");
  score->add_flag("--stem", so.stem, "Porter-stem terms and lexicon");
  score->add_option("--chunk-words", so.chunk_words, "Lexicon scoring over word chunks of this size");
  score->add_option("--instruct-prompt", so.instruct_prompt, "Instruct prompt JSON (default: bundled prompts/instruct.json)");
  score->add_option("--output", so.output, "File name under --out")->capture_default_str();

  EvalOptions eo;
  auto* evalmeta = app.add_subcommand("evalmeta", "Evaluate a metadata-prediction prompt against gold labels");
  evalmeta->add_option("--corpus", eo.corpus, "Corpus file")->required();
  evalmeta->add_option("--format", eo.format, "Corpus format override")->check(CLI::IsMember({"jsonl", "csv"}));
  evalmeta->add_option("--prompt", eo.prompt, "Prompt-spec JSON")->required();
  evalmeta->add_option("--gold", eo.gold, "Metadata key holding the gold label")->required();
  evalmeta->add_option("--name", eo.name, "Output name (defaults to the spec name)");

  AggregateOptions ao;
  auto* agg = app.add_subcommand("aggregate", "Collapse letter scores to candidate-level regressors");
  agg->add_option("--corpus", ao.corpus, "Corpus file")->required();
  agg->add_option("--format", ao.format, "Corpus format override")->check(CLI::IsMember({"jsonl", "csv"}));
  agg->add_option("--scores", ao.scores, "Letter scores CSV (default <out>/scores.csv)");
  agg->add_option("--polarity-column", ao.columns.polarity, "Polarity column")->capture_default_str();
  agg->add_option("--standout-column", ao.columns.standout, "Standout mass column")->capture_default_str();
  agg->add_option("--grindstone-column", ao.columns.grindstone, "Grindstone mass column")->capture_default_str();
  agg->add_option("--output", ao.output, "File name under --out")->capture_default_str();

  RegressOptions ro;
  auto* regress = app.add_subcommand("regress", "Fit a grid of outcome regressions");
  regress->add_option("--grid", ro.grid, "Grid spec JSON")->required()->check(CLI::ExistingFile);
  regress->add_option("--measure", ro.measures, "NAME=PATH aggregates table, adds or replaces a grid measure");

  ForestOptions fo;
  auto* forest = app.add_subcommand("forest", "Fit a random forest with OOB report, importances and pd");
  forest->add_option("--data", fo.data, "Candidate-level CSV")->required()->check(CLI::ExistingFile);
  forest->add_option("--outcome", fo.outcome, "Outcome column")->required();
  forest->add_option("--features", fo.features, "Feature columns")->required()->delimiter(',');
  forest->add_option("--categorical", fo.categorical, "Categorical feature columns")->delimiter(',');
  forest->add_option("--max-depth", fo.max_depth)->capture_default_str();
  forest->add_option("--min-split", fo.min_split)->capture_default_str();
  forest->add_option("--min-leaf", fo.min_leaf)->capture_default_str();
  forest->add_option("--trees", fo.trees)->capture_default_str();
  forest->add_option("--mtry", fo.mtry, "Features per split (default floor(sqrt(p)))");
  forest->add_option("--weighting", fo.weighting)
      ->check(CLI::IsMember({"none", "inverse_probability"}))
      ->capture_default_str();
  forest->add_option("--repeats", fo.repeats, "Permutation-importance repeats")->capture_default_str();
  forest->add_option("--importance-mode", fo.importance_mode)
      ->check(CLI::IsMember({"shuffle_only", "shuffle_and_refit"}))
      ->capture_default_str();
  forest->add_option("--pd", fo.pd, "pd feature or feature:feature (repeatable; default one curve per feature)");
  forest->add_option("--positive-class", fo.positive_class, "Class whose probability pd reports (default last)");

  PdOptions po;
  auto* pd = app.add_subcommand("pd", "Partial dependence from a saved forest");
  pd->add_option("--forest", po.forest, "Serialized forest")->required()->check(CLI::ExistingFile);
  pd->add_option("--data", po.data, "CSV with the forest's feature columns")->required()->check(CLI::ExistingFile);
  pd->add_option("--features", po.features, "One or two features")->required()->delimiter(',');
  pd->add_option("--grid", po.grids, "Comma-separated grid per feature (repeatable; default deciles)");
  pd->add_option("--positive-class", po.positive_class, "Class whose probability pd reports (default last)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  auto fail = [&](std::string_view kind, const std::string& message) {
    const auto record = error_record(kind, message, command);
    err << record << "\n";
    try {
      write_file(g.out / "error.json", record + "\n");
    } catch (...) {
    }
    return 2;
  };
  try {
    std::error_code ec;
    fs::remove(g.out / "error.json", ec);
    if (command == "score") cmd_score(g, so, out);
    else if (command == "evalmeta") cmd_evalmeta(g, eo, out);
    else if (command == "aggregate") cmd_aggregate(g, ao, out);
    else if (command == "regress") cmd_regress(g, ro, out);
    else if (command == "forest") cmd_forest(g, fo, out);
    else cmd_pd(g, po, out);
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail("io_error", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}

}  // namespace promptsent::cli
