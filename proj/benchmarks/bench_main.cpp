#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "promptsent/backend.hpp"
#include "promptsent/corpus.hpp"
#include "promptsent/forest.hpp"
#include "promptsent/lexical.hpp"
#include "promptsent/prompt.hpp"
#include "promptsent/prompt_spec.hpp"
#include "promptsent/stats.hpp"

using namespace promptsent;

namespace {

std::string letter(std::mt19937_64& rng, std::size_t words) {
  static const std::vector<std::string> bank = {"the", "candidate", "is", "an", "excellent", "careful",
                                                "economist", "whose", "work", "on", "labor", "markets",
                                                "shows", "rigorous", "and", "original", "thinking."};
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += bank[rng() % bank.size()];
  }
  return s;
}

Dataset forest_data(std::size_t n, std::size_t p) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Dataset d;
  d.class_names = {"no", "yes"};
  for (std::size_t f = 0; f < p; ++f) d.features.push_back({"x" + std::to_string(f), FeatureKind::continuous, {}, {}});
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& f : d.features) f.values.push_back(u(rng));
    d.labels.push_back(d.features[0].values.back() + 0.3 * d.features[1].values.back() > 0 ? 1 : 0);
  }
  return d;
}

}  // namespace

static void BM_MockScoreLetter(benchmark::State& state) {
  const MockBackend backend(42);
  PromptSpec spec = load_prompt_spec(PROMPTSENT_BENCH_DATA_DIR "/prompts/sentiment.json");
  const PromptScorer scorer(backend, spec);
  std::mt19937_64 rng(1);
  Corpus c;
  c.add({"L1", letter(rng, static_cast<std::size_t>(state.range(0))), "c1", std::nullopt, {}, 0});
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score(c[0]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MockScoreLetter)->Arg(300)->Arg(3000);

static void BM_LexicalPreprocess(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto text = letter(rng, 1000);
  const StopwordSet stop;
  for (auto _ : state) benchmark::DoNotOptimize(preprocess(text, stop, true));
}
BENCHMARK(BM_LexicalPreprocess);

static void BM_OlsCluster(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(n, 6);
  Eigen::VectorXd y(n);
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (int j = 1; j < 6; ++j) X(i, j) = z(rng);
    y(i) = X.row(i).sum() + z(rng);
    ids.push_back("g" + std::to_string(i % 40));
  }
  for (auto _ : state) {
    const auto fit = ols_fit(X, y);
    benchmark::DoNotOptimize(cluster_se(X, fit.residuals, ids, fit.xtx_inv));
  }
}
BENCHMARK(BM_OlsCluster)->Arg(500)->Arg(5000);

static void BM_ForestFit(benchmark::State& state) {
  const auto data = forest_data(static_cast<std::size_t>(state.range(0)), 6);
  RFConfig cfg;
  cfg.seed = 7;
  cfg.min_leaf = 2;
  cfg.min_split = 5;
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(data, cfg));
}
BENCHMARK(BM_ForestFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
