#include "promptsent/http_backend.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "promptsent/errors.hpp"

namespace promptsent {

using json = nlohmann::json;

std::vector<std::string> surface_variants(std::string_view surface, SurfaceVariants variants) {
  std::vector<std::string> out;
  auto add = [&](std::string s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  };
  const std::string bare(surface);
  add(bare);
  std::string capital = bare;
  if (!capital.empty()) {
    capital[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(capital[0])));
  }
  if (variants.leading_space) add(" " + bare);
  if (variants.capitalized) {
    add(capital);
    if (variants.leading_space) add(" " + capital);
  }
  return out;
}

void BackendConfig::validate() const {
  if (endpoint_url.empty()) throw InvalidArgument("backend endpoint_url is empty");
  if (max_retries < 0) throw InvalidArgument("max_retries must be >= 0");
  if (top_logprobs < 1) throw InvalidArgument("top_logprobs must be >= 1");
  if (max_requests_per_second < 0) throw InvalidArgument("max_requests_per_second must be >= 0");
}

std::optional<std::string> auth_token_from_env(const std::string& variable) {
  const char* value = std::getenv(variable.c_str());
  if (!value || !*value) return std::nullopt;
  return std::string(value);
}

RateLimiter::RateLimiter(double requests_per_second) {
  if (requests_per_second > 0) {
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / requests_per_second));
  }
}

void RateLimiter::acquire() {
  if (interval_.count() == 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host:port
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  static const std::regex pattern(R"(^(https?)://([^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) throw InvalidArgument("malformed URL '" + url + "'");
  if (m[1] == "https") {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    throw UnsupportedCapabilityError("https endpoints need a build with OpenSSL support: " + url);
#endif
  }
  return {m[1].str() + "://" + m[2].str(), m[3].matched ? m[3].str() : "/"};
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

JsonHttpClient::JsonHttpClient(BackendConfig config)
    : config_(std::move(config)),
      limiter_(std::make_unique<RateLimiter>(config_.max_requests_per_second)) {
  config_.validate();
}

std::string JsonHttpClient::post(const std::string& url, const std::string& body) const {
  const auto target = split_url(url);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.retry_backoff * attempt);
    limiter_->acquire();
    httplib::Client cli(target.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (config_.auth_token) headers.emplace("Authorization", "Bearer " + *config_.auth_token);
    auto res = cli.Post(target.path, headers, body, "application/json");
    if (!res) {
      last_error = "request to " + url + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_error = "HTTP " + std::to_string(res->status) + " from " + url + ": " + res->body;
    if (!retryable_status(res->status)) break;
  }
  throw TransportError(last_error);
}

namespace {

json parse_body(const std::string& body, const char* what) {
  try {
    return json::parse(body);
  } catch (const json::parse_error&) {
    throw TransportError(std::string("endpoint returned non-JSON ") + what + " response");
  }
}

const json* first_logprobs(const json& response) {
  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    return nullptr;
  }
  const auto& choice = response["choices"][0];
  if (!choice.contains("logprobs") || !choice["logprobs"].is_object()) return nullptr;
  return &choice["logprobs"];
}

// top_logprobs[0] as token -> logprob. Accepts the object form
// {"tok": lp, ...} and the list form [{"token": "tok", "logprob": lp}, ...].
std::unordered_map<std::string, double> top_k_map(const json& response) {
  const json* lp = first_logprobs(response);
  if (!lp || !lp->contains("top_logprobs") || !(*lp)["top_logprobs"].is_array() ||
      (*lp)["top_logprobs"].empty()) {
    throw TransportError("completion response lacks choices[0].logprobs.top_logprobs");
  }
  const auto& first = (*lp)["top_logprobs"][0];
  std::unordered_map<std::string, double> out;
  if (first.is_object()) {
    for (const auto& [token, value] : first.items()) out[token] = value.get<double>();
  } else if (first.is_array()) {
    for (const auto& item : first) out[item.at("token").get<std::string>()] = item.at("logprob").get<double>();
  } else {
    throw TransportError("unrecognised top_logprobs layout");
  }
  return out;
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

}  // namespace

CompletionBackend::CompletionBackend(BackendConfig config) : client_(std::move(config)) {}

CompletionBackend::EchoProbe CompletionBackend::echo_query(std::string_view prompt,
                                                           const std::string& variant) const {
  const auto& cfg = client_.config();
  json request = {{"prompt", std::string(prompt) + variant},
                  {"model", cfg.model_name},
                  {"max_tokens", 0},
                  {"logprobs", 1},
                  {"echo", true}};
  const auto response = parse_body(client_.post(cfg.endpoint_url, request.dump()), "echo");
  const json* lp = first_logprobs(response);
  if (!lp || !lp->contains("tokens") || !lp->contains("token_logprobs")) {
    throw UnsupportedCapabilityError(
        "endpoint does not return echoed token logprobs; cannot score '" + variant + "'");
  }
  const auto& tokens = (*lp)["tokens"];
  const auto& logprobs = (*lp)["token_logprobs"];
  std::vector<std::size_t> offsets;
  if (lp->contains("text_offset") && (*lp)["text_offset"].is_array()) {
    for (const auto& o : (*lp)["text_offset"]) offsets.push_back(o.get<std::size_t>());
  } else {
    std::size_t pos = 0;
    for (const auto& t : tokens) {
      offsets.push_back(pos);
      pos += t.get<std::string>().size();
    }
  }
  const std::size_t boundary_bytes = prompt.size();
  const std::size_t boundary_chars = utf8_length(prompt);
  for (std::size_t i = 0; i < tokens.size() && i < offsets.size() && i < logprobs.size(); ++i) {
    if (offsets[i] != boundary_bytes && offsets[i] != boundary_chars) continue;
    if (logprobs[i].is_null()) break;
    const auto token = tokens[i].get<std::string>();
    EchoProbe probe;
    probe.logprob = logprobs[i].get<double>();
    probe.status = token == variant ? VocabStatus::single_token : VocabStatus::multi_token;
    return probe;
  }
  // The variant merges with the end of the prompt into one token.
  return EchoProbe{};
}

std::vector<TokenProbe> CompletionBackend::next_token_mass(
    std::string_view prompt, std::span<const std::string> surfaces) const {
  if (prompt.empty()) throw InvalidArgument("next_token_mass: empty prompt");
  if (surfaces.empty()) throw InvalidArgument("next_token_mass: no surfaces");
  const auto& cfg = client_.config();
  if (cfg.context_size && can_tokenize()) {
    const auto tokens = count_tokens(prompt);
    if (tokens > *cfg.context_size) throw ContextOverflowError(tokens, *cfg.context_size);
  }
  json request = {{"prompt", std::string(prompt)},
                  {"model", cfg.model_name},
                  {"max_tokens", 1},
                  {"logprobs", cfg.top_logprobs},
                  {"echo", false}};
  const auto top = top_k_map(parse_body(client_.post(cfg.endpoint_url, request.dump()), "completion"));

  std::map<std::string, EchoProbe> echo_cache;
  std::vector<TokenProbe> probes;
  probes.reserve(surfaces.size());
  for (const auto& surface : surfaces) {
    TokenProbe probe{surface, 0.0, VocabStatus::absent};
    if (surface.empty()) {
      probes.push_back(std::move(probe));
      continue;
    }
    bool any_single = false;
    bool any_multi = false;
    for (const auto& variant : surface_variants(surface, cfg.variants)) {
      if (auto it = top.find(variant); it != top.end()) {
        probe.probability += std::exp(it->second);
        any_single = true;
        continue;
      }
      if (!cfg.explicit_logprob_queries) {
        throw UnsupportedCapabilityError("'" + variant +
                                         "' is outside the returned top-k and explicit logprob "
                                         "queries are disabled");
      }
      auto cached = echo_cache.find(variant);
      if (cached == echo_cache.end()) {
        cached = echo_cache.emplace(variant, echo_query(prompt, variant)).first;
      }
      const auto& echo = cached->second;
      if (echo.status == VocabStatus::absent) continue;
      probe.probability += std::exp(echo.logprob);
      (echo.status == VocabStatus::single_token ? any_single : any_multi) = true;
    }
    probe.status = any_single  ? VocabStatus::single_token
                   : any_multi ? VocabStatus::multi_token
                               : VocabStatus::absent;
    if (!std::isfinite(probe.probability) || probe.probability < 0.0) {
      throw TransportError("non-finite probability for '" + surface + "'");
    }
    probe.probability = std::min(probe.probability, 1.0);
    probes.push_back(std::move(probe));
  }
  return probes;
}

std::size_t CompletionBackend::count_tokens(std::string_view text) const {
  const auto& cfg = client_.config();
  if (cfg.tokenize_url.empty()) {
    throw UnsupportedCapabilityError("backend 'http' has no tokenize endpoint configured");
  }
  json request = {{"model", cfg.model_name}, {"prompt", std::string(text)}, {"content", std::string(text)}};
  const auto response = parse_body(client_.post(cfg.tokenize_url, request.dump()), "tokenize");
  if (response.contains("tokens") && response["tokens"].is_array()) return response["tokens"].size();
  if (response.contains("count")) return response["count"].get<std::size_t>();
  throw TransportError("tokenize response lacks 'tokens' or 'count'");
}

VocabReport CompletionBackend::vocab_check(std::span<const std::string> surfaces) const {
  if (!can_tokenize()) {
    throw UnsupportedCapabilityError("backend 'http' has no tokenize endpoint configured");
  }
  VocabReport report;
  for (const auto& surface : surfaces) {
    if (report.status(surface)) continue;
    VocabStatus status = VocabStatus::absent;
    if (!surface.empty()) {
      const auto bare = count_tokens(surface);
      const auto spaced = count_tokens(" " + surface);
      if (bare == 1 || spaced == 1) {
        status = VocabStatus::single_token;
      } else if (bare > 1 || spaced > 1) {
        status = VocabStatus::multi_token;
      }
    }
    report.entries.push_back({surface, status});
  }
  return report;
}

InstructPrompt parse_instruct_prompt(std::string_view json_text) {
  try {
    const auto j = json::parse(json_text);
    InstructPrompt p{j.at("system_prompt").get<std::string>(), j.at("human_template").get<std::string>(),
                     j.value("format_instructions", std::string{})};
    if (p.human_template.find("[X]") == std::string::npos)
      throw ParseError("instruct prompt: human_template has no [X] slot", 0);
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("instruct prompt: ") + e.what(), 0);
  }
}

InstructPrompt load_instruct_prompt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open instruct prompt '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instruct_prompt(ss.str());
}

std::optional<double> parse_score_reply(std::string_view reply) {
  static const std::regex pattern(R"(^\s*([+-]?\d+(\.\d+)?)\s*$)");
  const std::string text(reply);
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) return std::nullopt;
  const double value = std::strtod(m[1].str().c_str(), nullptr);
  if (!(value >= -1.0 && value <= 1.0)) return std::nullopt;
  return value;
}

InstructClient::InstructClient(BackendConfig config) : client_(std::move(config)) {}

std::string InstructClient::complete(std::string_view system_message,
                                     std::string_view user_message) const {
  const auto& cfg = client_.config();
  json request = {{"model", cfg.model_name},
                  {"messages",
                   json::array({{{"role", "system"}, {"content", std::string(system_message)}},
                                {{"role", "user"}, {"content", std::string(user_message)}}})},
                  {"temperature", 0}};
  const auto response = parse_body(client_.post(cfg.endpoint_url, request.dump()), "chat");
  try {
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw TransportError("chat response lacks choices[0].message.content");
  }
}

double instruct_score(const InstructClient& client, std::string_view system_prompt,
                      std::string_view human_prompt_template, const Document& doc,
                      std::string_view format_instructions) {
  std::string user(human_prompt_template);
  const auto slot = user.find("[X]");
  if (slot == std::string::npos) throw InvalidArgument("human prompt template has no [X] slot");
  user.replace(slot, 3, doc.text);
  if (!format_instructions.empty()) {
    user += "\n\n";
    user += format_instructions;
  }
  std::string last_reply;
  for (int attempt = 0; attempt <= client.config().max_retries; ++attempt) {
    last_reply = client.complete(system_prompt, user);
    if (auto value = parse_score_reply(last_reply)) return *value;
  }
  throw ReplyFormatError(last_reply);
}

double instruct_score(const InstructClient& client, const InstructPrompt& prompt,
                      const Document& doc) {
  return instruct_score(client, prompt.system_prompt, prompt.human_template, doc,
                        prompt.format_instructions);
}

}  // namespace promptsent
