#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptsent/backend.hpp"
#include "promptsent/corpus.hpp"

namespace promptsent {

// Spellings queried and summed for every verbalizer word. Generative
// tokenizers treat "word", " word", "Word" and " Word" as distinct tokens.
struct SurfaceVariants {
  bool leading_space = true;
  bool capitalized = true;
};

// Distinct spellings of surface under the variant rules, bare form first.
std::vector<std::string> surface_variants(std::string_view surface, SurfaceVariants variants);

struct BackendConfig {
  std::string endpoint_url;  // completion or chat endpoint, http://host:port/path
  std::string model_name;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  int top_logprobs = 20;
  std::optional<std::string> auth_token;
  std::string tokenize_url;  // optional; enables vocab_check and context checks
  std::optional<std::size_t> context_size;
  SurfaceVariants variants;
  // Ask the endpoint for the logprob of surfaces missing from the top-k by
  // echoing prompt+surface. When false such surfaces are an error.
  bool explicit_logprob_queries = true;
  double max_requests_per_second = 0.0;  // 0 disables rate limiting
  std::chrono::milliseconds retry_backoff{250};

  void validate() const;
};

// Bearer token from the named environment variable, if set and non-empty.
std::optional<std::string> auth_token_from_env(const std::string& variable);

// Minimum spacing between requests, shared by all threads using one client.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();

 private:
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
  std::mutex mutex_;
};

// POSTs JSON with bearer auth, retrying transport failures, 429 and 5xx
// responses up to max_retries times.
class JsonHttpClient {
 public:
  explicit JsonHttpClient(BackendConfig config);
  std::string post(const std::string& url, const std::string& body) const;
  const BackendConfig& config() const noexcept { return config_; }

 private:
  BackendConfig config_;
  std::unique_ptr<RateLimiter> limiter_;
};

// Completion endpoint speaking
//   POST {prompt, model, max_tokens, logprobs, echo}
//     -> {choices:[{logprobs:{top_logprobs:[{token: logprob, ...}]}}]}
// Surfaces outside the returned top-k are resolved by an echo query on
// prompt+surface (max_tokens 0), reading the logprob of the first token
// that starts at the prompt boundary.
class CompletionBackend final : public Backend {
 public:
  explicit CompletionBackend(BackendConfig config);

  std::vector<TokenProbe> next_token_mass(std::string_view prompt,
                                          std::span<const std::string> surfaces) const override;
  VocabReport vocab_check(std::span<const std::string> surfaces) const override;
  std::size_t count_tokens(std::string_view text) const override;
  bool can_tokenize() const noexcept override { return !client_.config().tokenize_url.empty(); }
  std::optional<std::size_t> context_size() const noexcept override {
    return client_.config().context_size;
  }
  std::string name() const override { return "http"; }

 private:
  struct EchoProbe {
    double logprob = 0.0;
    VocabStatus status = VocabStatus::absent;
  };
  EchoProbe echo_query(std::string_view prompt, const std::string& variant) const;

  JsonHttpClient client_;
};

struct InstructPrompt {
  std::string system_prompt;
  std::string human_template;  // contains one [X] slot
  std::string format_instructions;
};

// JSON {"system_prompt", "human_template", "format_instructions"}; the
// bundled letter-scoring prompt is data/prompts/instruct.json.
InstructPrompt parse_instruct_prompt(std::string_view json_text);
InstructPrompt load_instruct_prompt(const std::filesystem::path& path);

// Strict reply grammar: optional sign, digits, optional '.' and digits,
// surrounded only by whitespace, value in [-1, 1].
std::optional<double> parse_score_reply(std::string_view reply);

// Chat endpoint speaking
//   POST {model, messages:[{role, content}...]} -> {choices:[{message:{content}}]}
class InstructClient {
 public:
  explicit InstructClient(BackendConfig config);

  std::string complete(std::string_view system_message, std::string_view user_message) const;
  const BackendConfig& config() const noexcept { return client_.config(); }

 private:
  JsonHttpClient client_;
};

// Sends the system prompt and the human prompt with [X] replaced by the
// document text (format instructions appended to the user turn). Replies that
// do not parse are retried up to max_retries times, then ReplyFormatError.
double instruct_score(const InstructClient& client, std::string_view system_prompt,
                      std::string_view human_prompt_template, const Document& doc,
                      std::string_view format_instructions);
double instruct_score(const InstructClient& client, const InstructPrompt& prompt,
                      const Document& doc);

}  // namespace promptsent
