#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace promptsent {

// Root of every exception thrown by the library. kind() is a stable
// machine-readable tag used in CLI error records.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "invalid_argument"; }
};

// Malformed input file or record. line is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line ? message + " (line " + std::to_string(line) + ")" : message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  std::string_view kind() const noexcept override { return "parse_error"; }

 private:
  std::size_t line_;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(std::string id)
      : Error("duplicate document id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }
  std::string_view kind() const noexcept override { return "duplicate_id"; }

 private:
  std::string id_;
};

class TransportError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "transport_error"; }
};

class ContextOverflowError : public Error {
 public:
  ContextOverflowError(std::size_t prompt_tokens, std::size_t context_size)
      : Error("prompt needs " + std::to_string(prompt_tokens) +
              " tokens but the context holds " + std::to_string(context_size)),
        prompt_tokens_(prompt_tokens),
        context_size_(context_size) {}
  std::size_t prompt_tokens() const noexcept { return prompt_tokens_; }
  std::size_t context_size() const noexcept { return context_size_; }
  std::string_view kind() const noexcept override { return "context_overflow"; }

 private:
  std::size_t prompt_tokens_;
  std::size_t context_size_;
};

class UnsupportedCapabilityError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "unsupported_capability"; }
};

// Instruct reply that is not a bare number in [-1, 1].
class ReplyFormatError : public Error {
 public:
  explicit ReplyFormatError(std::string raw_reply)
      : Error("reply is not a number in [-1, 1]: '" + raw_reply + "'"),
        raw_reply_(std::move(raw_reply)) {}
  const std::string& raw_reply() const noexcept { return raw_reply_; }
  std::string_view kind() const noexcept override { return "reply_format"; }

 private:
  std::string raw_reply_;
};

class AbsentSurfaceError : public Error {
 public:
  explicit AbsentSurfaceError(std::vector<std::string> surfaces);
  const std::vector<std::string>& surfaces() const noexcept { return surfaces_; }
  std::string_view kind() const noexcept override { return "absent_surface"; }

 private:
  std::vector<std::string> surfaces_;
};

class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "degenerate_distribution"; }
};

class MissingLabelError : public Error {
 public:
  explicit MissingLabelError(std::string label)
      : Error("label '" + label + "' not present"), label_(std::move(label)) {}
  const std::string& label() const noexcept { return label_; }
  std::string_view kind() const noexcept override { return "missing_label"; }

 private:
  std::string label_;
};

class RankDeficiencyError : public Error {
 public:
  explicit RankDeficiencyError(std::vector<std::string> columns);
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::string_view kind() const noexcept override { return "rank_deficiency"; }

 private:
  std::vector<std::string> columns_;
};

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline AbsentSurfaceError::AbsentSurfaceError(std::vector<std::string> surfaces)
    : Error("surfaces absent from the vocabulary: " + join(surfaces, ", ")),
      surfaces_(std::move(surfaces)) {}

inline RankDeficiencyError::RankDeficiencyError(std::vector<std::string> columns)
    : Error("design matrix is rank deficient; collinear columns: " + join(columns, ", ")),
      columns_(std::move(columns)) {}

}  // namespace promptsent
