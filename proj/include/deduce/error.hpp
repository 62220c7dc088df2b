#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deduce {

// Stable machine-readable error codes. Their names are part of the HTTP API.
enum class ErrorCode {
  InvalidPath,
  SortMismatch,
  HolePresent,
  ParseError,
  SortError,
  NotClosed,
  NotFound,
  IllFormedGoal,
  OutOfScope,
  NotApplicable,
  StaleState,
  NothingToUndo,
  NothingToRedo,
  EmptyBranch,
  ReplayError,
  Unauthorized,
  InvalidGoal,
  UnknownLemma,
  BadRequest,
  Conflict,
  Storage,
};

std::string_view error_code_name(ErrorCode code);

// Base exception. Carries a message-catalog key and its arguments so that
// front ends can localize; what() holds an English fallback.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string key, std::vector<std::string> args = {},
        std::string detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& key() const noexcept { return key_; }
  const std::vector<std::string>& args() const noexcept { return args_; }

 private:
  ErrorCode code_;
  std::string key_;
  std::vector<std::string> args_;
};

// Raised by the parser. offset is a byte offset into the normalized input.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t offset, std::string key,
             std::vector<std::string> args, std::string detail);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Raised by replay; index is the 0-based position of the offending record.
class ReplayError : public Error {
 public:
  ReplayError(std::size_t index, const Error& cause);
  std::size_t index() const noexcept { return index_; }
  ErrorCode cause_code() const noexcept { return cause_code_; }

 private:
  std::size_t index_;
  ErrorCode cause_code_;
};

}  // namespace deduce
