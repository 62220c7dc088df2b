#include "deduce/error.hpp"

#include <utility>

namespace deduce {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::SortMismatch: return "SortMismatch";
    case ErrorCode::HolePresent: return "HolePresent";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SortError: return "SortError";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::IllFormedGoal: return "IllFormedGoal";
    case ErrorCode::OutOfScope: return "OutOfScope";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::StaleState: return "StaleState";
    case ErrorCode::NothingToUndo: return "NothingToUndo";
    case ErrorCode::NothingToRedo: return "NothingToRedo";
    case ErrorCode::EmptyBranch: return "EmptyBranch";
    case ErrorCode::ReplayError: return "ReplayError";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::InvalidGoal: return "InvalidGoal";
    case ErrorCode::UnknownLemma: return "UnknownLemma";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::Storage: return "Storage";
  }
  return "Unknown";
}

namespace {

std::string fallback_text(ErrorCode code, const std::string& key,
                          const std::string& detail) {
  std::string out(error_code_name(code));
  out += ": ";
  out += detail.empty() ? key : detail;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string key, std::vector<std::string> args,
             std::string detail)
    : std::runtime_error(fallback_text(code, key, detail)),
      code_(code),
      key_(std::move(key)),
      args_(std::move(args)) {}

ParseError::ParseError(ErrorCode code, std::size_t offset, std::string key,
                       std::vector<std::string> args, std::string detail)
    : Error(code, std::move(key), std::move(args),
            detail + " (at offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

ReplayError::ReplayError(std::size_t index, const Error& cause)
    : Error(ErrorCode::ReplayError, cause.key(), cause.args(),
            "step " + std::to_string(index + 1) + ": " + cause.what()),
      index_(index),
      cause_code_(cause.code()) {}

}  // namespace deduce
