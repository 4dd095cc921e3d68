#pragma once

#include <stdexcept>
#include <string>

namespace mlsc {

enum class ErrorCode {
  kParse,             // malformed input record
  kSelfLoop,          // edge list names a self-loop
  kBounds,            // index out of range
  kParameter,         // invalid model / algorithm parameter
  kDimension,         // incompatible sizes
  kContract,          // violated precondition on numeric input
  kDegeneratePruning, // pruning kept no node
  kDegenerateEmbedding,
  kDetectionFailure,
  kConvergence,
  kEmptyCommunity,
  kSize,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mlsc
