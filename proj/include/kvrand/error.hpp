#ifndef KVRAND_ERROR_HPP
#define KVRAND_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvrand {

enum class ErrorCode {
  TooFewElements,
  NonFiniteValue,
  InvalidRange,
  NonFiniteFunctionValue,
  NoRootFound,
  NoSignChange,
  EmptyGrid,
  OutOfRange,
  NotMonotone,
  SyntaxError,
  UnknownIdentifier,
  DensityEvaluationError,
  AllZeroDensity,
  DegenerateBracket,
  EmptyTable,
  BadEdges,
  EmptySample,
  ZeroExpected,
  BadArtifact,
  IOError,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with the offending character offset and the tokens that
/// would have been accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected,
              const std::string& what)
      : Error(ErrorCode::SyntaxError, what),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

}  // namespace kvrand

#endif  // KVRAND_ERROR_HPP
