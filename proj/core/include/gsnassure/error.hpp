#pragma once
// Error codes for every throwing operation in the library. DSL parse errors
// are data, not exceptions (see dsl.hpp).

#include <stdexcept>
#include <string>

namespace gsn {

enum class ErrorCode {
  DuplicateId,
  DuplicateEdge,
  MalformedNode,
  UnknownNode,
  UnknownEndpoint,
  UnknownEdge,
  IncompatibleKinds,
  WouldCreateCycle,
  NodeHasEdges,
  InvalidGraph,
  StaleAssignment,
  InvalidChange,
  EmptyCoverageWhileActive,
  NotASolution,
  UnknownGuardrail,
  MalformedEvent,
  UnknownIncident,
  NotSerious,
  MismatchedAssignment,
  MismatchedInputs,
  InvalidConfig,
  IoError,
};

const char* error_code_name(ErrorCode code);

class GsnError : public std::runtime_error {
public:
  GsnError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace gsn
