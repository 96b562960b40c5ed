#pragma once

#include <stdexcept>
#include <string>

namespace qcopt {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotStronglyConnected : Error {
  explicit NotStronglyConnected(const std::string& what) : Error(what) {}
};

struct IndexOutOfRange : Error {
  explicit IndexOutOfRange(const std::string& what) : Error(what) {}
};

struct BadLength : Error {
  explicit BadLength(const std::string& what) : Error(what) {}
};

struct MissingWidth : Error {
  explicit MissingWidth(const std::string& what) : Error(what) {}
};

struct StepSizeTooLarge : Error {
  explicit StepSizeTooLarge(const std::string& what) : Error(what) {}
};

struct NonConvergence : Error {
  explicit NonConvergence(const std::string& what) : Error(what) {}
};

struct DegenerateStart : Error {
  explicit DegenerateStart(const std::string& what) : Error(what) {}
};

struct Unsupported : Error {
  explicit Unsupported(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

struct MissingTrajectory : Error {
  explicit MissingTrajectory(const std::string& what) : Error(what) {}
};

// A conserved quantity or agreement guarantee broke mid-protocol. Always a
// bug, never expected behavior.
struct ProtocolViolation : Error {
  explicit ProtocolViolation(const std::string& what) : Error(what) {}
};

}  // namespace qcopt
