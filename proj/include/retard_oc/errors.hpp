#pragma once

#include <stdexcept>
#include <string>

namespace retard_oc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RejectsIncommensurable : public Error {
 public:
  using Error::Error;
};

class RejectsZeroDelays : public Error {
 public:
  RejectsZeroDelays() : Error("state and control delays are both zero") {}
};

/// A trajectory was evaluated outside its domain, or a delayed/advanced
/// lookup hit a segment that has not been finalized yet.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class NonFiniteDerivative : public Error {
 public:
  using Error::Error;
};

class UnboundedCriterion : public Error {
 public:
  using Error::Error;
};

class RejectsMismatchedLattice : public Error {
 public:
  using Error::Error;
};

class SeamMismatch : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class UnboundedDescent : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnknownProblem : public Error {
 public:
  explicit UnknownProblem(const std::string& name)
      : Error("unknown registered problem '" + name + "'") {}
};

}  // namespace retard_oc
