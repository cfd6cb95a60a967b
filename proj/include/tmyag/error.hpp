#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace tmyag {

/// Base class for every error raised by the library. `name()` is the stable
/// identifier printed by the command line tool (e.g. "InvariantViolation").
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define TMYAG_DEFINE_ERROR(Type)                                   \
  class Type : public Error {                                      \
   public:                                                         \
    explicit Type(const std::string& what) : Error(#Type, what) {} \
  }

TMYAG_DEFINE_ERROR(MissingField);
TMYAG_DEFINE_ERROR(IndexOutOfRange);
TMYAG_DEFINE_ERROR(ZeroField);
TMYAG_DEFINE_ERROR(ZeroDirection);
TMYAG_DEFINE_ERROR(NonpositiveSplitting);
TMYAG_DEFINE_ERROR(NonpositiveTemperature);
TMYAG_DEFINE_ERROR(NonpositiveInput);
TMYAG_DEFINE_ERROR(NonPositiveRateEstimate);
TMYAG_DEFINE_ERROR(InvalidGrid);
TMYAG_DEFINE_ERROR(DegenerateInit);
TMYAG_DEFINE_ERROR(SingularNormalEquations);
TMYAG_DEFINE_ERROR(BoundsViolation);
TMYAG_DEFINE_ERROR(InsufficientCoverage);
TMYAG_DEFINE_ERROR(InvalidDataset);
TMYAG_DEFINE_ERROR(FileNotFound);
TMYAG_DEFINE_ERROR(InvalidProblem);

#undef TMYAG_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("ParseError", what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string field, double got, std::string expected)
      : Error("InvariantViolation", "invariant violated: " + field + " = " + format(got) +
                                        ", expected " + expected),
        field_(std::move(field)),
        got_(got),
        expected_(std::move(expected)) {}

  const std::string& field() const noexcept { return field_; }
  double got() const noexcept { return got_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
  }

  std::string field_;
  double got_;
  std::string expected_;
};

}  // namespace tmyag
