#ifndef SATK_ERRORS_HPP
#define SATK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace satk {

// Invalid model or contour set-up (bad points, intersecting contours, ...).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was called outside its stated range of validity.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computed quantity failed its internal consistency check.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace satk

#endif
