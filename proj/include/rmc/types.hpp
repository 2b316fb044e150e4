#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rmc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Ordered list of vectors, e.g. (x, x', ..., x^(n-1)) or (e_1, ..., e_n).
using VecList = std::vector<Vec>;

/// Bad arguments, dimensions or configuration values. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while evaluating the numerics. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A leading principal minor vanished (1-based index k).
class SingularMinor : public NumericalError {
 public:
  explicit SingularMinor(std::size_t k)
      : NumericalError("leading principal minor " + std::to_string(k) + " is singular"), k_(k) {}

  std::size_t index() const noexcept { return k_; }

 private:
  std::size_t k_;
};

class NonFiniteState : public NumericalError {
 public:
  NonFiniteState(double t, const std::string& what)
      : NumericalError("non-finite " + what + " at t = " + std::to_string(t)), t_(t) {}

  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// Componentwise signum with sgn(0) = 0.
inline double sgn(double v) { return static_cast<double>((0.0 < v) - (v < 0.0)); }

inline Vec sgn(const Vec& v) { return v.unaryExpr([](double a) { return sgn(a); }); }

}  // namespace rmc
