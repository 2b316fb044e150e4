#include "rmc/cascade.hpp"

#include <limits>

namespace rmc {

CascadeCoefficients::CascadeCoefficients(std::size_t n) {
  if (n == 0) {
    throw ValidationError("cascade order n must be at least 1");
  }
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  rows_.reserve(n);
  rows_.push_back({1});
  for (std::size_t i = 2; i <= n; ++i) {
    std::vector<std::uint64_t> row(i, 0);
    for (std::size_t j = 0; j < i; ++j) {
      std::uint64_t acc = 0;
      for (const std::uint64_t term : {j > 0 ? at(i - 1, j - 1) : 0, at(i - 1, j), i > 2 ? at(i - 2, j) : 0}) {
        if (term > kMax - acc) {
          throw NumericalError("cascade coefficient overflow at order " + std::to_string(i));
        }
        acc += term;
      }
      row[j] = acc;
    }
    rows_.push_back(std::move(row));
  }
}

std::uint64_t CascadeCoefficients::at(std::size_t i, std::size_t j) const noexcept {
  if (i == 0 || i > rows_.size() || j >= i) {
    return 0;
  }
  return rows_[i - 1][j];
}

CascadeCoefficients cascade_coefficients(std::size_t n) { return CascadeCoefficients(n); }

VecList compute_errors(const VecList& x_derivs, const VecList& xr_derivs,
                       const CascadeCoefficients& coeffs) {
  const std::size_t n = coeffs.order();
  if (x_derivs.size() != n || xr_derivs.size() != n) {
    throw ValidationError("compute_errors: expected " + std::to_string(n) + " derivatives, got " +
                          std::to_string(x_derivs.size()) + " and " + std::to_string(xr_derivs.size()));
  }
  const Eigen::Index m = x_derivs.front().size();
  VecList e1_derivs;
  e1_derivs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (x_derivs[j].size() != m || xr_derivs[j].size() != m) {
      throw ValidationError("compute_errors: derivative vectors must all have length " + std::to_string(m));
    }
    e1_derivs.push_back(xr_derivs[j] - x_derivs[j]);
  }

  VecList e;
  e.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    Vec ei = Vec::Zero(m);
    for (std::size_t j = 0; j < i; ++j) {
      ei += static_cast<double>(coeffs.at(i, j)) * e1_derivs[j];
    }
    e.push_back(std::move(ei));
  }
  return e;
}

Vec filtered_error(const Vec& en, const Vec& en_dot, const Vec& alpha) {
  if (en.size() != en_dot.size() || en.size() != alpha.size()) {
    throw ValidationError("filtered_error: dimension mismatch");
  }
  if (!(alpha.array() > 0.0).all()) {
    throw ValidationError("filtered_error: alpha must have strictly positive diagonal");
  }
  return en_dot + alpha.cwiseProduct(en);
}

}  // namespace rmc
