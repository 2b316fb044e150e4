#pragma once

#include <cstdint>
#include <vector>

#include "rmc/types.hpp"

namespace rmc {

/// Integer table a(i, j) with e_i = sum_j a(i, j) * e_1^(j), 1 <= i <= n, 0 <= j < i.
///
/// Rows follow the error chain e_2 = e_1' + e_1, e_i = e_{i-1}' + e_{i-1} + e_{i-2},
/// which gives a(i, j) = a(i-1, j-1) + a(i-1, j) + a(i-2, j). Entries are kept as
/// exact integers and only converted at use sites.
class CascadeCoefficients {
 public:
  /// Throws ValidationError for n == 0 and NumericalError if an entry would
  /// overflow 64 bits.
  explicit CascadeCoefficients(std::size_t n);

  std::size_t order() const noexcept { return rows_.size(); }

  /// 1-based row i, 0-based column j. Out-of-triangle indices return 0.
  std::uint64_t at(std::size_t i, std::size_t j) const noexcept;

  /// Row i (1-based), i entries long.
  const std::vector<std::uint64_t>& row(std::size_t i) const { return rows_.at(i - 1); }

 private:
  std::vector<std::vector<std::uint64_t>> rows_;
};

CascadeCoefficients cascade_coefficients(std::size_t n);

/// e_1 ... e_n from the state derivatives (x, ..., x^(n-1)) and the matching
/// reference derivatives. e_1 = x_r - x.
VecList compute_errors(const VecList& x_derivs, const VecList& xr_derivs,
                       const CascadeCoefficients& coeffs);

/// e_1' ... e_n' from the shifted derivative lists (x', ..., x^(n)).
inline VecList compute_error_rates(const VecList& x_derivs_shifted, const VecList& xr_derivs_shifted,
                                   const CascadeCoefficients& coeffs) {
  return compute_errors(x_derivs_shifted, xr_derivs_shifted, coeffs);
}

/// r = e_n' + alpha e_n with alpha given by its (strictly positive) diagonal.
Vec filtered_error(const Vec& en, const Vec& en_dot, const Vec& alpha);

}  // namespace rmc
