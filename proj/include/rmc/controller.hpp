#pragma once

#include "rmc/types.hpp"

namespace rmc {

/// K = I + kp I + diag(kd_1, ..., kd_{m-1}, 0), returned as its diagonal.
Vec compose_K(double kp, const Vec& kd);

/// Controller gains. All matrices are diagonal and stored by their diagonals.
struct GainSet {
  Vec alpha;  // 1/s, strictly positive
  double kp = 0.0;
  Vec kd;     // m - 1 entries
  Vec C;      // strictly positive
  Vec D;      // +-1 entries, sign structure of the input gain

  std::size_t dim() const noexcept { return static_cast<std::size_t>(alpha.size()); }
  Vec K() const { return compose_K(kp, kd); }

  /// Dimension and positivity checks; throws ValidationError naming the field.
  void validate() const;
};

/// Integrator states of the control law, created once at t0.
class ControllerState {
 public:
  /// Pi(t0) = 0, int e_n(t0) = 0, e_n(t0) frozen.
  static ControllerState initial(const Vec& en0);

  ControllerState(Vec pi, Vec int_en, Vec en0);

  const Vec& pi() const noexcept { return pi_; }
  const Vec& int_en() const noexcept { return int_en_; }
  const Vec& en0() const noexcept { return en0_; }

  /// Same en0 with new integrator values; used by the integration loop.
  ControllerState with_integrators(Vec pi, Vec int_en) const;

 private:
  Vec pi_;
  Vec int_en_;
  Vec en0_;
};

/// tau = D K (e_n - e_n(t0) + alpha int e_n) + D Pi.
Vec control_input(const Vec& en, const ControllerState& state, const GainSet& gains);

struct ControllerRates {
  Vec pi_dot;      // C Sgn(e_n)
  Vec int_en_dot;  // e_n
};

ControllerRates controller_state_derivative(const Vec& en, const GainSet& gains);

/// Pass/fail with signed margin; margin >= 0 iff the condition holds.
struct GainCheck {
  bool pass = false;
  double margin = 0.0;
};

/// lambda_min(alpha) >= 1/2.
GainCheck check_alpha(const Vec& alpha);

/// Empirical or user-supplied bounding constants used by the switching-gain conditions.
struct BoundEstimates {
  Vec zeta_nbar;   // m entries, >= 0
  Mat zeta_omega;  // m x m, zero on and below the diagonal
  double gamma1 = 0.0;
  double gamma2 = 0.0;

  void validate(std::size_t m) const;
};

/// Smallest C satisfying the switching-gain conditions with equality, computed
/// backwards from C_m.
Vec minimal_C(const BoundEstimates& bounds, const Vec& alpha);

struct CCheck {
  bool pass = false;
  Vec minimum;
  Vec margin;  // C - minimum
};

CCheck validate_C(const Vec& C, const BoundEstimates& bounds, const Vec& alpha);

/// zeta_L = g1 sum_{i<j} zO_ij C_j + g1 sum_i zN_i + sum_i C_i |e_n,i(t0)|.
double zeta_L(const BoundEstimates& bounds, const Vec& C, const Vec& en0);

}  // namespace rmc
