#pragma once

#include <functional>
#include <string>

#include "rmc/types.hpp"

namespace rmc {

/// True dynamics x^(n) = h(X) + g(X) tau with X = (x, x', ..., x^(n-1)) stacked.
/// Only D_true is visible to the controller.
struct PlantModel {
  std::string name;
  std::size_t m = 0;
  std::size_t n = 0;
  std::function<Vec(const Vec&)> h;
  std::function<Mat(const Vec&)> g;
  Vec D_true;

  std::size_t state_size() const noexcept { return m * n; }

  /// x^(n) for state X under input tau.
  Vec highest_derivative(const Vec& X, const Vec& tau) const { return h(X) + g(X) * tau; }
};

/// x_r(t) and its derivatives up to max_order, all in internal units.
class ReferenceTrajectory {
 public:
  using Fn = std::function<Vec(std::size_t order, double t)>;

  ReferenceTrajectory(std::string name, std::size_t m, std::size_t max_order, Fn fn)
      : name_(std::move(name)), m_(m), max_order_(max_order), fn_(std::move(fn)) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return m_; }
  std::size_t max_order() const noexcept { return max_order_; }

  Vec derivative(std::size_t order, double t) const;

  /// Orders first, ..., first + count - 1.
  VecList derivatives(double t, std::size_t count, std::size_t first = 0) const;

  /// X_r(t): orders 0..n-1 stacked.
  Vec stacked(double t, std::size_t n) const;

 private:
  std::string name_;
  std::size_t m_;
  std::size_t max_order_;
  Fn fn_;
};

// Two-link manipulator with coupled input ------------------------------------

enum class CoriolisVariant {
  Paper,      // h = a3 sin q2 - a4 sin q2, as printed
  Corrected,  // h = a3 sin q2 - a4 cos q2
};

struct TwoLinkParams {
  double a1 = 4.42;
  double a2 = 0.97;
  double a3 = 1.04;
  double a4 = 0.6;
  CoriolisVariant coriolis = CoriolisVariant::Paper;
};

/// Symmetric inertia matrix H(q2).
Mat two_link_inertia(double q2, const TwoLinkParams& p = {});

/// Scalar coefficient of the velocity-coupling matrix.
double two_link_coriolis(double q2, const TwoLinkParams& p = {});

/// beta = det H = H11 H22 - H12^2.
double two_link_beta(double q2, const TwoLinkParams& p = {});

/// Solves H qdd = -V(q, qd) qd + beta [[1,1],[0,1]] tau.
Vec two_link_accel(const Vec& q, const Vec& qdot, const Vec& tau, const TwoLinkParams& p = {});

/// m = 2, n = 2, g = beta H^-1 [[1,1],[0,1]], D_true = I.
PlantModel two_link_as_plant(const TwoLinkParams& p = {});

/// m = 1, n = 1, h(x) = x^2, g(x) = 2 + sin x.
PlantModel scalar_toy_plant();

// References ----------------------------------------------------------------

/// (1 - exp(-rate t^3)) * amplitude * sin(omega t), derivatives through order 3.
ReferenceTrajectory smooth_start_sine_reference(const Vec& amplitude, double rate, double omega);

/// Joint-space benchmark: amplitudes (30, 45) deg, rate 0.3, omega 1 rad/s, radians out.
ReferenceTrajectory benchmark_reference();

/// offset + amplitude * sin(omega t), any derivative order.
ReferenceTrajectory sine_reference(const Vec& amplitude, double omega, const Vec& offset);

ReferenceTrajectory constant_reference(const Vec& value);

}  // namespace rmc
