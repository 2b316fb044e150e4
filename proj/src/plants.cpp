#include "rmc/plants.hpp"

#include <cmath>
#include <numbers>

namespace rmc {

Vec ReferenceTrajectory::derivative(std::size_t order, double t) const {
  if (order > max_order_) {
    throw ValidationError("reference '" + name_ + "' provides derivatives up to order " +
                          std::to_string(max_order_) + ", requested " + std::to_string(order));
  }
  return fn_(order, t);
}

VecList ReferenceTrajectory::derivatives(double t, std::size_t count, std::size_t first) const {
  VecList out;
  out.reserve(count);
  for (std::size_t k = first; k < first + count; ++k) {
    out.push_back(derivative(k, t));
  }
  return out;
}

Vec ReferenceTrajectory::stacked(double t, std::size_t n) const {
  Vec X(static_cast<Eigen::Index>(m_ * n));
  for (std::size_t k = 0; k < n; ++k) {
    X.segment(static_cast<Eigen::Index>(k * m_), static_cast<Eigen::Index>(m_)) = derivative(k, t);
  }
  return X;
}

// Two-link --------------------------------------------------------------------

Mat two_link_inertia(double q2, const TwoLinkParams& p) {
  const double c = p.a3 * std::cos(q2) + p.a4 * std::sin(q2);
  Mat H(2, 2);
  H << p.a1 + 2.0 * c, p.a2 + c,
       p.a2 + c,       p.a2;
  return H;
}

double two_link_coriolis(double q2, const TwoLinkParams& p) {
  switch (p.coriolis) {
    case CoriolisVariant::Paper:
      return p.a3 * std::sin(q2) - p.a4 * std::sin(q2);
    case CoriolisVariant::Corrected:
      return p.a3 * std::sin(q2) - p.a4 * std::cos(q2);
  }
  return 0.0;
}

double two_link_beta(double q2, const TwoLinkParams& p) {
  const Mat H = two_link_inertia(q2, p);
  return H(0, 0) * H(1, 1) - H(0, 1) * H(0, 1);
}

namespace {

// beta H^-1 = adj(H) for the 2x2 symmetric inertia.
Mat adjugate(const Mat& H) {
  Mat A(2, 2);
  A << H(1, 1), -H(0, 1),
       -H(0, 1), H(0, 0);
  return A;
}

void require_well_posed(double beta, const Mat& H) {
  if (!(beta > 1e-12 * H.squaredNorm())) {
    throw NumericalError("two-link inertia matrix is singular or indefinite");
  }
}

Vec velocity_terms(const Vec& qdot, double hc) {
  // V(q, qd) qd with V = [[-h qd2, -h (qd1 + qd2)], [-h qd1, 0]]
  Vec v(2);
  v << -hc * qdot(1) * qdot(0) - hc * (qdot(0) + qdot(1)) * qdot(1),
       -hc * qdot(0) * qdot(0);
  return v;
}

Mat input_coupling() {
  Mat U0(2, 2);
  U0 << 1.0, 1.0,
        0.0, 1.0;
  return U0;
}

}  // namespace

Vec two_link_accel(const Vec& q, const Vec& qdot, const Vec& tau, const TwoLinkParams& p) {
  if (q.size() != 2 || qdot.size() != 2 || tau.size() != 2) {
    throw ValidationError("two_link_accel: expected 2-vectors");
  }
  const Mat H = two_link_inertia(q(1), p);
  const double beta = H(0, 0) * H(1, 1) - H(0, 1) * H(0, 1);
  require_well_posed(beta, H);
  const Vec rhs = -velocity_terms(qdot, two_link_coriolis(q(1), p)) + beta * (input_coupling() * tau);
  return adjugate(H) * rhs / beta;
}

PlantModel two_link_as_plant(const TwoLinkParams& p) {
  PlantModel plant;
  plant.name = "two_link";
  plant.m = 2;
  plant.n = 2;
  plant.h = [p](const Vec& X) {
    const Mat H = two_link_inertia(X(1), p);
    const double beta = H(0, 0) * H(1, 1) - H(0, 1) * H(0, 1);
    require_well_posed(beta, H);
    return Vec(-adjugate(H) * velocity_terms(X.tail(2), two_link_coriolis(X(1), p)) / beta);
  };
  plant.g = [p](const Vec& X) {
    const Mat H = two_link_inertia(X(1), p);
    require_well_posed(H(0, 0) * H(1, 1) - H(0, 1) * H(0, 1), H);
    return Mat(adjugate(H) * input_coupling());
  };
  plant.D_true = Vec::Ones(2);
  return plant;
}

PlantModel scalar_toy_plant() {
  PlantModel plant;
  plant.name = "scalar_toy";
  plant.m = 1;
  plant.n = 1;
  plant.h = [](const Vec& X) { return Vec::Constant(1, X(0) * X(0)); };
  plant.g = [](const Vec& X) { return Mat::Constant(1, 1, 2.0 + std::sin(X(0))); };
  plant.D_true = Vec::Ones(1);
  return plant;
}

// References ----------------------------------------------------------------

namespace {

double binomial(std::size_t k, std::size_t i) {
  double b = 1.0;
  for (std::size_t j = 1; j <= i; ++j) {
    b = b * static_cast<double>(k - i + j) / static_cast<double>(j);
  }
  return b;
}

// k-th derivative of sin(omega t).
double sine_derivative(std::size_t k, double omega, double t) {
  const double scale = std::pow(omega, static_cast<double>(k));
  switch (k % 4) {
    case 0:
      return scale * std::sin(omega * t);
    case 1:
      return scale * std::cos(omega * t);
    case 2:
      return -scale * std::sin(omega * t);
    default:
      return -scale * std::cos(omega * t);
  }
}

}  // namespace

ReferenceTrajectory smooth_start_sine_reference(const Vec& amplitude, double rate, double omega) {
  auto fn = [amplitude, rate, omega](std::size_t order, double t) {
    // Envelope E = 1 - exp(-c t^3) and its first three derivatives.
    const double c = rate;
    const double ex = std::exp(-c * t * t * t);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double env[4] = {
        -std::expm1(-c * t3),
        3.0 * c * t2 * ex,
        (6.0 * c * t - 9.0 * c * c * t2 * t2) * ex,
        (6.0 * c - 54.0 * c * c * t3 + 27.0 * c * c * c * t3 * t3) * ex,
    };
    double s = 0.0;
    for (std::size_t i = 0; i <= order; ++i) {
      s += binomial(order, i) * env[i] * sine_derivative(order - i, omega, t);
    }
    return Vec(s * amplitude);
  };
  return ReferenceTrajectory("smooth_start_sine", static_cast<std::size_t>(amplitude.size()), 3, fn);
}

ReferenceTrajectory benchmark_reference() {
  constexpr double kDeg = std::numbers::pi / 180.0;
  Vec amplitude(2);
  amplitude << 30.0 * kDeg, 45.0 * kDeg;
  auto ref = smooth_start_sine_reference(amplitude, 0.3, 1.0);
  return ReferenceTrajectory("benchmark", 2, ref.max_order(),
                             [ref](std::size_t order, double t) { return ref.derivative(order, t); });
}

ReferenceTrajectory sine_reference(const Vec& amplitude, double omega, const Vec& offset) {
  if (amplitude.size() != offset.size()) {
    throw ValidationError("sine_reference: amplitude and offset sizes differ");
  }
  auto fn = [amplitude, omega, offset](std::size_t order, double t) {
    Vec v = sine_derivative(order, omega, t) * amplitude;
    if (order == 0) {
      v += offset;
    }
    return v;
  };
  return ReferenceTrajectory("sine", static_cast<std::size_t>(amplitude.size()), 32, fn);
}

ReferenceTrajectory constant_reference(const Vec& value) {
  auto fn = [value](std::size_t order, double) { return order == 0 ? value : Vec(Vec::Zero(value.size())); };
  return ReferenceTrajectory("constant", static_cast<std::size_t>(value.size()), 32, fn);
}

}  // namespace rmc
