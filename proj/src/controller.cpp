#include "rmc/controller.hpp"

#include <cmath>
#include <string>

namespace rmc {
namespace {

bool all_positive(const Vec& v) { return (v.array() > 0.0).all(); }

void require_size(const Vec& v, Eigen::Index n, const std::string& what) {
  if (v.size() != n) {
    throw ValidationError(what + ": expected " + std::to_string(n) + " entries, got " +
                          std::to_string(v.size()));
  }
}

}  // namespace

Vec compose_K(double kp, const Vec& kd) {
  if (!(kp > 0.0)) {
    throw ValidationError("kp must be positive");
  }
  if (!all_positive(kd)) {
    throw ValidationError("kd entries must be positive");
  }
  const Eigen::Index m = kd.size() + 1;
  Vec K = Vec::Constant(m, 1.0 + kp);
  K.head(m - 1) += kd;
  return K;
}

void GainSet::validate() const {
  const Eigen::Index m = alpha.size();
  if (m == 0) {
    throw ValidationError("alpha: empty gain set");
  }
  require_size(kd, m - 1, "kd");
  require_size(C, m, "C");
  require_size(D, m, "D");
  if (!all_positive(alpha)) {
    throw ValidationError("alpha: entries must be positive");
  }
  if (!(kp > 0.0)) {
    throw ValidationError("kp: must be positive");
  }
  if (!all_positive(kd)) {
    throw ValidationError("kd: entries must be positive");
  }
  if (!all_positive(C)) {
    throw ValidationError("C: entries must be positive");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(D(i)) != 1.0) {
      throw ValidationError("D: entries must be +1 or -1");
    }
  }
}

ControllerState ControllerState::initial(const Vec& en0) {
  return ControllerState(Vec::Zero(en0.size()), Vec::Zero(en0.size()), en0);
}

ControllerState::ControllerState(Vec pi, Vec int_en, Vec en0)
    : pi_(std::move(pi)), int_en_(std::move(int_en)), en0_(std::move(en0)) {
  if (pi_.size() != en0_.size() || int_en_.size() != en0_.size()) {
    throw ValidationError("ControllerState: dimension mismatch");
  }
}

ControllerState ControllerState::with_integrators(Vec pi, Vec int_en) const {
  return ControllerState(std::move(pi), std::move(int_en), en0_);
}

Vec control_input(const Vec& en, const ControllerState& state, const GainSet& gains) {
  const Eigen::Index m = static_cast<Eigen::Index>(gains.dim());
  require_size(en, m, "control_input e_n");
  require_size(state.pi(), m, "control_input state");
  const Vec K = gains.K();
  const Vec inner = en - state.en0() + gains.alpha.cwiseProduct(state.int_en());
  return gains.D.cwiseProduct(K.cwiseProduct(inner)) + gains.D.cwiseProduct(state.pi());
}

ControllerRates controller_state_derivative(const Vec& en, const GainSet& gains) {
  require_size(en, gains.C.size(), "controller_state_derivative e_n");
  return {gains.C.cwiseProduct(sgn(en)), en};
}

GainCheck check_alpha(const Vec& alpha) {
  if (alpha.size() == 0) {
    throw ValidationError("check_alpha: empty alpha");
  }
  const double lmin = alpha.minCoeff();
  return {lmin >= 0.5, lmin - 0.5};
}

void BoundEstimates::validate(std::size_t m) const {
  const auto mm = static_cast<Eigen::Index>(m);
  require_size(zeta_nbar, mm, "zeta_nbar");
  if (zeta_omega.rows() != mm || zeta_omega.cols() != mm) {
    throw ValidationError("zeta_omega: expected a " + std::to_string(m) + "x" + std::to_string(m) + " array");
  }
  if (!(zeta_nbar.array() >= 0.0).all()) {
    throw ValidationError("zeta_nbar: entries must be non-negative");
  }
  for (Eigen::Index i = 0; i < mm; ++i) {
    for (Eigen::Index j = 0; j < mm; ++j) {
      const double v = zeta_omega(i, j);
      if (j <= i ? v != 0.0 : !(v >= 0.0)) {
        throw ValidationError("zeta_omega: must be non-negative and strictly upper triangular");
      }
    }
  }
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) {
    throw ValidationError("gamma1, gamma2: must be non-negative");
  }
}

Vec minimal_C(const BoundEstimates& bounds, const Vec& alpha) {
  const Eigen::Index m = alpha.size();
  bounds.validate(static_cast<std::size_t>(m));
  if (!all_positive(alpha)) {
    throw ValidationError("minimal_C: alpha entries must be positive");
  }
  Vec C = Vec::Zero(m);
  for (Eigen::Index i = m - 1; i >= 0; --i) {
    double coupling = bounds.zeta_nbar(i);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      coupling += bounds.zeta_omega(i, j) * C(j);
    }
    C(i) = coupling * (1.0 + bounds.gamma2 / alpha(i));
  }
  return C;
}

CCheck validate_C(const Vec& C, const BoundEstimates& bounds, const Vec& alpha) {
  require_size(C, alpha.size(), "validate_C C");
  CCheck out;
  out.minimum = minimal_C(bounds, alpha);
  out.margin = C - out.minimum;
  out.pass = (out.margin.array() >= 0.0).all();
  return out;
}

double zeta_L(const BoundEstimates& bounds, const Vec& C, const Vec& en0) {
  const Eigen::Index m = C.size();
  bounds.validate(static_cast<std::size_t>(m));
  require_size(en0, m, "zeta_L e_n(t0)");
  double coupled = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      coupled += bounds.zeta_omega(i, j) * C(j);
    }
  }
  return bounds.gamma1 * coupled + bounds.gamma1 * bounds.zeta_nbar.sum() + C.dot(en0.cwiseAbs());
}

}  // namespace rmc
