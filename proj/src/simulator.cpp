#include "rmc/simulator.hpp"

#include <cmath>

#include "rmc/sdu.hpp"

namespace rmc {
namespace {

struct Rates {
  Vec Xdot;
  ControllerRates ctrl;
};

class ClosedLoop {
 public:
  ClosedLoop(const PlantModel& plant, const ReferenceTrajectory& ref, const GainSet& gains)
      : plant_(plant), ref_(ref), gains_(gains), coeffs_(plant.n) {
    if (gains.dim() != plant.m || ref.dim() != plant.m) {
      throw ValidationError("gains, reference and plant dimensions differ");
    }
    if (ref.max_order() < plant.n) {
      throw ValidationError("reference must provide derivatives through order n");
    }
  }

  Vec en(const Vec& X, double t) const {
    return compute_errors(unstack(X, plant_.m, plant_.n), ref_.derivatives(t, plant_.n), coeffs_).back();
  }

  Rates rates(const Vec& X, const ControllerState& ctrl, double t, bool check_sign) const {
    const Vec e_n = en(X, t);
    const Vec tau = control_input(e_n, ctrl, gains_);
    const Mat g = plant_.g(X);
    const Vec D = sign_matrix(g);
    if (check_sign && D != plant_.D_true) {
      throw NumericalError("sign structure of g(X) differs from the declared D");
    }
    const Eigen::Index m = static_cast<Eigen::Index>(plant_.m);
    const Eigen::Index mn = static_cast<Eigen::Index>(plant_.state_size());
    Vec Xdot(mn);
    Xdot.head(mn - m) = X.tail(mn - m);
    Xdot.tail(m) = plant_.h(X) + g * tau;
    return {std::move(Xdot), controller_state_derivative(e_n, gains_)};
  }

  ClosedLoopState advance(const ClosedLoopState& s, double dt, bool* switched = nullptr) const {
    const auto shifted = [&s](const Rates& k, double h) {
      return std::pair{Vec(s.X + h * k.Xdot),
                       s.ctrl.with_integrators(s.ctrl.pi() + h * k.ctrl.pi_dot,
                                               s.ctrl.int_en() + h * k.ctrl.int_en_dot)};
    };
    const Rates k1 = rates(s.X, s.ctrl, s.t, true);
    auto [X2, c2] = shifted(k1, 0.5 * dt);
    const Rates k2 = rates(X2, c2, s.t + 0.5 * dt, false);
    auto [X3, c3] = shifted(k2, 0.5 * dt);
    const Rates k3 = rates(X3, c3, s.t + 0.5 * dt, false);
    auto [X4, c4] = shifted(k3, dt);
    const Rates k4 = rates(X4, c4, s.t + dt, false);

    if (switched != nullptr) {
      const Vec s1 = sgn(en(s.X, s.t));
      *switched = *switched || sgn(en(X2, s.t + 0.5 * dt)) != s1 || sgn(en(X3, s.t + 0.5 * dt)) != s1 ||
                  sgn(en(X4, s.t + dt)) != s1;
    }

    const double w = dt / 6.0;
    ClosedLoopState next{
        s.X + w * (k1.Xdot + 2.0 * k2.Xdot + 2.0 * k3.Xdot + k4.Xdot),
        s.ctrl.with_integrators(
            s.ctrl.pi() + w * (k1.ctrl.pi_dot + 2.0 * k2.ctrl.pi_dot + 2.0 * k3.ctrl.pi_dot + k4.ctrl.pi_dot),
            s.ctrl.int_en() + w * (k1.ctrl.int_en_dot + 2.0 * k2.ctrl.int_en_dot +
                                   2.0 * k3.ctrl.int_en_dot + k4.ctrl.int_en_dot)),
        s.t + dt};
    if (!next.X.allFinite()) {
      throw NonFiniteState(s.t, "plant state");
    }
    if (!next.ctrl.pi().allFinite() || !next.ctrl.int_en().allFinite()) {
      throw NonFiniteState(s.t, "controller state");
    }
    return next;
  }

  LogSample record(const ClosedLoopState& s) const {
    const std::size_t m = plant_.m;
    const std::size_t n = plant_.n;
    LogSample out;
    out.t = s.t;
    out.X = s.X;
    out.xr = ref_.derivatives(s.t, n + 1);
    const VecList x = unstack(s.X, m, n);
    out.e = compute_errors(x, VecList(out.xr.begin(), out.xr.begin() + static_cast<std::ptrdiff_t>(n)), coeffs_);
    out.tau = control_input(out.e.back(), s.ctrl, gains_);
    out.pi = s.ctrl.pi();
    out.int_en = s.ctrl.int_en();
    out.xn = plant_.highest_derivative(s.X, out.tau);

    VecList x_shifted(x.begin() + 1, x.end());
    x_shifted.push_back(out.xn);
    const VecList e_dot =
        compute_error_rates(x_shifted, VecList(out.xr.begin() + 1, out.xr.end()), coeffs_);
    out.r = filtered_error(out.e.back(), e_dot.back(), gains_.alpha);
    return out;
  }

 private:
  const PlantModel& plant_;
  const ReferenceTrajectory& ref_;
  const GainSet& gains_;
  CascadeCoefficients coeffs_;
};

}  // namespace

VecList unstack(const Vec& X, std::size_t m, std::size_t n) {
  if (static_cast<std::size_t>(X.size()) != m * n) {
    throw ValidationError("state vector length must be m * n = " + std::to_string(m * n));
  }
  VecList out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(X.segment(static_cast<Eigen::Index>(k * m), static_cast<Eigen::Index>(m)));
  }
  return out;
}

ClosedLoopState initial_state(const PlantModel& plant, const ReferenceTrajectory& ref, const Vec& X0,
                              double t0) {
  const CascadeCoefficients coeffs(plant.n);
  const Vec en0 = compute_errors(unstack(X0, plant.m, plant.n), ref.derivatives(t0, plant.n), coeffs).back();
  return {X0, ControllerState::initial(en0), t0};
}

ClosedLoopState step(const ClosedLoopState& state, const PlantModel& plant, const ReferenceTrajectory& ref,
                     const GainSet& gains, double dt) {
  if (!(dt > 0.0)) {
    throw ValidationError("dt must be positive");
  }
  return ClosedLoop(plant, ref, gains).advance(state, dt);
}

LogSample record_sample(const ClosedLoopState& state, const PlantModel& plant, const ReferenceTrajectory& ref,
                        const GainSet& gains) {
  return ClosedLoop(plant, ref, gains).record(state);
}

TrajectoryLog run_scenario(const Scenario& sc) {
  if (!(sc.dt > 0.0)) {
    throw ValidationError("dt must be positive");
  }
  if (!(sc.T >= 0.0)) {
    throw ValidationError("T must be non-negative");
  }
  if (sc.decimation == 0) {
    throw ValidationError("decimation must be at least 1");
  }
  sc.gains.validate();
  const auto steps = static_cast<long long>(std::llround(sc.T / sc.dt));
  if (std::abs(static_cast<double>(steps) * sc.dt - sc.T) > 1e-9 * std::max(sc.T, sc.dt)) {
    throw ValidationError("T must be an integer multiple of dt");
  }

  const ClosedLoop loop(sc.plant, sc.ref, sc.gains);
  TrajectoryLog log;
  log.m = sc.plant.m;
  log.n = sc.plant.n;
  log.dt = sc.dt * static_cast<double>(sc.decimation);
  log.samples.reserve(static_cast<std::size_t>(steps) / sc.decimation + 1);

  ClosedLoopState s = initial_state(sc.plant, sc.ref, sc.X0, sc.t0);
  log.samples.push_back(loop.record(s));
  bool switched = false;
  for (long long k = 1; k <= steps; ++k) {
    try {
      s = loop.advance(s, sc.dt, &switched);
    } catch (const StepFailure&) {
      throw;
    } catch (const NumericalError& err) {
      throw StepFailure(s.t, err.what());
    }
    // Re-anchor the clock to the uniform grid.
    s.t = sc.t0 + static_cast<double>(k) * sc.dt;
    if (static_cast<std::size_t>(k) % sc.decimation == 0) {
      log.samples.push_back(loop.record(s));
      log.samples.back().stage_switch = switched;
      switched = false;
    }
  }
  return log;
}

std::vector<std::size_t> sign_change_indices(const TrajectoryLog& log) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < log.size(); ++i) {
    const Vec& a = log.samples[i].e.back();
    const Vec& b = log.samples[i + 1].e.back();
    if (log.samples[i + 1].stage_switch) {
      out.push_back(i);
      continue;
    }
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (sgn(a(j)) != sgn(b(j))) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

std::vector<bool> switch_mask(const TrajectoryLog& log, std::size_t window) {
  std::vector<bool> mask(log.size(), false);
  for (const std::size_t i : sign_change_indices(log)) {
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(log.size() - 1, i + 1 + window);
    for (std::size_t k = lo; k <= hi; ++k) {
      mask[k] = true;
    }
  }
  return mask;
}

}  // namespace rmc
