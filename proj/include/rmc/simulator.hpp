#pragma once

#include <vector>

#include "rmc/cascade.hpp"
#include "rmc/controller.hpp"
#include "rmc/plants.hpp"

namespace rmc {

struct ClosedLoopState {
  Vec X;  // (x, x', ..., x^(n-1)) stacked, length m n
  ControllerState ctrl;
  double t = 0.0;
};

/// One logged sample. r and xn depend on the true plant and are analysis-only.
struct LogSample {
  double t = 0.0;
  Vec X;
  VecList xr;  // reference derivatives, orders 0..n
  VecList e;   // e_1 ... e_n
  Vec r;
  Vec tau;
  Vec pi;
  Vec int_en;
  Vec xn;  // x^(n) = h(X) + g(X) tau
  // Some RK4 stage since the previous sample saw a different sgn(e_n) than the
  // step start, i.e. e_n crossed zero between samples. Not stored in CSV.
  bool stage_switch = false;
};

struct TrajectoryLog {
  std::size_t m = 0;
  std::size_t n = 0;
  double dt = 0.0;  // spacing between logged samples
  std::vector<LogSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
};

struct Scenario {
  PlantModel plant;
  ReferenceTrajectory ref;
  GainSet gains;
  Vec X0;
  double t0 = 0.0;
  double T = 0.0;
  double dt = 1e-3;
  std::size_t decimation = 1;
};

/// Raised when a step fails; carries the time at the start of the failing step.
class StepFailure : public NumericalError {
 public:
  StepFailure(double t, const std::string& what)
      : NumericalError("step failed at t = " + std::to_string(t) + ": " + what), t_(t) {}

  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// Splits stacked X into (x, x', ..., x^(n-1)).
VecList unstack(const Vec& X, std::size_t m, std::size_t n);

/// Closed-loop start: Pi = 0, int e_n = 0 and e_n(t0) captured from X0.
ClosedLoopState initial_state(const PlantModel& plant, const ReferenceTrajectory& ref, const Vec& X0,
                              double t0);

/// One classical RK4 step of plant and controller integrators; tau is
/// re-evaluated from each stage state.
ClosedLoopState step(const ClosedLoopState& state, const PlantModel& plant, const ReferenceTrajectory& ref,
                     const GainSet& gains, double dt);

/// Everything the log stores for the current state.
LogSample record_sample(const ClosedLoopState& state, const PlantModel& plant, const ReferenceTrajectory& ref,
                        const GainSet& gains);

/// Deterministic fixed-step run. T = 0 yields only the initial sample.
TrajectoryLog run_scenario(const Scenario& scenario);

/// Indices i where some component of e_n changes sign between samples i and i+1
/// (a component reaching exactly zero counts as a change), or where a stage
/// between the two samples flipped a sign.
std::vector<std::size_t> sign_change_indices(const TrajectoryLog& log);

/// true for samples within `window` samples of any e_n sign change.
std::vector<bool> switch_mask(const TrajectoryLog& log, std::size_t window);

}  // namespace rmc
