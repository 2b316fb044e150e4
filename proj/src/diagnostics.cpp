#include "rmc/diagnostics.hpp"

#include <algorithm>
#include <sstream>

#include "rmc/config.hpp"

namespace rmc {

bool DiagnosticsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const DiagnosticCheck& c) { return c.pass; });
}

DiagnosticsReport run_diagnostics(const TrajectoryLog& log, const Scenario& sc, const DiagnosticsOptions& opts) {
  if (log.size() < 2) {
    throw ValidationError("diagnostics need at least two samples");
  }
  const GainSet& gains = sc.gains;
  const auto m = static_cast<Eigen::Index>(gains.dim());
  DiagnosticsReport rep;

  rep.signals = proof_signals(log, sc.plant, sc.ref, gains, log.dt);
  const double t0 = log.samples.front().t;
  const double horizon = log.samples.back().t - t0;
  rep.bounds = estimate_bounds(sc.ref, sc.plant, gains, t0, horizon, log.dt, opts.safety, log.dt);

  for (Eigen::Index i = 0; i < m; ++i) {
    rep.gamma1_sign_change = std::max(
        rep.gamma1_sign_change,
        estimate_gamma1(en_component(log, i), en_rate_component(log, gains.alpha, i)));
  }
  if (opts.gamma1 && opts.gamma2) {
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      worst = std::min(worst, check_lemma1(en_component(log, i), en_rate_component(log, gains.alpha, i),
                                           *opts.gamma1, *opts.gamma2, log.dt));
    }
    rep.lemma1 = {worst >= 0.0, *opts.gamma1, *opts.gamma2, worst};
  } else {
    rep.lemma1 = search_lemma1_constants(log, gains.alpha, opts.gamma1_grid, opts.gamma2_grid);
  }
  rep.bounds.gamma1 = rep.lemma1.gamma1;
  rep.bounds.gamma2 = rep.lemma1.gamma2;
  rep.lemma1_margin.assign(log.size(), std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto margins = lemma1_margin_series(en_component(log, i), en_rate_component(log, gains.alpha, i),
                                              rep.lemma1.gamma1, rep.lemma1.gamma2, log.dt);
    for (std::size_t k = 0; k < log.size(); ++k) {
      rep.lemma1_margin[k] = std::min(rep.lemma1_margin[k], margins[k]);
    }
  }

  rep.alpha_check = check_alpha(gains.alpha);
  rep.c_check = validate_C(gains.C, rep.bounds, gains.alpha);
  rep.zeta_L = zeta_L(rep.bounds, gains.C, log.samples.front().e.back());
  rep.lp = L_and_P(log, rep.signals, gains.C, rep.zeta_L);
  rep.V1.reserve(log.size());
  rep.V.reserve(log.size());
  for (std::size_t k = 0; k < log.size(); ++k) {
    rep.V1.push_back(rep.signals[k].V1);
    rep.V.push_back(rep.signals[k].V1 + rep.lp.P[k]);
  }
  rep.monotonicity = check_non_increasing(rep.V, log.dt, opts.monotonicity_factor);
  rep.splits = check_splitting_identities(rep.signals, gains, log);

  const double min_P = *std::min_element(rep.lp.P.begin(), rep.lp.P.end());
  const auto fmt = [](double v) { return format_double(v); };

  rep.checks.push_back({"alpha_min_eigenvalue", rep.alpha_check.pass,
                        "margin " + fmt(rep.alpha_check.margin)});
  rep.checks.push_back({"lemma1_constants", rep.lemma1.feasible,
                        "gamma1 " + fmt(rep.lemma1.gamma1) + " gamma2 " + fmt(rep.lemma1.gamma2) + " margin " +
                            fmt(rep.lemma1.margin)});
  rep.checks.push_back({"switching_gain_C", rep.lemma1.feasible && rep.c_check.pass,
                        "min margin " + fmt(rep.c_check.margin.minCoeff()) + " required " +
                            format_vector(rep.c_check.minimum)});
  rep.checks.push_back({"P_non_negative", min_P >= 0.0, "min P " + fmt(min_P) + " zeta_L " + fmt(rep.zeta_L)});
  rep.checks.push_back({"V_non_increasing", rep.monotonicity.pass,
                        "worst increase " + fmt(rep.monotonicity.worst_increase) + " tolerance " +
                            fmt(rep.monotonicity.tolerance) + " violations " +
                            std::to_string(rep.monotonicity.violations)});
  const double split = std::max({rep.splits.gain_split_error, rep.splits.switching_split_error,
                                  rep.splits.theta_error});
  rep.checks.push_back({"splitting_identities", split <= opts.split_tolerance && rep.splits.last_entry_zero,
                        "max relative error " + fmt(split)});
  return rep;
}

}  // namespace rmc
