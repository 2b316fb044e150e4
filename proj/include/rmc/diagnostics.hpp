#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmc/analysis.hpp"
#include "rmc/csv_log.hpp"

namespace rmc {

struct DiagnosticsOptions {
  double safety = 0.1;
  std::optional<double> gamma1;  // skip the grid search when both are given
  std::optional<double> gamma2;
  std::vector<double> gamma1_grid = uniform_grid(10.0, 0.25);
  std::vector<double> gamma2_grid = uniform_grid(10.0, 0.25);
  double split_tolerance = 1e-12;
  double monotonicity_factor = 10.0;
};

struct DiagnosticCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Proof quantities evaluated along one trajectory.
struct DiagnosticsReport {
  std::vector<ProofSignals> signals;
  BoundEstimates bounds;  // empirical zeta's plus the gamma pair in use
  Lemma1Search lemma1;
  std::vector<double> lemma1_margin;  // worst component of the Lemma 1 margin at each sample
  double gamma1_sign_change = 0.0;  // sup |e_n,i(T)| over e_n,i' sign changes
  GainCheck alpha_check;
  CCheck c_check;
  double zeta_L = 0.0;
  std::vector<double> V1;
  LPSeries lp;
  std::vector<double> V;
  MonotonicityReport monotonicity;
  SplitReport splits;
  std::vector<DiagnosticCheck> checks;

  bool all_pass() const;
  AnalysisColumns columns() const { return {V1, lp.L, lp.P, V}; }
};

DiagnosticsReport run_diagnostics(const TrajectoryLog& log, const Scenario& scenario,
                                  const DiagnosticsOptions& opts = {});

}  // namespace rmc
