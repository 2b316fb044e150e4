#pragma once

#include <vector>

#include "rmc/controller.hpp"
#include "rmc/plants.hpp"
#include "rmc/simulator.hpp"

namespace rmc {

/// D(U - I) D K r written as (Lambda + Phi, 0) with U = Ubar + Utilde.
struct GainTermSplit {
  Vec direct;  // D (U - I) D K r
  Vec lambda;  // m - 1 entries, Utilde part
  Vec phi;     // m - 1 entries, Ubar part

  Vec stacked() const;  // (Lambda + Phi, 0)
};

/// D U D C Sgn(e_n) written as (Psi, 0) + Theta, Theta = (I + Omega) C Sgn(e_n).
struct SwitchingTermSplit {
  Vec direct;       // D U D C Sgn(e_n)
  Vec psi;          // m - 1 entries
  Vec theta;        // m entries, componentwise formula
  Vec theta_omega;  // (I + Omega) C Sgn(e_n)

  Vec stacked() const;  // (Psi, 0) + Theta
};

GainTermSplit split_gain_term(const Mat& U, const Mat& Ubar, const Vec& D, const Vec& K, const Vec& r);

SwitchingTermSplit split_switching_term(const Mat& U, const Mat& Ubar, const Vec& D, const Vec& C,
                                        const Vec& sgn_en);

/// Omega = D (Ubar - I) D, strictly upper triangular.
Mat omega_matrix(const Mat& Ubar, const Vec& D);

/// Per-sample quantities of the stability argument.
struct ProofSignals {
  Mat M;      // S^-1
  Mat M_dot;  // central difference along X'
  Vec phi;
  Vec f;
  Vec N;
  Vec N_bar;
  Vec N_tilde;
  Mat U;
  Mat U_bar;
  Mat U_tilde;
  Mat omega;
  GainTermSplit gain_split;
  SwitchingTermSplit switching_split;
  Vec z;  // (e_1, ..., e_n, r)
  double V1 = 0.0;

  const Vec& lambda() const { return gain_split.lambda; }
  const Vec& Phi() const { return gain_split.phi; }
  const Vec& psi() const { return switching_split.psi; }
  const Vec& theta() const { return switching_split.theta; }
};

/// Evaluates the proof signals at one logged sample. Time derivatives of h, g
/// and M are central differences along X' with step `delta`; N_bar repeats the
/// evaluation at X = X_r, x^(n) = x_r^(n).
ProofSignals proof_signals_at(const LogSample& sample, const PlantModel& plant, const ReferenceTrajectory& ref,
                              const GainSet& gains, double delta);

/// proof_signals_at over every sample, with delta defaulting to the log spacing.
std::vector<ProofSignals> proof_signals(const TrajectoryLog& log, const PlantModel& plant,
                                        const ReferenceTrajectory& ref, const GainSet& gains,
                                        double delta = 0.0);

/// 1/2 sum e_i^T e_i + 1/2 r^T M r. Throws ValidationError if M is not SPD.
double lyapunov_V1(const VecList& e, const Vec& r, const Mat& M);

/// L = r^T (N_bar - (I + Omega) C Sgn(e_n)).
double lemma2_integrand(const Vec& r, const Vec& N_bar, const Mat& omega, const Vec& C, const Vec& en);

struct LPSeries {
  std::vector<double> L;
  std::vector<double> P;          // zeta_L - int L, switching part from the Pi increments
  std::vector<double> P_simpson;  // Simpson on r^T N_bar, same switching part
  std::vector<double> P_sampled;  // zeta_L - trapezoid of the sampled L
};

/// P = zeta_L - int L. The r^T N_bar part is integrated by the trapezoid rule.
/// The r^T (I + Omega) C Sgn(e_n) part uses the logged increments of Pi, which
/// hold the exact integral of C Sgn(e_n) that the integrator applied over each
/// interval; sampling Sgn(e_n) at the log instants aliases once e_n chatters.
/// Requires matching, non-empty series on a uniform grid of spacing dt.
LPSeries L_and_P(const VecList& r, const VecList& N_bar, const std::vector<Mat>& omega, const VecList& en,
                 const VecList& pi, const Vec& C, double zeta_L, double dt);

LPSeries L_and_P(const TrajectoryLog& log, const std::vector<ProofSignals>& signals, const Vec& C,
                 double zeta_L);

/// Cumulative trapezoid, first entry 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& y, double dt);

/// Cumulative composite Simpson; odd indices close with one trapezoid panel.
std::vector<double> cumulative_simpson(const std::vector<double>& y, double dt);

/// gamma1 + gamma2 int|e| + |e(t)| - int|e'| at every sample.
std::vector<double> lemma1_margin_series(const std::vector<double>& e, const std::vector<double>& e_dot,
                                         double gamma1, double gamma2, double dt);

/// min over t of gamma1 + gamma2 int|e| + |e(t)| - int|e'|; the integral
/// inequality holds on the record iff the result is >= 0.
double check_lemma1(const std::vector<double>& e, const std::vector<double>& e_dot, double gamma1, double gamma2,
                    double dt);

/// sup |e(T)| over instants T where e' changes sign (0 if it never does).
double estimate_gamma1(const std::vector<double>& e, const std::vector<double>& e_dot);

struct Lemma1Search {
  bool feasible = false;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double margin = 0.0;  // worst component margin at the chosen pair
};

/// Grid search for one (gamma1, gamma2) valid for every component of e_n.
/// Pairs are tried by increasing gamma2, then increasing gamma1.
Lemma1Search search_lemma1_constants(const TrajectoryLog& log, const Vec& alpha,
                                     const std::vector<double>& gamma1_grid,
                                     const std::vector<double>& gamma2_grid);

/// e_n,i and e_n,i' = r_i - alpha_i e_n,i series from a log.
std::vector<double> en_component(const TrajectoryLog& log, Eigen::Index i);
std::vector<double> en_rate_component(const TrajectoryLog& log, const Vec& alpha, Eigen::Index i);

/// 0, step, 2 step, ..., hi.
std::vector<double> uniform_grid(double hi, double step);

/// zeta_nbar and zeta_omega as (1 + safety) times the sup over a uniform time
/// grid on [t0, t0 + horizon]. gamma1 and gamma2 are left at zero.
BoundEstimates estimate_bounds(const ReferenceTrajectory& ref, const PlantModel& plant, const GainSet& gains,
                               double t0, double horizon, double sampling, double safety = 0.1,
                               double delta = 1e-3);

/// M r' + M' r / 2 + e_n + K r - N_tilde - N_bar + D (U - I) D K r + D U D C Sgn(e_n)
/// with r' from central differences of the logged r; interior samples only.
Vec closed_loop_residual(const TrajectoryLog& log, const std::vector<ProofSignals>& signals,
                         const GainSet& gains, std::size_t index);

struct MonotonicityReport {
  bool pass = true;
  double tolerance = 0.0;
  double worst_increase = 0.0;
  std::size_t violations = 0;
};

/// V[k+1] - V[k] <= factor dt^2 max|dV|/dt for every k.
MonotonicityReport check_non_increasing(const std::vector<double>& V, double dt, double factor = 10.0);

struct SplitReport {
  double gain_split_error = 0.0;       // max relative error over samples
  double switching_split_error = 0.0;  // (Psi, 0) + Theta vs direct
  double theta_error = 0.0;            // componentwise Theta vs (I + Omega) C Sgn
  bool last_entry_zero = true;
};

/// Relative errors are taken against the magnitude of the summed terms, so a
/// vanishing product does not inflate them.
SplitReport check_splitting_identities(const std::vector<ProofSignals>& signals, const GainSet& gains,
                                       const TrajectoryLog& log);

}  // namespace rmc
