#include "rmc/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "rmc/cascade.hpp"
#include "rmc/sdu.hpp"

namespace rmc {
namespace {

Mat inverse_spd(const Mat& S) {
  const Eigen::LLT<Mat> llt(S);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("S factor is not positive definite");
  }
  return llt.solve(Mat::Identity(S.rows(), S.cols()));
}

Mat M_of(const PlantModel& plant, const Vec& X) { return inverse_spd(sdu_decompose(plant.g(X)).S); }

struct NEval {
  Mat M;
  Mat M_dot;
  Vec phi;
  Vec f;
  Vec N;
  Mat U;
};

// N = M (x_r^(n+1) + sum_{j<=n-2} a_{n,j} e_1^(j+2) + alpha e_n') - f + e_n + M' r / 2
// e1 holds e_1^(k) for k = 0..n.
NEval evaluate_N(const PlantModel& plant, const Vec& X, const Vec& xn, const VecList& e1, const Vec& r,
                 const Vec& xr_next, const Vec& alpha, const CascadeCoefficients& coeffs, double delta) {
  const auto m = static_cast<Eigen::Index>(plant.m);
  const std::size_t n = plant.n;
  const Eigen::Index mn = m * static_cast<Eigen::Index>(n);

  Vec X_dot(mn);
  X_dot.head(mn - m) = X.tail(mn - m);
  X_dot.tail(m) = xn;
  const Vec X_plus = X + delta * X_dot;
  const Vec X_minus = X - delta * X_dot;

  NEval out;
  const Mat g = plant.g(X);
  const Vec h = plant.h(X);
  const SduFactors sdu = sdu_decompose(g);
  out.U = sdu.U;
  out.M = inverse_spd(sdu.S);
  out.M_dot = (M_of(plant, X_plus) - M_of(plant, X_minus)) / (2.0 * delta);
  const Vec h_dot = (plant.h(X_plus) - plant.h(X_minus)) / (2.0 * delta);
  const Mat g_dot = (plant.g(X_plus) - plant.g(X_minus)) / (2.0 * delta);
  out.phi = h_dot + g_dot * g.partialPivLu().solve(xn - h);
  out.f = out.M * out.phi;

  Vec en = Vec::Zero(m);
  Vec en_dot = Vec::Zero(m);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = static_cast<double>(coeffs.at(n, j));
    en += a * e1[j];
    en_dot += a * e1[j + 1];
  }
  Vec inner = xr_next + alpha.cwiseProduct(en_dot);
  for (std::size_t j = 0; j + 2 <= n; ++j) {
    inner += static_cast<double>(coeffs.at(n, j)) * e1[j + 2];
  }
  out.N = out.M * inner - out.f + en + 0.5 * out.M_dot * r;
  return out;
}

double rel_error(const Vec& a, const Vec& b, double scale) {
  const double diff = (a - b).lpNorm<Eigen::Infinity>();
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

Vec GainTermSplit::stacked() const {
  Vec out = Vec::Zero(lambda.size() + 1);
  out.head(lambda.size()) = lambda + phi;
  return out;
}

Vec SwitchingTermSplit::stacked() const {
  Vec out = theta;
  out.head(psi.size()) += psi;
  return out;
}

GainTermSplit split_gain_term(const Mat& U, const Mat& Ubar, const Vec& D, const Vec& K, const Vec& r) {
  const Eigen::Index m = D.size();
  const Mat I = Mat::Identity(m, m);
  const Mat U_tilde = U - Ubar;
  GainTermSplit out;
  out.direct = D.asDiagonal() * (U - I) * D.asDiagonal() * K.asDiagonal() * r;
  out.lambda = Vec::Zero(m - 1);
  out.phi = Vec::Zero(m - 1);
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      out.lambda(i) += D(j) * K(j) * U_tilde(i, j) * r(j);
      out.phi(i) += D(j) * K(j) * Ubar(i, j) * r(j);
    }
    out.lambda(i) *= D(i);
    out.phi(i) *= D(i);
  }
  return out;
}

SwitchingTermSplit split_switching_term(const Mat& U, const Mat& Ubar, const Vec& D, const Vec& C,
                                        const Vec& sgn_en) {
  const Eigen::Index m = D.size();
  const Mat U_tilde = U - Ubar;
  SwitchingTermSplit out;
  out.direct = D.asDiagonal() * U * D.asDiagonal() * C.asDiagonal() * sgn_en;
  out.psi = Vec::Zero(m - 1);
  out.theta = Vec::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      out.theta(i) += D(j) * C(j) * Ubar(i, j) * sgn_en(j);
      if (j > i) {
        out.psi(i) += D(j) * C(j) * U_tilde(i, j) * sgn_en(j);
      }
    }
    out.theta(i) *= D(i);
    if (i + 1 < m) {
      out.psi(i) *= D(i);
    }
  }
  const Mat omega = omega_matrix(Ubar, D);
  out.theta_omega = (Mat::Identity(m, m) + omega) * C.cwiseProduct(sgn_en);
  return out;
}

Mat omega_matrix(const Mat& Ubar, const Vec& D) {
  Mat omega = D.asDiagonal() * (Ubar - Mat::Identity(Ubar.rows(), Ubar.cols())) * D.asDiagonal();
  omega.triangularView<Eigen::Lower>().setZero();
  return omega;
}

ProofSignals proof_signals_at(const LogSample& s, const PlantModel& plant, const ReferenceTrajectory& ref,
                              const GainSet& gains, double delta) {
  if (!(delta > 0.0)) {
    throw ValidationError("finite-difference step must be positive");
  }
  const std::size_t n = plant.n;
  const Eigen::Index m = static_cast<Eigen::Index>(plant.m);
  if (s.xn.size() != m || s.r.size() != m || s.e.size() != n) {
    throw ValidationError("log sample lacks the analysis-only fields (x^(n), r, e)");
  }
  if (ref.max_order() < n + 1) {
    throw ValidationError("analysis needs reference derivatives through order n + 1");
  }
  const CascadeCoefficients coeffs(n);
  const VecList xr = ref.derivatives(s.t, n + 2);
  const VecList x = unstack(s.X, plant.m, n);

  VecList e1(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    e1[k] = xr[k] - x[k];
  }
  e1[n] = xr[n] - s.xn;
  const NEval actual = evaluate_N(plant, s.X, s.xn, e1, s.r, xr[n + 1], gains.alpha, coeffs, delta);

  const Vec X_r = ref.stacked(s.t, n);
  const VecList zero_e(n + 1, Vec::Zero(m));
  const NEval at_ref =
      evaluate_N(plant, X_r, xr[n], zero_e, Vec::Zero(m), xr[n + 1], gains.alpha, coeffs, delta);

  ProofSignals out;
  out.M = actual.M;
  out.M_dot = actual.M_dot;
  out.phi = actual.phi;
  out.f = actual.f;
  out.N = actual.N;
  out.N_bar = at_ref.N;
  out.N_tilde = out.N - out.N_bar;
  out.U = actual.U;
  out.U_bar = at_ref.U;
  out.U_tilde = out.U - out.U_bar;
  out.omega = omega_matrix(out.U_bar, gains.D);
  out.gain_split = split_gain_term(out.U, out.U_bar, gains.D, gains.K(), s.r);
  out.switching_split = split_switching_term(out.U, out.U_bar, gains.D, gains.C, sgn(s.e.back()));

  out.z = Vec(m * static_cast<Eigen::Index>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    out.z.segment(static_cast<Eigen::Index>(i) * m, m) = s.e[i];
  }
  out.z.tail(m) = s.r;
  out.V1 = lyapunov_V1(s.e, s.r, out.M);
  return out;
}

std::vector<ProofSignals> proof_signals(const TrajectoryLog& log, const PlantModel& plant,
                                        const ReferenceTrajectory& ref, const GainSet& gains, double delta) {
  const double step = delta > 0.0 ? delta : log.dt;
  std::vector<ProofSignals> out;
  out.reserve(log.size());
  for (const LogSample& s : log.samples) {
    out.push_back(proof_signals_at(s, plant, ref, gains, step));
  }
  return out;
}

double lyapunov_V1(const VecList& e, const Vec& r, const Mat& M) {
  if (M.rows() != r.size() || M.cols() != r.size()) {
    throw ValidationError("lyapunov_V1: M must be m x m");
  }
  if (!M.isApprox(M.transpose(), 1e-10) || Eigen::LLT<Mat>(M).info() != Eigen::Success) {
    throw ValidationError("lyapunov_V1: M must be symmetric positive definite");
  }
  double v = 0.0;
  for (const Vec& ei : e) {
    v += 0.5 * ei.squaredNorm();
  }
  return v + 0.5 * r.dot(M * r);
}

double lemma2_integrand(const Vec& r, const Vec& N_bar, const Mat& omega, const Vec& C, const Vec& en) {
  const Eigen::Index m = r.size();
  return r.dot(N_bar - (Mat::Identity(m, m) + omega) * C.cwiseProduct(sgn(en)));
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& y, double dt) {
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t k = 1; k < y.size(); ++k) {
    out[k] = out[k - 1] + 0.5 * dt * (y[k - 1] + y[k]);
  }
  return out;
}

std::vector<double> cumulative_simpson(const std::vector<double>& y, double dt) {
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t k = 2; k < y.size(); k += 2) {
    out[k] = out[k - 2] + dt / 3.0 * (y[k - 2] + 4.0 * y[k - 1] + y[k]);
  }
  for (std::size_t k = 1; k < y.size(); k += 2) {
    out[k] = out[k - 1] + 0.5 * dt * (y[k - 1] + y[k]);
  }
  return out;
}

LPSeries L_and_P(const VecList& r, const VecList& N_bar, const std::vector<Mat>& omega, const VecList& en,
                 const VecList& pi, const Vec& C, double zeta_L, double dt) {
  const std::size_t len = r.size();
  if (len == 0 || N_bar.size() != len || omega.size() != len || en.size() != len || pi.size() != len) {
    throw ValidationError("L_and_P: r, N_bar, Omega, e_n and Pi series must be present with equal length");
  }
  LPSeries out;
  out.L.reserve(len);
  std::vector<double> drift(len);
  for (std::size_t k = 0; k < len; ++k) {
    out.L.push_back(lemma2_integrand(r[k], N_bar[k], omega[k], C, en[k]));
    drift[k] = r[k].dot(N_bar[k]);
  }
  const auto m = r.front().size();
  const Mat I = Mat::Identity(m, m);
  std::vector<double> switching(len, 0.0);
  for (std::size_t k = 1; k < len; ++k) {
    const Vec r_mid = 0.5 * (r[k - 1] + r[k]);
    const Mat om_mid = 0.5 * (omega[k - 1] + omega[k]);
    switching[k] = switching[k - 1] + r_mid.dot((I + om_mid) * (pi[k] - pi[k - 1]));
  }
  const auto trap = cumulative_trapezoid(drift, dt);
  const auto simp = cumulative_simpson(drift, dt);
  const auto sampled = cumulative_trapezoid(out.L, dt);
  out.P.resize(len);
  out.P_simpson.resize(len);
  out.P_sampled.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    out.P[k] = zeta_L - trap[k] + switching[k];
    out.P_simpson[k] = zeta_L - simp[k] + switching[k];
    out.P_sampled[k] = zeta_L - sampled[k];
  }
  return out;
}

LPSeries L_and_P(const TrajectoryLog& log, const std::vector<ProofSignals>& signals, const Vec& C,
                 double zeta_L) {
  if (signals.size() != log.size()) {
    throw ValidationError("L_and_P: proof signals missing for some log samples");
  }
  VecList r, nbar, en, pi;
  std::vector<Mat> omega;
  for (std::size_t k = 0; k < log.size(); ++k) {
    r.push_back(log.samples[k].r);
    en.push_back(log.samples[k].e.back());
    pi.push_back(log.samples[k].pi);
    nbar.push_back(signals[k].N_bar);
    omega.push_back(signals[k].omega);
  }
  return L_and_P(r, nbar, omega, en, pi, C, zeta_L, log.dt);
}

std::vector<double> lemma1_margin_series(const std::vector<double>& e, const std::vector<double>& e_dot,
                                         double gamma1, double gamma2, double dt) {
  if (e.size() != e_dot.size() || e.empty()) {
    throw ValidationError("check_lemma1: e and e' must share a non-empty grid");
  }
  std::vector<double> abs_e(e.size()), abs_edot(e.size());
  std::transform(e.begin(), e.end(), abs_e.begin(), [](double v) { return std::abs(v); });
  std::transform(e_dot.begin(), e_dot.end(), abs_edot.begin(), [](double v) { return std::abs(v); });
  const auto int_e = cumulative_trapezoid(abs_e, dt);
  const auto int_edot = cumulative_trapezoid(abs_edot, dt);
  std::vector<double> out(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    out[k] = gamma1 + gamma2 * int_e[k] + abs_e[k] - int_edot[k];
  }
  return out;
}

double check_lemma1(const std::vector<double>& e, const std::vector<double>& e_dot, double gamma1, double gamma2,
                    double dt) {
  const auto margins = lemma1_margin_series(e, e_dot, gamma1, gamma2, dt);
  return *std::min_element(margins.begin(), margins.end());
}

double estimate_gamma1(const std::vector<double>& e, const std::vector<double>& e_dot) {
  double g1 = 0.0;
  for (std::size_t k = 0; k + 1 < e_dot.size(); ++k) {
    if (sgn(e_dot[k]) != sgn(e_dot[k + 1])) {
      g1 = std::max(g1, std::abs(e[k + 1]));
    }
  }
  return g1;
}

std::vector<double> en_component(const TrajectoryLog& log, Eigen::Index i) {
  std::vector<double> out;
  out.reserve(log.size());
  for (const auto& s : log.samples) {
    out.push_back(s.e.back()(i));
  }
  return out;
}

std::vector<double> en_rate_component(const TrajectoryLog& log, const Vec& alpha, Eigen::Index i) {
  std::vector<double> out;
  out.reserve(log.size());
  for (const auto& s : log.samples) {
    out.push_back(s.r(i) - alpha(i) * s.e.back()(i));
  }
  return out;
}

Lemma1Search search_lemma1_constants(const TrajectoryLog& log, const Vec& alpha,
                                     const std::vector<double>& gamma1_grid,
                                     const std::vector<double>& gamma2_grid) {
  const auto m = static_cast<Eigen::Index>(log.m);
  std::vector<std::vector<double>> e(m), e_dot(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    e[i] = en_component(log, i);
    e_dot[i] = en_rate_component(log, alpha, i);
  }
  Lemma1Search out;
  for (const double g2 : gamma2_grid) {
    for (const double g1 : gamma1_grid) {
      double worst = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        worst = std::min(worst, check_lemma1(e[i], e_dot[i], g1, g2, log.dt));
      }
      if (worst >= 0.0) {
        return {true, g1, g2, worst};
      }
    }
  }
  return out;
}

std::vector<double> uniform_grid(double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor(hi / step + 1e-9));
  for (long long k = 0; k <= count; ++k) {
    out.push_back(static_cast<double>(k) * step);
  }
  return out;
}

BoundEstimates estimate_bounds(const ReferenceTrajectory& ref, const PlantModel& plant, const GainSet& gains,
                               double t0, double horizon, double sampling, double safety, double delta) {
  if (!(sampling > 0.0) || !(horizon >= 0.0) || !(safety >= 0.0)) {
    throw ValidationError("estimate_bounds: sampling must be positive, horizon and safety non-negative");
  }
  const std::size_t n = plant.n;
  const auto m = static_cast<Eigen::Index>(plant.m);
  const CascadeCoefficients coeffs(n);
  const VecList zero_e(n + 1, Vec::Zero(m));

  BoundEstimates out;
  out.zeta_nbar = Vec::Zero(m);
  out.zeta_omega = Mat::Zero(m, m);
  const auto steps = static_cast<long long>(std::llround(horizon / sampling));
  for (long long k = 0; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k) * sampling;
    const VecList xr = ref.derivatives(t, n + 2);
    const NEval at_ref = evaluate_N(plant, ref.stacked(t, n), xr[n], zero_e, Vec::Zero(m), xr[n + 1],
                                    gains.alpha, coeffs, delta);
    out.zeta_nbar = out.zeta_nbar.cwiseMax(at_ref.N.cwiseAbs());
    out.zeta_omega = out.zeta_omega.cwiseMax(omega_matrix(at_ref.U, gains.D).cwiseAbs());
  }
  out.zeta_nbar *= 1.0 + safety;
  out.zeta_omega *= 1.0 + safety;
  return out;
}

Vec closed_loop_residual(const TrajectoryLog& log, const std::vector<ProofSignals>& signals,
                         const GainSet& gains, std::size_t index) {
  if (index == 0 || index + 1 >= log.size()) {
    throw ValidationError("closed_loop_residual: needs an interior sample");
  }
  const LogSample& s = log.samples[index];
  const ProofSignals& p = signals[index];
  const Vec r_dot = (log.samples[index + 1].r - log.samples[index - 1].r) / (2.0 * log.dt);
  const Vec K = gains.K();
  return p.M * r_dot + 0.5 * p.M_dot * s.r + s.e.back() + K.cwiseProduct(s.r) - p.N_tilde - p.N_bar +
         p.gain_split.direct + p.switching_split.direct;
}

MonotonicityReport check_non_increasing(const std::vector<double>& V, double dt, double factor) {
  MonotonicityReport out;
  double max_step = 0.0;
  for (std::size_t k = 0; k + 1 < V.size(); ++k) {
    max_step = std::max(max_step, std::abs(V[k + 1] - V[k]));
  }
  out.tolerance = factor * dt * dt * max_step / dt;
  for (std::size_t k = 0; k + 1 < V.size(); ++k) {
    const double inc = V[k + 1] - V[k];
    out.worst_increase = std::max(out.worst_increase, inc);
    if (inc > out.tolerance) {
      ++out.violations;
    }
  }
  out.pass = out.violations == 0;
  return out;
}

SplitReport check_splitting_identities(const std::vector<ProofSignals>& signals, const GainSet& gains,
                                       const TrajectoryLog& log) {
  SplitReport out;
  const Vec K = gains.K();
  const auto m = static_cast<Eigen::Index>(gains.dim());
  const Mat I = Mat::Identity(m, m);
  for (std::size_t k = 0; k < signals.size(); ++k) {
    const ProofSignals& p = signals[k];
    const Vec& r = log.samples[k].r;
    const Vec s = sgn(log.samples[k].e.back());

    const double gain_scale = ((p.U - I).cwiseAbs() * K.cwiseProduct(r).cwiseAbs()).lpNorm<Eigen::Infinity>();
    out.gain_split_error =
        std::max(out.gain_split_error, rel_error(p.gain_split.direct, p.gain_split.stacked(), gain_scale));
    if (p.gain_split.direct(m - 1) != 0.0) {
      out.last_entry_zero = false;
    }

    const Vec c_abs = gains.C.cwiseProduct(s).cwiseAbs();
    const double sw_scale = (p.U.cwiseAbs() * c_abs).lpNorm<Eigen::Infinity>() +
                            (p.U_bar.cwiseAbs() * c_abs).lpNorm<Eigen::Infinity>();
    out.switching_split_error = std::max(
        out.switching_split_error, rel_error(p.switching_split.direct, p.switching_split.stacked(), sw_scale));
    const double theta_scale = (p.U_bar.cwiseAbs() * c_abs).lpNorm<Eigen::Infinity>();
    out.theta_error = std::max(
        out.theta_error, rel_error(p.switching_split.theta, p.switching_split.theta_omega, theta_scale));
  }
  return out;
}

}  // namespace rmc
