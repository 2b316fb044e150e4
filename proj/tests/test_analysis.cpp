#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rmc/analysis.hpp"
#include "rmc/diagnostics.hpp"
#include "rmc/sdu.hpp"

using namespace rmc;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Scenario benchmark(double T, const Vec& C) {
  const double deg = std::numbers::pi / 180.0;
  Scenario sc{two_link_as_plant(), benchmark_reference(), {}, vec({10 * deg, 10 * deg, 0, 0}), 0.0, T, 1e-3, 1};
  sc.gains.alpha = vec({1, 5});
  sc.gains.kp = 124;
  sc.gains.kd = vec({50});
  sc.gains.C = C;
  sc.gains.D = vec({1, 1});
  return sc;
}

GainSet toy_gains() {
  GainSet g;
  g.alpha = vec({2});
  g.kp = 4;
  g.kd = Vec(0);
  g.C = vec({0.5});
  g.D = vec({1});
  return g;
}

std::vector<double> grid(double hi, double step) { return uniform_grid(hi, step); }

}  // namespace

TEST_CASE("perfect tracking sample has vanishing tilde terms") {
  const PlantModel plant = two_link_as_plant();
  const auto ref = benchmark_reference();
  GainSet gains = benchmark(1.0, vec({5, 5})).gains;
  const double t = 1.3;
  LogSample s;
  s.t = t;
  s.X = ref.stacked(t, 2);
  s.xr = ref.derivatives(t, 3);
  s.e = {Vec::Zero(2), Vec::Zero(2)};
  s.r = Vec::Zero(2);
  s.xn = s.xr[2];
  s.tau = Vec::Zero(2);
  s.pi = Vec::Zero(2);
  const ProofSignals p = proof_signals_at(s, plant, ref, gains, 1e-3);
  CHECK(p.N_tilde.isZero(0.0));
  CHECK(p.U_tilde.isZero(0.0));
  CHECK(p.V1 == 0.0);
}

TEST_CASE("scalar plant has empty off-diagonal splits") {
  const PlantModel plant = scalar_toy_plant();
  const auto ref = sine_reference(vec({0.5}), 1.0, vec({0.2}));
  const GainSet gains = toy_gains();
  LogSample s;
  s.t = 0.4;
  s.X = vec({0.1});
  s.xr = ref.derivatives(s.t, 2);
  s.e = {s.xr[0] - s.X};
  s.tau = vec({0.3});
  s.xn = plant.highest_derivative(s.X, s.tau);
  s.r = vec({0.7});
  s.pi = vec({0.0});
  const ProofSignals p = proof_signals_at(s, plant, ref, gains, 1e-3);
  CHECK(p.lambda().size() == 0);
  CHECK(p.Phi().size() == 0);
  CHECK(p.psi().size() == 0);
  CHECK(p.U(0, 0) == 1.0);
  CHECK(p.U_bar(0, 0) == 1.0);
  CHECK(p.theta()(0) == gains.C(0) * sgn(s.e[0](0)));
  CHECK(p.omega.size() == 1);
  CHECK(p.omega(0, 0) == 0.0);
}

TEST_CASE("splitting identities on random factors") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index m = 2 + trial % 3;
    Mat U = Mat::Identity(m, m), Ubar = Mat::Identity(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i + 1; j < m; ++j) {
        U(i, j) = u(rng);
        Ubar(i, j) = u(rng);
      }
    Vec D(m), K(m), r(m), C(m), s(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      D(i) = u(rng) > 0 ? 1.0 : -1.0;
      K(i) = 3.0 + u(rng);
      r(i) = u(rng);
      C(i) = 3.0 + u(rng);
      s(i) = sgn(u(rng));
    }
    const auto g = split_gain_term(U, Ubar, D, K, r);
    CHECK(g.direct(m - 1) == 0.0);
    CHECK((g.stacked() - g.direct).norm() <= 1e-12 * (g.lambda.norm() + g.phi.norm() + 1e-300));
    const auto sw = split_switching_term(U, Ubar, D, C, s);
    const double scale = sw.psi.norm() + sw.theta.norm();
    CHECK((sw.stacked() - sw.direct).norm() <= 1e-12 * scale);
    CHECK((sw.theta - sw.theta_omega).norm() <= 1e-12 * scale);
  }
}

TEST_CASE("lyapunov V1") {
  CHECK(lyapunov_V1({Vec::Zero(2), Vec::Zero(2)}, Vec::Zero(2), Mat::Identity(2, 2)) == 0.0);
  CHECK(lyapunov_V1({vec({2})}, vec({1}), Mat::Constant(1, 1, 3.0)) == doctest::Approx(3.5));
  CHECK_THROWS_AS(lyapunov_V1({vec({2})}, vec({1}), Mat::Constant(1, 1, -3.0)), ValidationError);
}

TEST_CASE("V1 lies between the Rayleigh bounds") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Mat A(2, 2);
    A << u(rng), u(rng), u(rng), u(rng);
    const Mat M = A * A.transpose() + 0.1 * Mat::Identity(2, 2);
    const VecList e{vec({u(rng), u(rng)}), vec({u(rng), u(rng)})};
    const Vec r = vec({u(rng), u(rng)});
    Vec z(6);
    z << e[0], e[1], r;
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    const double lo = 0.5 * std::min(1.0, es.eigenvalues().minCoeff()) * z.squaredNorm();
    const double hi = 0.5 * std::max(1.0, es.eigenvalues().maxCoeff()) * z.squaredNorm();
    const double V1 = lyapunov_V1(e, r, M);
    CHECK(V1 >= lo * (1 - 1e-12));
    CHECK(V1 <= hi * (1 + 1e-12));
  }
}

TEST_CASE("Lemma 2 integrand") {
  CHECK(lemma2_integrand(vec({1}), vec({0.5}), Mat::Zero(1, 1), vec({2}), vec({0.3})) == doctest::Approx(-1.5));
  CHECK(lemma2_integrand(vec({1}), vec({0.5}), Mat::Zero(1, 1), vec({2}), vec({0.0})) == doctest::Approx(0.5));
}

TEST_CASE("L and P with r identically zero") {
  const std::size_t len = 50;
  VecList r(len, Vec::Zero(2)), nbar(len, vec({1, 2})), en(len, vec({0.1, -0.1})), pi;
  std::vector<Mat> omega(len, Mat::Zero(2, 2));
  for (std::size_t k = 0; k < len; ++k) pi.push_back(vec({0.01 * k, -0.02 * k}));
  const auto lp = L_and_P(r, nbar, omega, en, pi, vec({5, 5}), 3.0, 0.01);
  for (std::size_t k = 0; k < len; ++k) {
    CHECK(lp.L[k] == 0.0);
    CHECK(lp.P[k] == 3.0);
    CHECK(lp.P_sampled[k] == 3.0);
  }
  CHECK_THROWS_AS(L_and_P(r, nbar, omega, VecList(3, Vec::Zero(2)), pi, vec({5, 5}), 3.0, 0.01), ValidationError);
}

TEST_CASE("P matches the sampled quadrature when Pi follows the sampled signs") {
  // Pi built as the exact integral of C Sgn(e_n) with e_n keeping its sign on each panel.
  const double dt = 0.01;
  const Vec C = vec({2.0});
  VecList r, nbar, en, pi;
  std::vector<Mat> omega;
  Vec p = Vec::Zero(1);
  for (std::size_t k = 0; k < 200; ++k) {
    const double t = dt * static_cast<double>(k);
    r.push_back(vec({std::cos(t)}));
    nbar.push_back(vec({0.3 + 0.1 * t}));
    en.push_back(vec({1.0}));
    pi.push_back(p);
    p += dt * C;
    omega.push_back(Mat::Zero(1, 1));
  }
  const auto lp = L_and_P(r, nbar, omega, en, pi, C, 1.0, dt);
  for (std::size_t k = 0; k < r.size(); ++k) {
    CHECK(lp.P[k] == doctest::Approx(lp.P_sampled[k]).epsilon(1e-12));
    CHECK(lp.P_simpson[k] == doctest::Approx(lp.P[k]).epsilon(1e-5));
  }
}

TEST_CASE("cumulative quadrature") {
  std::vector<double> y;
  const double dt = 0.1;
  for (int k = 0; k <= 10; ++k) {
    const double t = dt * k;
    y.push_back(t * t * t - t);
  }
  const auto trap = cumulative_trapezoid(y, dt);
  const auto simp = cumulative_simpson(y, dt);
  CHECK(trap[0] == 0.0);
  CHECK(simp[0] == 0.0);
  // Simpson is exact for cubics on an even number of panels.
  for (int k = 2; k <= 10; k += 2) {
    const double t = dt * k;
    CHECK(simp[static_cast<std::size_t>(k)] == doctest::Approx(t * t * t * t / 4.0 - t * t / 2.0).epsilon(1e-12));
  }
  const auto lin = cumulative_trapezoid({1.0, 3.0, 5.0}, 0.5);
  CHECK(lin[2] == doctest::Approx(3.0));
}

TEST_CASE("Lemma 1 margins") {
  const double dt = 1e-3;
  std::vector<double> e, edot;
  for (int k = 0; k <= 5000; ++k) {
    const double t = dt * k;
    e.push_back(0.7 * std::exp(-t));
    edot.push_back(-0.7 * std::exp(-t));
  }
  CHECK(check_lemma1(e, edot, 0.0, 1.0, dt) >= 0.0);
  CHECK(check_lemma1(e, edot, 0.0, 0.0, dt) < 0.0);

  e.clear();
  edot.clear();
  const int steps = 6284;
  const double h = 2.0 * std::numbers::pi / steps;
  for (int k = 0; k <= steps; ++k) {
    e.push_back(std::sin(h * k));
    edot.push_back(std::cos(h * k));
  }
  const auto margins = lemma1_margin_series(e, edot, 2.0, 1.0, h);
  for (std::size_t k = 0; k < margins.size(); ++k) {
    const double t = h * static_cast<double>(k);
    // closed forms of int|sin| and int|cos| on [0, t]
    const double int_e = t <= std::numbers::pi ? 1 - std::cos(t) : 3 + std::cos(t);
    double int_edot;
    if (t <= std::numbers::pi / 2) int_edot = std::sin(t);
    else if (t <= 1.5 * std::numbers::pi) int_edot = 2 - std::sin(t);
    else int_edot = 4 + std::sin(t);
    const double oracle = 2.0 + int_e + std::abs(std::sin(t)) - int_edot;
    CHECK(margins[k] == doctest::Approx(oracle).epsilon(1e-5));
    CHECK(margins[k] >= 0.0);
  }
  CHECK_THROWS_AS(check_lemma1({1.0, 2.0}, {1.0}, 0.0, 0.0, dt), ValidationError);
}

TEST_CASE("gamma1 from sign changes") {
  CHECK(estimate_gamma1({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}) == 0.0);
  CHECK(estimate_gamma1({0.5, 0.8, -0.2, -0.4}, {1.0, -1.0, -1.0, 2.0}) == doctest::Approx(0.8));
}

TEST_CASE("bounds on a constant reference") {
  const PlantModel plant = scalar_toy_plant();
  const auto ref = constant_reference(vec({0.4}));
  const auto b = estimate_bounds(ref, plant, toy_gains(), 0.0, 2.0, 0.1);
  CHECK(b.zeta_nbar(0) == 0.0);
  CHECK(b.zeta_omega.size() == 1);
  CHECK(b.zeta_omega(0, 0) == 0.0);
}

TEST_CASE("bounds on a sine reference match the closed form") {
  // At X = X_r with e = 0: N_bar = (x_r'' - h' - g' g^-1 (x_r' - h)) / g.
  const PlantModel plant = scalar_toy_plant();
  const auto ref = sine_reference(vec({0.5}), 1.0, vec({0.2}));
  double sup = 0.0;
  for (const double t : uniform_grid(6.0, 0.01)) {
    const double x = 0.2 + 0.5 * std::sin(t), xd = 0.5 * std::cos(t), xdd = -0.5 * std::sin(t);
    const double g = 2.0 + std::sin(x), gd = std::cos(x) * xd, hd = 2.0 * x * xd;
    const double phi = hd + gd * (xd - x * x) / g;
    sup = std::max(sup, std::abs((xdd - phi) / g));
  }
  const auto b = estimate_bounds(ref, plant, toy_gains(), 0.0, 6.0, 0.01, 0.1, 1e-4);
  CHECK(b.zeta_nbar(0) == doctest::Approx(1.1 * sup).epsilon(1e-6));
  const auto again = estimate_bounds(ref, plant, toy_gains(), 0.0, 6.0, 0.01, 0.1, 1e-4);
  CHECK(again.zeta_nbar == b.zeta_nbar);
}

TEST_CASE("two-link Omega is constant") {
  const Scenario sc = benchmark(1.0, vec({5, 5}));
  const auto b = estimate_bounds(sc.ref, sc.plant, sc.gains, 0.0, 5.0, 0.01);
  CHECK(b.zeta_omega(0, 1) == doctest::Approx(1.1));
  CHECK(b.zeta_omega(1, 0) == 0.0);
}

TEST_CASE("non-increasing check") {
  auto rep = check_non_increasing({5.0, 4.0, 3.0, 3.0, 2.0}, 0.01);
  CHECK(rep.pass);
  CHECK(rep.violations == 0);
  rep = check_non_increasing({5.0, 4.0, 4.5, 3.0}, 0.01);
  CHECK_FALSE(rep.pass);
  CHECK(rep.violations == 1);
  CHECK(rep.worst_increase == doctest::Approx(0.5));
  // tolerance 10 dt max|dV|: 10 * 0.01 * 1.6
  rep = check_non_increasing({5.0, 4.0, 4.1, 2.5}, 0.01);
  CHECK(rep.tolerance == doctest::Approx(0.16));
  CHECK(rep.pass);
}

TEST_CASE("uniform grid") {
  const auto g = grid(1.0, 0.25);
  CHECK(g == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("closed-loop residual vanishes away from switches") {
  // Before e_n first changes sign the trajectory is smooth.
  const Scenario sc = benchmark(0.4, vec({5, 5}));
  const auto log = run_scenario(sc);
  REQUIRE(sign_change_indices(log).empty());
  const auto signals = proof_signals(log, sc.plant, sc.ref, sc.gains);
  double worst = 0.0;
  // r has a fast initial transient (a few ms); the central difference of r is
  // only accurate once it has decayed.
  for (std::size_t k = 100; k + 1 < log.size(); ++k) {
    const Vec res = closed_loop_residual(log, signals, sc.gains, k);
    const double scale = sc.gains.K().cwiseProduct(log.samples[k].r).norm() + signals[k].N.norm();
    worst = std::max(worst, res.norm() / scale);
  }
  CHECK(worst < 1e-4);
  CHECK_THROWS_AS(closed_loop_residual(log, signals, sc.gains, 0), ValidationError);
}

TEST_CASE("closed-loop residual shrinks with the square of the step") {
  auto residual_at = [](double dt, double t) {
    Scenario sc = benchmark(0.02, vec({5, 5}));
    sc.dt = dt;
    const auto log = run_scenario(sc);
    const auto k = static_cast<std::size_t>(std::lround(t / dt));
    const auto signals = proof_signals(log, sc.plant, sc.ref, sc.gains);
    return closed_loop_residual(log, signals, sc.gains, k).norm();
  };
  const double ratio = residual_at(1e-3, 0.01) / residual_at(5e-4, 0.01);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("Theta obeys the pointwise bound chain") {
  const Scenario sc = benchmark(2.0, vec({5, 5}));
  const auto log = run_scenario(sc);
  const auto signals = proof_signals(log, sc.plant, sc.ref, sc.gains);
  const auto b = estimate_bounds(sc.ref, sc.plant, sc.gains, 0.0, 2.0, log.dt);
  for (const auto& p : signals) {
    for (Eigen::Index i = 0; i < 2; ++i) {
      double bound = sc.gains.C(i);
      for (Eigen::Index j = i + 1; j < 2; ++j) bound += sc.gains.C(j) * b.zeta_omega(i, j);
      CHECK(std::abs(p.theta()(i)) <= bound);
    }
  }
}

TEST_CASE("diagnostics on a short benchmark run") {
  const Scenario sc = benchmark(2.0, vec({23, 6}));
  const auto log = run_scenario(sc);
  const auto rep = run_diagnostics(log, sc);
  REQUIRE(rep.checks.size() == 6);
  for (const auto& c : rep.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.pass);
  }
  CHECK(rep.lemma1_margin.size() == log.size());
  CHECK(rep.V.size() == log.size());
  CHECK(rep.V[0] == doctest::Approx(rep.V1[0] + rep.zeta_L));
}
