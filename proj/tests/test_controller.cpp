#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rmc/controller.hpp"

using namespace rmc;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

GainSet scalar_gains(double alpha, double kp, double C, double D) {
  GainSet g;
  g.alpha = vec({alpha});
  g.kp = kp;
  g.kd = Vec(0);
  g.C = vec({C});
  g.D = vec({D});
  return g;
}

}  // namespace

TEST_CASE("compose_K") {
  CHECK(compose_K(124, vec({50})) == vec({175, 125}));
  CHECK(compose_K(1, Vec(0)) == vec({2}));
  CHECK(compose_K(2, vec({3, 4})) == vec({6, 7, 3}));
}

TEST_CASE("gain validation names the field") {
  GainSet g;
  g.alpha = vec({1, 5});
  g.kp = 124;
  g.kd = vec({50});
  g.C = vec({5, 5});
  g.D = vec({1, 1});
  CHECK_NOTHROW(g.validate());

  auto expect_field = [](GainSet bad, const std::string& field) {
    try {
      bad.validate();
      FAIL("expected ValidationError for " << field);
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  GainSet a = g;
  a.alpha(1) = 0.0;
  expect_field(a, "alpha");
  GainSet c = g;
  c.C(0) = -1.0;
  expect_field(c, "C");
  GainSet kd = g;
  kd.kd = vec({1, 2});
  expect_field(kd, "kd");
  GainSet d = g;
  d.D(0) = 0.5;
  expect_field(d, "D");
}

TEST_CASE("control input at the initial time is zero") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    GainSet g;
    g.alpha = vec({u(rng) + 3.5, u(rng) + 3.5});
    g.kp = u(rng) + 4.0;
    g.kd = vec({u(rng) + 4.0});
    g.C = vec({u(rng) + 3.5, u(rng) + 3.5});
    g.D = vec({trial % 2 ? 1.0 : -1.0, 1.0});
    const Vec en0 = vec({u(rng), u(rng)});
    CHECK(control_input(en0, ControllerState::initial(en0), g).isZero(0.0));
  }
}

TEST_CASE("control input direct evaluation") {
  const GainSet g = scalar_gains(1.0, 1.0, 1.0, 1.0);  // K = 2
  const ControllerState s(vec({0.3}), vec({0.5}), vec({0.0}));
  CHECK(control_input(vec({1.0}), s, g)(0) == doctest::Approx(3.3).epsilon(1e-15));
}

TEST_CASE("control input term by term for a general sign structure") {
  GainSet g;
  g.alpha = vec({1, 2, 3});
  g.kp = 3;
  g.kd = vec({1, 2});
  g.C = vec({1, 1, 1});
  g.D = vec({1, -1, -1});
  const Vec en = vec({0.2, -0.4, 1.0});
  const ControllerState s(vec({0.1, 0.2, -0.3}), vec({1.0, -2.0, 0.5}), vec({0.5, 0.5, -0.5}));
  const Vec K = g.K();
  const Vec tau = control_input(en, s, g);
  for (Eigen::Index i = 0; i < 3; ++i) {
    const double inner = en(i) - s.en0()(i) + g.alpha(i) * s.int_en()(i);
    CHECK(tau(i) == doctest::Approx(g.D(i) * K(i) * inner + g.D(i) * s.pi()(i)));
  }
  GainSet flipped = scalar_gains(1.0, 1.0, 1.0, 1.0);
  const ControllerState s1(vec({0.3}), vec({0.5}), vec({0.0}));
  const double t_pos = control_input(vec({1.0}), s1, flipped)(0);
  flipped.D(0) = -1.0;
  CHECK(control_input(vec({1.0}), s1, flipped)(0) == -t_pos);
}

TEST_CASE("controller state derivative") {
  GainSet g;
  g.alpha = vec({1, 5});
  g.kp = 124;
  g.kd = vec({50});
  g.C = vec({5, 5});
  g.D = vec({1, 1});
  const auto zero = controller_state_derivative(Vec::Zero(2), g);
  CHECK(zero.pi_dot.isZero(0.0));
  const Vec en = vec({0.1, -3});
  const auto r = controller_state_derivative(en, g);
  CHECK(r.pi_dot == vec({5, -5}));
  CHECK(r.int_en_dot == en);
}

TEST_CASE("check_alpha") {
  auto a = check_alpha(vec({1, 5}));
  CHECK(a.pass);
  CHECK(a.margin == doctest::Approx(0.5));
  a = check_alpha(vec({0.5}));
  CHECK(a.pass);
  CHECK(a.margin == 0.0);
  a = check_alpha(vec({0.4, 9}));
  CHECK_FALSE(a.pass);
  CHECK(a.margin == doctest::Approx(-0.1));
}

TEST_CASE("minimal_C examples") {
  BoundEstimates b;
  b.zeta_nbar = vec({2});
  b.zeta_omega = Mat::Zero(1, 1);
  b.gamma2 = 1.0;
  CHECK(minimal_C(b, vec({1})) == vec({4}));

  BoundEstimates z;
  z.zeta_nbar = Vec::Zero(3);
  z.zeta_omega = Mat::Zero(3, 3);
  z.gamma2 = 2.0;
  CHECK(minimal_C(z, vec({1, 1, 1})).isZero(0.0));

  BoundEstimates two;
  two.zeta_nbar = vec({1, 1});
  two.zeta_omega = Mat::Zero(2, 2);
  two.zeta_omega(0, 1) = 0.5;
  CHECK(minimal_C(two, vec({1, 1})) == vec({1.5, 1}));
}

TEST_CASE("minimal_C is monotone in the bounds") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index m = 1 + trial % 4;
    BoundEstimates b;
    b.zeta_nbar = Vec(m);
    b.zeta_omega = Mat::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      b.zeta_nbar(i) = u(rng);
      for (Eigen::Index j = i + 1; j < m; ++j) b.zeta_omega(i, j) = u(rng);
    }
    b.gamma2 = u(rng);
    Vec alpha(m);
    for (Eigen::Index i = 0; i < m; ++i) alpha(i) = 0.5 + u(rng);
    const Vec base = minimal_C(b, alpha);

    BoundEstimates up = b;
    const Eigen::Index i = trial % m;
    switch (trial % 3) {
      case 0: up.zeta_nbar(i) += u(rng); break;
      case 1: up.gamma2 += u(rng); break;
      default:
        if (i + 1 < m) up.zeta_omega(i, m - 1) += u(rng);
        break;
    }
    const Vec raised = minimal_C(up, alpha);
    CHECK((raised.array() >= base.array()).all());
  }
}

TEST_CASE("validate_C reports the margin") {
  BoundEstimates b;
  b.zeta_nbar = vec({1, 1});
  b.zeta_omega = Mat::Zero(2, 2);
  b.zeta_omega(0, 1) = 0.5;
  auto c = validate_C(vec({2, 1}), b, vec({1, 1}));
  CHECK(c.pass);
  CHECK(c.margin(0) == doctest::Approx(0.5));
  c = validate_C(vec({1.4, 1}), b, vec({1, 1}));
  CHECK_FALSE(c.pass);
}

TEST_CASE("bound validation") {
  BoundEstimates b;
  b.zeta_nbar = vec({1, -1});
  b.zeta_omega = Mat::Zero(2, 2);
  CHECK_THROWS_AS(b.validate(2), ValidationError);
  b.zeta_nbar = vec({1, 1});
  b.zeta_omega(1, 0) = 1.0;
  CHECK_THROWS_AS(b.validate(2), ValidationError);
  b.zeta_omega(1, 0) = 0.0;
  b.gamma2 = -1.0;
  CHECK_THROWS_AS(b.validate(2), ValidationError);
}

TEST_CASE("zeta_L") {
  BoundEstimates b;
  b.zeta_nbar = vec({2});
  b.zeta_omega = Mat::Zero(1, 1);
  b.gamma1 = 0.0;
  CHECK(zeta_L(b, vec({4}), vec({0})) == 0.0);
  b.gamma1 = 1.0;
  CHECK(zeta_L(b, vec({4}), vec({0.5})) == doctest::Approx(4.0));

  // m = 2 against a term-by-term sum in a different order.
  BoundEstimates two;
  two.zeta_nbar = vec({15.84, 5.68});
  two.zeta_omega = Mat::Zero(2, 2);
  two.zeta_omega(0, 1) = 1.1;
  two.gamma1 = 0.5;
  const Vec C = vec({23, 6});
  const Vec en0 = vec({-0.3, 0.8});
  double oracle = C(1) * std::abs(en0(1)) + C(0) * std::abs(en0(0));
  oracle += two.gamma1 * two.zeta_nbar(1) + two.gamma1 * two.zeta_nbar(0);
  oracle += two.gamma1 * two.zeta_omega(0, 1) * C(1);
  CHECK(zeta_L(two, C, en0) == doctest::Approx(oracle).epsilon(1e-14));
}
