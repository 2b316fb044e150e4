#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

#include "rmc/cascade.hpp"

using namespace rmc;

namespace {

// Integer polynomial in t, coefficient k multiplies t^k.
using Poly = std::vector<std::int64_t>;

Poly derivative(const Poly& p) {
  Poly d(p.size() > 1 ? p.size() - 1 : 1, 0);
  for (std::size_t k = 1; k < p.size(); ++k) {
    d[k - 1] = static_cast<std::int64_t>(k) * p[k];
  }
  return d;
}

Poly add(const Poly& a, const Poly& b) {
  Poly s(std::max(a.size(), b.size()), 0);
  for (std::size_t k = 0; k < a.size(); ++k) s[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) s[k] += b[k];
  return s;
}

std::int64_t eval(const Poly& p, std::int64_t t) {
  std::int64_t v = 0;
  for (std::size_t k = p.size(); k-- > 0;) {
    v = v * t + p[k];
  }
  return v;
}

// e_1 .. e_n as explicit time signals: e_2 = e_1' + e_1, e_i = e_{i-1}' + e_{i-1} + e_{i-2}.
std::vector<Poly> error_chain(const Poly& e1, std::size_t n) {
  std::vector<Poly> e{e1};
  if (n >= 2) e.push_back(add(derivative(e1), e1));
  for (std::size_t i = 2; i < n; ++i) {
    e.push_back(add(add(derivative(e[i - 1]), e[i - 1]), e[i - 2]));
  }
  return e;
}

// Operator polynomial in s by substitution: e_1 = 1, e_2 = (s + 1), e_i = (s + 1) e_{i-1} + e_{i-2}.
std::vector<Poly> operator_chain(std::size_t n) {
  std::vector<Poly> ops{{1}};
  if (n >= 2) ops.push_back({1, 1});
  for (std::size_t i = 2; i < n; ++i) {
    const Poly& p = ops[i - 1];
    Poly q(p.size() + 1, 0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      q[k] += p[k];
      q[k + 1] += p[k];
    }
    ops.push_back(add(q, ops[i - 2]));
  }
  return ops;
}

}  // namespace

TEST_CASE("coefficient rows for small n") {
  const auto c = cascade_coefficients(3);
  CHECK(c.row(1) == std::vector<std::uint64_t>{1});
  CHECK(c.row(2) == std::vector<std::uint64_t>{1, 1});
  CHECK(c.row(3) == std::vector<std::uint64_t>{2, 2, 1});
  CHECK(c.at(3, 5) == 0);
  CHECK(c.at(0, 0) == 0);
}

TEST_CASE("top coefficient is one") {
  for (std::size_t n = 1; n <= 12; ++n) {
    CHECK(cascade_coefficients(n).at(n, n - 1) == 1);
  }
  CHECK(cascade_coefficients(10).at(10, 9) == 1);
}

TEST_CASE("coefficients match operator substitution up to n = 12") {
  const auto ops = operator_chain(12);
  const auto c = cascade_coefficients(12);
  for (std::size_t i = 1; i <= 12; ++i) {
    REQUIRE(ops[i - 1].size() == i);
    for (std::size_t j = 0; j < i; ++j) {
      CHECK(static_cast<std::int64_t>(c.at(i, j)) == ops[i - 1][j]);
    }
  }
}

TEST_CASE("coefficients reproduce the error chain on polynomial signals") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> order(1, 12);
    const std::size_t n = order(rng);
    Poly e1(14);
    for (auto& v : e1) v = coef(rng);
    const auto chain = error_chain(e1, n);
    std::vector<Poly> d{e1};
    for (std::size_t j = 1; j < n; ++j) d.push_back(derivative(d.back()));
    const auto c = cascade_coefficients(n);
    for (std::int64_t t : {-1, 0, 1, 2}) {
      for (std::size_t i = 1; i <= n; ++i) {
        std::int64_t sum = 0;
        for (std::size_t j = 0; j < i; ++j) {
          sum += static_cast<std::int64_t>(c.at(i, j)) * eval(d[j], t);
        }
        CHECK(sum == eval(chain[i - 1], t));
      }
    }
  }
}

TEST_CASE("invalid order") {
  CHECK_THROWS_AS(cascade_coefficients(0), ValidationError);
  CHECK_NOTHROW(cascade_coefficients(40));
}

TEST_CASE("compute_errors examples") {
  const auto c1 = cascade_coefficients(1);
  VecList x{Vec::Constant(1, 0.2)}, xr{Vec::Constant(1, 1.0)};
  const auto e = compute_errors(x, xr, c1);
  REQUIRE(e.size() == 1);
  CHECK(e[0](0) == doctest::Approx(0.8).epsilon(1e-15));

  const auto c3 = cascade_coefficients(3);
  VecList zero(3, Vec::Zero(1));
  VecList ref{Vec::Constant(1, 1.0), Vec::Zero(1), Vec::Zero(1)};
  const auto e3 = compute_errors(zero, ref, c3);
  CHECK(e3[2](0) == 2.0);
  CHECK(e3[1](0) == 1.0);

  VecList same{Vec::Constant(2, 0.3), Vec::Constant(2, -1.7), Vec::Constant(2, 4.0)};
  for (const auto& v : compute_errors(same, same, c3)) {
    CHECK(v.isZero(0.0));
  }
}

TEST_CASE("compute_errors rejects mismatched lists") {
  const auto c = cascade_coefficients(2);
  VecList x{Vec::Zero(2), Vec::Zero(2)};
  VecList short_list{Vec::Zero(2)};
  VecList wrong_dim{Vec::Zero(2), Vec::Zero(3)};
  CHECK_THROWS_AS(compute_errors(x, short_list, c), ValidationError);
  CHECK_THROWS_AS(compute_errors(x, wrong_dim, c), ValidationError);
}

TEST_CASE("compute_errors is linear") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 5;
  const auto c = cascade_coefficients(n);
  VecList x, xr, x2, xr2;
  for (std::size_t j = 0; j < n; ++j) {
    Vec a(3), b(3);
    for (int k = 0; k < 3; ++k) {
      a(k) = u(rng);
      b(k) = u(rng);
    }
    x.push_back(a);
    xr.push_back(b);
    x2.push_back(2.0 * a);
    xr2.push_back(2.0 * b);
  }
  const auto e = compute_errors(x, xr, c);
  const auto e2 = compute_errors(x2, xr2, c);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK((e2[i] - 2.0 * e[i]).isZero(0.0));
  }
}

TEST_CASE("differentiated errors rebuild the next error") {
  // x = sin t, x_r = t^2 / 2 with analytic derivatives, n = 4.
  const std::size_t n = 4;
  const auto c = cascade_coefficients(n);
  auto errors_at = [&](double t) {
    VecList x, xr;
    for (std::size_t k = 0; k < n; ++k) {
      x.push_back(Vec::Constant(1, std::sin(t + static_cast<double>(k) * M_PI / 2.0)));
    }
    xr.push_back(Vec::Constant(1, 0.5 * t * t));
    xr.push_back(Vec::Constant(1, t));
    xr.push_back(Vec::Constant(1, 1.0));
    xr.push_back(Vec::Zero(1));
    return compute_errors(x, xr, c);
  };
  const double t = 0.7;
  for (double h : {1e-2, 5e-3}) {
    const auto ep = errors_at(t + h), em = errors_at(t - h), e0 = errors_at(t);
    for (std::size_t i = 2; i < n; ++i) {
      const double d = (ep[i - 1](0) - em[i - 1](0)) / (2.0 * h);
      const double rebuilt = d + e0[i - 1](0) + e0[i - 2](0);
      CHECK(std::abs(rebuilt - e0[i](0)) < 0.5 * h * h);
    }
  }
}

TEST_CASE("filtered_error examples") {
  CHECK(filtered_error(Vec::Zero(2), Vec::Zero(2), Vec::Ones(2)).isZero(0.0));
  Vec alpha(2);
  alpha << 1, 5;
  const Vec r = filtered_error(Vec::Ones(2), Vec::Zero(2), alpha);
  CHECK(r(0) == 1.0);
  CHECK(r(1) == 5.0);
  CHECK(filtered_error(Vec::Constant(1, 3.0), Vec::Constant(1, -1.0), Vec::Constant(1, 2.0))(0) == 5.0);
}

TEST_CASE("filtered_error rejects non-positive alpha") {
  CHECK_THROWS_AS(filtered_error(Vec::Zero(1), Vec::Zero(1), Vec::Zero(1)), ValidationError);
  CHECK_THROWS_AS(filtered_error(Vec::Zero(1), Vec::Zero(1), Vec::Constant(1, NAN)), ValidationError);
  CHECK_THROWS_AS(filtered_error(Vec::Zero(2), Vec::Zero(1), Vec::Ones(2)), ValidationError);
}
