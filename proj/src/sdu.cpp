#include "rmc/sdu.hpp"

#include <cmath>

namespace rmc {
namespace {

void require_square(const Mat& g, const char* who) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw ValidationError(std::string(who) + ": expected a non-empty square matrix");
  }
}

struct Ldu {
  Mat L;      // unit lower
  Vec pivot;  // Dt
  Mat Ut;     // unit upper
};

// Doolittle elimination without row exchanges. The running product of pivots
// is the leading minor, checked against the scale-aware threshold before use.
Ldu ldu_unpivoted(const Mat& g) {
  const Eigen::Index m = g.rows();
  const double norm = g.norm();
  Mat work = g;
  Ldu out{Mat::Identity(m, m), Vec::Zero(m), Mat::Identity(m, m)};

  double minor = 1.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double p = work(k, k);
    minor *= p;
    const double tol = 1e-12 * std::max(1.0, std::pow(norm, static_cast<double>(k + 1)));
    if (!std::isfinite(minor) || std::abs(minor) < tol) {
      throw SingularMinor(static_cast<std::size_t>(k + 1));
    }
    out.pivot(k) = p;
    for (Eigen::Index i = k + 1; i < m; ++i) {
      out.L(i, k) = work(i, k) / p;
      out.Ut(k, i) = work(k, i) / p;
    }
    const Eigen::Index rest = m - k - 1;
    if (rest > 0) {
      work.bottomRightCorner(rest, rest) -=
          work.col(k).tail(rest) * work.row(k).tail(rest) / p;
    }
  }
  return out;
}

}  // namespace

Vec leading_minors(const Mat& g) {
  require_square(g, "leading_minors");
  const Eigen::Index m = g.rows();
  Vec minors(m);
  for (Eigen::Index k = 1; k <= m; ++k) {
    minors(k - 1) = g.topLeftCorner(k, k).determinant();
  }
  return minors;
}

Vec ldu_pivots(const Mat& g) {
  require_square(g, "ldu_pivots");
  return ldu_unpivoted(g).pivot;
}

Vec sign_matrix(const Mat& g) {
  return ldu_pivots(g).unaryExpr([](double p) { return p > 0.0 ? 1.0 : -1.0; });
}

SduFactors sdu_decompose(const Mat& g) {
  require_square(g, "sdu_decompose");
  const Eigen::Index m = g.rows();
  const Ldu f = ldu_unpivoted(g);

  SduFactors out;
  out.D = f.pivot.unaryExpr([](double p) { return p > 0.0 ? 1.0 : -1.0; });

  const Mat S = f.L * f.pivot.cwiseAbs().asDiagonal() * f.L.transpose();
  out.S = 0.5 * (S + S.transpose());

  // L^-T is unit upper; conjugating with D keeps it unit upper.
  const Mat Linv_t = f.L.transpose().triangularView<Eigen::UnitUpper>().solve(Mat::Identity(m, m));
  Mat U = out.D.asDiagonal() * Linv_t * out.D.asDiagonal() * f.Ut;
  U.triangularView<Eigen::StrictlyLower>().setZero();
  U.diagonal().setOnes();
  out.U = std::move(U);
  return out;
}

}  // namespace rmc
