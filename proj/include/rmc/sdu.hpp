#pragma once

#include "rmc/types.hpp"

namespace rmc {

/// g = S * D * U with S symmetric positive definite, D = diag(+-1) and U unit
/// upper triangular.
struct SduFactors {
  Mat S;
  Vec D;  // diagonal of D, entries exactly +1 or -1
  Mat U;
};

/// Determinants of the top-left k x k blocks, k = 1..m. Zeros are reported, not rejected.
Vec leading_minors(const Mat& g);

/// Decomposes g without pivoting. Throws SingularMinor(k) when
/// |Delta_k| < 1e-12 * max(1, ||g||_F^k).
///
/// Built from the unpivoted factorization g = L * Dt * Ut:
/// D = sign(Dt), S = L |Dt| L^T (SPD by congruence), U = D L^-T D Ut.
SduFactors sdu_decompose(const Mat& g);

/// The D factor alone: D_kk = sign(Delta_k / Delta_{k-1}).
Vec sign_matrix(const Mat& g);

/// Pivots of the unpivoted LDU elimination, Dt_kk = Delta_k / Delta_{k-1}.
Vec ldu_pivots(const Mat& g);

}  // namespace rmc
