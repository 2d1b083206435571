#include <algorithm>
#include <cmath>

#include "adae/numerics.hpp"
#include "lapack_shim.hpp"

namespace adae {
namespace {

// zgges sorts through a plain function pointer, so the scaling travels in thread-locals.
thread_local double g_norm_e = 1.0;
thread_local double g_norm_a = 1.0;
constexpr double kInfiniteRatio = 1e-3;

bool is_finite_pair(std::complex<double> alpha, std::complex<double> beta) {
  return std::abs(beta) * g_norm_a > kInfiniteRatio * std::abs(alpha) * g_norm_e;
}

lapack_logical select_finite(const lapack_complex_double* alpha, const lapack_complex_double* beta) {
  return is_finite_pair(*alpha, *beta) ? 1 : 0;
}

}  // namespace

QzResult qz_canonical(const CMatrix& E, const CMatrix& A, const TolerancePolicy& pol) {
  if (E.rows() != E.cols() || A.rows() != A.cols() || E.rows() != A.rows())
    throw InvalidInput("pencil must be square");
  const Index n = E.rows();
  QzResult out;
  if (n == 0) return out;
  if (!probe_regular(E, A, pol.rank_rel_tol)) throw SingularPencil("pencil is not regular");

  g_norm_e = std::max(spectral_norm(E), 1e-300);
  g_norm_a = std::max(spectral_norm(A), 1e-300);
  CMatrix s = A, t = E;
  std::vector<std::complex<double>> alpha(static_cast<size_t>(n)), beta(static_cast<size_t>(n));
  lapack_int sdim = 0;
  const lapack_int ln = static_cast<lapack_int>(n);
  lapack_int info = LAPACKE_zgges(LAPACK_COL_MAJOR, 'N', 'N', 'S', select_finite, ln, s.data(), ln,
                                  t.data(), ln, &sdim, alpha.data(), beta.data(), nullptr, 1,
                                  nullptr, 1);
  // info == n+2 flags reordering trouble from rounding; the eigenvalues are still valid.
  if (info != 0 && info != ln + 2) throw Error("generalized Schur decomposition failed");

  for (Index i = 0; i < n; ++i) {
    const auto a = alpha[static_cast<size_t>(i)], b = beta[static_cast<size_t>(i)];
    if (std::abs(a) <= 1e-14 * g_norm_a && std::abs(b) <= 1e-14 * g_norm_e)
      throw SingularPencil("generalized eigenvalue 0/0");
    if (is_finite_pair(a, b))
      out.finite_eigenvalues.push_back(a / b);
    else
      ++out.infinite_count;
  }
  if (out.infinite_count == 0) return out;

  // Nilpotent part: N = S_inf^{-1} T_inf with the tiny diagonal of T_inf removed.
  CMatrix t_inf = t.bottomRightCorner(out.infinite_count, out.infinite_count);
  CMatrix s_inf = s.bottomRightCorner(out.infinite_count, out.infinite_count);
  for (Index i = 0; i < t_inf.rows(); ++i) t_inf(i, i) = 0.0;
  CMatrix N = s_inf.triangularView<Eigen::Upper>().solve(
      CMatrix(t_inf.triangularView<Eigen::StrictlyUpper>()));
  // Jordan blocks of size j split the infinite eigenvalue by about eps^(1/j), so
  // vanished powers sit near 1e-5 relative while live ones stay near 1e-1.
  const double scale = std::max(spectral_norm(N), g_norm_e / g_norm_a);
  CMatrix power = CMatrix::Identity(N.rows(), N.cols());
  int k = 0;
  while (k < N.rows()) {
    power = power * N;
    ++k;
    if (spectral_norm(power) <= 1e-3 * std::pow(scale, k)) break;
  }
  out.nilpotency_index = k;
  return out;
}

}  // namespace adae
