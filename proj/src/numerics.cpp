#include "adae/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lapack_shim.hpp"

namespace adae {

Subspace::Subspace(Index ambient_dim) : basis_(ambient_dim, 0), ambient_(ambient_dim) {}

Subspace Subspace::from_orthonormal(CMatrix basis) {
  Subspace s;
  s.ambient_ = basis.rows();
  s.basis_ = std::move(basis);
  return s;
}

Subspace Subspace::full(Index n) { return from_orthonormal(CMatrix::Identity(n, n)); }

CMatrix Subspace::projector() const { return basis_ * basis_.adjoint(); }

double Subspace::distance_to(const CVector& x) const {
  if (dim() == 0) return x.norm();
  return (x - basis_ * (basis_.adjoint() * x)).norm();
}

Svd svd(const CMatrix& m, bool want_vectors) {
  Svd out;
  const Index rows = m.rows(), cols = m.cols();
  const Index k = std::min(rows, cols);
  out.sigma = RVector::Zero(k);
  if (want_vectors) {
    out.U = CMatrix::Identity(rows, rows);
    out.V = CMatrix::Identity(cols, cols);
  }
  if (k == 0) return out;
  CMatrix a = m;
  std::vector<double> sigma(static_cast<size_t>(k));
  lapack_int info;
  if (want_vectors) {
    info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', static_cast<lapack_int>(rows),
                          static_cast<lapack_int>(cols), a.data(), static_cast<lapack_int>(rows),
                          sigma.data(), out.U.data(), static_cast<lapack_int>(rows),
                          out.V.data(), static_cast<lapack_int>(cols));
    if (info > 0) {
      // zgesdd occasionally fails to converge; the QR-iteration driver is slower but sturdier.
      a = m;
      std::vector<double> superb(static_cast<size_t>(k));
      info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'A', 'A', static_cast<lapack_int>(rows),
                            static_cast<lapack_int>(cols), a.data(), static_cast<lapack_int>(rows),
                            sigma.data(), out.U.data(), static_cast<lapack_int>(rows),
                            out.V.data(), static_cast<lapack_int>(cols), superb.data());
    }
    // LAPACK returns V^H.
    out.V.adjointInPlace();
  } else {
    info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(rows),
                          static_cast<lapack_int>(cols), a.data(), static_cast<lapack_int>(rows),
                          sigma.data(), nullptr, 1, nullptr, 1);
    if (info > 0) {
      a = m;
      std::vector<double> superb(static_cast<size_t>(k));
      info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(rows),
                            static_cast<lapack_int>(cols), a.data(), static_cast<lapack_int>(rows),
                            sigma.data(), nullptr, 1, nullptr, 1, superb.data());
    }
  }
  if (info != 0) throw Error("singular value decomposition failed");
  for (Index i = 0; i < k; ++i) out.sigma(i) = sigma[static_cast<size_t>(i)];
  return out;
}

RVector singular_values(const CMatrix& m) { return svd(m, false).sigma; }

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  // The largest eigenvalue of the Gram matrix carries full relative accuracy.
  if (std::min(m.rows(), m.cols()) > 48) {
    const CMatrix g = m.rows() >= m.cols() ? CMatrix(m.adjoint() * m) : CMatrix(m * m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  return singular_values(m)(0);
}

double min_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  RVector s = singular_values(m);
  return s(s.size() - 1);
}

double rank_threshold(const RVector& sigma, Index rows, Index cols, double rank_rel_tol,
                      double reference) {
  double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  if (reference > 0.0) smax = std::max(smax, reference);
  return rank_rel_tol * smax * static_cast<double>(std::max(rows, cols));
}

static Index count_above(const RVector& sigma, double thr) {
  Index r = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > thr) ++r;
  return r;
}

Index rank_with_tol(const CMatrix& m, double rank_rel_tol, double reference) {
  if (m.size() == 0) return 0;
  RVector s = singular_values(m);
  return count_above(s, rank_threshold(s, m.rows(), m.cols(), rank_rel_tol, reference));
}

Subspace range_basis(const CMatrix& m, double rank_rel_tol, double reference) {
  if (m.size() == 0) return Subspace(m.rows());
  Svd d = svd(m, true);
  Index r = count_above(d.sigma, rank_threshold(d.sigma, m.rows(), m.cols(), rank_rel_tol, reference));
  return Subspace::from_orthonormal(d.U.leftCols(r));
}

Subspace null_basis(const CMatrix& m, double rank_rel_tol, double reference) {
  if (m.cols() == 0) return Subspace(0);
  if (m.rows() == 0) return Subspace::full(m.cols());
  Svd d = svd(m, true);
  Index r = count_above(d.sigma, rank_threshold(d.sigma, m.rows(), m.cols(), rank_rel_tol, reference));
  return Subspace::from_orthonormal(d.V.rightCols(m.cols() - r));
}

double inclusion_defect(const Subspace& u, const Subspace& v) {
  if (u.dim() == 0) return 0.0;
  CMatrix resid = u.basis();
  if (v.dim() > 0) resid -= v.basis() * (v.basis().adjoint() * u.basis());
  return spectral_norm(resid);
}

double subspace_distance(const Subspace& u, const Subspace& v) {
  if (u.dim() != v.dim()) return 1.0;
  if (u.dim() == 0) return 0.0;
  return std::min(1.0, std::max(inclusion_defect(u, v), inclusion_defect(v, u)));
}

double min_angle_sine(const Subspace& u, const Subspace& v) {
  if (u.dim() == 0 || v.dim() == 0) return 1.0;
  double c = spectral_norm(u.basis().adjoint() * v.basis());
  c = std::min(1.0, c);
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

Subspace subspace_sum(const Subspace& u, const Subspace& v, double rank_rel_tol) {
  CMatrix both(u.ambient_dim(), u.dim() + v.dim());
  both << u.basis(), v.basis();
  return range_basis(both, rank_rel_tol, 1.0);
}

Subspace orthogonal_complement(const Subspace& u) {
  const Index n = u.ambient_dim();
  if (u.dim() == 0) return Subspace::full(n);
  Svd d = svd(u.basis(), true);
  return Subspace::from_orthonormal(d.U.rightCols(n - u.dim()));
}

Subspace complement_within(const Subspace& outer, const Subspace& inner, double rank_rel_tol) {
  if (outer.dim() == 0) return Subspace(outer.ambient_dim());
  CMatrix resid = outer.basis();
  if (inner.dim() > 0) resid -= inner.basis() * (inner.basis().adjoint() * outer.basis());
  Svd d = svd(resid, true);
  // The complement has a known dimension; pick the dominant directions.
  Index want = std::max<Index>(0, outer.dim() - inner.dim());
  Index r = count_above(d.sigma, rank_threshold(d.sigma, resid.rows(), resid.cols(), rank_rel_tol, 1.0));
  r = std::min(r, want);
  return Subspace::from_orthonormal(d.U.leftCols(r));
}

CMatrix oblique_projector(const Subspace& v, const Subspace& w) {
  const Index n = v.ambient_dim();
  if (v.dim() + w.dim() != n) throw DecompositionUnavailable("subspaces do not form a direct sum");
  if (v.dim() == 0) return CMatrix::Zero(n, n);
  CMatrix basis(n, n);
  basis << v.basis(), w.basis();
  CMatrix sel = CMatrix::Zero(n, n);
  sel.leftCols(v.dim()) = v.basis();
  // P = [V 0] [V W]^{-1}, i.e. solve [V W]^T P^T = [V 0]^T.
  Eigen::PartialPivLU<CMatrix> lu(basis.transpose());
  return lu.solve(sel.transpose()).transpose();
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double max_hermitian_eigenvalue(const CMatrix& h) {
  if (h.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_hermitian_eigenvalue(const CMatrix& h) {
  if (h.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

double one_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

CMatrix pade_low(const CMatrix& a, const double* b, int degree) {
  const Index n = a.rows();
  CMatrix I = CMatrix::Identity(n, n);
  CMatrix a2 = a * a;
  CMatrix pw = I;
  CMatrix u_inner = CMatrix::Zero(n, n);
  CMatrix v = CMatrix::Zero(n, n);
  for (int j = 0; j <= degree; j += 2) {
    v += b[j] * pw;
    u_inner += b[j + 1] * pw;
    pw = pw * a2;
  }
  CMatrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

CMatrix expm(const CMatrix& m) {
  const Index n = m.rows();
  if (n == 0) return CMatrix(0, 0);
  static const double b3[] = {120, 60, 12, 1};
  static const double b5[] = {30240, 15120, 3360, 420, 30, 1};
  static const double b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static const double b9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                              2162160., 110880., 3960., 90., 1.};
  static const double b13[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                               1187353796428800., 129060195264000., 10559470521600.,
                               670442572800., 33522128640., 1323241920., 40840800., 960960.,
                               16380., 182., 1.};
  const double nrm = one_norm(m);
  if (nrm <= 1.495585217958292e-2) return pade_low(m, b3, 3);
  if (nrm <= 2.539398330063230e-1) return pade_low(m, b5, 5);
  if (nrm <= 9.504178996162932e-1) return pade_low(m, b7, 7);
  if (nrm <= 2.097847961257068e0) return pade_low(m, b9, 9);

  const double theta13 = 5.371920351148152;
  int s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
  CMatrix a = m / std::ldexp(1.0, s);
  CMatrix I = CMatrix::Identity(n, n);
  CMatrix a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  CMatrix u = a * (a6 * (b13[13] * a6 + b13[11] * a4 + b13[9] * a2) + b13[7] * a6 +
                   b13[5] * a4 + b13[3] * a2 + b13[1] * I);
  CMatrix v = a6 * (b13[12] * a6 + b13[10] * a4 + b13[8] * a2) + b13[6] * a6 + b13[4] * a4 +
              b13[2] * a2 + b13[0] * I;
  CMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {lo};
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
  out.front() = lo;
  out.back() = hi;
  return out;
}

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<size_t>(count), 0.0);
  weights.assign(static_cast<size_t>(count), 0.0);
  for (int i = 0; i < count; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= count; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<size_t>(i)] = x;
    weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

CMatrix pencil_at(const CMatrix& E, const CMatrix& A, Complex lambda) { return lambda * E - A; }

bool pencil_full_rank(const CMatrix& E, const CMatrix& A, Complex lambda, double rank_rel_tol) {
  CMatrix p = pencil_at(E, A, lambda);
  return rank_with_tol(p, rank_rel_tol) == std::min(p.rows(), p.cols());
}

bool probe_regular(const CMatrix& E, const CMatrix& A, double rank_rel_tol) {
  if (E.rows() != E.cols() || A.rows() != A.cols() || E.rows() != A.rows()) return false;
  if (E.rows() == 0) return true;
  const std::vector<double> radii = logspace(1.0, 1e6, 8);
  for (size_t i = 0; i < radii.size(); ++i) {
    double phase = 2.0 * std::numbers::pi * std::fmod(0.6180339887498949 * (i + 1), 1.0) + 0.3;
    if (pencil_full_rank(E, A, std::polar(radii[i], phase), rank_rel_tol)) return true;
  }
  return false;
}

}  // namespace adae
