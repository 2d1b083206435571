#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <vector>

#include "adae/errors.hpp"

namespace adae {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thresholds shared by every rank and subspace decision.
struct TolerancePolicy {
  double rank_rel_tol = 1e-10;
  double subspace_tol = 1e-8;
  double residual_tol = 1e-9;
};

/// Subspace of C^n stored through an orthonormal basis (n x dim).
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(Index ambient_dim);
  /// Takes ownership of a basis assumed orthonormal.
  static Subspace from_orthonormal(CMatrix basis);
  static Subspace full(Index n);

  Index dim() const { return basis_.cols(); }
  Index ambient_dim() const { return ambient_; }
  const CMatrix& basis() const { return basis_; }
  CMatrix projector() const;
  /// ||(I - P) x|| for the orthogonal projector P.
  double distance_to(const CVector& x) const;

 private:
  CMatrix basis_;
  Index ambient_ = 0;
};

struct Svd {
  RVector sigma;  // descending
  CMatrix U;      // full, rows x rows (empty when not requested)
  CMatrix V;      // full, cols x cols (empty when not requested)
};

Svd svd(const CMatrix& m, bool want_vectors);
RVector singular_values(const CMatrix& m);
double spectral_norm(const CMatrix& m);
double min_singular_value(const CMatrix& m);

/// Threshold applied to singular values. A non-positive reference
/// falls back to sigma_max of the matrix itself.
double rank_threshold(const RVector& sigma, Index rows, Index cols, double rank_rel_tol,
                      double reference = -1.0);

Index rank_with_tol(const CMatrix& m, double rank_rel_tol, double reference = -1.0);
Subspace range_basis(const CMatrix& m, double rank_rel_tol, double reference = -1.0);
Subspace null_basis(const CMatrix& m, double rank_rel_tol, double reference = -1.0);

/// Gap between subspaces: sine of the largest principal angle, 1 for unequal dims.
double subspace_distance(const Subspace& u, const Subspace& v);
/// Sine of the smallest principal angle; 1 if either subspace is trivial.
double min_angle_sine(const Subspace& u, const Subspace& v);
/// max over unit x in u of dist(x, v).
double inclusion_defect(const Subspace& u, const Subspace& v);

Subspace subspace_sum(const Subspace& u, const Subspace& v, double rank_rel_tol);
Subspace orthogonal_complement(const Subspace& u);
/// Orthogonal complement of inner inside outer (inner assumed contained).
Subspace complement_within(const Subspace& outer, const Subspace& inner, double rank_rel_tol);

/// Projector onto v along w; v and w must span the ambient space directly.
CMatrix oblique_projector(const Subspace& v, const Subspace& w);

CMatrix hermitian_part(const CMatrix& m);
double max_hermitian_eigenvalue(const CMatrix& h);
double min_hermitian_eigenvalue(const CMatrix& h);

/// Matrix exponential by scaling and squaring with a degree-13 Pade approximant.
CMatrix expm(const CMatrix& m);

std::vector<double> logspace(double lo, double hi, int count);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

/// Pencil lambda E - A.
CMatrix pencil_at(const CMatrix& E, const CMatrix& A, Complex lambda);

/// True when lambda E - A has full rank under the given tolerance.
bool pencil_full_rank(const CMatrix& E, const CMatrix& A, Complex lambda, double rank_rel_tol);

/// Regularity probe with 8 deterministic points of modulus in [1, 1e6].
bool probe_regular(const CMatrix& E, const CMatrix& A, double rank_rel_tol);

/// Eigenstructure oracle based on the generalized Schur decomposition.
struct QzResult {
  std::vector<Complex> finite_eigenvalues;
  Index infinite_count = 0;
  int nilpotency_index = 0;  // 0 when E is invertible
};

QzResult qz_canonical(const CMatrix& E, const CMatrix& A, const TolerancePolicy& pol = {});

}  // namespace adae
