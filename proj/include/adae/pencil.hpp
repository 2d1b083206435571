#pragma once

#include <string>
#include <vector>

#include "adae/numerics.hpp"

namespace adae {

enum class Side { left, right };

const char* to_string(Side s);

/// Regular square pencil lambda E - A. Regularity is checked by probing on construction.
class MatrixPencil {
 public:
  MatrixPencil(CMatrix E, CMatrix A, TolerancePolicy pol = {});

  const CMatrix& E() const { return E_; }
  const CMatrix& A() const { return A_; }
  const TolerancePolicy& tolerances() const { return pol_; }
  Index dim() const { return E_.rows(); }
  double norm_E() const { return norm_e_; }
  double norm_A() const { return norm_a_; }

 private:
  CMatrix E_;
  CMatrix A_;
  TolerancePolicy pol_;
  double norm_e_ = 0.0;
  double norm_a_ = 0.0;
};

struct ResolventSample {
  Complex lambda;
  CMatrix inverse;  // (lambda E - A)^{-1}
  double min_singular = 0.0;
};

ResolventSample resolvent_at(const MatrixPencil& p, Complex lambda);
bool in_resolvent_set(const MatrixPencil& p, Complex lambda);

/// E (A - lambda E)^{-1}
CMatrix left_resolvent(const MatrixPencil& p, Complex lambda);
/// (A - lambda E)^{-1} E
CMatrix right_resolvent(const MatrixPencil& p, Complex lambda);
CMatrix pseudo_resolvent(const MatrixPencil& p, Side side, Complex lambda);

/// || (R(lambda) - R(mu)) / (lambda - mu) - R(lambda) R(mu) ||
double pseudo_resolvent_residual(const MatrixPencil& p, Complex lambda, Complex mu, Side side);

/// Subspace of C^first x C^second in stacked coordinates.
struct LinearRelation {
  Index dim_first = 0;
  Index dim_second = 0;
  Subspace space;

  Index dim() const { return space.dim(); }
  CMatrix first_block() const { return space.basis().topRows(dim_first); }
  CMatrix second_block() const { return space.basis().bottomRows(dim_second); }
};

LinearRelation make_relation(const CMatrix& first, const CMatrix& second, double rank_rel_tol);

/// {(Ex, Ax)}
LinearRelation relation_L_left(const MatrixPencil& p);
/// {(x, w) : E w = A x}
LinearRelation relation_L_right(const MatrixPencil& p);
/// ran [R(mu); I + mu R(mu)]
LinearRelation relation_from_pseudo_resolvent(const MatrixPencil& p, Complex mu, Side side);

struct RelationParts {
  Subspace dom, ker, ran, mul;
};

RelationParts relation_parts(const LinearRelation& L, double rank_rel_tol = 1e-10);

/// (L - lambda)^{-1} as a matrix; throws NotInResolventSet when not an everywhere defined operator.
CMatrix relation_shifted_inverse(const LinearRelation& L, Complex lambda, double rank_rel_tol = 1e-10);

/// Samples on a uniform grid: column j holds the state at times[j].
struct SampledPath {
  std::vector<double> times;
  CMatrix values;  // n x times.size()
};

double mild_membership_residual(const MatrixPencil& p, const SampledPath& trajectory,
                                const SampledPath& forcing, const CVector& x0, Complex lambda);

}  // namespace adae
