#include "adae/pencil.hpp"

#include <cmath>
#include <sstream>

namespace adae {

const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

MatrixPencil::MatrixPencil(CMatrix E, CMatrix A, TolerancePolicy pol)
    : E_(std::move(E)), A_(std::move(A)), pol_(pol) {
  if (E_.rows() != A_.rows() || E_.cols() != A_.cols())
    throw InvalidInput("E and A must share dimensions");
  if (E_.rows() != E_.cols()) throw InvalidInput("pencil must be square");
  if (!E_.allFinite() || !A_.allFinite()) throw InvalidInput("pencil entries must be finite");
  if (!probe_regular(E_, A_, pol_.rank_rel_tol)) throw SingularPencil("pencil is not regular");
  norm_e_ = spectral_norm(E_);
  norm_a_ = spectral_norm(A_);
}

static std::string lambda_text(Complex lambda) {
  std::ostringstream os;
  os << "lambda = " << lambda.real() << (lambda.imag() < 0 ? " - " : " + ")
     << std::abs(lambda.imag()) << "i is not in the resolvent set";
  return os.str();
}

ResolventSample resolvent_at(const MatrixPencil& p, Complex lambda) {
  const Index n = p.dim();
  ResolventSample out;
  out.lambda = lambda;
  if (n == 0) {
    out.inverse = CMatrix(0, 0);
    return out;
  }
  CMatrix m = pencil_at(p.E(), p.A(), lambda);
  RVector s = singular_values(m);
  const double thr = rank_threshold(s, n, n, p.tolerances().rank_rel_tol);
  out.min_singular = s(n - 1);
  if (!(out.min_singular > thr)) throw NotInResolventSet(lambda_text(lambda));
  out.inverse = m.partialPivLu().inverse();
  return out;
}

bool in_resolvent_set(const MatrixPencil& p, Complex lambda) {
  if (p.dim() == 0) return true;
  return pencil_full_rank(p.E(), p.A(), lambda, p.tolerances().rank_rel_tol);
}

CMatrix left_resolvent(const MatrixPencil& p, Complex lambda) {
  // E (A - lambda E)^{-1} = -E (lambda E - A)^{-1}
  return -(p.E() * resolvent_at(p, lambda).inverse);
}

CMatrix right_resolvent(const MatrixPencil& p, Complex lambda) {
  return -(resolvent_at(p, lambda).inverse * p.E());
}

CMatrix pseudo_resolvent(const MatrixPencil& p, Side side, Complex lambda) {
  return side == Side::left ? left_resolvent(p, lambda) : right_resolvent(p, lambda);
}

double pseudo_resolvent_residual(const MatrixPencil& p, Complex lambda, Complex mu, Side side) {
  if (lambda == mu) throw InvalidInput("resolvent identity needs distinct points");
  CMatrix rl = pseudo_resolvent(p, side, lambda);
  CMatrix rm = pseudo_resolvent(p, side, mu);
  if (rl.size() == 0) return 0.0;
  return spectral_norm((rl - rm) / (lambda - mu) - rl * rm);
}

LinearRelation make_relation(const CMatrix& first, const CMatrix& second, double rank_rel_tol) {
  LinearRelation L;
  L.dim_first = first.rows();
  L.dim_second = second.rows();
  CMatrix stacked(first.rows() + second.rows(), first.cols());
  stacked << first, second;
  L.space = range_basis(stacked, rank_rel_tol);
  return L;
}

LinearRelation relation_L_left(const MatrixPencil& p) {
  return make_relation(p.E(), p.A(), p.tolerances().rank_rel_tol);
}

LinearRelation relation_L_right(const MatrixPencil& p) {
  const Index n = p.dim();
  CMatrix m(n, 2 * n);
  m << p.A(), -p.E();
  LinearRelation L;
  L.dim_first = n;
  L.dim_second = n;
  L.space = null_basis(m, p.tolerances().rank_rel_tol);
  return L;
}

LinearRelation relation_from_pseudo_resolvent(const MatrixPencil& p, Complex mu, Side side) {
  CMatrix r = pseudo_resolvent(p, side, mu);
  const Index n = r.rows();
  CMatrix second = CMatrix::Identity(n, n) + mu * r;
  return make_relation(r, second, p.tolerances().rank_rel_tol);
}

RelationParts relation_parts(const LinearRelation& L, double rank_rel_tol) {
  const CMatrix X = L.first_block();
  const CMatrix Y = L.second_block();
  RelationParts out;
  out.dom = range_basis(X, rank_rel_tol, 1.0);
  out.ran = range_basis(Y, rank_rel_tol, 1.0);
  // ker L = X * null(Y), mul L = Y * null(X); the basis of L is orthonormal so these stay well scaled.
  Subspace ny = null_basis(Y, rank_rel_tol, 1.0);
  Subspace nx = null_basis(X, rank_rel_tol, 1.0);
  out.ker = ny.dim() ? range_basis(X * ny.basis(), rank_rel_tol, 1.0) : Subspace(L.dim_first);
  out.mul = nx.dim() ? range_basis(Y * nx.basis(), rank_rel_tol, 1.0) : Subspace(L.dim_second);
  if (L.dim() == 0) {
    out.dom = Subspace(L.dim_first);
    out.ran = Subspace(L.dim_second);
  }
  return out;
}

CMatrix relation_shifted_inverse(const LinearRelation& L, Complex lambda, double rank_rel_tol) {
  if (L.dim_first != L.dim_second) throw InvalidInput("relation must act on a single space");
  const Index n = L.dim_first;
  const CMatrix X = L.first_block();
  const CMatrix Y = L.second_block();
  // (L - lambda)^{-1} = {(y - lambda x, x)}; it is an operator on C^n iff Y - lambda X is invertible.
  CMatrix D = Y - lambda * X;
  if (L.dim() != n || rank_with_tol(D, rank_rel_tol, 1.0) < n)
    throw NotInResolventSet(lambda_text(lambda));
  return X * D.partialPivLu().inverse();
}

double mild_membership_residual(const MatrixPencil& p, const SampledPath& trajectory,
                                const SampledPath& forcing, const CVector& x0, Complex lambda) {
  const size_t count = trajectory.times.size();
  if (count < 4) throw GridTooCoarse("mild residual needs at least 4 samples");
  if (forcing.times.size() != count || forcing.values.cols() != static_cast<Index>(count) ||
      trajectory.values.cols() != static_cast<Index>(count))
    throw InvalidInput("trajectory and forcing must share the time grid");
  const Index n = p.dim();
  const CMatrix inv = resolvent_at(p, lambda).inverse;
  const LinearRelation Lr = relation_L_right(p);

  CVector ix = CVector::Zero(n), jf = CVector::Zero(n);
  double worst = 0.0;
  for (size_t j = 0; j < count; ++j) {
    if (j > 0) {
      const double h = trajectory.times[j] - trajectory.times[j - 1];
      const Index a = static_cast<Index>(j - 1), b = static_cast<Index>(j);
      ix += 0.5 * h * (trajectory.values.col(a) + trajectory.values.col(b));
      jf += 0.5 * h * (forcing.values.col(a) + forcing.values.col(b));
    }
    CVector pair(2 * n);
    CVector g = inv * jf;
    pair.head(n) = ix - g;
    pair.tail(n) = trajectory.values.col(static_cast<Index>(j)) - x0 - lambda * g;
    worst = std::max(worst, Lr.space.distance_to(pair));
  }
  return worst;
}

}  // namespace adae
