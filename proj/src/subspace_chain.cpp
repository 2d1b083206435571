#include "adae/subspace_chain.hpp"

#include <algorithm>
#include <cmath>

namespace adae {

Complex choose_mu(const MatrixPencil& p) {
  static const Complex candidates[] = {{0, 0},  {1, 0},   {-1, 0}, {0.5, 0}, {-0.5, 0},
                                       {2, 0},  {-2, 0},  {0, 1},  {0, -1},  {1, 1},
                                       {-1, 1}, {1.5, 0}, {3, 0},  {-3, 0},  {0.25, 0.75}};
  const double ne = p.norm_E(), na = p.norm_A();
  Complex best = candidates[0];
  double best_score = -1.0;
  for (Complex mu : candidates) {
    const double s = min_singular_value(pencil_at(p.E(), p.A(), mu));
    const double score = s / (std::abs(mu) * ne + na + 1e-300);
    // Small shifts keep exp(-mu t) tame; only switch for a clear conditioning gain.
    if (score > 4.0 * best_score) {
      best_score = score;
      best = mu;
    }
  }
  if (!in_resolvent_set(p, best)) throw NotInResolventSet("no admissible shift found");
  return best;
}

SubspaceChain build_chain(const MatrixPencil& p, Complex mu, Side side, int max_k) {
  const Index n = p.dim();
  const TolerancePolicy& pol = p.tolerances();
  SubspaceChain chain;
  chain.mu = mu;
  chain.side = side;
  const CMatrix R = pseudo_resolvent(p, side, mu);
  const double ref = std::max(spectral_norm(R), 1e-300);
  chain.reference_norm = spectral_norm(R);
  if (max_k < 0) max_k = static_cast<int>(n);
  chain.V.push_back(Subspace::full(n));
  chain.W.push_back(Subspace(n));
  for (int j = 0; j <= max_k; ++j) {
    const Subspace& vj = chain.V.back();
    const Subspace& wj = chain.W.back();
    Subspace vnext = vj.dim() ? range_basis(R * vj.basis(), pol.rank_rel_tol, ref) : Subspace(n);
    CMatrix proj_out = R;
    if (wj.dim()) proj_out -= wj.basis() * (wj.basis().adjoint() * R);
    Subspace wnext = null_basis(proj_out, pol.rank_rel_tol, ref);
    const bool v_stable = subspace_distance(vj, vnext) < pol.subspace_tol;
    const bool w_stable = subspace_distance(wj, wnext) < pol.subspace_tol;
    chain.V.push_back(std::move(vnext));
    chain.W.push_back(std::move(wnext));
    if (v_stable && w_stable) {
      chain.stabilization_k = j;
      break;
    }
  }
  return chain;
}

DecompositionCheck check_decomposition(const SubspaceChain& chain, const TolerancePolicy& pol) {
  if (!chain.stabilization_k) throw ChainNotStabilized("chain has not stabilized");
  const size_t k = static_cast<size_t>(*chain.stabilization_k);
  const Subspace& v = chain.V[k];
  const Subspace& w = chain.W[k];
  DecompositionCheck out;
  out.gap = min_angle_sine(v, w);
  out.holds = (v.dim() + w.dim() == v.ambient_dim()) && out.gap > pol.subspace_tol;
  return out;
}

StaircaseForm::StaircaseForm(MatrixPencil pencil, Complex mu, Side side, CMatrix unitary,
                             std::vector<Index> block_sizes)
    : pencil_(std::move(pencil)),
      mu_(mu),
      side_(side),
      unitary_(std::move(unitary)),
      block_sizes_(std::move(block_sizes)) {}

Index StaircaseForm::offset(size_t block) const {
  Index off = 0;
  for (size_t i = 0; i < block && i < block_sizes_.size(); ++i) off += block_sizes_[i];
  return off;
}

CMatrix StaircaseForm::blocks_of(Complex lambda) const {
  return unitary_.adjoint() * pseudo_resolvent(pencil_, side_, lambda) * unitary_;
}

double StaircaseForm::pattern_residual(Complex lambda) const {
  const CMatrix R = pseudo_resolvent(pencil_, side_, lambda);
  if (R.size() == 0) return 0.0;
  CMatrix B = unitary_.adjoint() * R * unitary_;
  CMatrix masked = CMatrix::Zero(B.rows(), B.cols());
  for (size_t r = 0; r < block_sizes_.size(); ++r)
    for (size_t c = 0; c <= r; ++c) {
      if (r == 0 && c == 0) continue;
      const Index rows = block_sizes_[r], cols = block_sizes_[c];
      if (rows == 0 || cols == 0) continue;
      masked.block(offset(r), offset(c), rows, cols) = B.block(offset(r), offset(c), rows, cols);
    }
  return spectral_norm(masked) / std::max(1.0, spectral_norm(R));
}

std::vector<Complex> sample_resolvent_points(const MatrixPencil& p, Complex mu, int count) {
  static const Complex offsets[] = {{0.37, 0.21},  {-0.53, 0.77}, {1.13, -0.41}, {0.71, 1.3},
                                    {-0.29, -0.93}, {2.1, 0.5},    {-1.7, 1.1},   {0.05, -2.3},
                                    {3.3, -1.2},    {-2.6, -0.4},  {4.1, 2.7},    {-0.8, 3.9}};
  std::vector<Complex> out;
  for (Complex off : offsets) {
    if (static_cast<int>(out.size()) >= count) break;
    const Complex lambda = mu + off;
    if (in_resolvent_set(p, lambda)) out.push_back(lambda);
  }
  if (static_cast<int>(out.size()) < count) throw NotInResolventSet("too few sample points");
  return out;
}

StaircaseForm build_staircase(const MatrixPencil& p, Complex mu, Side side) {
  const Index n = p.dim();
  const TolerancePolicy& pol = p.tolerances();
  const CMatrix R = pseudo_resolvent(p, side, mu);
  const double ref = std::max(spectral_norm(R), 1e-300);
  Subspace vcur = Subspace::full(n);
  std::vector<Subspace> wblocks;
  for (Index guard = 0; guard <= n; ++guard) {
    Subspace vnext = vcur.dim() ? range_basis(R * vcur.basis(), pol.rank_rel_tol, ref) : Subspace(n);
    if (vnext.dim() == vcur.dim()) break;
    wblocks.push_back(complement_within(vcur, vnext, pol.rank_rel_tol));
    vcur = std::move(vnext);
  }
  CMatrix U(n, n);
  std::vector<Index> sizes{vcur.dim()};
  Index col = 0;
  U.leftCols(vcur.dim()) = vcur.basis();
  col += vcur.dim();
  for (auto it = wblocks.rbegin(); it != wblocks.rend(); ++it) {
    U.middleCols(col, it->dim()) = it->basis();
    col += it->dim();
    sizes.push_back(it->dim());
  }
  if (col != n) throw PatternViolation("staircase blocks do not fill the space");
  StaircaseForm form(p, mu, side, std::move(U), std::move(sizes));
  for (Complex lambda : sample_resolvent_points(p, mu, 3)) {
    if (form.pattern_residual(lambda) > pol.residual_tol)
      throw PatternViolation("staircase zero pattern violated; tolerance may be mis-set");
  }
  return form;
}

RestrictedGenerator restricted_generator(const MatrixPencil& p, const SubspaceChain& chain) {
  if (!chain.stabilization_k) throw ChainNotStabilized("chain has not stabilized");
  const TolerancePolicy& pol = p.tolerances();
  if (!check_decomposition(chain, pol).holds)
    throw DecompositionUnavailable("ran R^k and ker R^k do not split the space");
  RestrictedGenerator g;
  g.basis = chain.V[static_cast<size_t>(*chain.stabilization_k)];
  g.mu_used = chain.mu;
  g.side = chain.side;
  const Index d = g.basis.dim();
  if (d == 0) {
    g.matrix = CMatrix(0, 0);
    return g;
  }
  const CMatrix& Q = g.basis.basis();
  const CMatrix S = Q.adjoint() * pseudo_resolvent(p, chain.side, chain.mu) * Q;
  if (!(min_singular_value(S) >
        pol.rank_rel_tol * std::max(chain.reference_norm, 1e-300) * static_cast<double>(d)))
    throw NotInjectiveOnVk("R(mu) is not injective on the stabilized range");
  g.matrix = chain.mu * CMatrix::Identity(d, d) + S.partialPivLu().inverse();
  return g;
}

double generator_resolvent_mismatch(const MatrixPencil& p, const RestrictedGenerator& g,
                                    Complex lambda) {
  const Index d = g.basis.dim();
  const CMatrix R = pseudo_resolvent(p, g.side, lambda);
  if (d == 0) return 0.0;
  const CMatrix& Q = g.basis.basis();
  CMatrix lhs = (g.matrix - lambda * CMatrix::Identity(d, d)).partialPivLu().inverse();
  return spectral_norm(lhs - Q.adjoint() * R * Q);
}

YImpliResult y_impli_check(const MatrixPencil& p) {
  const TolerancePolicy& pol = p.tolerances();
  const CMatrix Ainv = -resolvent_at(p, 0.0).inverse;
  YImpliResult out;
  const Subspace ker_e = null_basis(p.E(), pol.rank_rel_tol);
  out.range_E = range_basis(p.E(), pol.rank_rel_tol);
  Subspace preimage =
      out.range_E.dim() ? range_basis(Ainv * out.range_E.basis(), pol.rank_rel_tol) : Subspace(p.dim());
  out.holds = min_angle_sine(ker_e, preimage) > pol.subspace_tol;
  if (out.holds && out.range_E.dim() > 0) {
    const CMatrix& Q = out.range_E.basis();
    CMatrix K = Q.adjoint() * p.E() * Ainv * Q;
    out.generator = K.partialPivLu().inverse();
  } else {
    out.generator = CMatrix(0, 0);
  }
  return out;
}

}  // namespace adae
