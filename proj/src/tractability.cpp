#include <algorithm>

#include "adae/growth.hpp"

namespace adae {

TractabilityChain tractability_chain(const MatrixPencil& p, int max_stages) {
  const Index n = p.dim();
  const double tol = p.tolerances().rank_rel_tol;
  if (max_stages < 0) max_stages = static_cast<int>(n) + 1;
  TractabilityChain chain;
  CMatrix E = p.E(), A = p.A();
  Subspace accumulated(n);  // N_0 + ... + N_{i-1}
  const double ref = std::max(p.norm_E(), p.norm_A());
  for (int i = 0; i <= max_stages; ++i) {
    Subspace K = null_basis(E, tol, std::max(spectral_norm(E), 1e-300 * ref));
    if (K.dim() == 0) {
      chain.stages.push_back({E, A, CMatrix::Zero(n, n), CMatrix::Identity(n, n)});
      chain.index = i;
      return chain;
    }
    if (i == max_stages) break;
    if (i >= n) throw ChainStalled("projector chain did not terminate within n stages");
    // Complement of K: the accumulated kernels plus an orthogonal extension.
    CMatrix ks(n, K.dim() + accumulated.dim());
    ks << K.basis(), accumulated.basis();
    if (rank_with_tol(ks, tol, 1.0) < ks.cols())
      throw ChainStalled("ker E_i meets the earlier kernels; pencil is singular or tolerance mis-set");
    Subspace ext = orthogonal_complement(range_basis(ks, tol, 1.0));
    CMatrix basis(n, n);
    basis << K.basis(), accumulated.basis(), ext.basis();
    CMatrix sel = CMatrix::Zero(n, n);
    sel.leftCols(K.dim()) = K.basis();
    CMatrix Q = basis.transpose().partialPivLu().solve(sel.transpose()).transpose();
    CMatrix P = CMatrix::Identity(n, n) - Q;
    chain.stages.push_back({E, A, Q, P});
    accumulated = subspace_sum(accumulated, K, tol);
    CMatrix Enext = E - A * Q;
    A = A * P;
    E = std::move(Enext);
  }
  return chain;
}

}  // namespace adae
