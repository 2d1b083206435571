#pragma once

#include <optional>
#include <vector>

#include "adae/pencil.hpp"

namespace adae {

/// V_j = ran R(mu)^j and W_j = ker R(mu)^j. Both lists run from j = 0 to the
/// stabilization index plus one (or to max_k + 1 when stabilization is not reached).
struct SubspaceChain {
  Complex mu;
  Side side = Side::left;
  std::vector<Subspace> V;
  std::vector<Subspace> W;
  std::optional<int> stabilization_k;
  double reference_norm = 0.0;  // ||R(mu)||
};

/// Picks a shift in the resolvent set with a well conditioned lambda E - A.
Complex choose_mu(const MatrixPencil& p);

SubspaceChain build_chain(const MatrixPencil& p, Complex mu, Side side, int max_k = -1);

struct DecompositionCheck {
  bool holds = false;
  double gap = 0.0;
};

DecompositionCheck check_decomposition(const SubspaceChain& chain, const TolerancePolicy& pol = {});

/// Orthonormal basis [V_k | W_k | ... | W_1] in which R(lambda) is block upper triangular.
class StaircaseForm {
 public:
  StaircaseForm(MatrixPencil pencil, Complex mu, Side side, CMatrix unitary,
                std::vector<Index> block_sizes);

  Complex mu() const { return mu_; }
  Side side() const { return side_; }
  const CMatrix& unitary() const { return unitary_; }
  /// Sizes in column order: dim V_k, dim W_k, ..., dim W_1.
  const std::vector<Index>& block_sizes() const { return block_sizes_; }
  /// Number of W blocks, the stabilization index of the range chain.
  int index() const { return static_cast<int>(block_sizes_.size()) - 1; }
  Index offset(size_t block) const;
  Index dynamic_dim() const { return block_sizes_.front(); }
  CMatrix dynamic_basis() const { return unitary_.leftCols(dynamic_dim()); }
  CMatrix algebraic_basis() const { return unitary_.rightCols(unitary_.cols() - dynamic_dim()); }
  const MatrixPencil& pencil() const { return pencil_; }

  /// U^H R(lambda) U.
  CMatrix blocks_of(Complex lambda) const;
  /// Norm of the entries that must vanish, relative to max(1, ||R(lambda)||).
  double pattern_residual(Complex lambda) const;

 private:
  MatrixPencil pencil_;
  Complex mu_;
  Side side_;
  CMatrix unitary_;
  std::vector<Index> block_sizes_;
};

StaircaseForm build_staircase(const MatrixPencil& p, Complex mu, Side side);

/// Deterministic test points in the resolvent set near mu.
std::vector<Complex> sample_resolvent_points(const MatrixPencil& p, Complex mu, int count);

struct RestrictedGenerator {
  Subspace basis;  // of ran R(mu)^k
  CMatrix matrix;  // A_R in that basis
  Complex mu_used;
  Side side = Side::left;
};

RestrictedGenerator restricted_generator(const MatrixPencil& p, const SubspaceChain& chain);

/// ||(A_R - lambda)^{-1} - Q^H R(lambda) Q||
double generator_resolvent_mismatch(const MatrixPencil& p, const RestrictedGenerator& g,
                                    Complex lambda);

struct YImpliResult {
  bool holds = false;
  Subspace range_E;
  /// Operator on ran E whose graph is {(E A^{-1} z, z)}; empty unless holds.
  CMatrix generator;
};

YImpliResult y_impli_check(const MatrixPencil& p);

}  // namespace adae
