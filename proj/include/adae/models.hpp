#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "adae/pencil.hpp"

namespace adae {

struct HeatWaveConfig {
  int m = 50;  // cells per unit length
};

/// Wave equation on (-1,0) coupled to a heat equation on (0,1), staggered grid.
/// Unknowns: x1 at nodes -1 + j h (j < 2m), x2 at half nodes.
MatrixPencil heat_wave_pencil(const HeatWaveConfig& cfg, TolerancePolicy pol = {});

struct RLCConfig {
  int m = 50;
  std::vector<double> L, R;  // at cell midpoints (j + 1/2) h, j = 0..m-1
  std::vector<double> C, G;  // at nodes j h, j = 1..m

  static RLCConfig uniform(int m, double L, double C, double R, double G);
  void validate() const;
};

/// Telegraph line with boundary rows. Unknown order:
/// [I_{1/2}..I_{m-1/2}, V_1..V_m, I(1), V(0)]; row order: [L rows, C rows, I(1) row, V(0) row].
/// E = [E0; 0] and A = [A0; Gamma] with Gamma the point evaluations.
struct RLCModel {
  MatrixPencil pencil;    // square companion, boundary rows as algebraic equations
  CMatrix E0, A0, Gamma;  // boundary-structured blocks
  MatrixPencil interior;  // restriction to ker Gamma
  int m = 0;

  /// Forcing vector for boundary data: I(1) = i1, V(0) = u0.
  CVector boundary_forcing(Complex i1, Complex u0) const;
};

RLCModel rlc_pencil(const RLCConfig& cfg, TolerancePolicy pol = {});

struct WeierstrassSpec {
  std::vector<Complex> ode_eigenvalues;
  std::vector<int> nilpotent_block_sizes;
  std::uint64_t transform_seed = 0;
};

struct WeierstrassPencil {
  MatrixPencil pencil;
  int true_index = 0;
};

/// (W E T, W A T) with E = diag(I, N), A = diag(J, I) and cond(W), cond(T) <= 10.
WeierstrassPencil weierstrass_pencil(const WeierstrassSpec& spec, TolerancePolicy pol = {});

/// Random WeierstrassSpec with the given index, at least one dynamic mode and dimension <= max_dim.
WeierstrassSpec random_weierstrass_spec(std::mt19937_64& rng, int index, int max_dim = 12);

/// Random unitary built from Householder reflectors.
CMatrix random_unitary(std::mt19937_64& rng, Index n, int reflectors = 3);

}  // namespace adae
