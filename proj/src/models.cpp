#include "adae/models.hpp"

#include <algorithm>
#include <cmath>

namespace adae {

MatrixPencil heat_wave_pencil(const HeatWaveConfig& cfg, TolerancePolicy pol) {
  if (cfg.m < 4) throw InvalidInput("heat-wave model needs m >= 4");
  const Index m = cfg.m;
  const Index N = 2 * m;
  const double h = 1.0 / static_cast<double>(m);
  // G: x1 on nodes -> derivative on half nodes, with x1(1) = 0 eliminated.
  CMatrix G = CMatrix::Zero(N, N);
  for (Index j = 0; j < N; ++j) {
    G(j, j) = -1.0 / h;
    if (j + 1 < N) G(j, j + 1) = 1.0 / h;
  }
  CMatrix E = CMatrix::Zero(2 * N, 2 * N);
  CMatrix A = CMatrix::Zero(2 * N, 2 * N);
  E.topLeftCorner(N, N).setIdentity();
  A.topRightCorner(N, N) = -G.transpose();
  A.bottomLeftCorner(N, N) = G;
  for (Index j = 0; j < N; ++j) {
    // Half node j + 1/2 lies in (-1,0) for j < m: wave side owns it.
    const bool wave = j < m;
    E(N + j, N + j) = wave ? 1.0 : 0.0;
    A(N + j, N + j) = wave ? 0.0 : -1.0;
  }
  return MatrixPencil(std::move(E), std::move(A), pol);
}

RLCConfig RLCConfig::uniform(int m, double L, double C, double R, double G) {
  RLCConfig c;
  c.m = m;
  c.L.assign(static_cast<size_t>(m), L);
  c.R.assign(static_cast<size_t>(m), R);
  c.C.assign(static_cast<size_t>(m), C);
  c.G.assign(static_cast<size_t>(m), G);
  return c;
}

void RLCConfig::validate() const {
  if (m < 2) throw InvalidInput("RLC model needs m >= 2");
  const size_t n = static_cast<size_t>(m);
  if (L.size() != n || R.size() != n || C.size() != n || G.size() != n)
    throw InvalidInput("RLC profiles must have m samples each");
  for (const auto* v : {&L, &R, &C, &G})
    for (double x : *v)
      if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("RLC profiles must be finite and nonnegative");
  for (double x : C)
    if (!(x > 0.0)) throw InvalidInput("capacitance must be positive");
}

CVector RLCModel::boundary_forcing(Complex i1, Complex u0) const {
  CVector f = CVector::Zero(2 * m + 2);
  f(2 * m) = -i1;
  f(2 * m + 1) = -u0;
  return f;
}

RLCModel rlc_pencil(const RLCConfig& cfg, TolerancePolicy pol) {
  cfg.validate();
  const Index m = cfg.m;
  const Index n = 2 * m + 2;
  const double h = 1.0 / static_cast<double>(m);
  const Index iI = 0, iV = m, iTraceI = 2 * m, iTraceV = 2 * m + 1;
  auto V = [&](Index node) { return node == 0 ? iTraceV : iV + node - 1; };  // node 1..m
  auto I = [&](Index half) { return half == m ? iTraceI : iI + half; };      // I_{half+1/2}; m -> I(1)
  CMatrix E = CMatrix::Zero(n, n), A = CMatrix::Zero(n, n);
  for (Index j = 0; j < m; ++j) {
    // L I' = -R I - (V_{j+1} - V_j) / h
    const Index row = j;
    E(row, I(j)) = cfg.L[static_cast<size_t>(j)];
    A(row, I(j)) = -cfg.R[static_cast<size_t>(j)];
    A(row, V(j + 1)) += -1.0 / h;
    A(row, V(j)) += 1.0 / h;
  }
  for (Index j = 1; j <= m; ++j) {
    // C V_j' = -(I_{j+1/2} - I_{j-1/2}) / h - G V_j, with I(1) closing the last cell.
    const Index row = m + j - 1;
    E(row, V(j)) = cfg.C[static_cast<size_t>(j - 1)];
    A(row, V(j)) = -cfg.G[static_cast<size_t>(j - 1)];
    A(row, I(j)) += -1.0 / h;
    A(row, I(j - 1)) += 1.0 / h;
  }
  A(2 * m, iTraceI) = 1.0;
  A(2 * m + 1, iTraceV) = 1.0;

  RLCModel model{MatrixPencil(E, A, pol), E.topRows(2 * m), A.topRows(2 * m), A.bottomRows(2),
                 MatrixPencil(E.topLeftCorner(2 * m, 2 * m), A.topLeftCorner(2 * m, 2 * m), pol),
                 static_cast<int>(m)};
  return model;
}

CMatrix random_unitary(std::mt19937_64& rng, Index n, int reflectors) {
  std::normal_distribution<double> gauss;
  CMatrix U = CMatrix::Identity(n, n);
  for (int r = 0; r < reflectors; ++r) {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v /= v.norm();
    U = U - 2.0 * v * (v.adjoint() * U);
  }
  return U;
}

namespace {

CMatrix bounded_transform(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> scale(1.0, std::sqrt(10.0));
  RVector d(n);
  for (Index i = 0; i < n; ++i) d(i) = scale(rng);
  const CMatrix U1 = random_unitary(rng, n);
  const CMatrix U2 = random_unitary(rng, n);
  return U1 * d.cast<Complex>().asDiagonal() * U2;
}

}  // namespace

WeierstrassPencil weierstrass_pencil(const WeierstrassSpec& spec, TolerancePolicy pol) {
  const Index nd = static_cast<Index>(spec.ode_eigenvalues.size());
  Index nn = 0;
  int index = 0;
  for (int b : spec.nilpotent_block_sizes) {
    if (b < 1) throw InvalidInput("nilpotent block sizes must be positive");
    nn += b;
    index = std::max(index, b);
  }
  const Index n = nd + nn;
  if (n == 0) throw InvalidInput("Weierstrass pencil needs at least one eigenvalue or nilpotent block");
  CMatrix E = CMatrix::Zero(n, n), A = CMatrix::Zero(n, n);
  for (Index i = 0; i < nd; ++i) {
    E(i, i) = 1.0;
    A(i, i) = spec.ode_eigenvalues[static_cast<size_t>(i)];
  }
  Index off = nd;
  for (int b : spec.nilpotent_block_sizes) {
    for (Index i = 0; i < b; ++i) {
      A(off + i, off + i) = 1.0;
      if (i + 1 < b) E(off + i, off + i + 1) = 1.0;
    }
    off += b;
  }
  std::mt19937_64 rng(spec.transform_seed);
  const CMatrix W = bounded_transform(rng, n);
  const CMatrix T = bounded_transform(rng, n);
  return {MatrixPencil(W * E * T, W * A * T, pol), index};
}

WeierstrassSpec random_weierstrass_spec(std::mt19937_64& rng, int index, int max_dim) {
  if (index < 0 || index + 1 > max_dim) throw InvalidInput("index does not fit the dimension bound");
  std::uniform_real_distribution<double> re(-2.0, 0.5), im(-2.0, 2.0), unit(0.0, 1.0);
  WeierstrassSpec s;
  int budget = max_dim;
  if (index > 0) {
    s.nilpotent_block_sizes.push_back(index);
    budget -= index;
    // Extra blocks no larger than the leading one.
    while (budget > 2 && unit(rng) < 0.5) {
      int b = 1 + static_cast<int>(unit(rng) * index);
      b = std::min({b, index, budget - 1});
      s.nilpotent_block_sizes.push_back(b);
      budget -= b;
    }
  }
  const int nd = 1 + static_cast<int>(unit(rng) * std::min(budget, 4));
  for (int i = 0; i < std::min(nd, budget); ++i) s.ode_eigenvalues.push_back(Complex(re(rng), im(rng)));
  s.transform_seed = rng();
  return s;
}

}  // namespace adae
