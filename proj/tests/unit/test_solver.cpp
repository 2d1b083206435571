#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "adae/models.hpp"
#include "adae/solver.hpp"

using namespace adae;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

CVector v2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

const CMatrix N2 = m2(0, 1, 0, 0);
const CMatrix I2 = CMatrix::Identity(2, 2);

MatrixPencil diag_index1() { return MatrixPencil(m2(1, 0, 0, 0), m2(-1, 0, 0, 1)); }
MatrixPencil semi_dissipative() { return MatrixPencil(m2(1, 0, 0, 0), m2(0, -1, 1, 0)); }

/// f(t) = (0, t)
ForcingSignal ramp_second() { return ForcingSignal::polynomial({v2(0, 0), v2(0, 1)}); }

double max_error(const SolveReport& r, const std::function<CVector(double)>& exact) {
  double e = 0.0;
  for (size_t j = 0; j < r.times.size(); ++j)
    e = std::max(e, (r.trajectory.col(j) - exact(r.times[j])).norm());
  return e;
}

}  // namespace

TEST(Grid, Uniform) {
  const std::vector<double> g = uniform_grid(0.0, 1.0, 4);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[2], 0.5);
  EXPECT_THROW(uniform_grid(1.0, 1.0, 4), InvalidInput);
  EXPECT_THROW(uniform_grid(0.0, 1.0, 0), InvalidInput);
}

TEST(Split, Examples) {
  const MatrixPencil p = diag_index1();
  const SubspaceChain chain = build_chain(p, 0.0, Side::right);
  const StaircaseForm stair = build_staircase(p, 0.0, Side::right);

  const SplitForcing z = split_forcing(stair, chain, ForcingSignal::zero(2), 0.0);
  EXPECT_EQ(z.f_R.value(0.3).norm(), 0.0);
  EXPECT_EQ(z.f_K.value(0.3).norm(), 0.0);

  const ForcingSignal f = ForcingSignal::polynomial({v2(2, 3), v2(1, -1)});
  const SplitForcing s = split_forcing(stair, chain, f, 0.0);
  for (double t : {0.0, 0.7}) {
    const CVector ft = f.value(t);
    EXPECT_LT((s.f_R.value(t) - v2(-ft(0), 0)).norm(), 1e-14);
    EXPECT_LT((s.f_K.value(t) - v2(0, ft(1))).norm(), 1e-14);
  }

  // Forcing whose image lies in V_k has no kernel part.
  const SplitForcing r = split_forcing(stair, chain, ForcingSignal::polynomial({v2(1, 0)}), 0.0);
  EXPECT_LT(r.f_K.value(0.5).norm(), 1e-14);
}

TEST(Init, Examples) {
  const MatrixPencil d = diag_index1();
  const SubspaceChain cd = build_chain(d, 0.0, Side::right);
  const StaircaseForm sd = build_staircase(d, 0.0, Side::right);
  const ConsistentInit a =
      consistent_initialize(d, sd, cd, v2(1, 0), ForcingSignal::zero(2), 0.0, InitMode::classical);
  EXPECT_LT((a.x - v2(1, 0)).norm(), 1e-14);
  EXPECT_LT(a.correction_norm, 1e-14);

  const MatrixPencil n(N2, I2);
  const ConsistentInit b = consistent_initialize(n, build_staircase(n, 0.0, Side::right),
                                                 build_chain(n, 0.0, Side::right), v2(0, 0),
                                                 ramp_second(), 0.0, InitMode::classical);
  EXPECT_LT((b.x - v2(-1, 0)).norm(), 1e-13);

  const MatrixPencil s = semi_dissipative();
  const Complex mu = choose_mu(s);
  const ConsistentInit c = consistent_initialize(s, build_staircase(s, mu, Side::right),
                                                 build_chain(s, mu, Side::right), v2(0, 0),
                                                 ramp_second(), mu, InitMode::classical);
  EXPECT_LT((c.x - v2(0, 1)).norm(), 1e-12);
}

TEST(Init, SampledForcingFailsSmoothnessGate) {
  const ForcingSignal sampled2 = ForcingSignal::sampled(0.0, 0.1, CMatrix::Zero(2, 11));
  EXPECT_THROW(solve_decoupled(MatrixPencil(N2, I2), v2(0, 0), sampled2, uniform_grid(0, 1, 10)),
               InsufficientSmoothness);

  // Index 3 needs second derivatives already for the initial value.
  const CMatrix N3 = (CMatrix(3, 3) << 0, 1, 0, 0, 0, 1, 0, 0, 0).finished();
  const MatrixPencil n3(N3, CMatrix::Identity(3, 3));
  const ForcingSignal sampled3 = ForcingSignal::sampled(0.0, 0.1, CMatrix::Zero(3, 11));
  EXPECT_THROW(consistent_initialize(n3, build_staircase(n3, 0.0, Side::right),
                                     build_chain(n3, 0.0, Side::right), CVector::Zero(3), sampled3,
                                     0.0, InitMode::classical),
               InsufficientSmoothness);
}

TEST(Decoupled, NilpotentRamp) {
  const SolveReport r = solve_decoupled(MatrixPencil(N2, I2), v2(0, 0), ramp_second(), uniform_grid(0, 1, 50));
  EXPECT_LE(max_error(r, [](double t) { return v2(-1, -t); }), 1e-10);
  EXPECT_LE(r.classical_residual, 1e-10);
  EXPECT_EQ(r.meta.k, 2);
}

TEST(Decoupled, DiagonalHomogeneous) {
  const SolveReport r = solve_decoupled(diag_index1(), v2(1, 0), ForcingSignal::zero(2), uniform_grid(0, 2, 40));
  EXPECT_LE(max_error(r, [](double t) { return v2(std::exp(-t), 0); }), 1e-12);
}

TEST(Decoupled, SemiDissipativeRamp) {
  const SolveReport r = solve_decoupled(semi_dissipative(), v2(0, 0), ramp_second(), uniform_grid(0, 1, 20));
  EXPECT_LE(max_error(r, [](double t) { return v2(-t, 1); }), 1e-10);
}

TEST(Decoupled, PiecewiseExponentialForcing) {
  // x' = -x + e^{-2t}, x(0) = 0 gives x = e^{-t} - e^{-2t}.
  const MatrixPencil p(CMatrix::Identity(1, 1), -CMatrix::Identity(1, 1));
  ExpPoly piece;
  piece.rate = -2.0;
  piece.coeffs = {CVector::Ones(1)};
  const ForcingSignal f = ForcingSignal::piecewise({}, {piece});
  const SolveReport r = solve_decoupled(p, CVector::Zero(1), f, uniform_grid(0, 3, 30));
  for (size_t j = 0; j < r.times.size(); ++j) {
    const double t = r.times[j];
    EXPECT_NEAR(std::abs(r.trajectory(0, j) - (std::exp(-t) - std::exp(-2 * t))), 0.0, 1e-13);
  }
}

TEST(Decoupled, ShiftInvarianceAndSuperposition) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 8; ++trial) {
    WeierstrassSpec spec = random_weierstrass_spec(rng, trial % 3, 8);
    spec.transform_seed = 700 + trial;
    const MatrixPencil p = weierstrass_pencil(spec).pencil;
    const Index n = p.dim();
    CVector x0(n), c0(n), c1(n);
    for (Index i = 0; i < n; ++i) {
      x0(i) = Complex(g(rng), g(rng));
      c0(i) = Complex(g(rng), 0.0);
      c1(i) = Complex(0.0, g(rng));
    }
    const ForcingSignal f = ForcingSignal::polynomial({c0, c1});
    const std::vector<double> grid = uniform_grid(0, 1, 20);
    const SolveReport a = solve_decoupled(p, x0, f, grid, Complex(2.5));
    const SolveReport b = solve_decoupled(p, x0, f, grid, Complex(-1.5, 1.0));
    EXPECT_LT((a.trajectory - b.trajectory).cwiseAbs().maxCoeff(), 1e-8);

    const SolveReport h = solve_decoupled(p, x0, ForcingSignal::zero(n), grid);
    const SolveReport z = solve_decoupled(p, CVector::Zero(n), f, grid);
    const SolveReport full = solve_decoupled(p, x0, f, grid);
    EXPECT_LT((full.trajectory - h.trajectory - z.trajectory).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Decoupled, ClassicalImpliesMild) {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 8; ++trial) {
    WeierstrassSpec spec = random_weierstrass_spec(rng, trial % 4, 8);
    spec.transform_seed = 750 + trial;
    const MatrixPencil p = weierstrass_pencil(spec).pencil;
    const Index n = p.dim();
    const ForcingSignal f = ForcingSignal::polynomial({CVector::Ones(n), CVector::Zero(n), CVector::Ones(n)});
    const SolveReport r = solve_decoupled(p, CVector::Ones(n), f, uniform_grid(0, 1, 200));
    EXPECT_LE(r.mild_residual, 10.0 * r.classical_residual + 1e-4);
  }
}

TEST(Homogeneous, Examples) {
  const SolveReport a =
      solve_homogeneous(MatrixPencil(I2, m2(-1, 0, 0, -2)), v2(1, 1), uniform_grid(0, 1, 10));
  EXPECT_LE(max_error(a, [](double t) { return v2(std::exp(-t), std::exp(-2 * t)); }), 1e-13);

  const CVector x0 = v2(3, -4);
  const SolveReport b = solve_homogeneous(MatrixPencil(N2, I2), x0, uniform_grid(0, 1, 10));
  EXPECT_EQ(b.trajectory.norm(), 0.0);
  EXPECT_NEAR(b.correction_norm, x0.norm(), 1e-14);

  const SolveReport c = solve_homogeneous(diag_index1(), v2(1, 5), uniform_grid(0, 1, 10));
  EXPECT_LE(max_error(c, [](double t) { return v2(std::exp(-t), 0); }), 1e-13);
  EXPECT_NEAR(c.correction_norm, 5.0, 1e-13);
}

TEST(Homogeneous, AgreesWithDecoupled) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 6; ++trial) {
    WeierstrassSpec spec = random_weierstrass_spec(rng, trial % 4, 8);
    spec.transform_seed = 800 + trial;
    const MatrixPencil p = weierstrass_pencil(spec).pencil;
    const CVector x0 = CVector::Ones(p.dim());
    const std::vector<double> grid = uniform_grid(0, 1, 10);
    const SolveReport h = solve_homogeneous(p, x0, grid);
    const SolveReport d = solve_decoupled(p, x0, ForcingSignal::zero(p.dim()), grid);
    EXPECT_LT((h.trajectory - d.trajectory).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Euler, ScalarRecurrence) {
  const MatrixPencil p(CMatrix::Identity(1, 1), -CMatrix::Identity(1, 1));
  const SolveReport r =
      implicit_euler_reference(p, CVector::Ones(1), ForcingSignal::zero(1), uniform_grid(0, 1, 100));
  EXPECT_NEAR(std::abs(r.trajectory(0, 100) - std::pow(1.01, -100)), 0.0, 1e-12);
  EXPECT_NEAR(r.trajectory(0, 100).real(), std::exp(-1.0), 5e-3);
}

TEST(Euler, NilpotentConvergesFirstOrder) {
  const MatrixPencil p(N2, I2);
  auto err = [&](int steps) {
    // f = (0, t^2) has x = (-2t, -t^2); linear forcing would be reproduced exactly.
    const ForcingSignal f = ForcingSignal::polynomial({v2(0, 0), v2(0, 0), v2(0, 1)});
    const SolveReport r = implicit_euler_reference(p, v2(0, 0), f, uniform_grid(0, 1, steps));
    return max_error(r, [](double t) { return v2(-2 * t, -t * t); });
  };
  const double e1 = err(40), e2 = err(80);
  EXPECT_GT(e1, 0.0);
  EXPECT_NEAR(e2 / e1, 0.5, 0.1);
}

TEST(Euler, ZeroData) {
  const SolveReport r =
      implicit_euler_reference(diag_index1(), v2(0, 0), ForcingSignal::zero(2), uniform_grid(0, 1, 10));
  EXPECT_EQ(r.trajectory.norm(), 0.0);
}

TEST(Residuals, ExactZeroAndCorrupted) {
  const MatrixPencil n(N2, I2);
  const SolveReport r = solve_decoupled(n, v2(0, 0), ramp_second(), uniform_grid(0, 1, 50));
  const Residuals ok = residuals(n, r, ramp_second());
  EXPECT_LE(ok.classical, 1e-8);

  SolveReport zero = r;
  zero.trajectory.setZero();
  const Residuals z = residuals(n, zero, ForcingSignal::zero(2));
  EXPECT_EQ(z.classical, 0.0);
  EXPECT_EQ(z.mild, 0.0);

  SolveReport bad = r;
  bad.trajectory.row(0).array() += 1e-3;
  const Residuals b = residuals(n, bad, ramp_second());
  EXPECT_GE(std::max(b.classical, b.mild), 1e-4);
}

TEST(Residuals, TooFewPoints) {
  SolveReport r;
  r.times = {0.0, 0.5, 1.0};
  r.trajectory = CMatrix::Zero(2, 3);
  EXPECT_THROW(residuals(MatrixPencil(N2, I2), r, ForcingSignal::zero(2)), GridTooCoarse);
}

TEST(Output, CsvHeaderAndEnergy) {
  const SolveReport r = solve_homogeneous(MatrixPencil(I2, -I2), v2(1, 0), uniform_grid(0, 1, 4));
  const std::string csv = trajectory_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t, re_x1, im_x1, re_x2, im_x2");
  const std::vector<double> e = energy_profile(I2, r);
  ASSERT_EQ(e.size(), 5u);
  EXPECT_NEAR(e.back(), std::exp(-2.0), 1e-13);
}
