#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "adae/models.hpp"
#include "adae/semigroup.hpp"

using namespace adae;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const CMatrix I2 = CMatrix::Identity(2, 2);

DegenerateSemigroup semigroup_of(const MatrixPencil& p, Complex mu, Side side = Side::left) {
  return make_semigroup(p, build_chain(p, mu, side));
}

MatrixPencil diag_index1() { return MatrixPencil(m2(1, 0, 0, 0), m2(-1, 0, 0, 1)); }
MatrixPencil semi_dissipative() { return MatrixPencil(m2(1, 0, 0, 0), m2(0, -1, 1, 0)); }

}  // namespace

TEST(Evaluate, ZeroTimeIsProjector) {
  const DegenerateSemigroup tr = semigroup_of(diag_index1(), 0.0);
  EXPECT_LT((evaluate(tr, 0.0) - tr.proj_V).norm(), 1e-14);
  EXPECT_LT((evaluate(tr, 0.0, Complement::along_kernel) - tr.oblique_proj_V).norm(), 1e-14);
}

TEST(Evaluate, Examples) {
  const DegenerateSemigroup d = semigroup_of(diag_index1(), 0.0);
  for (double t : {0.0, 0.5, 2.0})
    EXPECT_LT((evaluate(d, t) - m2(std::exp(-t), 0, 0, 0)).norm(), 1e-13);

  const DegenerateSemigroup s = semigroup_of(semi_dissipative(), 1.0);
  EXPECT_EQ(s.gen.matrix.rows(), 0);
  for (double t : {0.0, 1.0, 3.0}) EXPECT_EQ(evaluate(s, t).norm(), 0.0);
}

TEST(Stability, Examples) {
  const StabilityEstimate d = omega_stability_estimate(semigroup_of(diag_index1(), 0.0), 5.0);
  EXPECT_NEAR(d.omega_hat, -1.0, 0.05);
  EXPECT_NEAR(d.M_hat, 1.0, 0.05);

  const MatrixPencil zero_gen(m2(1, 0, 0, 0), m2(0, 0, 0, 1));
  const StabilityEstimate z = omega_stability_estimate(semigroup_of(zero_gen, 1.0), 5.0);
  EXPECT_NEAR(z.omega_hat, 0.0, 0.05);
  EXPECT_NEAR(z.M_hat, 1.0, 0.05);

  const StabilityEstimate e = omega_stability_estimate(semigroup_of(semi_dissipative(), 1.0), 5.0);
  EXPECT_EQ(e.omega_hat, -std::numeric_limits<double>::infinity());
}

TEST(Stability, NormalGeneratorSpectralAbscissa) {
  const MatrixPencil p(I2, m2(Complex(-0.3, 2.0), 0, 0, -1.5));
  const StabilityEstimate s = omega_stability_estimate(semigroup_of(p, 1.0), 8.0);
  EXPECT_NEAR(s.omega_hat, -0.3, 0.05);
}

TEST(Laplace, ScalarIntegral) {
  // Dynamic part A_R = -1, lambda = 1: the integral is 1/2.
  const MatrixPencil p = diag_index1();
  const DegenerateSemigroup tr = semigroup_of(p, 0.0, Side::right);
  const double h = laplace_horizon(tr, 1.0);
  EXPECT_LT(laplace_consistency(tr, p, 1.0, h), 1e-9);
  EXPECT_NEAR(std::abs(right_resolvent(p, 1.0)(0, 0)), 0.5, 1e-15);
}

TEST(Laplace, EmptyDynamicPart) {
  const MatrixPencil p = semi_dissipative();
  const DegenerateSemigroup tr = semigroup_of(p, 1.0, Side::right);
  EXPECT_LT(laplace_consistency(tr, p, 2.0, 1.0), 1e-15);
}

TEST(Laplace, DiagonalOde) {
  const MatrixPencil p(I2, m2(-1, 0, 0, -2));
  const DegenerateSemigroup tr = semigroup_of(p, 0.0, Side::right);
  EXPECT_LE(laplace_consistency(tr, p, 1.0, laplace_horizon(tr, 1.0)), 1e-8);
}

TEST(Laplace, ShortHorizonRejected) {
  const MatrixPencil p(I2, m2(-1, 0, 0, -2));
  const DegenerateSemigroup tr = semigroup_of(p, 0.0, Side::right);
  EXPECT_THROW(laplace_consistency(tr, p, 1.0, 0.5), HorizonTooShort);
}

TEST(Laws, SemigroupProperty) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    WeierstrassSpec spec = random_weierstrass_spec(rng, 1 + trial % 3);
    spec.transform_seed = 600 + trial;
    const MatrixPencil p = weierstrass_pencil(spec).pencil;
    const DegenerateSemigroup tr = semigroup_of(p, choose_mu(p));
    const double w = omega_stability_estimate(tr, 5.0).omega_hat;
    for (int k = 0; k < 20; ++k) {
      const double t = u(rng), s = u(rng);
      const double bound = 1e-9 * std::max(1.0, std::exp(w * (t + s)));
      EXPECT_LT((evaluate(tr, t + s) - evaluate(tr, t) * evaluate(tr, s)).norm(), bound);
    }
  }
}

TEST(Laws, ContractionUnderD1) {
  CMatrix A(3, 3);
  A << -0.2, -1, 0, 1, -0.1, 2, 0, -2, 0;
  const MatrixPencil p(CMatrix::Identity(3, 3), A);
  const DegenerateSemigroup tr = semigroup_of(p, 1.0);
  for (double t : {0.1, 1.0, 4.0}) EXPECT_LE(spectral_norm(evaluate(tr, t)), 1.0 + 1e-8);
}

TEST(Laws, GeneratorRecoveryIsFirstOrder) {
  const MatrixPencil p(I2, m2(-1, 0.5, -0.5, -2));
  const DegenerateSemigroup tr = semigroup_of(p, 1.0);
  const CMatrix Q = tr.gen.basis.basis();
  CVector x(2);
  x << 0.3, -0.7;
  const CVector target = Q * tr.gen.matrix * Q.adjoint() * x;
  auto err = [&](double h) { return ((evaluate(tr, h) * x - evaluate(tr, 0.0) * x) / h - target).norm(); };
  const double ratio = err(1e-3) / err(5e-4);
  EXPECT_GE(ratio, 1.8);
  EXPECT_LE(ratio, 2.2);
}
