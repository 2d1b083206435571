#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "adae/models.hpp"
#include "adae/pencil.hpp"
#include "adae/pencil_io.hpp"

using namespace adae;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const CMatrix N2 = m2(0, 1, 0, 0);
const CMatrix I2 = CMatrix::Identity(2, 2);

Subspace span(const CMatrix& cols) { return range_basis(cols, 1e-12); }

CMatrix stack(const CMatrix& top, const CMatrix& bottom) {
  CMatrix s(top.rows() + bottom.rows(), top.cols());
  s << top, bottom;
  return s;
}

std::vector<double> grid(int steps, double tf) {
  std::vector<double> t(steps + 1);
  for (int j = 0; j <= steps; ++j) t[j] = tf * j / steps;
  return t;
}

}  // namespace

TEST(Resolvent, DiagonalExample) {
  const MatrixPencil p(I2, m2(-1, 0, 0, -2));
  const ResolventSample s = resolvent_at(p, 0.0);
  EXPECT_LT((s.inverse - m2(1, 0, 0, 0.5)).norm(), 1e-14);
  EXPECT_NEAR(s.min_singular, 1.0, 1e-14);
}

TEST(Resolvent, NilpotentExample) {
  const MatrixPencil p(N2, I2);
  for (Complex lambda : {Complex(0.0), Complex(3.0), Complex(-1.5, 2.0)}) {
    const CMatrix expected = -(I2 + lambda * N2);
    EXPECT_LT((resolvent_at(p, lambda).inverse - expected).norm(), 1e-13);
  }
}

TEST(Resolvent, ZeroEIsMinusIdentity) {
  const MatrixPencil p(CMatrix::Zero(3, 3), CMatrix::Identity(3, 3));
  EXPECT_LT((resolvent_at(p, 4.0).inverse + CMatrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(Resolvent, EigenvalueIsRejected) {
  const MatrixPencil p(I2, m2(-1, 0, 0, -2));
  EXPECT_FALSE(in_resolvent_set(p, -1.0));
  EXPECT_THROW(resolvent_at(p, -2.0), NotInResolventSet);
}

TEST(Construction, SingularPencilThrows) {
  EXPECT_THROW(MatrixPencil(m2(1, 0, 0, 0), m2(1, 0, 0, 0)), SingularPencil);
  EXPECT_THROW(MatrixPencil(CMatrix::Zero(2, 3), CMatrix::Zero(2, 3)), InvalidInput);
}

TEST(PseudoResolvent, LeftExamples) {
  const MatrixPencil n(N2, I2);
  for (Complex lambda : {Complex(0.0), Complex(2.0), Complex(0.5, -1.0)})
    EXPECT_LT((left_resolvent(n, lambda) - N2).norm(), 1e-13);

  const MatrixPencil d(m2(1, 0, 0, 0), m2(-1, 0, 0, 1));
  for (double lambda : {0.0, 1.0, 4.0})
    EXPECT_LT((left_resolvent(d, lambda) - m2(-1.0 / (1.0 + lambda), 0, 0, 0)).norm(), 1e-14);

  CMatrix A(2, 2);
  A << Complex(-1, 1), 2, 0.5, -3;
  const MatrixPencil e(I2, A);
  EXPECT_LT((left_resolvent(e, 1.0) - (A - I2).inverse()).norm(), 1e-13);
}

TEST(PseudoResolvent, RightMatchesDefinition) {
  const MatrixPencil d(m2(1, 0, 0, 0), m2(-1, 0, 0, 1));
  EXPECT_LT((right_resolvent(d, 2.0) - m2(-1.0 / 3.0, 0, 0, 0)).norm(), 1e-14);
}

TEST(PseudoResolvent, ResidualExamples) {
  const MatrixPencil a(I2, m2(-1, 0, 0, -2));
  const MatrixPencil b(N2, I2);
  const MatrixPencil c(m2(1, 0, 0, 0), m2(-1, 0, 0, 1));
  for (Side s : {Side::left, Side::right}) {
    EXPECT_LE(pseudo_resolvent_residual(a, 1.0, 2.0, s), 1e-12);
    EXPECT_LE(pseudo_resolvent_residual(b, 3.0, 7.0, s), 1e-12);
    EXPECT_LE(pseudo_resolvent_residual(c, 1.0, 2.0, s), 1e-12);
  }
}

TEST(PseudoResolvent, IdentityOnRandomPencils) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    WeierstrassSpec spec = random_weierstrass_spec(rng, trial % 4);
    spec.transform_seed = 100 + trial;
    const MatrixPencil p = weierstrass_pencil(spec).pencil;
    for (int pair = 0; pair < 5; ++pair) {
      const Complex lambda(3.0 + g(rng), g(rng)), mu(-3.0 + g(rng), g(rng));
      for (Side s : {Side::left, Side::right}) {
        const double scale = 1.0 + spectral_norm(pseudo_resolvent(p, s, lambda)) *
                                       spectral_norm(pseudo_resolvent(p, s, mu));
        EXPECT_LE(pseudo_resolvent_residual(p, lambda, mu, s), 1e-9 * scale);
      }
    }
  }
}

TEST(Relations, LeftRelationExamples) {
  const LinearRelation diag = relation_L_left(MatrixPencil(I2, I2));
  EXPECT_LT(subspace_distance(diag.space, span(stack(I2, I2))), 1e-13);

  const LinearRelation n = relation_L_left(MatrixPencil(N2, I2));
  CMatrix cols(4, 2);
  cols << 1, 0, 0, 0, 0, 1, 1, 0;  // (e1, e2) and (0, e1)
  EXPECT_LT(subspace_distance(n.space, span(cols)), 1e-13);

  const LinearRelation z = relation_L_left(MatrixPencil(CMatrix::Zero(2, 2), I2));
  EXPECT_LT(subspace_distance(z.space, span(stack(CMatrix::Zero(2, 2), I2))), 1e-13);
}

TEST(Relations, RightRelationSatisfiesDefinition) {
  const MatrixPencil p(N2, I2);
  const LinearRelation L = relation_L_right(p);
  EXPECT_EQ(L.dim(), 2);
  EXPECT_LT((p.E() * L.second_block() - p.A() * L.first_block()).norm(), 1e-13);
}

TEST(Relations, FromPseudoResolventExamples) {
  CMatrix A(2, 2);
  A << -1, 2, 0, -3;
  const LinearRelation g = relation_from_pseudo_resolvent(MatrixPencil(I2, A), 0.7, Side::left);
  EXPECT_LT(subspace_distance(g.space, span(stack(I2, A))), 1e-12);

  const LinearRelation n = relation_from_pseudo_resolvent(MatrixPencil(N2, I2), 0.0, Side::left);
  CMatrix cols(4, 2);
  cols << 1, 0, 0, 0, 0, 1, 1, 0;
  EXPECT_LT(subspace_distance(n.space, span(cols)), 1e-13);

  const LinearRelation z =
      relation_from_pseudo_resolvent(MatrixPencil(CMatrix::Zero(2, 2), I2), 0.0, Side::left);
  EXPECT_LT(subspace_distance(z.space, span(stack(CMatrix::Zero(2, 2), I2))), 1e-13);
}

TEST(Relations, ShiftIndependence) {
  std::mt19937_64 rng(12);
  WeierstrassSpec spec = random_weierstrass_spec(rng, 2);
  spec.transform_seed = 5;
  const MatrixPencil p = weierstrass_pencil(spec).pencil;
  std::normal_distribution<double> g;
  for (Side s : {Side::left, Side::right}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Complex mu(4.0 + g(rng), g(rng)), nu(-4.0 + g(rng), g(rng));
      EXPECT_LT(subspace_distance(relation_from_pseudo_resolvent(p, mu, s).space,
                                  relation_from_pseudo_resolvent(p, nu, s).space),
                1e-8);
    }
  }
}

TEST(Relations, ShiftedInverseRecoversPseudoResolvent) {
  std::mt19937_64 rng(13);
  WeierstrassSpec spec = random_weierstrass_spec(rng, 3);
  spec.transform_seed = 6;
  const MatrixPencil p = weierstrass_pencil(spec).pencil;
  const LinearRelation L = relation_from_pseudo_resolvent(p, 5.0, Side::left);
  for (Complex lambda : {Complex(3.0), Complex(-4.0, 1.0)})
    EXPECT_LT((relation_shifted_inverse(L, lambda) - left_resolvent(p, lambda)).norm(), 1e-9);
}

TEST(Relations, PartsExamples) {
  const RelationParts d = relation_parts(relation_L_left(MatrixPencil(I2, I2)));
  EXPECT_EQ(d.dom.dim(), 2);
  EXPECT_EQ(d.ran.dim(), 2);
  EXPECT_EQ(d.ker.dim(), 0);
  EXPECT_EQ(d.mul.dim(), 0);

  const RelationParts z = relation_parts(relation_L_left(MatrixPencil(CMatrix::Zero(2, 2), I2)));
  EXPECT_EQ(z.dom.dim(), 0);
  EXPECT_EQ(z.ker.dim(), 0);
  EXPECT_EQ(z.mul.dim(), 2);
  EXPECT_EQ(z.ran.dim(), 2);

  const RelationParts n = relation_parts(relation_L_left(MatrixPencil(N2, I2)));
  ASSERT_EQ(n.mul.dim(), 1);
  EXPECT_LT(subspace_distance(n.mul, span(m2(1, 0, 0, 0).col(0))), 1e-13);
}

TEST(Relations, PartsRankNullity) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 12; ++trial) {
    WeierstrassSpec spec = random_weierstrass_spec(rng, trial % 4);
    spec.transform_seed = 30 + trial;
    const MatrixPencil p = weierstrass_pencil(spec).pencil;
    for (const LinearRelation& L : {relation_L_left(p), relation_L_right(p)}) {
      const RelationParts r = relation_parts(L);
      EXPECT_EQ(r.dom.dim() + r.mul.dim(), L.dim());
      EXPECT_EQ(r.ran.dim() + r.ker.dim(), L.dim());
    }
  }
}

TEST(MildMembership, ScalarDecayIsSecondOrder) {
  const MatrixPencil p(CMatrix::Identity(1, 1), -CMatrix::Identity(1, 1));
  auto residual = [&](int steps) {
    SampledPath x, f;
    x.times = f.times = grid(steps, 1.0);
    x.values.resize(1, steps + 1);
    f.values = CMatrix::Zero(1, steps + 1);
    for (int j = 0; j <= steps; ++j) x.values(0, j) = std::exp(-x.times[j]);
    return mild_membership_residual(p, x, f, CVector::Ones(1), 1.0);
  };
  const double coarse = residual(50), fine = residual(100);
  EXPECT_LT(coarse, 1e-3);
  EXPECT_NEAR(coarse / fine, 4.0, 0.4);
}

TEST(MildMembership, ZeroTrajectory) {
  const MatrixPencil p(N2, I2);
  SampledPath x;
  x.times = grid(10, 1.0);
  x.values = CMatrix::Zero(2, 11);
  EXPECT_EQ(mild_membership_residual(p, x, x, CVector::Zero(2), 1.0), 0.0);
}

TEST(MildMembership, NilpotentHandSolution) {
  const MatrixPencil p(N2, I2);
  auto residual = [&](int steps) {
    SampledPath x, f;
    x.times = f.times = grid(steps, 1.0);
    x.values.resize(2, steps + 1);
    f.values = CMatrix::Zero(2, steps + 1);
    for (int j = 0; j <= steps; ++j) {
      const double t = x.times[j];
      x.values(0, j) = -1.0;
      x.values(1, j) = -t;
      f.values(1, j) = t;
    }
    CVector x0(2);
    x0 << -1.0, 0.0;
    return mild_membership_residual(p, x, f, x0, 1.0);
  };
  // Linear data: the trapezoid rule is exact here.
  EXPECT_LT(residual(20), 1e-12);

  SampledPath bad;
  bad.times = grid(20, 1.0);
  bad.values = CMatrix::Ones(2, 21);
  SampledPath zero = bad;
  zero.values.setZero();
  EXPECT_GT(mild_membership_residual(p, bad, zero, CVector::Ones(2), 1.0), 1e-2);
}

TEST(MildMembership, TooFewSamples) {
  const MatrixPencil p(I2, -I2);
  SampledPath x;
  x.times = grid(2, 1.0);
  x.values = CMatrix::Zero(2, 3);
  EXPECT_THROW(mild_membership_residual(p, x, x, CVector::Zero(2), 1.0), GridTooCoarse);
}

TEST(PencilJson, RoundTripIsByteIdentical) {
  std::mt19937_64 rng(15);
  WeierstrassSpec spec = random_weierstrass_spec(rng, 2);
  spec.transform_seed = 9;
  const MatrixPencil p = weierstrass_pencil(spec).pencil;
  const std::string text = pencil_to_json(p);
  CMatrix E, A;
  pencil_from_json(text, E, A);
  EXPECT_EQ((E - p.E()).norm(), 0.0);
  EXPECT_EQ((A - p.A()).norm(), 0.0);
  EXPECT_EQ(pencil_to_json(E, A), text);
}

TEST(PencilJson, MalformedInputIsRejected) {
  CMatrix E, A;
  EXPECT_THROW(pencil_from_json("{\"rows\":2}", E, A), InvalidInput);
  EXPECT_THROW(pencil_from_json("not json", E, A), InvalidInput);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}
