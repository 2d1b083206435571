#include "adae/semigroup.hpp"

#include <cmath>
#include <limits>

namespace adae {

DegenerateSemigroup make_semigroup(const MatrixPencil& p, const SubspaceChain& chain) {
  DegenerateSemigroup tr;
  tr.gen = restricted_generator(p, chain);
  const Index n = p.dim();
  tr.proj_V = tr.gen.basis.projector();
  tr.complement_dim = n - tr.gen.basis.dim();
  const Subspace& w = chain.W[static_cast<size_t>(*chain.stabilization_k)];
  tr.oblique_proj_V = oblique_projector(tr.gen.basis, w);
  return tr;
}

CMatrix evaluate(const DegenerateSemigroup& tr, double t, Complement c) {
  if (t < 0.0) throw InvalidInput("semigroup evaluated at negative time");
  const CMatrix& Q = tr.gen.basis.basis();
  const Index n = tr.proj_V.rows();
  if (Q.cols() == 0) return CMatrix::Zero(n, n);
  CMatrix core = Q * expm(t * tr.gen.matrix);
  return c == Complement::orthogonal ? CMatrix(core * Q.adjoint())
                                     : CMatrix(core * (Q.adjoint() * tr.oblique_proj_V));
}

StabilityEstimate omega_stability_estimate(const DegenerateSemigroup& tr, double horizon, int samples) {
  if (!(horizon > 0.0)) throw InvalidInput("horizon must be positive");
  StabilityEstimate est;
  if (tr.gen.basis.dim() == 0) {
    est.omega_hat = -std::numeric_limits<double>::infinity();
    est.M_hat = 0.0;
    return est;
  }
  samples = std::max(samples, 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = horizon * i / (samples - 1);
    const double nrm = spectral_norm(expm(t * tr.gen.matrix));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) continue;
    const double y = std::log(nrm);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++used;
  }
  if (used < 2) {
    est.omega_hat = -std::numeric_limits<double>::infinity();
    return est;
  }
  const double den = used * sxx - sx * sx;
  est.omega_hat = (used * sxy - sx * sy) / den;
  est.M_hat = std::exp((sy - est.omega_hat * sx) / used);
  return est;
}

double laplace_horizon(const DegenerateSemigroup& tr, Complex lambda) {
  StabilityEstimate est = omega_stability_estimate(tr, 10.0);
  if (!std::isfinite(est.omega_hat)) return 1.0;
  const double gap = lambda.real() - est.omega_hat;
  if (!(gap > 0.0)) throw HorizonTooShort("Re lambda does not exceed the growth bound");
  return (std::log(1e10) + std::log(std::max(1.0, est.M_hat)) + 1.0) / gap;
}

double laplace_consistency(const DegenerateSemigroup& tr, const MatrixPencil& p, Complex lambda,
                           double horizon, int quad_points) {
  if (!(horizon > 0.0)) throw InvalidInput("horizon must be positive");
  const CMatrix R = pseudo_resolvent(p, tr.gen.side, lambda);
  if (tr.gen.basis.dim() == 0) return spectral_norm(R * tr.proj_V);
  const StabilityEstimate est = omega_stability_estimate(tr, horizon);
  const double tail = std::max(1.0, est.M_hat) * std::exp((est.omega_hat - lambda.real()) * horizon);
  if (!(lambda.real() > est.omega_hat) || !(tail < 1e-10))
    throw HorizonTooShort("truncated Laplace integral misses more than 1e-10");
  std::vector<double> x, w;
  gauss_legendre(quad_points, x, w);
  const CMatrix& Q = tr.gen.basis.basis();
  const Index d = Q.cols();
  CMatrix acc = CMatrix::Zero(d, d);
  for (size_t i = 0; i < x.size(); ++i) {
    const double t = 0.5 * horizon * (x[i] + 1.0);
    acc += (0.5 * horizon * w[i]) * std::exp(-lambda * t) * expm(t * tr.gen.matrix);
  }
  CMatrix quad = Q * acc * Q.adjoint();
  // On V_k the transform equals (lambda - A_R)^{-1} = -R(lambda).
  return spectral_norm(quad + R * tr.proj_V);
}

}  // namespace adae
