#pragma once

#include "adae/subspace_chain.hpp"

namespace adae {

enum class Complement { orthogonal, along_kernel };

/// T_R(t) = Q exp(t A_R) Q^H composed with a projector onto V_k.
struct DegenerateSemigroup {
  RestrictedGenerator gen;
  CMatrix proj_V;          // orthogonal projector onto V_k
  CMatrix oblique_proj_V;  // projector onto V_k along ker R(mu)^k
  Index complement_dim = 0;
};

DegenerateSemigroup make_semigroup(const MatrixPencil& p, const SubspaceChain& chain);

CMatrix evaluate(const DegenerateSemigroup& tr, double t, Complement c = Complement::orthogonal);

struct StabilityEstimate {
  double omega_hat = 0.0;  // -inf for the zero semigroup
  double M_hat = 0.0;
};

StabilityEstimate omega_stability_estimate(const DegenerateSemigroup& tr, double horizon,
                                           int samples = 64);

/// Horizon H with M_hat exp((omega_hat - Re lambda) H) below 1e-10.
double laplace_horizon(const DegenerateSemigroup& tr, Complex lambda);

/// || int_0^H exp(-lambda t) T_R(t) dt + R(lambda) proj_V ||, Gauss-Legendre in t.
double laplace_consistency(const DegenerateSemigroup& tr, const MatrixPencil& p, Complex lambda,
                           double horizon, int quad_points = 64);

}  // namespace adae
