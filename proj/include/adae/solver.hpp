#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adae/forcing.hpp"
#include "adae/semigroup.hpp"
#include "adae/subspace_chain.hpp"

namespace adae {

struct SolveMetadata {
  Complex mu = 0.0;
  int k = 0;
  std::vector<Index> block_sizes;
  std::string method;
  std::string init_convention;
  std::vector<std::string> warnings;
};

struct SolveReport {
  std::vector<double> times;
  CMatrix trajectory;  // n x times.size()
  CVector consistent_x0;
  double correction_norm = 0.0;
  double classical_residual = 0.0;
  double mild_residual = 0.0;
  SolveMetadata meta;
};

std::vector<double> uniform_grid(double t0, double tf, int steps);

struct SplitForcing {
  ForcingSignal f_R;
  ForcingSignal f_K;
  CMatrix proj_V;  // onto V_k along ker R(mu)^k
};

/// Splits g(t) = exp(-mu t) (A - mu E)^{-1} f(t) along V_k and ker R_r(mu)^k.
SplitForcing split_forcing(const StaircaseForm& stair, const SubspaceChain& chain,
                           const ForcingSignal& f, Complex mu);

enum class InitMode { classical, mild };

struct ConsistentInit {
  CVector x;
  double correction_norm = 0.0;
  std::string convention;
};

ConsistentInit consistent_initialize(const MatrixPencil& p, const StaircaseForm& stair,
                                     const SubspaceChain& chain, const CVector& x0,
                                     const ForcingSignal& f, Complex mu, InitMode mode,
                                     double t0 = 0.0);

SolveReport solve_decoupled(const MatrixPencil& p, const CVector& x0, const ForcingSignal& f,
                            const std::vector<double>& t_grid, std::optional<Complex> mu = {});

SolveReport solve_homogeneous(const MatrixPencil& p, const CVector& x0,
                              const std::vector<double>& t_grid, std::optional<Complex> mu = {});

/// (E - hA) x_{n+1} = E x_n + h f(t_{n+1}); reports the grid actually used.
SolveReport implicit_euler_reference(const MatrixPencil& p, const CVector& x0,
                                     const ForcingSignal& f, const std::vector<double>& t_grid);

struct Residuals {
  double classical = 0.0;
  double mild = 0.0;
};

Residuals residuals(const MatrixPencil& p, const SolveReport& report, const ForcingSignal& f);

/// Header "t, re_x1, im_x1, ..., re_xn, im_xn".
std::string trajectory_to_csv(const SolveReport& report);

/// Re (x, E x) at each grid time.
std::vector<double> energy_profile(const CMatrix& E, const SolveReport& report);

std::string solve_report_to_json(const SolveReport& report);

}  // namespace adae
