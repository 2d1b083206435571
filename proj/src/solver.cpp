#include "adae/solver.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <sstream>

#include "adae/pencil_io.hpp"

namespace adae {

std::vector<double> uniform_grid(double t0, double tf, int steps) {
  if (steps < 1 || !(tf > t0)) throw InvalidInput("time grid needs tf > t0 and at least one step");
  std::vector<double> g(static_cast<size_t>(steps) + 1);
  const double h = (tf - t0) / steps;
  for (int i = 0; i <= steps; ++i) g[static_cast<size_t>(i)] = t0 + h * i;
  g.back() = tf;
  return g;
}

namespace {

void check_grid(const std::vector<double>& t) {
  if (t.size() < 2) throw GridTooCoarse("time grid needs at least two points");
  const double h = t[1] - t[0];
  if (!(h > 0.0)) throw InvalidInput("time grid must increase");
  for (size_t i = 1; i < t.size(); ++i) {
    const double d = t[i] - t[i - 1];
    if (!(d > 0.0) || std::abs(d - h) > 1e-9 * std::max(1.0, std::abs(t[i])))
      throw InvalidInput("time grid must be uniform");
  }
}

/// Everything the decoupled solver derives from the pencil at a fixed shift.
struct Decoupling {
  Complex mu;
  StaircaseForm stair;
  SubspaceChain chain;
  CMatrix PV;    // onto V_k along ker R^k
  CMatrix Ginv;  // (A - mu E)^{-1}
  Index dv = 0, dw = 0;
  CMatrix UV, UW;
  CMatrix Sinv;  // inverse of the V diagonal block, equals A_R - mu
  CMatrix BVW;
  CMatrix NW;    // strictly block upper triangular W part
  int k = 0;
};

Decoupling decouple(const MatrixPencil& p, Complex mu, std::vector<std::string>& warnings) {
  StaircaseForm stair = build_staircase(p, mu, Side::right);
  SubspaceChain chain = build_chain(p, mu, Side::right);
  if (!chain.stabilization_k) throw DecompositionUnavailable("Wong chain did not stabilize");
  if (!check_decomposition(chain, p.tolerances()).holds)
    throw DecompositionUnavailable("ran R^k and ker R^k do not split the space");
  const int k = stair.index();
  if (*chain.stabilization_k != k)
    warnings.push_back("range and kernel chains stabilize at different steps");
  Decoupling d{mu, stair, chain, {}, {}, 0, 0, {}, {}, {}, {}, {}, k};
  const Index n = p.dim();
  d.dv = stair.dynamic_dim();
  d.dw = n - d.dv;
  d.UV = stair.dynamic_basis();
  d.UW = stair.algebraic_basis();
  const Subspace& wk = chain.W[static_cast<size_t>(*chain.stabilization_k)];
  d.PV = oblique_projector(Subspace::from_orthonormal(d.UV), wk);
  d.Ginv = -resolvent_at(p, mu).inverse;
  const CMatrix B = stair.unitary().adjoint() * (d.Ginv * p.E()) * stair.unitary();
  const CMatrix S = B.topLeftCorner(d.dv, d.dv);
  d.BVW = B.topRightCorner(d.dv, d.dw);
  d.NW = B.bottomRightCorner(d.dw, d.dw);
  if (d.dv > 0) {
    if (!(min_singular_value(S) > p.tolerances().rank_rel_tol * std::max(1.0, spectral_norm(B))))
      throw NotInjectiveOnVk("R(mu) is not injective on the stabilized range");
    d.Sinv = S.partialPivLu().inverse();
  } else {
    d.Sinv = CMatrix(0, 0);
  }
  return d;
}

CMatrix matrix_power(const CMatrix& m, int e) {
  CMatrix out = CMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < e; ++i) out = out * m;
  return out;
}

/// Augmented generator for y' = G y + r(t) with r an exponential polynomial.
CMatrix augmented(const CMatrix& G, const ExpPoly& r) {
  const Index dv = G.rows();
  const Index m = static_cast<Index>(r.coeffs.size());
  CMatrix aug = CMatrix::Zero(dv + m, dv + m);
  aug.topLeftCorner(dv, dv) = G;
  double fact = 1.0;
  for (Index j = 0; j < m; ++j) {
    if (j > 0) fact *= static_cast<double>(j);
    aug.block(0, dv + j, dv, 1) = fact * r.coeffs[static_cast<size_t>(j)];
    aug(dv + j, dv + j) = r.rate;
    if (j > 0) aug(dv + j, dv + j - 1) = 1.0;
  }
  return aug;
}

/// z_j(t) = exp(rate t) t^j / j!
CVector companion_state(const ExpPoly& r, double t) {
  const Index m = static_cast<Index>(r.coeffs.size());
  CVector z(m);
  const Complex e = std::exp(r.rate * t);
  double pw = 1.0;
  for (Index j = 0; j < m; ++j) {
    if (j > 0) pw *= t / static_cast<double>(j);
    z(j) = e * pw;
  }
  return z;
}

/// Variation of constants for y' = G y + r(t) sampled on t_grid.
CMatrix propagate_dynamic(const CMatrix& G, const ForcingSignal& r, const CVector& y0,
                          const std::vector<double>& t) {
  const Index dv = G.rows();
  CMatrix Y(dv, static_cast<Index>(t.size()));
  if (dv == 0) return Y;
  Y.col(0) = y0;
  if (r.is_exp_polynomial()) {
    std::map<std::pair<size_t, double>, CMatrix> cache;
    CVector y = y0;
    for (size_t n = 0; n + 1 < t.size(); ++n) {
      std::vector<double> cuts{t[n]};
      for (double b : r.breaks())
        if (b > t[n] && b < t[n + 1]) cuts.push_back(b);
      cuts.push_back(t[n + 1]);
      for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double s = cuts[c], e = cuts[c + 1];
        const size_t piece = r.piece_index(0.5 * (s + e));
        const ExpPoly& rp = r.pieces()[piece];
        const auto key = std::make_pair(piece, e - s);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, expm((e - s) * augmented(G, rp))).first;
        CVector state(dv + static_cast<Index>(rp.coeffs.size()));
        state << y, companion_state(rp, s);
        y = (it->second * state).head(dv);
      }
      Y.col(static_cast<Index>(n + 1)) = y;
    }
    return Y;
  }
  // Gauss-Legendre per step for forcing without a closed form.
  std::vector<double> xi, wi;
  gauss_legendre(8, xi, wi);
  std::map<double, std::vector<CMatrix>> cache;
  CVector y = y0;
  for (size_t n = 0; n + 1 < t.size(); ++n) {
    const double h = t[n + 1] - t[n];
    auto it = cache.find(h);
    if (it == cache.end()) {
      std::vector<CMatrix> mats{expm(h * G)};
      for (double x : xi) mats.push_back(expm((h * (1.0 - x) / 2.0) * G));
      it = cache.emplace(h, std::move(mats)).first;
    }
    CVector next = it->second[0] * y;
    for (size_t i = 0; i < xi.size(); ++i) {
      const double s = t[n] + h * (1.0 + xi[i]) / 2.0;
      next += (0.5 * h * wi[i]) * (it->second[i + 1] * r.value(s));
    }
    y = next;
    Y.col(static_cast<Index>(n + 1)) = y;
  }
  return Y;
}

void fill_residuals(const MatrixPencil& p, SolveReport& rep, const ForcingSignal& f) {
  if (rep.times.size() >= 5) {
    Residuals r = residuals(p, rep, f);
    rep.classical_residual = r.classical;
    rep.mild_residual = r.mild;
  } else {
    rep.classical_residual = rep.mild_residual = std::numeric_limits<double>::quiet_NaN();
    rep.meta.warnings.push_back("grid too coarse for residual diagnostics");
  }
}

}  // namespace

SplitForcing split_forcing(const StaircaseForm& stair, const SubspaceChain& chain,
                           const ForcingSignal& f, Complex mu) {
  const MatrixPencil& p = stair.pencil();
  if (!chain.stabilization_k || !check_decomposition(chain, p.tolerances()).holds)
    throw DecompositionUnavailable("split needs ran R^k and ker R^k to split the space");
  const Index n = p.dim();
  const Subspace& vk = chain.V[static_cast<size_t>(*chain.stabilization_k)];
  const Subspace& wk = chain.W[static_cast<size_t>(*chain.stabilization_k)];
  SplitForcing out{ForcingSignal::zero(n), ForcingSignal::zero(n), oblique_projector(vk, wk)};
  const CMatrix Ginv = -resolvent_at(p, mu).inverse;
  out.f_R = f.transformed(out.proj_V * Ginv, -mu);
  out.f_K = f.transformed((CMatrix::Identity(n, n) - out.proj_V) * Ginv, -mu);
  return out;
}

ConsistentInit consistent_initialize(const MatrixPencil& p, const StaircaseForm& stair,
                                     const SubspaceChain& chain, const CVector& x0,
                                     const ForcingSignal& f, Complex mu, InitMode mode, double t0) {
  const int k = chain.stabilization_k ? *chain.stabilization_k : stair.index();
  const int top = mode == InitMode::classical ? k - 1 : k - 2;
  if (top > f.max_order())
    throw InsufficientSmoothness("consistent initialization needs derivatives of order " +
                                 std::to_string(top) + "; forcing provides " +
                                 std::to_string(f.max_order()));
  SplitForcing split = split_forcing(stair, chain, f, mu);
  const CMatrix R = right_resolvent(p, mu);
  const Complex shift = std::exp(-mu * t0);
  CVector w0 = shift * x0;
  CVector series = CVector::Zero(p.dim());
  CMatrix Rpow = CMatrix::Identity(p.dim(), p.dim());
  for (int i = 0; i <= top; ++i) {
    series += Rpow * split.f_K.derivative(t0, i);
    Rpow = Rpow * R;
  }
  ConsistentInit out;
  if (mode == InitMode::classical) {
    out.x = (split.proj_V * w0 - series) / shift;
    out.convention = "classical: V_k part of x0 kept, series to order k-1";
  } else {
    out.x = (w0 - series) / shift;
    out.convention = "mild: x0 kept modulo ker E, series to order k-2";
  }
  out.correction_norm = (x0 - out.x).norm();
  return out;
}

SolveReport solve_decoupled(const MatrixPencil& p, const CVector& x0, const ForcingSignal& f,
                            const std::vector<double>& t_grid, std::optional<Complex> mu_opt) {
  check_grid(t_grid);
  const Index n = p.dim();
  if (x0.size() != n || f.dim() != n) throw InvalidInput("x0 and forcing must match the pencil size");
  SolveReport rep;
  const Complex mu = mu_opt ? *mu_opt : choose_mu(p);
  Decoupling d = decouple(p, mu, rep.meta.warnings);
  const int k = d.k;
  if (k > f.max_order())
    throw InsufficientSmoothness("index " + std::to_string(k) + " needs forcing derivatives of order " +
                                 std::to_string(k) + "; forcing provides " +
                                 std::to_string(f.max_order()));
  if (f.kind() != ForcingSignal::Kind::piecewise_polynomial && k >= 1)
    rep.meta.warnings.push_back("forcing derivatives come from finite differences or user callbacks");

  // Staircase coordinates of g(t) = exp(-mu t) (A - mu E)^{-1} f(t).
  const ForcingSignal gV = f.transformed(d.UV.adjoint() * d.Ginv, -mu);
  const ForcingSignal gW = f.transformed(d.UW.adjoint() * d.Ginv, -mu);

  // W rows read N y_W' = y_W + g_W; back-substitution from the last block row
  // collapses to y_W = -sum_d N^d g_W^(d).
  std::vector<ForcingSignal> yw_terms, r_terms;
  r_terms.push_back(gV.transformed(d.Sinv, 0.0));
  for (int j = 0; j < k; ++j) {
    const CMatrix Nj = matrix_power(d.NW, j);
    yw_terms.push_back(gW.differentiated(j).transformed(-Nj, 0.0));
    // V row: S y_V' = y_V + g_V - B_VW y_W'.
    if (d.dv > 0) r_terms.push_back(gW.differentiated(j + 1).transformed(d.Sinv * d.BVW * Nj, 0.0));
  }
  const ForcingSignal yW = k > 0 ? ForcingSignal::sum(yw_terms) : ForcingSignal::zero(d.dw);
  const ForcingSignal r = d.dv > 0 ? ForcingSignal::sum(r_terms) : ForcingSignal::zero(0);

  const double t0 = t_grid.front();
  const Complex shift0 = std::exp(-mu * t0);
  const CVector yW0 = yW.value(t0);
  const CVector w0 = shift0 * x0;
  const CVector yV0 = d.UV.adjoint() * (d.PV * (w0 - d.UW * yW0));
  const CMatrix YV = propagate_dynamic(d.Sinv, r, yV0, t_grid);

  const Index N = static_cast<Index>(t_grid.size());
  rep.times = t_grid;
  rep.trajectory.resize(n, N);
  for (Index j = 0; j < N; ++j) {
    const double t = t_grid[static_cast<size_t>(j)];
    CVector w = d.UW * yW.value(t);
    if (d.dv > 0) w += d.UV * YV.col(j);
    rep.trajectory.col(j) = std::exp(mu * t) * w;
  }
  rep.consistent_x0 = rep.trajectory.col(0);
  rep.correction_norm = (x0 - rep.consistent_x0).norm();
  rep.meta.mu = mu;
  rep.meta.k = k;
  rep.meta.block_sizes = d.stair.block_sizes();
  rep.meta.method = r.is_exp_polynomial() ? "decoupled, exact exponential-polynomial stepping"
                                          : "decoupled, Gauss-Legendre variation of constants";
  rep.meta.init_convention = "classical: V_k part of x0 kept, algebraic part from the forcing";
  if (!rep.trajectory.allFinite()) throw Error("trajectory is not finite");
  fill_residuals(p, rep, f);
  return rep;
}

SolveReport solve_homogeneous(const MatrixPencil& p, const CVector& x0,
                              const std::vector<double>& t_grid, std::optional<Complex> mu_opt) {
  check_grid(t_grid);
  const Index n = p.dim();
  if (x0.size() != n) throw InvalidInput("x0 must match the pencil size");
  const Complex mu = mu_opt ? *mu_opt : choose_mu(p);
  const SubspaceChain chain = build_chain(p, mu, Side::right);
  const DegenerateSemigroup tr = make_semigroup(p, chain);
  SolveReport rep;
  rep.times = t_grid;
  const Index N = static_cast<Index>(t_grid.size());
  rep.trajectory.resize(n, N);
  rep.consistent_x0 = tr.oblique_proj_V * x0;
  rep.correction_norm = (x0 - rep.consistent_x0).norm();
  // Uniform steps: one evaluation of T(h), then the semigroup law.
  const CMatrix step = evaluate(tr, t_grid[1] - t_grid[0], Complement::along_kernel);
  CVector x = rep.consistent_x0;
  rep.trajectory.col(0) = x;
  for (Index j = 1; j < N; ++j) {
    x = step * x;
    rep.trajectory.col(j) = x;
  }
  rep.meta.mu = mu;
  rep.meta.k = *chain.stabilization_k;
  rep.meta.block_sizes = {tr.gen.basis.dim(), tr.complement_dim};
  rep.meta.method = "degenerate semigroup";
  rep.meta.init_convention = "x0 projected onto V_k along ker R(mu)^k";
  fill_residuals(p, rep, ForcingSignal::zero(n));
  return rep;
}

SolveReport implicit_euler_reference(const MatrixPencil& p, const CVector& x0,
                                     const ForcingSignal& f, const std::vector<double>& t_grid) {
  check_grid(t_grid);
  const Index n = p.dim();
  if (x0.size() != n || f.dim() != n) throw InvalidInput("x0 and forcing must match the pencil size");
  const double h0 = t_grid[1] - t_grid[0];
  double h = h0;
  Eigen::PartialPivLU<CMatrix> lu;
  bool ok = false;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    CMatrix M = p.E() - h * p.A();
    if (rank_with_tol(M, p.tolerances().rank_rel_tol) == n) {
      lu.compute(M);
      ok = true;
      break;
    }
    h *= 1.01;
  }
  if (!ok) throw StepSingular("E - hA is singular for the step and its perturbations");
  SolveReport rep;
  const size_t N = t_grid.size();
  rep.times.resize(N);
  for (size_t i = 0; i < N; ++i) rep.times[i] = t_grid[0] + h * static_cast<double>(i);
  rep.trajectory.resize(n, static_cast<Index>(N));
  CVector x = x0;
  rep.trajectory.col(0) = x;
  for (size_t i = 1; i < N; ++i) {
    x = lu.solve(p.E() * x + h * f.value(rep.times[i]));
    rep.trajectory.col(static_cast<Index>(i)) = x;
  }
  rep.consistent_x0 = x0;
  rep.meta.method = "implicit Euler";
  if (h != h0) rep.meta.warnings.push_back("step perturbed to avoid a singular iteration matrix");
  fill_residuals(p, rep, f);
  return rep;
}

Residuals residuals(const MatrixPencil& p, const SolveReport& report, const ForcingSignal& f) {
  const size_t N = report.times.size();
  if (N < 5) throw GridTooCoarse("residuals need at least 5 grid points");
  const Index n = p.dim();
  const CMatrix& X = report.trajectory;
  CMatrix F(n, static_cast<Index>(N));
  for (size_t j = 0; j < N; ++j) F.col(static_cast<Index>(j)) = f.value(report.times[j]);
  double xinf = 0.0, finf = 0.0;
  for (Index j = 0; j < X.cols(); ++j) {
    xinf = std::max(xinf, X.col(j).norm());
    finf = std::max(finf, F.col(j).norm());
  }
  const double scale = 1.0 + p.norm_E() * xinf + p.norm_A() * xinf + finf;
  const CMatrix EX = p.E() * X;
  const CMatrix AX = p.A() * X;
  const double h = report.times[1] - report.times[0];
  Residuals out;
  for (size_t j = 2; j + 2 < N; ++j) {
    const Index i = static_cast<Index>(j);
    CVector d = (EX.col(i - 2) - 8.0 * EX.col(i - 1) + 8.0 * EX.col(i + 1) - EX.col(i + 2)) / (12.0 * h);
    out.classical = std::max(out.classical, (d - AX.col(i) - F.col(i)).norm());
  }
  CVector iax = CVector::Zero(n), jf = CVector::Zero(n);
  for (size_t j = 1; j < N; ++j) {
    const Index i = static_cast<Index>(j);
    const double hj = report.times[j] - report.times[j - 1];
    iax += 0.5 * hj * (AX.col(i - 1) + AX.col(i));
    jf += 0.5 * hj * (F.col(i - 1) + F.col(i));
    out.mild = std::max(out.mild, (EX.col(i) - EX.col(0) - iax - jf).norm());
  }
  out.classical /= scale;
  out.mild /= scale;
  return out;
}

std::string trajectory_to_csv(const SolveReport& report) {
  std::ostringstream os;
  const Index n = report.trajectory.rows();
  os << "t";
  for (Index i = 1; i <= n; ++i) os << ", re_x" << i << ", im_x" << i;
  os << "\n";
  for (size_t j = 0; j < report.times.size(); ++j) {
    os << format_double(report.times[j]);
    for (Index i = 0; i < n; ++i) {
      const Complex z = report.trajectory(i, static_cast<Index>(j));
      os << ", " << format_double(z.real()) << ", " << format_double(z.imag());
    }
    os << "\n";
  }
  return os.str();
}

std::vector<double> energy_profile(const CMatrix& E, const SolveReport& report) {
  std::vector<double> out;
  for (Index j = 0; j < report.trajectory.cols(); ++j) {
    const CVector x = report.trajectory.col(j);
    out.push_back(x.dot(E * x).real());
  }
  return out;
}

std::string solve_report_to_json(const SolveReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.meta.method;
  j["mu"] = {report.meta.mu.real(), report.meta.mu.imag()};
  j["index"] = report.meta.k;
  j["block_sizes"] = report.meta.block_sizes;
  j["steps"] = report.times.empty() ? 0 : report.times.size() - 1;
  j["t_final"] = report.times.empty() ? 0.0 : report.times.back();
  nlohmann::ordered_json x0re = nlohmann::ordered_json::array(), x0im = nlohmann::ordered_json::array();
  for (Index i = 0; i < report.consistent_x0.size(); ++i) {
    x0re.push_back(report.consistent_x0(i).real());
    x0im.push_back(report.consistent_x0(i).imag());
  }
  j["consistent_x0_re"] = x0re;
  j["consistent_x0_im"] = x0im;
  j["correction_norm"] = report.correction_norm;
  auto num = [](double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
  };
  j["classical_residual"] = num(report.classical_residual);
  j["mild_residual"] = num(report.mild_residual);
  j["init_convention"] = report.meta.init_convention;
  j["warnings"] = report.meta.warnings;
  return j.dump(2) + "\n";
}

}  // namespace adae
