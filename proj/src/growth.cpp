#include "adae/growth.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "adae/subspace_chain.hpp"

namespace adae {

LambdaGrid LambdaGrid::defaults() { return shifted(0.0); }

LambdaGrid LambdaGrid::shifted(double omega, double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw InvalidInput("invalid lambda grid bounds");
  LambdaGrid g;
  g.omega = omega;
  for (double x : logspace(lo, hi, count)) g.points.push_back(omega + x);
  return g;
}

void LambdaGrid::validate() const {
  if (points.empty()) throw InvalidInput("lambda grid is empty");
  for (size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] > omega)) throw InvalidInput("lambda grid points must exceed omega");
    if (i > 0 && !(points[i] > points[i - 1]))
      throw InvalidInput("lambda grid points must be strictly increasing");
  }
}

const char* to_string(CertKind k) {
  switch (k) {
    case CertKind::G: return "G";
    case CertKind::R: return "R";
    case CertKind::Rw: return "Rw";
    case CertKind::D: return "D";
    case CertKind::dissip: return "dissip";
    case CertKind::D1_cert: return "D1-cert";
    case CertKind::D2_cert: return "D2-cert";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string certificate_to_json(const GrowthCertificate& c) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(c.kind);
  j["k"] = c.k;
  j["omega"] = c.omega;
  j["M"] = std::isfinite(c.M) ? nlohmann::ordered_json(c.M) : nlohmann::ordered_json(nullptr);
  j["verdict"] = to_string(c.verdict);
  nlohmann::ordered_json ev = nlohmann::ordered_json::array();
  for (const Evidence& e : c.evidence) {
    nlohmann::ordered_json item;
    item["lambda"] = e.lambda;
    item["value"] = std::isfinite(e.value) ? nlohmann::ordered_json(e.value)
                                           : nlohmann::ordered_json(nullptr);
    ev.push_back(item);
  }
  j["evidence"] = ev;
  j["slope"] = std::isfinite(c.slope) ? nlohmann::ordered_json(c.slope) : nlohmann::ordered_json(nullptr);
  j["fit_residual"] = c.fit_residual;
  if (c.measured_M) j["measured_M"] = *c.measured_M;
  j["notes"] = c.notes;
  return j.dump();
}

namespace {

constexpr double kFitGate = 0.2;

/// Rank test and inverse-norm data at one real lambda.
bool regular_at(const MatrixPencil& p, double lambda, double* sigma_min) {
  CMatrix m = pencil_at(p.E(), p.A(), lambda);
  RVector s = singular_values(m);
  const Index n = p.dim();
  if (n == 0) {
    *sigma_min = std::numeric_limits<double>::infinity();
    return true;
  }
  *sigma_min = s(n - 1);
  return s(n - 1) > rank_threshold(s, n, n, p.tolerances().rank_rel_tol);
}

struct Fit {
  double slope = 0.0;
  double residual = 0.0;
  bool ok = false;
  bool all_zero = false;
};

/// Least-squares slope of log10(value) against log10(lambda) over the points at or
/// above lambda_top / 10^decades.
Fit fit_top(const std::vector<double>& lam, const std::vector<double>& val, double decades,
            double omega) {
  Fit f;
  if (lam.size() < 3) return f;
  const double top = lam.back() - omega;
  std::vector<size_t> idx;
  for (size_t i = 0; i < lam.size(); ++i)
    if (lam[i] - omega >= top / std::pow(10.0, decades) * (1.0 - 1e-12)) idx.push_back(i);
  while (idx.size() < 3 && idx.front() > 0) idx.insert(idx.begin(), idx.front() - 1);
  bool any_zero = false, all_zero = true;
  for (size_t i : idx) {
    if (val[i] > 0.0)
      all_zero = false;
    else
      any_zero = true;
  }
  if (all_zero) {
    f.all_zero = true;
    f.ok = true;
    f.slope = -std::numeric_limits<double>::infinity();
    return f;
  }
  if (any_zero) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(idx.size());
  for (size_t i : idx) {
    const double x = std::log10(lam[i] - omega), y = std::log10(val[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = cnt * sxx - sx * sx;
  if (!(den > 0.0)) return f;
  f.slope = (cnt * sxy - sx * sy) / den;
  const double icpt = (sy - f.slope * sx) / cnt;
  for (size_t i : idx) {
    const double x = std::log10(lam[i] - omega), y = std::log10(val[i]);
    f.residual = std::max(f.residual, std::abs(y - (icpt + f.slope * x)));
  }
  f.ok = true;
  return f;
}

/// Shared slope-to-index logic for the G and R estimates: k = ceil(s - 0.1) + offset.
GrowthCertificate index_from_samples(CertKind kind, int offset, const std::vector<double>& lam,
                                     const std::vector<double>& val, double omega,
                                     std::vector<std::string> notes) {
  GrowthCertificate c;
  c.kind = kind;
  c.omega = omega;
  c.notes = std::move(notes);
  for (size_t i = 0; i < lam.size(); ++i) c.evidence.push_back({lam[i], val[i]});
  Fit f = fit_top(lam, val, 2.0, 0.0);
  if (!f.ok) {
    c.verdict = Verdict::inconclusive;
    c.notes.push_back("too few usable grid points for a slope fit");
    c.slope = std::numeric_limits<double>::quiet_NaN();
    c.M = std::numeric_limits<double>::quiet_NaN();
    return c;
  }
  c.slope = f.slope;
  c.fit_residual = f.residual;
  if (f.all_zero) {
    c.k = 0;
  } else {
    c.k = std::max(0, static_cast<int>(std::ceil(f.slope - 0.1)) + offset);
  }
  c.M = 0.0;
  for (size_t i = 0; i < lam.size(); ++i)
    c.M = std::max(c.M, std::pow(lam[i], offset - c.k) * val[i]);
  const double frac = f.slope - 0.1 - std::round(f.slope - 0.1);
  const bool borderline = !f.all_zero && std::abs(frac) < 0.02;
  if (borderline) c.notes.push_back("slope sits on an integer boundary");
  c.verdict = (f.residual < kFitGate && !borderline) ? Verdict::holds : Verdict::inconclusive;
  return c;
}

std::string shrink_note(double lambda) {
  return "grid truncated below lambda = " + std::to_string(lambda) +
         " (numerically outside the resolvent set)";
}

}  // namespace

GrowthCertificate estimate_G_index(const MatrixPencil& p, const LambdaGrid& grid, Side side) {
  grid.validate();
  std::vector<double> lam, val;
  std::vector<std::string> notes;
  for (double l : grid.points) {
    double smin;
    if (!regular_at(p, l, &smin)) {
      notes.push_back(shrink_note(l));
      break;
    }
    CMatrix r = pseudo_resolvent(p, side, l);
    lam.push_back(l);
    val.push_back(spectral_norm(r));
  }
  auto c = index_from_samples(CertKind::G, 2, lam, val, grid.omega, std::move(notes));
  // R(lambda) ~ 1/lambda gives (G_1) for every pencil with invertible E; the kernel
  // chain is trivial there, so the index is reported as 0.
  if (c.k == 1 && rank_with_tol(p.E(), p.tolerances().rank_rel_tol) == p.dim()) {
    c.k = 0;
    c.notes.push_back("E invertible: (G_1) bound with injective pseudo-resolvent, reported as index 0");
  }
  return c;
}

GrowthCertificate estimate_R_index(const MatrixPencil& p, const LambdaGrid& grid) {
  grid.validate();
  std::vector<double> lam, val;
  std::vector<std::string> notes;
  for (double l : grid.points) {
    double smin;
    if (!regular_at(p, l, &smin)) {
      notes.push_back(shrink_note(l));
      break;
    }
    lam.push_back(l);
    val.push_back(1.0 / smin);
  }
  return index_from_samples(CertKind::R, 1, lam, val, grid.omega, std::move(notes));
}

GrowthCertificate check_Dk(const MatrixPencil& p, int k, const LambdaGrid& grid, Side side) {
  if (k < 1) throw InvalidInput("check_Dk needs k >= 1");
  grid.validate();
  const TolerancePolicy& pol = p.tolerances();
  const Index n = p.dim();
  const CMatrix R0 = pseudo_resolvent(p, side, grid.omega);
  const double ref = std::max(spectral_norm(R0), 1e-300);
  CMatrix Q = CMatrix::Identity(n, n);
  for (int j = 1; j < k && Q.cols() > 0; ++j) Q = range_basis(R0 * Q, pol.rank_rel_tol, ref).basis();

  GrowthCertificate c;
  c.kind = CertKind::D;
  c.k = k;
  c.omega = grid.omega;
  std::vector<double> lam, val;
  for (double l : grid.points) {
    Eigen::PartialPivLU<CMatrix> lu(pencil_at(p.E(), p.A(), l));
    // Condition estimate in place of a full SVD per grid point.
    if (n > 0 && !(lu.rcond() > pol.rank_rel_tol * static_cast<double>(n))) {
      c.notes.push_back(shrink_note(l));
      break;
    }
    double v = 0.0;
    if (Q.cols() > 0) {
      // R_l(l) Q = -E (lE - A)^{-1} Q,  R_r(l) Q = -(lE - A)^{-1} E Q
      CMatrix rq = side == Side::left ? CMatrix(-(p.E() * lu.solve(Q))) : CMatrix(-lu.solve(p.E() * Q));
      v = (l - grid.omega) * spectral_norm(rq);
    }
    lam.push_back(l);
    val.push_back(v);
    c.evidence.push_back({l, v});
  }
  c.M = 0.0;
  for (double v : val) c.M = std::max(c.M, v);
  if (lam.size() < 3) {
    c.verdict = Verdict::inconclusive;
    c.notes.push_back("too few usable grid points");
    return c;
  }
  // Tiny values are rounding noise on a subspace the resolvent annihilates.
  const double floor = 1e-12 * std::max(1.0, c.M);
  bool all_small = true;
  for (double v : val) all_small = all_small && v <= floor;
  if (!std::isfinite(c.M)) {
    c.verdict = Verdict::fails;
    return c;
  }
  if (all_small || c.M == 0.0) {
    c.slope = -std::numeric_limits<double>::infinity();
    c.verdict = Verdict::holds;
    return c;
  }
  std::vector<double> clipped = val;
  for (double& v : clipped) v = std::max(v, floor);
  Fit f = fit_top(lam, clipped, 1.0, grid.omega);
  c.slope = f.slope;
  c.fit_residual = f.residual;
  c.verdict = (f.ok && f.slope <= 0.05) ? Verdict::holds : Verdict::fails;
  return c;
}

GrowthCertificate check_left_dissipativity(const MatrixPencil& p, double omega) {
  GrowthCertificate c;
  c.kind = CertKind::dissip;
  c.omega = omega;
  c.k = 1;
  const CMatrix EhA = p.E().adjoint() * p.A();
  const CMatrix EhE = p.E().adjoint() * p.E();
  const double lmax = max_hermitian_eigenvalue(hermitian_part(EhA) - omega * EhE);
  const double scale = std::max(1.0, p.norm_E() * p.norm_A() + std::abs(omega) * p.norm_E() * p.norm_E());
  c.M = lmax;
  c.evidence.push_back({omega, lmax});
  c.verdict = lmax <= p.tolerances().residual_tol * scale ? Verdict::holds : Verdict::fails;
  if (c.verdict == Verdict::fails) c.notes.push_back("Herm(E^H A) - omega E^H E has a positive eigenvalue");
  return c;
}

namespace {

bool kernels_meet(const MatrixPencil& p) {
  const double tol = p.tolerances().rank_rel_tol;
  Subspace ke = null_basis(p.E(), tol, std::max(p.norm_E(), p.norm_A()));
  Subspace ka = null_basis(p.A(), tol, std::max(p.norm_E(), p.norm_A()));
  return min_angle_sine(ke, ka) <= p.tolerances().subspace_tol;
}

bool full_rank_right_of(const MatrixPencil& p, double omega) {
  for (double d : {1.0, 2.0, 5.0, 10.0, 100.0})
    if (in_resolvent_set(p, omega + d)) return true;
  return false;
}

void cross_check(GrowthCertificate& c, const MatrixPencil& p, int k) {
  try {
    GrowthCertificate dk = check_Dk(p, k, LambdaGrid::shifted(c.omega), Side::left);
    c.measured_M = dk.M;
    c.evidence = dk.evidence;
    if (dk.verdict != Verdict::holds) c.notes.push_back("grid check of D_k did not confirm the bound");
  } catch (const NotInResolventSet&) {
    c.notes.push_back("omega outside the resolvent set; grid cross-check skipped");
  }
}

}  // namespace

GrowthCertificate certify_D1(const MatrixPencil& p, double omega) {
  GrowthCertificate c;
  c.kind = CertKind::D1_cert;
  c.omega = omega;
  c.k = 1;
  c.M = 1.0;
  c.verdict = Verdict::fails;
  if (check_left_dissipativity(p, omega).verdict != Verdict::holds) {
    c.notes.push_back("failed: pencil is not omega-dissipative");
    return c;
  }
  if (kernels_meet(p)) {
    c.notes.push_back("failed: ker E and ker A intersect nontrivially");
    return c;
  }
  if (!full_rank_right_of(p, omega)) {
    c.notes.push_back("failed: no lambda > omega with full rank lambda E - A");
    return c;
  }
  c.verdict = Verdict::holds;
  cross_check(c, p, 1);
  return c;
}

GrowthCertificate certify_D2(const MatrixPencil& p, double omega) {
  GrowthCertificate c;
  c.kind = CertKind::D2_cert;
  c.omega = omega;
  c.k = 2;
  c.verdict = Verdict::fails;
  const TolerancePolicy& pol = p.tolerances();
  const double escale = std::max(1.0, p.norm_E());
  if ((p.E() - p.E().adjoint()).cwiseAbs().maxCoeff() > pol.residual_tol * escale) {
    c.notes.push_back("failed: E is not self-adjoint");
    return c;
  }
  if (p.dim() > 0 && min_hermitian_eigenvalue(p.E()) < -pol.residual_tol * escale) {
    c.notes.push_back("failed: E is not nonnegative");
    return c;
  }
  const double ascale = std::max(1.0, p.norm_A() + std::abs(omega) * p.norm_E());
  if (p.dim() > 0 &&
      max_hermitian_eigenvalue(hermitian_part(p.A() - omega * p.E())) > pol.residual_tol * ascale) {
    c.notes.push_back("failed: Herm(A - omega E) is not negative semidefinite");
    return c;
  }
  if (kernels_meet(p)) {
    c.notes.push_back("failed: ker E and ker A intersect nontrivially");
    return c;
  }
  if (!full_rank_right_of(p, omega)) {
    c.notes.push_back("failed: no lambda > omega with full rank lambda E - A");
    return c;
  }
  RVector s = singular_values(p.E());
  const double thr = rank_threshold(s, p.dim(), p.dim(), pol.rank_rel_tol);
  double m1 = 0.0, m2 = 0.0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > thr) {
      m1 = std::max(m1, s(i));
      m2 = s(i);
    }
  c.M = m2 > 0.0 ? m1 / m2 : 0.0;
  c.verdict = Verdict::holds;
  cross_check(c, p, 2);
  return c;
}

GrowthCertificate search_omega(const MatrixPencil& p, CertKind kind) {
  std::vector<double> omegas{0.0};
  for (int j = -4; j <= 4; ++j) {
    omegas.push_back(std::ldexp(1.0, j));
    omegas.push_back(-std::ldexp(1.0, j));
  }
  std::sort(omegas.begin(), omegas.end());
  GrowthCertificate last;
  for (double w : omegas) {
    switch (kind) {
      case CertKind::dissip: last = check_left_dissipativity(p, w); break;
      case CertKind::D1_cert: last = certify_D1(p, w); break;
      case CertKind::D2_cert: last = certify_D2(p, w); break;
      default: throw InvalidInput("omega search supports dissip, D1-cert and D2-cert");
    }
    if (last.verdict == Verdict::holds) return last;
  }
  return last;
}

IndexReport index_comparison_report(const MatrixPencil& p, const LambdaGrid& grid) {
  IndexReport r;
  r.g_left = estimate_G_index(p, grid, Side::left);
  r.g_right = estimate_G_index(p, grid, Side::right);
  r.r_index = estimate_R_index(p, grid);
  try {
    r.tractability = tractability_chain(p).index;
  } catch (const ChainStalled&) {
    r.violations.push_back("tractability chain stalled");
  }
  const SubspaceChain chain = build_chain(p, choose_mu(p), Side::left);
  r.wong = chain.stabilization_k;
  const QzResult qz = qz_canonical(p.E(), p.A(), p.tolerances());
  r.qz = qz.nilpotency_index;

  const int kg = r.g_left.k, kr = r.r_index.k;
  const bool conclusive = r.g_left.verdict == Verdict::holds && r.r_index.verdict == Verdict::holds;
  if (conclusive) {
    if (kr > kg) r.violations.push_back("G_k does not imply R_k^w");
    if (kg > kr + 1 || kg < kr) r.violations.push_back("R_k^w does not imply G_{k+1} and not G_{k-1}");
  }
  double wmax = 0.0;
  for (Complex z : qz.finite_eigenvalues) wmax = std::max(wmax, z.real());
  r.d_omega = 1.0 + wmax;
  r.d_check = check_Dk(p, std::max(kr, 1), LambdaGrid::shifted(r.d_omega), Side::left);
  if (r.r_index.verdict == Verdict::holds && r.d_check.verdict != Verdict::holds)
    r.violations.push_back("R_k does not imply D_k");
  return r;
}

std::string index_report_to_json(const IndexReport& r) {
  nlohmann::ordered_json j;
  j["g_index_left"] = r.g_left.k;
  j["g_index_right"] = r.g_right.k;
  j["r_index"] = r.r_index.k;
  j["tractability_index"] = r.tractability ? nlohmann::ordered_json(*r.tractability) : nlohmann::ordered_json(nullptr);
  j["wong_index"] = r.wong ? nlohmann::ordered_json(*r.wong) : nlohmann::ordered_json(nullptr);
  j["qz_index"] = r.qz;
  j["certificates"] = {nlohmann::ordered_json::parse(certificate_to_json(r.g_left)),
                       nlohmann::ordered_json::parse(certificate_to_json(r.g_right)),
                       nlohmann::ordered_json::parse(certificate_to_json(r.r_index)),
                       nlohmann::ordered_json::parse(certificate_to_json(r.d_check))};
  j["violations"] = r.violations;
  return j.dump();
}

}  // namespace adae
