#include "adae/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "adae/growth.hpp"
#include "adae/models.hpp"
#include "adae/pencil_io.hpp"
#include "adae/semigroup.hpp"
#include "adae/solver.hpp"

namespace adae {

using json = nlohmann::ordered_json;

namespace {

std::string inline_or_file(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return arg;
  return read_text_file(arg);
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed ") + what + ": " + e.what());
  }
}

CVector vector_from(const json& re, const json* im, Index dim) {
  if (!re.is_array() || static_cast<Index>(re.size()) != dim) throw InvalidInput("vector has the wrong length");
  CVector v(dim);
  for (Index i = 0; i < dim; ++i) {
    const double a = re[static_cast<size_t>(i)].get<double>();
    const double b = im ? (*im)[static_cast<size_t>(i)].get<double>() : 0.0;
    v(i) = Complex(a, b);
  }
  return v;
}

std::vector<CVector> coeff_list(const json& j, Index dim) {
  if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty())
    throw InvalidInput("forcing piece needs a non-empty coeffs array");
  const json* im = j.contains("coeffs_im") ? &j["coeffs_im"] : nullptr;
  if (im && im->size() != j["coeffs"].size()) throw InvalidInput("coeffs_im does not match coeffs");
  std::vector<CVector> out;
  for (size_t d = 0; d < j["coeffs"].size(); ++d)
    out.push_back(vector_from(j["coeffs"][d], im ? &(*im)[d] : nullptr, dim));
  return out;
}

Complex complex_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidInput("complex value must be a number or [re, im]");
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json parse_embedded(const std::string& text) { return json::parse(text); }

json chain_json(const SubspaceChain& c) {
  json j;
  j["side"] = to_string(c.side);
  j["mu"] = complex_json(c.mu);
  std::vector<Index> vd, wd;
  for (const Subspace& s : c.V) vd.push_back(s.dim());
  for (const Subspace& s : c.W) wd.push_back(s.dim());
  j["V_dims"] = vd;
  j["W_dims"] = wd;
  j["stabilization"] = c.stabilization_k ? json(*c.stabilization_k) : json(nullptr);
  return j;
}

struct Options {
  std::string input, model, config, forcing, x0, out = ".";
  double tf = 1.0;
  int steps = 100;
  std::uint64_t seed = 0;
  std::optional<double> tol, omega, lambda_min, lambda_max;
  std::optional<int> lambda_points;
  bool cross_check = false;
  bool lossless = false;
  int index = 2;
  std::optional<int> m;
};

/// Pencil plus the pencil used for dissipativity certificates.
struct Problem {
  std::optional<MatrixPencil> pencil;
  std::optional<MatrixPencil> cert_pencil;
  std::string cert_note;
  std::optional<RLCModel> rlc;
  std::string name;
};

TolerancePolicy policy(const Options& o) {
  TolerancePolicy pol;
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw InvalidInput("--tol must be positive");
    pol.rank_rel_tol = *o.tol;
  }
  return pol;
}

LambdaGrid grid_from(const Options& o) {
  LambdaGrid g = LambdaGrid::shifted(0.0, o.lambda_min.value_or(1.0), o.lambda_max.value_or(1e8),
                                     o.lambda_points.value_or(48));
  g.validate();
  return g;
}

std::vector<double> profile(const json& cfg, const char* key, int m, double fallback) {
  if (!cfg.contains(key)) return std::vector<double>(static_cast<size_t>(m), fallback);
  const json& v = cfg[key];
  if (v.is_number()) return std::vector<double>(static_cast<size_t>(m), v.get<double>());
  if (!v.is_array() || static_cast<int>(v.size()) != m) throw InvalidInput(std::string("profile ") + key + " must have m entries");
  return v.get<std::vector<double>>();
}

RLCConfig rlc_config(const json& cfg, const Options& o) {
  const int m = o.m.value_or(cfg.value("m", 50));
  RLCConfig c;
  c.m = m;
  const bool lossless = o.lossless || cfg.value("lossless", false);
  c.L = profile(cfg, "L", m, 1.0);
  c.C = profile(cfg, "C", m, 1.0);
  c.R = profile(cfg, "R", m, lossless ? 0.0 : 0.1);
  c.G = profile(cfg, "G", m, lossless ? 0.0 : 0.1);
  if (lossless) {
    std::fill(c.R.begin(), c.R.end(), 0.0);
    std::fill(c.G.begin(), c.G.end(), 0.0);
  }
  if (cfg.contains("degenerate_L")) {
    // Zero inductance and resistance on the cells whose midpoint lies in [a, b].
    const auto ab = cfg["degenerate_L"].get<std::vector<double>>();
    if (ab.size() != 2 || !(ab[0] < ab[1])) throw InvalidInput("degenerate_L must be [a, b] with a < b");
    for (int j = 0; j < m; ++j) {
      const double x = (j + 0.5) / m;
      if (x >= ab[0] && x <= ab[1]) c.L[static_cast<size_t>(j)] = c.R[static_cast<size_t>(j)] = 0.0;
    }
  }
  return c;
}

Problem load_problem(const Options& o) {
  const bool has_input = !o.input.empty(), has_model = !o.model.empty();
  if (has_input == has_model) throw InvalidInput("exactly one of --input and --model is required");
  const TolerancePolicy pol = policy(o);
  Problem pr;
  if (has_input) {
    pr.name = "input";
    pr.pencil.emplace(read_pencil(read_text_file(o.input), pol));
    pr.cert_pencil = pr.pencil;
    return pr;
  }
  const json cfg = o.config.empty() ? json::object() : parse_json(inline_or_file(o.config), "model config");
  pr.name = o.model;
  if (o.model == "heat-wave") {
    HeatWaveConfig c;
    c.m = o.m.value_or(cfg.value("m", 50));
    pr.pencil.emplace(heat_wave_pencil(c, pol));
    pr.cert_pencil = pr.pencil;
  } else if (o.model == "rlc") {
    pr.rlc.emplace(rlc_pencil(rlc_config(cfg, o), pol));
    pr.pencil = pr.rlc->pencil;
    pr.cert_pencil = pr.rlc->interior;
    pr.cert_note = "dissipativity certificates computed on the interior pencil (ker Gamma)";
  } else if (o.model == "weierstrass") {
    WeierstrassSpec spec;
    if (cfg.contains("nilpotent_block_sizes") || cfg.contains("ode_eigenvalues")) {
      for (const json& z : cfg.value("ode_eigenvalues", json::array())) spec.ode_eigenvalues.push_back(complex_from(z));
      spec.nilpotent_block_sizes = cfg.value("nilpotent_block_sizes", std::vector<int>{});
      spec.transform_seed = cfg.value("seed", o.seed);
    } else {
      std::mt19937_64 rng(o.seed);
      spec = random_weierstrass_spec(rng, o.index, std::max(12, o.index + 2));
    }
    pr.pencil.emplace(weierstrass_pencil(spec, pol).pencil);
    pr.cert_pencil = pr.pencil;
  } else if (o.model == "n2") {
    CMatrix E = CMatrix::Zero(2, 2);
    E(0, 1) = 1.0;
    pr.pencil.emplace(E, CMatrix::Identity(2, 2), pol);
    pr.cert_pencil = pr.pencil;
  } else if (o.model == "semi-dissipative") {
    CMatrix E = CMatrix::Zero(2, 2), A = CMatrix::Zero(2, 2);
    E(0, 0) = 1.0;
    A(0, 1) = -1.0;
    A(1, 0) = 1.0;
    pr.pencil.emplace(E, A, pol);
    pr.cert_pencil = pr.pencil;
  } else {
    throw InvalidInput("unknown model '" + o.model + "'");
  }
  return pr;
}

/// Regularity probes at the same points as probe_regular.
json regularity_json(const MatrixPencil& p) {
  json probes = json::array();
  const std::vector<double> radii = logspace(1.0, 1e6, 8);
  for (size_t i = 0; i < radii.size(); ++i) {
    double frac = 0.6180339887498949 * static_cast<double>(i + 1);
    frac -= std::floor(frac);
    const Complex lambda = std::polar(radii[i], 2.0 * M_PI * frac + 0.3);
    probes.push_back({{"lambda", complex_json(lambda)},
                      {"min_singular", min_singular_value(pencil_at(p.E(), p.A(), lambda))}});
  }
  return {{"regular", true}, {"probes", probes}};
}

json certificate(const GrowthCertificate& c) { return parse_embedded(certificate_to_json(c)); }

/// Returns the report and appends any implication violations.
json analyze_json(const Problem& pr, const Options& o, std::vector<std::string>& violations) {
  const MatrixPencil& p = *pr.pencil;
  json r;
  r["model"] = pr.name;
  r["dimension"] = p.dim();
  r["regularity"] = regularity_json(p);

  const IndexReport ir = index_comparison_report(p, grid_from(o));
  violations.insert(violations.end(), ir.violations.begin(), ir.violations.end());

  const Complex mu = choose_mu(p);
  json wong;
  for (Side side : {Side::left, Side::right}) {
    const SubspaceChain chain = build_chain(p, mu, side);
    json cj = chain_json(chain);
    const DecompositionCheck dc = check_decomposition(chain, p.tolerances());
    cj["decomposition_holds"] = dc.holds;
    cj["decomposition_gap"] = dc.gap;
    wong[to_string(side)] = cj;
  }
  r["wong"] = wong;
  try {
    const StaircaseForm st = build_staircase(p, mu, Side::right);
    double worst = 0.0;
    for (Complex z : sample_resolvent_points(p, mu, 3)) worst = std::max(worst, st.pattern_residual(z));
    r["staircase"] = {{"side", "right"}, {"block_sizes", st.block_sizes()}, {"pattern_residual", worst}};
  } catch (const Error& e) {
    violations.push_back(std::string("staircase: ") + e.what());
    r["staircase"] = {{"error", e.what()}};
  }

  json idx;
  idx["g_index_left"] = ir.g_left.k;
  idx["g_index_right"] = ir.g_right.k;
  idx["r_index"] = ir.r_index.k;
  idx["tractability_index"] = ir.tractability ? json(*ir.tractability) : json(nullptr);
  idx["wong_index"] = ir.wong ? json(*ir.wong) : json(nullptr);
  idx["qz_index"] = ir.qz;
  r["indices"] = idx;
  r["index_verdicts"] = {{"g_left", to_string(ir.g_left.verdict)},
                         {"g_right", to_string(ir.g_right.verdict)},
                         {"r_index", to_string(ir.r_index.verdict)}};
  r["index_comparison"] = parse_embedded(index_report_to_json(ir));
  r["D_check"] = {{"omega", ir.d_omega}, {"certificate", certificate(ir.d_check)}};

  const MatrixPencil& cp = *pr.cert_pencil;
  GrowthCertificate d1 = o.omega ? certify_D1(cp, *o.omega) : search_omega(cp, CertKind::D1_cert);
  GrowthCertificate d2 = o.omega ? certify_D2(cp, *o.omega) : search_omega(cp, CertKind::D2_cert);
  const GrowthCertificate dis = check_left_dissipativity(cp, o.omega.value_or(d1.omega));
  for (const GrowthCertificate* c : {&d1, &d2})
    if (c->verdict == Verdict::holds && c->measured_M && *c->measured_M > c->M * (1.0 + 1e-6))
      violations.push_back(std::string(to_string(c->kind)) + " certificate exceeded by the measured constant");
  json certs = {{"D1", certificate(d1)}, {"D2", certificate(d2)}};
  if (!pr.cert_note.empty()) certs["note"] = pr.cert_note;
  r["certificates"] = certs;
  r["dissipativity"] = {{"omega", dis.omega}, {"verdict", to_string(dis.verdict)}, {"certificate", certificate(dis)}};
  if (pr.rlc) {
    r["rlc"] = {{"min_singular_A", min_singular_value(p.A())},
                {"min_singular_A_interior", min_singular_value(pr.rlc->interior.A())}};
  }
  r["violations"] = violations;
  return r;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory " + dir + ": " + ec.message());
}

void write_all(const std::string& dir, const std::map<std::string, std::string>& files) {
  ensure_out_dir(dir);
  for (const auto& [name, content] : files) write_text_file_atomic((std::filesystem::path(dir) / name).string(), content);
}

std::string energy_csv(const SolveReport& rep, const std::vector<double>& energy) {
  std::ostringstream os;
  os << "t, energy\n";
  for (size_t i = 0; i < energy.size(); ++i) os << format_double(rep.times[i]) << ", " << format_double(energy[i]) << "\n";
  return os.str();
}

json solve_json(const SolveReport& rep) { return parse_embedded(solve_report_to_json(rep)); }

void check_time_grid(const Options& o) {
  if (!(o.tf > 0.0)) throw InvalidInput("--tf must be positive");
  if (o.steps < 4) throw InvalidInput("--steps must be at least 4");
}

CVector random_state(std::uint64_t seed, Index n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector x(n);
  for (Index i = 0; i < n; ++i) x(i) = g(rng);
  return x;
}

int cmd_analyze(const Options& o) {
  const Problem pr = load_problem(o);
  std::vector<std::string> violations;
  const json r = analyze_json(pr, o, violations);
  write_all(o.out, {{"report.json", r.dump(2) + "\n"}});
  for (const std::string& v : violations) std::cerr << "implication violation: " << v << "\n";
  return violations.empty() ? kExitOk : kExitViolation;
}

int cmd_solve(const Options& o) {
  check_time_grid(o);
  const Problem pr = load_problem(o);
  const MatrixPencil& p = *pr.pencil;
  const Index n = p.dim();
  const ForcingSignal f = o.forcing.empty() ? ForcingSignal::zero(n) : parse_forcing_json(inline_or_file(o.forcing), n);
  const CVector x0 = o.x0.empty() ? CVector::Zero(n) : parse_vector_json(inline_or_file(o.x0), n);
  const std::vector<double> grid = uniform_grid(0.0, o.tf, o.steps);
  const SolveReport rep = solve_decoupled(p, x0, f, grid);
  json j = solve_json(rep);
  if (o.cross_check) {
    const SolveReport ie = implicit_euler_reference(p, rep.consistent_x0, f, grid);
    double dev = 0.0;
    const Index cols = std::min<Index>(ie.trajectory.cols(), rep.trajectory.cols());
    for (Index c = 0; c < cols; ++c) dev = std::max(dev, (ie.trajectory.col(c) - rep.trajectory.col(c)).norm());
    j["cross_check"] = {{"method", "implicit_euler"}, {"max_deviation", dev}};
  }
  write_all(o.out, {{"solve.json", j.dump(2) + "\n"}, {"trajectory.csv", trajectory_to_csv(rep)}});
  return kExitOk;
}

int cmd_demo(const std::string& name, Options o) {
  if (name != "heat-wave" && name != "rlc" && name != "weierstrass") throw InvalidInput("unknown demo '" + name + "'");
  if (!o.input.empty()) throw InvalidInput("demo does not take --input");
  o.model = name;
  check_time_grid(o);
  const Problem pr = load_problem(o);
  const MatrixPencil& p = *pr.pencil;
  std::vector<std::string> violations;
  json report = analyze_json(pr, o, violations);
  std::map<std::string, std::string> files;
  files["report.json"] = report.dump(2) + "\n";
  const std::vector<double> grid = uniform_grid(0.0, o.tf, o.steps);

  if (name == "heat-wave" || name == "rlc") {
    // Homogeneous run from a random state; the solver projects it onto the consistent set.
    const SolveReport hom = solve_homogeneous(p, random_state(o.seed, p.dim()), grid);
    const std::vector<double> energy = energy_profile(p.E(), hom);
    double worst_increase = 0.0, drift = 0.0;
    for (size_t i = 1; i < energy.size(); ++i) {
      worst_increase = std::max(worst_increase, energy[i] - energy[i - 1]);
      drift = std::max(drift, std::abs(energy[i] - energy[0]));
    }
    files["energy.csv"] = energy_csv(hom, energy);
    json sj = solve_json(hom);
    sj["energy"] = {{"initial", energy.front()},
                    {"max_increase_per_step", worst_increase},
                    {"max_drift", drift},
                    {"relative_drift", energy.front() > 0.0 ? drift / energy.front() : drift}};
    if (name == "heat-wave") {
      files["solve.json"] = sj.dump(2) + "\n";
      files["trajectory.csv"] = trajectory_to_csv(hom);
    } else {
      files["energy_solve.json"] = sj.dump(2) + "\n";
      // Step voltage u0 = 1 at the left end, open right end i1 = 0.
      const ForcingSignal step = ForcingSignal::polynomial({pr.rlc->boundary_forcing(0.0, 1.0)});
      const SolveReport rep = solve_decoupled(p, CVector::Zero(p.dim()), step, grid);
      files["solve.json"] = solve_json(rep).dump(2) + "\n";
      files["trajectory.csv"] = trajectory_to_csv(rep);
    }
  } else {
    const SolveReport rep = solve_homogeneous(p, random_state(o.seed, p.dim()), grid);
    files["solve.json"] = solve_json(rep).dump(2) + "\n";
    files["trajectory.csv"] = trajectory_to_csv(rep);
  }
  write_all(o.out, files);
  for (const std::string& v : violations) std::cerr << "implication violation: " << v << "\n";
  return violations.empty() ? kExitOk : kExitViolation;
}

int cmd_generate(const Options& o) {
  const Problem pr = load_problem(o);
  write_all(o.out, {{"pencil.json", pencil_to_json(*pr.pencil)}});
  return kExitOk;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--input", o.input, "pencil JSON file");
  app->add_option("--model", o.model, "heat-wave | rlc | weierstrass | n2 | semi-dissipative");
  app->add_option("--config", o.config, "model config JSON (inline or file)");
  app->add_option("--tf", o.tf, "final time");
  app->add_option("--steps", o.steps, "time steps");
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--tol", o.tol, "relative rank tolerance");
  app->add_option("--lambda-min", o.lambda_min, "smallest grid point");
  app->add_option("--lambda-max", o.lambda_max, "largest grid point");
  app->add_option("--lambda-points", o.lambda_points, "grid size");
  app->add_option("--omega", o.omega, "shift for dissipativity certificates");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--m", o.m, "grid parameter of the PDE models");
  app->add_option("--index", o.index, "index of a generated Weierstrass pencil");
  app->add_flag("--lossless", o.lossless, "RLC with R = G = 0");
}

}  // namespace

ForcingSignal parse_forcing_json(const std::string& text, Index dim) {
  const json j = parse_json(text, "forcing");
  try {
    const std::string type = j.value("type", std::string("polynomial"));
    if (type == "polynomial") return ForcingSignal::polynomial(coeff_list(j, dim));
    if (type == "piecewise") {
      const auto breaks = j.value("breaks", std::vector<double>{});
      std::vector<ExpPoly> pieces;
      for (const json& pj : j.at("pieces")) {
        ExpPoly e;
        e.coeffs = coeff_list(pj, dim);
        if (pj.contains("rate")) e.rate = complex_from(pj["rate"]);
        pieces.push_back(std::move(e));
      }
      return ForcingSignal::piecewise(breaks, std::move(pieces));
    }
    if (type == "sampled") {
      const json& s = j.at("samples");
      const json* si = j.contains("samples_im") ? &j["samples_im"] : nullptr;
      if (!s.is_array() || (si && si->size() != s.size())) throw InvalidInput("malformed samples");
      CMatrix m(dim, static_cast<Index>(s.size()));
      for (size_t c = 0; c < s.size(); ++c) m.col(static_cast<Index>(c)) = vector_from(s[c], si ? &(*si)[c] : nullptr, dim);
      return ForcingSignal::sampled(j.value("t0", 0.0), j.at("dt").get<double>(), std::move(m));
    }
    throw InvalidInput("unknown forcing type '" + type + "'");
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed forcing: ") + e.what());
  }
}

CVector parse_vector_json(const std::string& text, Index dim) {
  const json j = parse_json(text, "vector");
  if (!j.is_array() || static_cast<Index>(j.size()) != dim) throw InvalidInput("vector must have " + std::to_string(dim) + " entries");
  CVector v(dim);
  try {
    for (Index i = 0; i < dim; ++i) v(i) = complex_from(j[static_cast<size_t>(i)]);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed vector: ") + e.what());
  }
  return v;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"adae: analysis and solution of linear differential-algebraic equations"};
  app.require_subcommand(1);
  Options o;
  std::string demo_name;

  CLI::App* analyze = app.add_subcommand("analyze", "index and certificate report");
  add_common(analyze, o);
  CLI::App* solve = app.add_subcommand("solve", "solve E x' = A x + f");
  add_common(solve, o);
  solve->add_option("--forcing", o.forcing, "forcing JSON (inline or file)");
  solve->add_option("--x0", o.x0, "initial value JSON (inline or file)");
  solve->add_flag("--cross-check", o.cross_check, "compare with implicit Euler");
  CLI::App* demo = app.add_subcommand("demo", "model demos: heat-wave | rlc | weierstrass");
  demo->add_option("name", demo_name, "demo name")->required();
  add_common(demo, o);
  CLI::App* generate = app.add_subcommand("generate", "write a model pencil as JSON");
  add_common(generate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFailure;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(o);
    if (solve->parsed()) return cmd_solve(o);
    if (demo->parsed()) return cmd_demo(demo_name, o);
    if (generate->parsed()) return cmd_generate(o);
  } catch (const SingularPencil& e) {
    std::cerr << "error: pencil not regular (" << e.what() << ")\n";
    return kExitFailure;
  } catch (const InsufficientSmoothness& e) {
    std::cerr << "error: insufficient smoothness: " << e.what() << "\n";
    return kExitSmoothness;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace adae
