#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "choquard/closed_forms.hpp"
#include "choquard/config.hpp"
#include "choquard/decompose.hpp"
#include "choquard/errors.hpp"
#include "choquard/functionals.hpp"
#include "choquard/io.hpp"
#include "choquard/parallel.hpp"
#include "choquard/params.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"
#include "choquard/testfamily.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace choquard;

namespace {

constexpr const char* kVersion = "0.1.0";

enum class ExitCode : int { Ok = 0, Config = 2, Numerical = 3 };

struct Overrides {
  std::optional<std::string> configPath;
  std::optional<std::string> outputDir;
  std::optional<int> threads;
  std::optional<int> N;
  std::optional<double> mu;
  std::optional<std::string> domainKind;
  std::optional<double> L;
  std::optional<int> nodes;
  std::optional<std::string> method;
  std::optional<std::string> field;
  std::vector<std::string> sets;

  std::optional<int> maxIters;
  std::optional<double> gradTol;
  std::optional<double> stepSize;
  std::optional<double> perturbation;
  std::optional<double> R;
  std::optional<double> curveH;
  std::optional<int> nSigma;
  std::optional<int> nT;
  bool allowUnresolvedHole = false;
  std::optional<int> maxBubbles;
  std::optional<double> theta;
  std::vector<double> pivot;
  std::optional<double> tolerance;
};

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

void apply_overrides(json& cfg, const Overrides& o) {
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key.path=value, got '" + s + "'");
    config::set_path(cfg, s.substr(0, eq), parse_value(s.substr(eq + 1)));
  }
  if (o.outputDir) cfg["outputDir"] = *o.outputDir;
  if (o.N) config::set_path(cfg, "params.N", *o.N);
  if (o.mu) config::set_path(cfg, "params.mu", *o.mu);
  if (o.domainKind) config::set_path(cfg, "domain.kind", *o.domainKind);
  if (o.L) config::set_path(cfg, "domain.L", *o.L);
  if (o.nodes) config::set_path(cfg, "domain.nodes", *o.nodes);
  if (o.method) config::set_path(cfg, "riesz.method", *o.method);
  if (o.field) config::set_path(cfg, "field", json{{"file", *o.field}});
  if (o.maxIters) config::set_path(cfg, "solve.maxIters", *o.maxIters);
  if (o.gradTol) config::set_path(cfg, "solve.gradTol", *o.gradTol);
  if (o.stepSize) config::set_path(cfg, "solve.stepSize", *o.stepSize);
  if (o.perturbation) config::set_path(cfg, "solve.seed.perturbation", *o.perturbation);
  if (o.R) config::set_path(cfg, "energyCurve.R", *o.R);
  if (o.curveH) config::set_path(cfg, "energyCurve.h", *o.curveH);
  if (o.nSigma) config::set_path(cfg, "energyCurve.nSigma", *o.nSigma);
  if (o.nT) config::set_path(cfg, "energyCurve.nT", *o.nT);
  if (o.allowUnresolvedHole) config::set_path(cfg, "energyCurve.allowUnresolvedHole", true);
  if (o.maxBubbles) config::set_path(cfg, "decompose.maxBubbles", *o.maxBubbles);
  if (o.theta) config::set_path(cfg, "decompose.theta", *o.theta);
  if (!o.pivot.empty()) config::set_path(cfg, "pohozaev.pivot", o.pivot);
  if (o.tolerance) config::set_path(cfg, "bubbleCheck.tolerance", *o.tolerance);
}

int resolve_threads(const Overrides& o) {
  if (o.threads) {
    if (*o.threads < 1) throw ConfigError("--threads must be at least 1");
    return *o.threads;
  }
  if (const char* env = std::getenv("CHOQUARD_THREADS")) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(env, &used);
      if (used != std::string(env).size() || n < 1) throw std::invalid_argument("bad");
      return n;
    } catch (const std::exception&) {
      throw ConfigError("CHOQUARD_THREADS must be a positive integer");
    }
  }
  return 1;
}

json point_json(const Point& p) { return json(p); }

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

/// Output bundle: main JSON plus side files, all written after compute.
class Outputs {
 public:
  Outputs(std::string command, fs::path dir, json config, std::string hash)
      : command_(std::move(command)), dir_(std::move(dir)), config_(std::move(config)), hash_(std::move(hash)) {}

  const std::string& hash() const { return hash_; }

  void csv(const std::string& name, io::CsvWriter w) {
    w.comment("command: " + command_);
    w.comment("input_hash: " + hash_);
    w.comment("config: " + config_.dump());
    files_.emplace_back(name, w.str());
    listing_.push_back(name);
  }

  void npy(const std::string& name, const Field& f) {
    std::string bytes = io::encode_npy(f);
    fieldHashes_[name] = io::hex64(io::fnv1a(bytes));
    files_.emplace_back(name, std::move(bytes));
    listing_.push_back(name);
  }

  std::string finish(const std::string& mainName, json result) {
    json doc;
    doc["command"] = command_;
    doc["version"] = kVersion;
    doc["inputHash"] = hash_;
    doc["config"] = config_;
    doc["result"] = std::move(result);
    doc["files"] = listing_;
    if (!fieldHashes_.empty()) doc["fieldHashes"] = fieldHashes_;
    const std::string text = doc.dump(2) + "\n";
    for (const auto& [name, content] : files_) io::write_atomic(dir_ / name, content);
    io::write_atomic(dir_ / mainName, text);
    return text;
  }

 private:
  std::string command_;
  fs::path dir_;
  json config_;
  std::string hash_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::string> listing_;
  json fieldHashes_ = json::object();
};

std::string input_hash(const json& cfg, const std::string& inputBytes) {
  std::uint64_t h = io::fnv1a(cfg.dump());
  h = io::fnv1a(inputBytes, h);
  return io::hex64(h);
}

struct Context {
  json cfg;
  Params params;
  fs::path outDir;
  std::string inputBytes;
};

Context base_context(const Overrides& o) {
  Context c;
  c.cfg = config::load(o.configPath ? std::optional<fs::path>(*o.configPath) : std::nullopt);
  apply_overrides(c.cfg, o);
  config::check_top_level(c.cfg);
  c.params = config::resolve_params(c.cfg);
  c.outDir = config::resolve_output_dir(c.cfg);
  config::resolve_seed(c.cfg);
  return c;
}

RieszOperator make_operator(json& cfg, const Params& params, DomainPtr domain) {
  const config::RieszSettings rs = config::resolve_riesz(cfg);
  return RieszOperator(params, std::move(domain), rs.method, rs.pad);
}

json constants_json(const Params& p) {
  const Exponents e = derive_exponents(p);
  const ConstantSet c = best_constants(p);
  json r;
  r["N"] = p.N;
  r["mu"] = p.mu;
  r["twoStar"] = e.twoStar;
  r["twoStarMu"] = e.twoStarMu;
  r["p"] = e.p;
  r["cNmu"] = c.cNmu;
  r["S"] = c.S;
  r["sHL"] = c.sHL;
  r["beta"] = c.beta;
  r["window"] = interval_json(c.window);
  r["quotientWindow"] = interval_json(c.quotientWindow);
  r["lieb"] = {{"cNmu", c.liebCNmu}, {"sHL", c.liebSHL}, {"beta", c.liebBeta}};
  r["familyAmplitude"] = family_amplitude(p);
  r["solutionAmplitude"] = solution_amplitude(p);
  return r;
}

std::string cmd_constants(const Overrides& o) {
  Context c = base_context(o);
  json result = constants_json(c.params);
  Outputs out("constants", c.outDir, c.cfg, input_hash(c.cfg, ""));
  return out.finish("constants.json", std::move(result));
}

json energy_json(const EnergyReport& e) {
  json r;
  r["dirichlet"] = e.dirichlet;
  r["nlNorm"] = e.nlNorm;
  r["nonlocal"] = e.nonlocal;
  r["I"] = e.I;
  r["quotient"] = e.quotient;
  r["pohozaevResidual"] = e.pohozaevResidual;
  r["barycenterNorm"] = point_json(e.barycenterNorm);
  return r;
}

json grid_json(const GridDomain& d) {
  json g;
  g["kind"] = to_string(d.shape().kind);
  g["nodes"] = d.nodes();
  g["h"] = d.max_h();
  g["maskCount"] = d.mask_count();
  g["maskHash"] = io::hex64(d.mask_hash());
  return g;
}

std::string cmd_energy(const Overrides& o) {
  Context c = base_context(o);
  const DomainPtr dom = config::resolve_domain(c.cfg, c.params);
  const Field u = config::resolve_field(c.cfg, "field", dom, c.params, c.inputBytes);
  const std::optional<Point> pivot = config::resolve_pivot(c.cfg, c.params);
  const RieszOperator op = make_operator(c.cfg, c.params, dom);
  const EnergyReport e = energy(u, op, pivot);
  json result = energy_json(e);
  result["grid"] = grid_json(*dom);
  Outputs out("energy", c.outDir, c.cfg, input_hash(c.cfg, c.inputBytes));
  return out.finish("energy.json", std::move(result));
}

json window_json(const WindowReport& w) {
  json r;
  r["quotient"] = w.quotient;
  r["level"] = w.level;
  r["quotientWindow"] = interval_json(w.quotientWindow);
  r["levelWindow"] = interval_json(w.levelWindow);
  r["quotientClass"] = to_string(w.quotientClass);
  r["levelClass"] = to_string(w.levelClass);
  r["agree"] = w.agree;
  return r;
}

struct SolveOutcome {
  std::string text;
  bool converged;
};

SolveOutcome cmd_solve(const Overrides& o) {
  Context c = base_context(o);
  const DomainPtr dom = config::resolve_domain(c.cfg, c.params);
  const SolveConfig sc = config::resolve_solve(c.cfg, dom, c.params, c.inputBytes);
  const RieszOperator op = make_operator(c.cfg, c.params, dom);
  const SolveResult r = minimize_quotient(sc, op);

  json result;
  result["status"] = to_string(r.status);
  result["converged"] = r.converged;
  result["iterations"] = r.iterations;
  result["quotient"] = r.quotient;
  result["projGradNorm"] = r.projGradNorm;
  result["lambdaStar"] = r.lambdaStar;
  result["weakResidual"] = r.weakResidual;
  if (r.window) result["window"] = window_json(*r.window);
  result["grid"] = grid_json(*dom);

  Outputs out("solve", c.outDir, c.cfg, input_hash(c.cfg, c.inputBytes));
  std::vector<std::string> header{"iter [1]", "quotient [1]", "proj_grad_norm [1]", "step [1]", "morrey_radius [length]"};
  for (int k = 0; k < c.params.N; ++k) header.push_back("barycenter_" + std::to_string(k) + " [length]");
  for (int k = 0; k < c.params.N; ++k) header.push_back("morrey_center_" + std::to_string(k) + " [length]");
  io::CsvWriter trace(header);
  for (const auto& e : r.trace) {
    std::vector<std::string> row{std::to_string(e.iter), io::format_double(e.quotient),
                                 io::format_double(e.projGradNorm), io::format_double(e.step),
                                 e.barycenterNorm.empty() ? "" : io::format_double(e.morreyRadius)};
    for (int k = 0; k < c.params.N; ++k) {
      row.push_back(e.barycenterNorm.empty() ? "" : io::format_double(e.barycenterNorm[k]));
    }
    for (int k = 0; k < c.params.N; ++k) {
      row.push_back(e.morreyCenter.empty() ? "" : io::format_double(e.morreyCenter[k]));
    }
    trace.row_mixed(row);
  }
  out.csv("trace.csv", std::move(trace));
  out.npy("manifold_field.npy", r.u);
  out.npy("solution.npy", r.solution);
  return {out.finish("solve.json", std::move(result)), r.converged};
}

std::string cmd_energy_curve(const Overrides& o) {
  Context c = base_context(o);
  const config::EnergyCurveSettings s = config::resolve_energy_curve(c.cfg, c.params);
  const config::RieszSettings rs = config::resolve_riesz(c.cfg);
  const int n = static_cast<int>(std::lround(8.0 * s.R / s.h)) + 1;
  const DomainPtr ann = GridDomain::annulus(c.params.N, 0.25 / s.R, 4.0 * s.R, n);
  const RieszOperator op(c.params, ann, rs.method, rs.pad);
  const FamilySweep sw = sweep(s.R, op, s.sweep);

  json result;
  result["R"] = sw.R;
  result["supQuotient"] = sw.supQuotient;
  result["grid"] = grid_json(*ann);
  const ConstantSet consts = best_constants(c.params);
  const double factor = consts.quotientWindow.hi / consts.sHL;
  if (s.empirical) {
    const DomainPtr box = GridDomain::free_space(c.params.N, 8.0 * s.R, n);
    const RieszOperator bop(c.params, box, rs.method, rs.pad);
    const EmpiricalShl e = empirical_shl(s.R, bop);
    result["empiricalShl"] = {{"value", e.value}, {"scale", e.scale}, {"scales", e.scales}, {"quotients", e.quotients}};
    result["windowBound"] = factor * e.value;
    result["pass"] = sw.supQuotient < factor * e.value;
  } else {
    result["windowBound"] = consts.quotientWindow.hi;
    result["pass"] = sw.supQuotient < consts.quotientWindow.hi;
  }

  Outputs out("energy-curve", c.outDir, c.cfg, input_hash(c.cfg, ""));
  std::vector<std::string> header{"t [1]"};
  for (std::size_t b = 0; b < sw.sigmas.size(); ++b) header.push_back("sigma_" + std::to_string(b) + " [1]");
  io::CsvWriter q(header);
  io::CsvWriter g(header);
  for (std::size_t a = 0; a < sw.ts.size(); ++a) {
    std::vector<double> rq{sw.ts[a]};
    std::vector<double> rg{sw.ts[a]};
    rq.insert(rq.end(), sw.quotients[a].begin(), sw.quotients[a].end());
    rg.insert(rg.end(), sw.dirichletGaps[a].begin(), sw.dirichletGaps[a].end());
    q.row(rq);
    g.row(rg);
  }
  out.csv("quotients.csv", std::move(q));
  out.csv("dirichlet_gaps.csv", std::move(g));
  std::vector<std::string> sh{"index [1]"};
  for (int k = 0; k < c.params.N; ++k) sh.push_back("sigma_" + std::to_string(k) + " [1]");
  io::CsvWriter sig(sh);
  for (std::size_t b = 0; b < sw.sigmas.size(); ++b) {
    std::vector<double> row{static_cast<double>(b)};
    row.insert(row.end(), sw.sigmas[b].begin(), sw.sigmas[b].end());
    sig.row(row);
  }
  out.csv("sigmas.csv", std::move(sig));

  if (s.truncation) {
    const TruncationCurve tc = truncation_error_curve(s.t, s.sigma, s.Rs, s.nodes, c.params, rs.method);
    io::CsvWriter tw({"R [length]", "h [length]", "dirichlet_gap [energy]", "nl_gap [energy]"});
    for (const auto& r : tc.records) tw.row({r.R, r.h, r.dirichletGap, r.nlGap});
    out.csv("truncation.csv", std::move(tw));
    const double N = c.params.N;
    const double mu = c.params.mu;
    result["truncation"] = {{"dirichletSlope", tc.dirichletSlope},
                            {"nlSlope", tc.nlSlope},
                            {"dirichletExponent", -(N - 2.0)},
                            {"nlExponent", -(2.0 * N - mu) / 2.0}};
  }
  return out.finish("energy_curve.json", std::move(result));
}

std::string cmd_ps_decompose(const Overrides& o) {
  Context c = base_context(o);
  const DomainPtr dom = config::resolve_domain(c.cfg, c.params);
  const config::DecomposeSettings s = config::resolve_decompose(c.cfg);
  const Field u = config::resolve_field(c.cfg, "field", dom, c.params, c.inputBytes);
  const RieszOperator op = make_operator(c.cfg, c.params, dom);
  const DecompositionResult r = decompose(u, op, s.maxBubbles, s.options);

  json result;
  result["k"] = r.k;
  result["partial"] = r.partial;
  result["stopReason"] = r.stopReason;
  result["v0Resolved"] = r.v0Resolved;
  result["v0Dirichlet"] = dirichlet_energy(r.v0);
  result["residualDirichlet"] = r.residualDirichlet;
  result["ledger"] = {{"inputDirichlet", r.ledger.inputDirichlet},
                      {"sumParts", r.ledger.sumParts},
                      {"relativeGap", r.ledger.relativeGap}};
  result["beta"] = best_constants(c.params).beta;
  json bubbles = json::array();
  io::CsvWriter bw([&] {
    std::vector<std::string> h{"index [1]", "scale [length]", "amplitude [1]", "dirichlet [energy]",
                               "energy_inf [energy]", "energy_grid [energy]", "fit_residual [1]",
                               "morrey_radius [length]", "boundary_adjacent [bool]"};
    for (int k = 0; k < c.params.N; ++k) h.push_back("center_" + std::to_string(k) + " [length]");
    return h;
  }());
  for (std::size_t i = 0; i < r.bubbles.size(); ++i) {
    const auto& b = r.bubbles[i];
    bubbles.push_back({{"center", b.spec.center},
                       {"scale", b.spec.scale},
                       {"amplitude", b.spec.amplitude},
                       {"dirichlet", b.dirichlet},
                       {"energyInf", b.energyInf},
                       {"energyGrid", b.energyGrid},
                       {"fitResidual", b.fitResidual},
                       {"morreyValue", b.morreyValue},
                       {"morreyRadius", b.morreyRadius},
                       {"boundaryAdjacent", b.boundaryAdjacent}});
    std::vector<double> row{static_cast<double>(i), b.spec.scale, b.spec.amplitude, b.dirichlet, b.energyInf,
                            b.energyGrid, b.fitResidual, b.morreyRadius, b.boundaryAdjacent ? 1.0 : 0.0};
    row.insert(row.end(), b.spec.center.begin(), b.spec.center.end());
    bw.row(row);
  }
  result["bubbles"] = bubbles;

  Outputs out("ps-decompose", c.outDir, c.cfg, input_hash(c.cfg, c.inputBytes));
  out.csv("bubbles.csv", std::move(bw));
  out.npy("v0.npy", r.v0);
  out.npy("residual.npy", r.residual);
  return out.finish("decomposition.json", std::move(result));
}

std::string cmd_pohozaev(const Overrides& o) {
  Context c = base_context(o);
  const DomainPtr dom = config::resolve_domain(c.cfg, c.params);
  const Field u = config::resolve_field(c.cfg, "field", dom, c.params, c.inputBytes);
  const std::optional<Point> pivot = config::resolve_pivot(c.cfg, c.params);
  const RieszOperator op = make_operator(c.cfg, c.params, dom);
  const PohozaevParts p = pohozaev(u, op, pivot);
  json result{{"interior", p.interior}, {"face", p.face}, {"residual", p.residual}, {"relative", p.relative}};
  result["grid"] = grid_json(*dom);
  Outputs out("pohozaev", c.outDir, c.cfg, input_hash(c.cfg, c.inputBytes));
  return out.finish("pohozaev.json", std::move(result));
}

std::string cmd_bubble_check(const Overrides& o) {
  Context c = base_context(o);
  const DomainPtr dom = config::resolve_domain(c.cfg, c.params);
  const Field u = config::resolve_field(c.cfg, "field", dom, c.params, c.inputBytes);
  const double tol = config::resolve_bubble_tolerance(c.cfg);
  const BubbleCheck b = bubble_check(u, c.params, tol);
  json result{{"isBubble", b.isBubble},
              {"radialSpread", b.radialSpread},
              {"monotoneViolation", b.monotoneViolation},
              {"fit",
               {{"center", b.fit.spec.center},
                {"scale", b.fit.spec.scale},
                {"amplitude", b.fit.spec.amplitude},
                {"residual", b.fit.residual},
                {"converged", b.fit.converged},
                {"iterations", b.fit.iterations}}}};
  Outputs out("bubble-check", c.outDir, c.cfg, input_hash(c.cfg, c.inputBytes));
  return out.finish("bubble_check.json", std::move(result));
}

int report_error(const std::string& type, const std::string& message, ExitCode code) {
  json err{{"error", {{"type", type}, {"message", message}, {"exitCode", static_cast<int>(code)}}}};
  std::cerr << err.dump() << std::endl;
  return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for the critical Choquard equation", "choquard"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.configPath, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", o.outputDir, "Output directory");
  app.add_option("--threads", o.threads, "Worker threads (default: CHOQUARD_THREADS or 1)");
  app.add_option("--N", o.N, "Dimension");
  app.add_option("--mu", o.mu, "Riesz exponent");
  app.add_option("--set", o.sets, "Override any config value: key.path=json");

  auto grid_flags = [&](CLI::App* sub) {
    sub->add_option("--domain", o.domainKind, "freespace, box, ball, annulus or halfspace");
    sub->add_option("--L", o.L, "Free-space box extent");
    sub->add_option("--nodes", o.nodes, "Nodes per axis");
    sub->add_option("--method", o.method, "Riesz method: fourier or direct");
    sub->add_option("--field", o.field, ".npy field file on the configured grid");
  };

  CLI::App* constants = app.add_subcommand("constants", "Exponents and best constants");
  CLI::App* energyCmd = app.add_subcommand("energy", "Energy report of a field");
  grid_flags(energyCmd);
  CLI::App* solve = app.add_subcommand("solve", "Minimize the quotient on the constraint manifold");
  grid_flags(solve);
  solve->add_option("--max-iters", o.maxIters, "Iteration limit");
  solve->add_option("--grad-tol", o.gradTol, "Stop when the projected gradient norm falls below this");
  solve->add_option("--step", o.stepSize, "Initial step size");
  solve->add_option("--perturbation", o.perturbation, "Relative amplitude of the seed perturbation");
  CLI::App* curve = app.add_subcommand("energy-curve", "Quotient sweep over the truncated test family");
  curve->add_option("--R", o.R, "Cutoff radius");
  curve->add_option("--spacing", o.curveH, "Grid spacing h");
  curve->add_option("--n-sigma", o.nSigma, "Number of directions");
  curve->add_option("--n-t", o.nT, "Number of concentration parameters");
  curve->add_flag("--allow-unresolved-hole", o.allowUnresolvedHole, "Accept a spacing coarser than the inner hole");
  curve->add_option("--method", o.method, "Riesz method: fourier or direct");
  CLI::App* ps = app.add_subcommand("ps-decompose", "Bubble decomposition of a field");
  grid_flags(ps);
  ps->add_option("--max-bubbles", o.maxBubbles, "Upper bound on extracted bubbles");
  ps->add_option("--theta", o.theta, "Concentration threshold relative to the reference Morrey value");
  CLI::App* poho = app.add_subcommand("pohozaev", "Pohozaev residual of a field");
  grid_flags(poho);
  poho->add_option("--pivot", o.pivot, "Pivot point x0, comma separated")->delimiter(',');
  CLI::App* bc = app.add_subcommand("bubble-check", "Fit and shape test against the bubble family");
  grid_flags(bc);
  bc->add_option("--tolerance", o.tolerance, "Threshold for fit residual, radial spread and monotonicity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), ExitCode::Config);
  }

  try {
    set_threads(resolve_threads(o));
    std::string text;
    bool ok = true;
    if (constants->parsed()) {
      text = cmd_constants(o);
    } else if (energyCmd->parsed()) {
      text = cmd_energy(o);
    } else if (solve->parsed()) {
      const SolveOutcome r = cmd_solve(o);
      text = r.text;
      ok = r.converged;
    } else if (curve->parsed()) {
      text = cmd_energy_curve(o);
    } else if (ps->parsed()) {
      text = cmd_ps_decompose(o);
    } else if (poho->parsed()) {
      text = cmd_pohozaev(o);
    } else if (bc->parsed()) {
      text = cmd_bubble_check(o);
    }
    std::cout << text;
    if (!ok) return report_error("numerical", "solver did not converge; outputs were written", ExitCode::Numerical);
    return 0;
  } catch (const ConfigError& e) {
    return report_error("config", e.what(), ExitCode::Config);
  } catch (const NumericalError& e) {
    return report_error("numerical", e.what(), ExitCode::Numerical);
  } catch (const fs::filesystem_error& e) {
    return report_error("config", e.what(), ExitCode::Config);
  } catch (const std::exception& e) {
    return report_error("numerical", e.what(), ExitCode::Numerical);
  }
}
