#include "choquard/config.hpp"

#include <cmath>
#include <set>

#include "choquard/closed_forms.hpp"
#include "choquard/errors.hpp"
#include "choquard/io.hpp"

namespace choquard::config {

namespace {

json& section(json& cfg, const std::string& key) {
  if (!cfg.contains(key)) cfg[key] = json::object();
  json& s = cfg[key];
  if (!s.is_object()) throw ConfigError("'" + key + "' must be an object");
  return s;
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
T get(json& obj, const std::string& where, const char* key, T fallback) {
  if (!obj.contains(key)) {
    obj[key] = fallback;
    return fallback;
  }
  try {
    return obj[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

template <class T>
T require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError("missing " + where + "." + key);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

Point require_point(const json& obj, const std::string& where, const char* key, int N) {
  const auto p = require<std::vector<double>>(obj, where, key);
  if (static_cast<int>(p.size()) != N) throw ConfigError(where + "." + key + " must have N = " + std::to_string(N) + " entries");
  return p;
}

double resolve_amplitude(json& b, const std::string& where, const Params& params) {
  if (!b.contains("amplitude")) b["amplitude"] = "solution";
  const json& a = b["amplitude"];
  if (a.is_number()) return a.get<double>();
  if (a.is_string()) {
    const std::string s = a.get<std::string>();
    if (s == "solution") return solution_amplitude(params);
    if (s == "family") return family_amplitude(params);
  }
  throw ConfigError(where + ".amplitude must be a number, \"solution\" or \"family\"");
}

BubbleSpec resolve_bubble(json& b, const std::string& where, const Params& params) {
  if (!b.is_object()) throw ConfigError(where + " must be an object");
  allow_keys(b, where, {"center", "scale", "amplitude"});
  BubbleSpec spec;
  if (!b.contains("center")) b["center"] = std::vector<double>(params.N, 0.0);
  spec.center = require_point(b, where, "center", params.N);
  spec.scale = get<double>(b, where, "scale", 1.0);
  spec.amplitude = resolve_amplitude(b, where, params);
  spec.validate(params.N);
  return spec;
}

}  // namespace

json load(const std::optional<std::filesystem::path>& path) {
  if (!path) return json::object();
  const std::string text = io::read_file(*path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path->string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  return j;
}

void check_top_level(const json& cfg) {
  allow_keys(cfg, "config", {"params", "domain", "riesz", "field", "solve", "energyCurve", "decompose", "pohozaev",
                             "bubbleCheck", "outputDir", "globalSeed"});
}

void set_path(json& cfg, const std::string& dotted, json value) {
  json* cur = &cfg;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("malformed override path '" + dotted + "'");
    if (dot == std::string::npos) {
      (*cur)[key] = std::move(value);
      return;
    }
    json& next = (*cur)[key];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError("'" + dotted.substr(0, dot) + "' must be an object");
    cur = &next;
    start = dot + 1;
  }
}

Params resolve_params(json& cfg) {
  json& s = section(cfg, "params");
  allow_keys(s, "params", {"N", "mu"});
  const int N = get<int>(s, "params", "N", 3);
  const double mu = get<double>(s, "params", "mu", 1.0);
  return Params::make(N, mu);
}

DomainPtr resolve_domain(json& cfg, const Params& params) {
  json& s = section(cfg, "domain");
  const std::string kind = get<std::string>(s, "domain", "kind", "freespace");
  const int N = params.N;
  if (kind == "freespace") {
    allow_keys(s, "domain", {"kind", "L", "nodes"});
    return GridDomain::free_space(N, get<double>(s, "domain", "L", 20.0), get<int>(s, "domain", "nodes", 64));
  }
  if (kind == "box") {
    allow_keys(s, "domain", {"kind", "origin", "extent", "nodes"});
    const Point origin = require_point(s, "domain", "origin", N);
    const auto extent = require<std::vector<double>>(s, "domain", "extent");
    const auto nodes = require<std::vector<int>>(s, "domain", "nodes");
    return GridDomain::box(origin, extent, nodes);
  }
  if (kind == "ball") {
    allow_keys(s, "domain", {"kind", "radius", "nodes", "halfWidth"});
    const double r = get<double>(s, "domain", "radius", 1.0);
    return GridDomain::ball(N, r, get<int>(s, "domain", "nodes", 64), get<double>(s, "domain", "halfWidth", r));
  }
  if (kind == "annulus") {
    allow_keys(s, "domain", {"kind", "r1", "r2", "nodes", "halfWidth"});
    const double r1 = require<double>(s, "domain", "r1");
    const double r2 = require<double>(s, "domain", "r2");
    return GridDomain::annulus(N, r1, r2, get<int>(s, "domain", "nodes", 64), get<double>(s, "domain", "halfWidth", r2));
  }
  if (kind == "halfspace") {
    allow_keys(s, "domain", {"kind", "lateral", "depth", "nodes"});
    const double lateral = get<double>(s, "domain", "lateral", 20.0);
    const double depth = get<double>(s, "domain", "depth", 10.0);
    const auto nodes = require<std::vector<int>>(s, "domain", "nodes");
    return GridDomain::half_space(N, lateral, depth, nodes);
  }
  throw ConfigError("domain.kind must be one of freespace, box, ball, annulus, halfspace");
}

RieszSettings resolve_riesz(json& cfg) {
  json& s = section(cfg, "riesz");
  allow_keys(s, "riesz", {"method", "pad"});
  RieszSettings out;
  const std::string m = get<std::string>(s, "riesz", "method", "fourier");
  if (m == "fourier") {
    out.method = RieszMethod::PaddedFourier;
  } else if (m == "direct") {
    out.method = RieszMethod::DirectSum;
  } else {
    throw ConfigError("riesz.method must be \"fourier\" or \"direct\"");
  }
  out.pad = get<double>(s, "riesz", "pad", 2.0);
  if (!(out.pad >= 2.0)) throw ConfigError("riesz.pad must be at least 2");
  return out;
}

Field resolve_field(json& cfg, const std::string& name, DomainPtr domain, const Params& params,
                    std::string& inputBytes) {
  if (!cfg.contains(name)) throw ConfigError("missing '" + name + "' section (file, bubble or synthesize)");
  json& s = section(cfg, name);
  allow_keys(s, name, {"file", "bubble", "synthesize"});
  if (s.size() != 1) throw ConfigError("'" + name + "' needs exactly one of file, bubble, synthesize");
  if (s.contains("file")) {
    const auto path = require<std::string>(s, name, "file");
    inputBytes = io::read_file(path);
    return io::decode_npy(inputBytes, domain);
  }
  if (s.contains("bubble")) {
    return sample_bubble(resolve_bubble(s["bubble"], name + ".bubble", params), params, domain);
  }
  json& syn = s["synthesize"];
  if (!syn.is_object()) throw ConfigError(name + ".synthesize must be an object");
  allow_keys(syn, name + ".synthesize", {"profiles", "v0"});
  if (!syn.contains("profiles")) syn["profiles"] = json::array();
  if (!syn["profiles"].is_array()) throw ConfigError(name + ".synthesize.profiles must be an array");
  std::vector<ProfileSpec> profiles;
  for (json& p : syn["profiles"]) {
    const std::string where = name + ".synthesize.profiles[]";
    if (!p.is_object()) throw ConfigError(where + " must be an object");
    allow_keys(p, where, {"center", "scale", "sign"});
    ProfileSpec ps;
    ps.center = require_point(p, where, "center", params.N);
    ps.scale = require<double>(p, where, "scale");
    ps.sign = get<int>(p, where, "sign", 1);
    profiles.push_back(ps);
  }
  V0Source v0;
  if (syn.contains("v0")) {
    json& v = syn["v0"];
    if (!v.is_object()) throw ConfigError(name + ".synthesize.v0 must be an object");
    allow_keys(v, name + ".synthesize.v0", {"bubble", "file"});
    if (v.contains("bubble")) {
      v0 = resolve_bubble(v["bubble"], name + ".synthesize.v0.bubble", params);
    } else if (v.contains("file")) {
      inputBytes = io::read_file(require<std::string>(v, name + ".synthesize.v0", "file"));
      v0 = io::decode_npy(inputBytes, domain);
    }
  }
  return synthesize_ps_field(v0, profiles, domain, params);
}

SolveConfig resolve_solve(json& cfg, DomainPtr domain, const Params& params, std::string& inputBytes) {
  json& s = section(cfg, "solve");
  allow_keys(s, "solve", {"maxIters", "stepSize", "gradTol", "windowCheck", "traceEvery", "seed"});
  SolveConfig out;
  out.maxIters = get<int>(s, "solve", "maxIters", out.maxIters);
  out.stepSize = get<double>(s, "solve", "stepSize", out.stepSize);
  out.gradTol = get<double>(s, "solve", "gradTol", out.gradTol);
  out.windowCheck = get<bool>(s, "solve", "windowCheck", out.windowCheck);
  out.traceEvery = get<int>(s, "solve", "traceEvery", out.traceEvery);
  json& seed = section(s, "seed");
  const std::string type = get<std::string>(seed, "solve.seed", "type", "bubble");
  if (type == "bubble") {
    allow_keys(seed, "solve.seed", {"type", "center", "scale", "amplitude", "perturbation", "perturbSeed", "taperFraction"});
    BubbleSeed b;
    json bubble = json::object();
    for (const char* k : {"center", "scale", "amplitude"}) {
      if (seed.contains(k)) bubble[k] = seed[k];
    }
    b.bubble = resolve_bubble(bubble, "solve.seed", params);
    for (const char* k : {"center", "scale", "amplitude"}) seed[k] = bubble[k];
    b.perturbation = get<double>(seed, "solve.seed", "perturbation", 0.0);
    b.perturbSeed = get<std::uint64_t>(seed, "solve.seed", "perturbSeed", 1);
    b.taperFraction = get<double>(seed, "solve.seed", "taperFraction", 0.5);
    out.seed = b;
  } else if (type == "family") {
    allow_keys(seed, "solve.seed", {"type", "sigma", "t", "R"});
    FamilySeed f;
    if (!seed.contains("sigma")) {
      Point e(params.N, 0.0);
      e.back() = 1.0;
      seed["sigma"] = e;
    }
    f.sigma = require_point(seed, "solve.seed", "sigma", params.N);
    f.t = get<double>(seed, "solve.seed", "t", 0.0);
    f.R = get<double>(seed, "solve.seed", "R", 8.0);
    out.seed = f;
  } else if (type == "field") {
    allow_keys(seed, "solve.seed", {"type", "file"});
    inputBytes = io::read_file(require<std::string>(seed, "solve.seed", "file"));
    out.seed = FieldSeed{io::decode_npy(inputBytes, domain)};
  } else {
    throw ConfigError("solve.seed.type must be bubble, family or field");
  }
  out.validate();
  return out;
}

EnergyCurveSettings resolve_energy_curve(json& cfg, const Params& params) {
  json& s = section(cfg, "energyCurve");
  allow_keys(s, "energyCurve", {"R", "h", "nSigma", "nT", "allowUnresolvedHole", "empirical", "truncation"});
  EnergyCurveSettings out;
  out.R = get<double>(s, "energyCurve", "R", 8.0);
  if (!(out.R > 0.0)) throw ConfigError("energyCurve.R must be positive");
  out.h = get<double>(s, "energyCurve", "h", 0.5);
  if (!(out.h > 0.0)) throw ConfigError("energyCurve.h must be positive");
  const double cells = 8.0 * out.R / out.h;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells) {
    throw ConfigError("energyCurve.h must divide the box extent 8R");
  }
  out.sweep.nSigma = get<int>(s, "energyCurve", "nSigma", 12);
  out.sweep.nT = get<int>(s, "energyCurve", "nT", 10);
  out.sweep.allowUnresolvedHole = get<bool>(s, "energyCurve", "allowUnresolvedHole", false);
  out.empirical = get<bool>(s, "energyCurve", "empirical", true);
  json& tr = section(s, "truncation");
  allow_keys(tr, "energyCurve.truncation", {"enabled", "t", "sigma", "Rs", "nodes"});
  out.truncation = get<bool>(tr, "energyCurve.truncation", "enabled", true);
  out.t = get<double>(tr, "energyCurve.truncation", "t", 0.0);
  if (!tr.contains("sigma")) {
    Point e(params.N, 0.0);
    e.back() = 1.0;
    tr["sigma"] = e;
  }
  out.sigma = require_point(tr, "energyCurve.truncation", "sigma", params.N);
  out.Rs = get<std::vector<double>>(tr, "energyCurve.truncation", "Rs", {4.0, 8.0, 16.0});
  out.nodes = get<int>(tr, "energyCurve.truncation", "nodes", 128);
  if (out.Rs.size() < 2) throw ConfigError("energyCurve.truncation.Rs needs two or more radii");
  return out;
}

DecomposeSettings resolve_decompose(json& cfg) {
  json& s = section(cfg, "decompose");
  allow_keys(s, "decompose", {"maxBubbles", "theta", "stopFraction", "windowFactor", "broadFactor", "selectFraction",
                              "backfitSweeps"});
  DecomposeSettings out;
  out.maxBubbles = get<int>(s, "decompose", "maxBubbles", 4);
  if (out.maxBubbles < 0) throw ConfigError("decompose.maxBubbles must be nonnegative");
  auto& o = out.options;
  o.theta = get<double>(s, "decompose", "theta", o.theta);
  o.stopFraction = get<double>(s, "decompose", "stopFraction", o.stopFraction);
  o.windowFactor = get<double>(s, "decompose", "windowFactor", o.windowFactor);
  o.broadFactor = get<double>(s, "decompose", "broadFactor", o.broadFactor);
  o.selectFraction = get<double>(s, "decompose", "selectFraction", o.selectFraction);
  o.backfitSweeps = get<int>(s, "decompose", "backfitSweeps", o.backfitSweeps);
  o.validate();
  return out;
}

std::optional<Point> resolve_pivot(json& cfg, const Params& params) {
  json& s = section(cfg, "pohozaev");
  allow_keys(s, "pohozaev", {"pivot"});
  if (!s.contains("pivot") || s["pivot"].is_null()) {
    s["pivot"] = nullptr;
    return std::nullopt;
  }
  return require_point(s, "pohozaev", "pivot", params.N);
}

double resolve_bubble_tolerance(json& cfg) {
  json& s = section(cfg, "bubbleCheck");
  allow_keys(s, "bubbleCheck", {"tolerance"});
  const double t = get<double>(s, "bubbleCheck", "tolerance", 0.05);
  if (!(t > 0.0)) throw ConfigError("bubbleCheck.tolerance must be positive");
  return t;
}

std::filesystem::path resolve_output_dir(json& cfg) {
  return get<std::string>(cfg, "config", "outputDir", "out");
}

std::uint64_t resolve_seed(json& cfg) { return get<std::uint64_t>(cfg, "config", "globalSeed", 0); }

}  // namespace choquard::config
