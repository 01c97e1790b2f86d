#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "choquard/decompose.hpp"
#include "choquard/grid.hpp"
#include "choquard/params.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"
#include "choquard/testfamily.hpp"

namespace choquard::config {

using nlohmann::json;

/// Parses a JSON config file; a missing path yields an empty object.
json load(const std::optional<std::filesystem::path>& path);

/// Rejects unknown top-level keys.
void check_top_level(const json& cfg);

/// Sets cfg at a dotted path such as "params.N", creating objects on the way.
void set_path(json& cfg, const std::string& dotted, json value);

// Each resolve_* reads its section, fills defaults back into cfg so the
// caller can embed the fully resolved config, and validates before returning.
// Problems raise ConfigError.

Params resolve_params(json& cfg);
DomainPtr resolve_domain(json& cfg, const Params& params);

struct RieszSettings {
  RieszMethod method = RieszMethod::PaddedFourier;
  double pad = 2.0;
};
RieszSettings resolve_riesz(json& cfg);

/// The section holds {"file": path}, {"bubble": {...}} or {"synthesize":
/// {"profiles": [...], "v0": {...}}}. inputBytes receives the raw file bytes
/// (empty for closed-form inputs) for hashing.
Field resolve_field(json& cfg, const std::string& section, DomainPtr domain, const Params& params,
                    std::string& inputBytes);

SolveConfig resolve_solve(json& cfg, DomainPtr domain, const Params& params, std::string& inputBytes);

struct EnergyCurveSettings {
  double R = 8.0;
  double h = 0.5;  // spacing of the annulus grid and of the matched free-space box
  SweepOptions sweep;
  bool empirical = true;
  double t = 0.0;
  Point sigma;
  std::vector<double> Rs;
  int nodes = 128;
  bool truncation = true;
};
EnergyCurveSettings resolve_energy_curve(json& cfg, const Params& params);

struct DecomposeSettings {
  int maxBubbles = 4;
  DecomposeOptions options;
};
DecomposeSettings resolve_decompose(json& cfg);

std::optional<Point> resolve_pivot(json& cfg, const Params& params);
double resolve_bubble_tolerance(json& cfg);

std::filesystem::path resolve_output_dir(json& cfg);
std::uint64_t resolve_seed(json& cfg);

}  // namespace choquard::config
