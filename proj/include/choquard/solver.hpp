#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "choquard/closed_forms.hpp"
#include "choquard/grid.hpp"
#include "choquard/params.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

/// Bubble seed. The optional perturbation multiplies by (1 + eps * xi) with xi a
/// smooth random field bounded by 1; the taper ramps the seed to zero within
/// taperFraction of the half-extent from the domain boundary.
struct BubbleSeed {
  BubbleSpec bubble;
  double perturbation = 0.0;
  std::uint64_t perturbSeed = 1;
  double taperFraction = 0.5;
};

/// Truncated family member f_t^sigma with cutoff radius R.
struct FamilySeed {
  Point sigma;
  double t = 0.0;
  double R = 8.0;
};

struct FieldSeed {
  Field field;
};

using Seed = std::variant<BubbleSeed, FamilySeed, FieldSeed>;

struct SolveConfig {
  int maxIters = 500;
  double stepSize = 0.5;
  double gradTol = 1e-6;
  bool windowCheck = true;
  int traceEvery = 10;  // Morrey/barycenter diagnostics every k iterations
  Seed seed = BubbleSeed{};

  void validate() const;
};

Field make_seed(const Seed& seed, const RieszOperator& op);

/// u / nl_norm(u); throws NumericalError if the nonlocal norm vanishes.
Field project_to_manifold(const Field& u, const RieszOperator& op);

enum class SolveStatus { Converged, MaxIters, LineSearchFailed };
std::string to_string(SolveStatus s);

struct TraceEntry {
  int iter = 0;
  double quotient = 0.0;
  double projGradNorm = 0.0;
  double step = 0.0;
  Point barycenterNorm;       // empty when diagnostics were skipped
  double morreyRadius = 0.0;  // 0 when diagnostics were skipped
  Point morreyCenter;
};

enum class WindowClass { Below, Inside, Above };
std::string to_string(WindowClass c);

struct WindowReport {
  double quotient = 0.0;
  double level = 0.0;
  Interval quotientWindow{};
  Interval levelWindow{};
  WindowClass quotientClass = WindowClass::Below;
  WindowClass levelClass = WindowClass::Below;
  bool agree = false;
};

struct SolveResult {
  Field u;
  double quotient = 0.0;
  double projGradNorm = 0.0;
  bool converged = false;
  SolveStatus status = SolveStatus::MaxIters;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  double lambdaStar = 0.0;
  Field solution;
  double weakResidual = 0.0;  // H^{-1} norm of I'(solution) / ||solution||
  std::optional<WindowReport> window;
};

/// Projected gradient descent for D(u) / ||u_+||_NL^2 on {||u_+||_NL = 1}.
/// Degrees of freedom are the core nodes of the grid; the gradient is the
/// H^1_0 Riesz representative, and projGradNorm = ||P grad Q||_{H^1} / sqrt(D).
SolveResult minimize_quotient(const SolveConfig& cfg, const RieszOperator& op);

WindowReport window_report(double quotient, const ConstantSet& consts, const Params& params);
WindowReport window_report(const SolveResult& result, const ConstantSet& consts, const Params& params);

}  // namespace choquard
