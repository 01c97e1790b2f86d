#pragma once

#include <string>
#include <variant>
#include <vector>

#include "choquard/closed_forms.hpp"
#include "choquard/functionals.hpp"
#include "choquard/grid.hpp"
#include "choquard/params.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

/// One rescaled profile sign * A * (scale / (scale^2 + |x - center|^2))^{(N-2)/2}
/// with A the amplitude of a whole-space solution.
struct ProfileSpec {
  Point center;
  double scale = 1.0;
  int sign = 1;
};

/// No v0, a closed-form bubble, or an explicit field on the target grid.
using V0Source = std::variant<std::monostate, BubbleSpec, Field>;

/// v0 + sum of profiles, masked. Throws ConfigError when a scale is below 4h
/// or two profiles are neither spatially separated (4 * max scale) nor
/// separated in scale (factor 4).
Field synthesize_ps_field(const V0Source& v0, const std::vector<ProfileSpec>& profiles,
                          DomainPtr domain, const Params& params);

struct DecomposeOptions {
  double theta = 0.1;         // concentration threshold relative to the reference Morrey value
  double stopFraction = 1e-3; // stop when the residual Dirichlet energy falls below this share
  double windowFactor = 8.0;  // fit window half-width in units of the scale
  double broadFactor = 4.0;   // Morrey radius >= diameter / broadFactor means no concentration
  double selectFraction = 0.5; // a selected radius must reach this share of the Morrey sup
  int backfitSweeps = 10;

  void validate() const;
};

struct ExtractedBubble {
  BubbleSpec spec;     // amplitude carries the sign
  double dirichlet = 0.0;  // sampled on the input grid
  double energyInf = 0.0;  // whole-space energy of the profile, closed form
  double energyGrid = 0.0; // I of the sampled profile on the input grid
  double fitResidual = 0.0;
  double morreyValue = 0.0;
  double morreyRadius = 0.0;
  bool boundaryAdjacent = false;
};

struct EnergyLedger {
  double inputDirichlet = 0.0;
  double sumParts = 0.0;
  double relativeGap = 0.0;
};

struct DecompositionResult {
  Field v0;
  bool v0Resolved = true;
  std::vector<ExtractedBubble> bubbles;
  Field residual;
  double residualDirichlet = 0.0;
  EnergyLedger ledger;
  int k = 0;
  bool partial = false;
  std::string stopReason;
};

/// Whole-space energy I(v) of a bubble with the given amplitude; maximal and
/// equal to beta at the solution amplitude.
double bubble_energy_inf(double amplitude, const Params& params);

/// sup_r r^{-2} int_{B_r} U^2 of the unit solution bubble U (scale invariant).
double bubble_morrey_value(const Params& params);

/// Iterated Morrey selection, windowed fit and subtraction. A failing fit
/// ends the loop with partial = true instead of throwing.
DecompositionResult decompose(const Field& u, const RieszOperator& op, int maxBubbles,
                              const DecomposeOptions& options = {});

}  // namespace choquard
