#pragma once

#include <vector>

#include "choquard/closed_forms.hpp"
#include "choquard/grid.hpp"
#include "choquard/params.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

/// Deterministic, antipodally symmetric unit vectors: the 12 icosahedron
/// vertices for N = 3 and count = 12, otherwise Halton points (bases 2, 3, 5,
/// ...) accepted inside the unit ball, normalized, and paired with their
/// negatives. count must be even and >= 2.
std::vector<Point> sphere_samples(int N, int count);

/// count points from 0 to 1 - kTCap, equally spaced.
std::vector<double> family_ts(int count);

struct SweepOptions {
  int nSigma = 12;
  int nT = 10;
  /// The inner plateau radius 1/(2R) must span 4 cells; this waives the check.
  bool allowUnresolvedHole = false;
};

struct FamilySweep {
  double R = 0.0;
  std::vector<Point> sigmas;
  std::vector<double> ts;
  std::vector<std::vector<double>> quotients;      // [t][sigma]
  std::vector<std::vector<double>> dirichletGaps;  // [t][sigma], ||g - u||^2
  double supQuotient = 0.0;
};

/// Quotients of the truncated family on the annulus grid held by op. The
/// gaps are measured on the bounding lattice of that grid.
FamilySweep sweep(double R, const RieszOperator& op, const SweepOptions& options = {});

struct EmpiricalShl {
  double value = 0.0;
  double scale = 0.0;
  std::vector<double> scales;
  std::vector<double> quotients;
};

/// Minimum over scales h * 2^{j/2} <= R / 2 of the quotient of a centered
/// bubble times the outer cutoff, on the grid held by op (typically a
/// free-space box of extent 8R with the sweep's spacing).
EmpiricalShl empirical_shl(double R, const RieszOperator& op);

struct TruncationRecord {
  double R = 0.0;
  double h = 0.0;
  double dirichletGap = 0.0;  // ||g - u||^2
  double nlGap = 0.0;         // | ||g||_NL^{2 2*mu} - ||u||_NL^{2 2*mu} |
};

struct TruncationCurve {
  std::vector<TruncationRecord> records;
  double dirichletSlope = 0.0;  // least-squares slope of log gap against log R
  double nlSlope = 0.0;
};

/// For each R, a free-space box of extent 8R with `nodes` nodes per axis
/// (spacing proportional to R). An even node count keeps the lattice off the
/// origin.
TruncationCurve truncation_error_curve(double t, const Point& sigma, const std::vector<double>& Rs, int nodes,
                                       const Params& params,
                                       RieszMethod method = RieszMethod::PaddedFourier);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace choquard
