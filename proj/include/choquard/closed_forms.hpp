#pragma once

#include <optional>

#include "choquard/grid.hpp"
#include "choquard/params.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

/// Largest admissible family parameter is 1 - kTCap.
inline constexpr double kTCap = 1e-3;

/// amplitude * (scale / (scale^2 + |x - center|^2))^{(N-2)/2}
struct BubbleSpec {
  Point center;
  double scale = 1.0;
  double amplitude = 1.0;

  /// Family member u_t^sigma: center t*sigma, scale 1 - t. Requires |sigma| = 1
  /// and 0 <= t <= 1 - kTCap.
  static BubbleSpec from_family(const Point& sigma, double t, double amplitude);
  void validate(int N) const;
};

double eval_bubble(const BubbleSpec& spec, const Params& params, const Point& x);
Field sample_bubble(const BubbleSpec& spec, const Params& params, DomainPtr domain);

/// Radial cutoff: 0 on |x| <= 1/(4R), rising to 1 on [1/(4R), 1/(2R)], equal
/// to 1 up to 2R, falling to 0 on [2R, 4R].
struct CutoffSpec {
  double R = 8.0;
  void validate() const;
};

/// C-infinity step: 0 for s <= 0, 1 for s >= 1, exp(-1/s) blend in between.
double smooth_step(double s);
double eval_cutoff(const CutoffSpec& spec, const Point& x);
double eval_cutoff_radius(const CutoffSpec& spec, double r);

struct TruncatedFamily {
  Field g;  // u_t^sigma * cutoff
  Field f;  // g / ||g_+||_NL
  double gNorm = 0.0;
};

TruncatedFamily build_truncated_family(const Point& sigma, double t, const CutoffSpec& spec,
                                       const RieszOperator& op);

struct FitOptions {
  int maxIters = 200;
  double tol = 1e-10;
  std::optional<Point> initialCenter;
  std::optional<double> initialScale;
  /// Restricts the fit to the cube of this half-width around windowCenter
  /// (or the initial center).
  std::optional<double> windowHalfWidth;
  std::optional<Point> windowCenter;
  /// Adds a constant offset to the model, for bubbles sitting on a slowly
  /// varying background.
  bool fitBackground = false;
};

/// Model (c1 / (c2 + |x - x0|^2))^{(N-2)/2}.
struct FitResult {
  BubbleSpec spec;
  double c1 = 0.0;
  double c2 = 0.0;
  double background = 0.0;
  double residual = 0.0;  // relative L2 over the fitted nodes
  bool converged = false;
  int iterations = 0;
};

/// Levenberg-Marquardt least squares over (log c1, log c2, x0). Throws
/// ConfigError for a nonpositive field; non-convergence is reported in the result.
FitResult fit_bubble(const Field& field, const Params& params, const FitOptions& options = {});

struct BubbleCheck {
  FitResult fit;
  double radialSpread = 0.0;      // max relative spread of values in radial shells
  double monotoneViolation = 0.0; // largest relative increase of shell means outward
  bool isBubble = false;
};

/// Symmetry and shape test: fit, then measure radial symmetry and monotone
/// decay about the fitted center.
BubbleCheck bubble_check(const Field& field, const Params& params, double tolerance = 0.05);

}  // namespace choquard
