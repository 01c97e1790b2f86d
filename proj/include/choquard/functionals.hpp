#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "choquard/grid.hpp"
#include "choquard/params.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

/// <R(u_+^{2*mu}), u_+^{2*mu}>, the nonlocal term.
double nonlocal_energy(const Field& u, const RieszOperator& op);
/// nonlocal_energy^{1/(2 * 2*mu)}
double nl_norm(const Field& u, const RieszOperator& op);
/// dirichlet / nl_norm^2; throws NumericalError when nl_norm vanishes.
double quotient(const Field& u, const RieszOperator& op);

struct EnergyReport {
  double dirichlet = 0.0;
  double nlNorm = 0.0;
  double nonlocal = 0.0;  // nlNorm^{2 * 2*mu}
  double I = 0.0;
  double quotient = 0.0;  // 0 when nlNorm = 0
  double pohozaevResidual = 0.0;
  Point barycenterNorm;   // empty when dirichlet = 0
};

EnergyReport energy(const Field& u, const RieszOperator& op,
                    const std::optional<Point>& pivot = std::nullopt);

/// -Delta_h u - R(u_+^{2*mu}) u_+^{2*mu - 1}
Field gradient(const Field& u, const RieszOperator& op);

struct PohozaevParts {
  double interior = 0.0;  // (N-2)/2 D - (2N-mu)/(2 2*mu) K
  double face = 0.0;      // flat-face term, half-space domains only
  double residual = 0.0;
  double relative = 0.0;  // |residual| / D, 0 for u = 0
};

/// pivot defaults to (0, ..., 0, 1).
PohozaevParts pohozaev(const Field& u, const RieszOperator& op,
                       const std::optional<Point>& pivot = std::nullopt);
double pohozaev_residual(const Field& u, const RieszOperator& op,
                         const std::optional<Point>& pivot = std::nullopt);

struct MorreyLevel {
  double radius = 0.0;
  double value = 0.0;
  std::size_t centerIndex = 0;
};

struct MorreyResult {
  double value = 0.0;
  Point center;
  double radius = 0.0;
  std::size_t centerIndex = 0;
  int level = 0;  // radius = min_h * 2^level
  std::vector<MorreyLevel> levels;  // best center per radius
};

/// sup over lattice centers and radii min_h * 2^k of r^{-2} int_{B(c, r)} u^2.
/// Ties (within 1e-12 relative) go to the smaller radius, then the first center
/// in row-major order.
MorreyResult morrey_norm(const Field& u);

}  // namespace choquard
