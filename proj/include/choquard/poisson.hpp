#pragma once

#include <memory>

#include "choquard/grid.hpp"

namespace choquard {

/// Solves -Delta_h z = f on the core nodes of a domain with z = 0 elsewhere.
/// Box-like domains use a sine transform; other masks use conjugate gradients
/// preconditioned by the sine solve on the bounding box of the core.
class PoissonSolver {
 public:
  explicit PoissonSolver(DomainPtr domain, double tol = 1e-12, int maxIters = 500);
  ~PoissonSolver();
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  /// rhs values off the core are ignored.
  Field solve(const Field& rhs) const;
  /// Restriction of -Delta_h to core-supported fields.
  Field apply(const Field& z) const;
  /// Zeroes every node outside the core.
  void restrict_to_core(Field& z) const;

  const DomainPtr& domain() const;
  int last_iterations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace choquard
