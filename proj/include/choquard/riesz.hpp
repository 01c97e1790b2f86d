#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "choquard/grid.hpp"
#include "choquard/params.hpp"

namespace choquard {

enum class RieszMethod { DirectSum, PaddedFourier };

std::string to_string(RieszMethod m);
RieszMethod riesz_method_from_string(const std::string& name);

/// Integral of |z|^{-mu} over the ball whose volume equals one lattice cell.
double self_cell_weight(const Params& params, const GridDomain& domain);

/// Discrete Riesz potential v(x) = sum_{y != x} h^N f(y) |x-y|^{-mu} + w0 f(x),
/// evaluated on the mask nodes of one fixed grid.
class RieszOperator {
 public:
  static constexpr std::size_t kDirectSumCap = 120000;

  /// pad is the minimum ratio of padded to original length per axis (>= 2).
  RieszOperator(Params params, DomainPtr domain, RieszMethod method = RieszMethod::PaddedFourier,
                double pad = 2.0);
  ~RieszOperator();
  RieszOperator(const RieszOperator&) = delete;
  RieszOperator& operator=(const RieszOperator&) = delete;
  RieszOperator(RieszOperator&&) noexcept;
  RieszOperator& operator=(RieszOperator&&) noexcept;

  Field apply(const Field& f) const;
  /// <apply(f), g> with cell-volume weights. The arguments are put in a
  /// canonical order first, so swapping them returns the identical double.
  double convolution_energy(const Field& f, const Field& g) const;

  const Params& params() const;
  const DomainPtr& domain() const;
  RieszMethod method() const;
  double self_cell_weight() const;
  double pad() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace choquard
