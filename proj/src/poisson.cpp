#include "choquard/poisson.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "choquard/errors.hpp"
#include "fftw_lock.hpp"

namespace choquard {

struct PoissonSolver::Impl {
  DomainPtr domain;
  double tol;
  int maxIters;
  bool exact = false;
  std::vector<int> lo;
  std::vector<int> m;
  std::size_t boxSize = 0;
  std::vector<double> eig;
  double* buf = nullptr;
  fftw_plan plan = nullptr;
  mutable std::mutex mtx;
  mutable int lastIters = 0;

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }

  void setup() {
    const GridDomain& d = *domain;
    const int N = d.dim();
    std::vector<int> hi(N, -1);
    lo.assign(N, d.nodes(0) + d.nodes(N - 1));
    bool any = false;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!d.core()[i]) continue;
      any = true;
      for (int k = 0; k < N; ++k) {
        const int a = d.axis_index(i, k);
        lo[k] = std::min(lo[k], a);
        hi[k] = std::max(hi[k], a);
      }
    }
    if (!any) throw ConfigError("domain has no interior core nodes");
    m.resize(N);
    boxSize = 1;
    for (int k = 0; k < N; ++k) {
      m[k] = hi[k] - lo[k] + 1;
      boxSize *= static_cast<std::size_t>(m[k]);
    }
    std::size_t coreCount = 0;
    for (auto c : d.core()) coreCount += c;
    exact = coreCount == boxSize;

    std::vector<std::vector<double>> lam(N);
    for (int k = 0; k < N; ++k) {
      lam[k].resize(m[k]);
      const double h2 = d.h(k) * d.h(k);
      for (int j = 0; j < m[k]; ++j) {
        lam[k][j] = (2.0 - 2.0 * std::cos(std::numbers::pi * (j + 1) / (m[k] + 1))) / h2;
      }
    }
    double norm = 1.0;
    for (int k = 0; k < N; ++k) norm *= 2.0 * (m[k] + 1);
    eig.resize(boxSize);
    for (std::size_t t = 0; t < boxSize; ++t) {
      std::size_t r = t;
      double s = 0.0;
      for (int k = N; k-- > 0;) {
        s += lam[k][r % static_cast<std::size_t>(m[k])];
        r /= static_cast<std::size_t>(m[k]);
      }
      eig[t] = 1.0 / (s * norm);
    }
    buf = fftw_alloc_real(boxSize);
    std::vector<fftw_r2r_kind> kinds(N, FFTW_RODFT00);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_r2r(N, m.data(), buf, buf, kinds.data(), FFTW_ESTIMATE);
    if (!plan) throw NumericalError("FFTW planning failed for the sine transform");
  }

  std::size_t box_to_grid(std::size_t t) const {
    const GridDomain& d = *domain;
    std::size_t idx = 0;
    for (int k = d.dim(); k-- > 0;) {
      const std::size_t a = t % static_cast<std::size_t>(m[k]);
      t /= static_cast<std::size_t>(m[k]);
      idx += (a + static_cast<std::size_t>(lo[k])) * d.stride(k);
    }
    return idx;
  }

  // Bounding-box sine solve; the result is restricted to the core.
  void box_solve(const std::vector<double>& rhs, std::vector<double>& out) const {
    const GridDomain& d = *domain;
    std::lock_guard<std::mutex> lock(mtx);
    for (std::size_t t = 0; t < boxSize; ++t) {
      const std::size_t i = box_to_grid(t);
      buf[t] = d.core()[i] ? rhs[i] : 0.0;
    }
    fftw_execute(plan);
    for (std::size_t t = 0; t < boxSize; ++t) buf[t] *= eig[t];
    fftw_execute(plan);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t t = 0; t < boxSize; ++t) {
      const std::size_t i = box_to_grid(t);
      if (d.core()[i]) out[i] = buf[t];
    }
  }

  void apply_lap(const std::vector<double>& z, std::vector<double>& out) const {
    const GridDomain& d = *domain;
    const int N = d.dim();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!d.core()[i]) continue;
      double s = 0.0;
      for (int k = 0; k < N; ++k) {
        const std::size_t st = d.stride(k);
        s += (2.0 * z[i] - z[i + st] - z[i - st]) / (d.h(k) * d.h(k));
      }
      out[i] = s;
    }
  }

  double dot(const std::vector<double>& a, const std::vector<double>& b) const {
    return det_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
  }
};

PoissonSolver::PoissonSolver(DomainPtr domain, double tol, int maxIters) : impl_(std::make_unique<Impl>()) {
  if (!domain) throw ConfigError("poisson solver requires a grid");
  impl_->domain = std::move(domain);
  impl_->tol = tol;
  impl_->maxIters = maxIters;
  impl_->setup();
}

PoissonSolver::~PoissonSolver() = default;

const DomainPtr& PoissonSolver::domain() const { return impl_->domain; }
int PoissonSolver::last_iterations() const { return impl_->lastIters; }

void PoissonSolver::restrict_to_core(Field& z) const {
  const auto& core = impl_->domain->core();
  auto& v = z.mutable_values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!core[i]) v[i] = 0.0;
  }
}

Field PoissonSolver::apply(const Field& z) const {
  Field zz = z;
  restrict_to_core(zz);
  Field out(impl_->domain);
  impl_->apply_lap(zz.values(), out.mutable_values());
  return out;
}

Field PoissonSolver::solve(const Field& rhs) const {
  if (!rhs.domain().same_layout(*impl_->domain)) throw ConfigError("rhs grid does not match the solver grid");
  const std::size_t n = rhs.size();
  Field out(impl_->domain);
  std::vector<double>& x = out.mutable_values();
  std::vector<double> b = rhs.values();
  const auto& core = impl_->domain->core();
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) b[i] = 0.0;
  }
  if (impl_->exact) {
    impl_->box_solve(b, x);
    impl_->lastIters = 1;
    return out;
  }
  // Preconditioned conjugate gradients.
  std::vector<double> r = b, z(n), p(n), Ap(n);
  const double bnorm = std::sqrt(impl_->dot(b, b));
  if (bnorm == 0.0) {
    impl_->lastIters = 0;
    return out;
  }
  impl_->box_solve(r, z);
  p = z;
  double rz = impl_->dot(r, z);
  int it = 0;
  for (; it < impl_->maxIters; ++it) {
    impl_->apply_lap(p, Ap);
    const double alpha = rz / impl_->dot(p, Ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (std::sqrt(impl_->dot(r, r)) <= impl_->tol * bnorm) break;
    impl_->box_solve(r, z);
    const double rzNew = impl_->dot(r, z);
    const double beta = rzNew / rz;
    rz = rzNew;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  impl_->lastIters = it + 1;
  if (it == impl_->maxIters) throw NumericalError("Poisson solve did not converge");
  return out;
}

}  // namespace choquard
