#include "choquard/functionals.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "choquard/errors.hpp"
#include "choquard/parallel.hpp"
#include "fftw_lock.hpp"

namespace choquard {

namespace {

Field power_positive(const Field& u, double q) {
  Field out(u.domain_ptr());
  auto& o = out.mutable_values();
  for (std::size_t i = 0; i < u.size(); ++i) o[i] = u[i] > 0.0 ? std::pow(u[i], q) : 0.0;
  return out;
}

}  // namespace

double nonlocal_energy(const Field& u, const RieszOperator& op) {
  const double s = derive_exponents(op.params()).twoStarMu;
  const Field F = power_positive(u, s);
  if (F.max() <= 0.0) return 0.0;
  return std::max(0.0, op.convolution_energy(F, F));
}

double nl_norm(const Field& u, const RieszOperator& op) {
  const double s = derive_exponents(op.params()).twoStarMu;
  return std::pow(nonlocal_energy(u, op), 1.0 / (2.0 * s));
}

double quotient(const Field& u, const RieszOperator& op) {
  const double n = nl_norm(u, op);
  if (!(n > 0.0)) throw NumericalError("quotient undefined: nonlocal norm is zero");
  return dirichlet_energy(u) / (n * n);
}

EnergyReport energy(const Field& u, const RieszOperator& op, const std::optional<Point>& pivot) {
  const double s = derive_exponents(op.params()).twoStarMu;
  EnergyReport r;
  r.dirichlet = dirichlet_energy(u);
  r.nonlocal = nonlocal_energy(u, op);
  r.nlNorm = std::pow(r.nonlocal, 1.0 / (2.0 * s));
  r.I = 0.5 * r.dirichlet - r.nonlocal / (2.0 * s);
  r.quotient = r.nlNorm > 0.0 ? r.dirichlet / (r.nlNorm * r.nlNorm) : 0.0;
  r.pohozaevResidual = pohozaev_residual(u, op, pivot);
  if (r.dirichlet > 0.0) r.barycenterNorm = barycenter(u).normalized;
  return r;
}

Field gradient(const Field& u, const RieszOperator& op) {
  const double s = derive_exponents(op.params()).twoStarMu;
  Field g = neg_laplacian(u);
  const Field F = power_positive(u, s);
  if (F.max() <= 0.0) return g;
  const Field V = op.apply(F);
  auto& gv = g.mutable_values();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > 0.0) gv[i] -= V[i] * std::pow(u[i], s - 1.0);
  }
  return g;
}

PohozaevParts pohozaev(const Field& u, const RieszOperator& op, const std::optional<Point>& pivot) {
  const Params& p = op.params();
  const double s = derive_exponents(p).twoStarMu;
  const GridDomain& d = u.domain();
  const int N = d.dim();
  PohozaevParts out;
  const double D = dirichlet_energy(u);
  const double K = nonlocal_energy(u, op);
  out.interior = 0.5 * (N - 2) * D - (2.0 * N - p.mu) / (2.0 * s) * K;
  if (d.shape().kind == DomainKind::HalfSpaceTrunc) {
    Point x0 = pivot.value_or(Point{});
    if (x0.empty()) {
      x0.assign(N, 0.0);
      x0[N - 1] = 1.0;
    }
    if (static_cast<int>(x0.size()) != N) throw ConfigError("pivot has wrong dimension");
    // Face x_N = 0 with outward normal -e_N, so (x - x0).nu = x0_N there.
    const int last = N - 1;
    const double hN = d.h(last);
    double dA = 1.0;
    for (int k = 0; k < last; ++k) dA *= d.h(k);
    const std::size_t sN = d.stride(last);
    out.face = 0.5 * x0[last] * dA * det_sum(d.size(), [&](std::size_t i) {
                 if (d.axis_index(i, last) != 0) return 0.0;
                 const double dn = (4.0 * u[i + sN] - u[i + 2 * sN]) / (2.0 * hN);
                 return dn * dn;
               });
  }
  out.residual = out.interior + out.face;
  out.relative = D > 0.0 ? std::abs(out.residual) / D : 0.0;
  return out;
}

double pohozaev_residual(const Field& u, const RieszOperator& op, const std::optional<Point>& pivot) {
  return pohozaev(u, op, pivot).residual;
}

MorreyResult morrey_norm(const Field& u) {
  const GridDomain& d = u.domain();
  const int N = d.dim();
  MorreyResult best;
  best.center = d.point(0);
  if (u.max_abs() == 0.0) return best;

  std::vector<int> P(N);
  std::size_t total = 1;
  for (int k = 0; k < N; ++k) {
    int m = 2 * d.nodes(k);
    for (;; ++m) {
      int r = m;
      for (int q : {2, 3, 5, 7}) {
        while (r % q == 0) r /= q;
      }
      if (r == 1) break;
    }
    P[k] = m;
    total *= static_cast<std::size_t>(m);
  }
  const std::size_t cplx = total / static_cast<std::size_t>(P[N - 1]) * static_cast<std::size_t>(P[N - 1] / 2 + 1);
  std::vector<std::size_t> ps(N);
  {
    std::size_t s = 1;
    for (int k = N; k-- > 0;) {
      ps[k] = s;
      s *= static_cast<std::size_t>(P[k]);
    }
  }
  double* rb = fftw_alloc_real(total);
  fftw_complex* ub = fftw_alloc_complex(cplx);
  fftw_complex* kb = fftw_alloc_complex(cplx);
  fftw_plan fu, fk, bk;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fu = fftw_plan_dft_r2c(N, P.data(), rb, ub, FFTW_ESTIMATE);
    fk = fftw_plan_dft_r2c(N, P.data(), rb, kb, FFTW_ESTIMATE);
    bk = fftw_plan_dft_c2r(N, P.data(), kb, rb, FFTW_ESTIMATE);
  }
  auto padIndex = [&](std::size_t i) {
    std::size_t t = 0;
    for (int k = 0; k < N; ++k) t += static_cast<std::size_t>(d.axis_index(i, k)) * ps[k];
    return t;
  };
  std::fill(rb, rb + total, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) rb[padIndex(i)] = u[i] * u[i];
  fftw_execute(fu);

  double diam2 = 0.0;
  for (int k = 0; k < N; ++k) diam2 += d.extent(k) * d.extent(k);
  const double diam = std::sqrt(diam2);
  const double h0 = d.min_h();
  const double cv = d.cell_volume();
  for (int level = 0;; ++level) {
    const double r = h0 * std::ldexp(1.0, level);
    std::fill(rb, rb + total, 0.0);
    // Ball indicator on the lag box |lag_k| <= r / h_k, wrapped into the padded lattice.
    std::vector<long> span(N);
    std::size_t boxCount = 1;
    for (int k = 0; k < N; ++k) {
      span[k] = std::min<long>(static_cast<long>(std::floor(r / d.h(k) * (1.0 + 1e-12))), P[k] / 2 - 1);
      boxCount *= static_cast<std::size_t>(2 * span[k] + 1);
    }
    for (std::size_t b = 0; b < boxCount; ++b) {
      std::size_t rem = b;
      double q2 = 0.0;
      std::size_t t = 0;
      for (int k = N; k-- > 0;) {
        const long w = 2 * span[k] + 1;
        const long l = static_cast<long>(rem % static_cast<std::size_t>(w)) - span[k];
        rem /= static_cast<std::size_t>(w);
        const double x = l * d.h(k);
        q2 += x * x;
        t += static_cast<std::size_t>(l < 0 ? l + P[k] : l) * ps[k];
      }
      if (q2 <= r * r * (1.0 + 1e-12)) rb[t] = 1.0;
    }
    fftw_execute(fk);
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t t = 0; t < cplx; ++t) {
      const double ar = ub[t][0], ai = ub[t][1], br = kb[t][0], bi = kb[t][1];
      kb[t][0] = (ar * br - ai * bi) * scale;
      kb[t][1] = (ar * bi + ai * br) * scale;
    }
    fftw_execute(bk);
    const double w = cv / (r * r);
    MorreyLevel lv{r, 0.0, 0};
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double v = std::max(0.0, rb[padIndex(i)]) * w;
      if (v > lv.value * (1.0 + 1e-12)) {
        lv.value = v;
        lv.centerIndex = i;
      }
      if (v > best.value * (1.0 + 1e-12)) {
        best.value = v;
        best.centerIndex = i;
        best.level = level;
        best.radius = r;
      }
    }
    best.levels.push_back(lv);
    if (r > diam) break;
  }
  best.center = d.point(best.centerIndex);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fu);
    fftw_destroy_plan(fk);
    fftw_destroy_plan(bk);
  }
  fftw_free(rb);
  fftw_free(ub);
  fftw_free(kb);
  return best;
}

}  // namespace choquard
