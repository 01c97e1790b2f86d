#include "choquard/testfamily.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "choquard/errors.hpp"
#include "choquard/functionals.hpp"

namespace choquard {

namespace {

double radical_inverse(unsigned long i, unsigned base) {
  double f = 1.0;
  double r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

unsigned nth_prime(int k) {
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (k < 0 || k >= static_cast<int>(std::size(primes))) throw ConfigError("dimension too large for Halton sampling");
  return primes[k];
}

Point normalized(Point p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  s = std::sqrt(s);
  for (double& v : p) v /= s;
  return p;
}

}  // namespace

std::vector<Point> sphere_samples(int N, int count) {
  if (N < 2) throw ConfigError("sphere samples need N >= 2");
  if (count < 2 || count % 2 != 0) throw ConfigError("sphere sample count must be even and >= 2");
  std::vector<Point> out;
  if (N == 3 && count == 12) {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    for (double a : {-1.0, 1.0}) {
      for (double b : {-phi, phi}) {
        out.push_back(normalized({0.0, a, b}));
        out.push_back(normalized({a, b, 0.0}));
        out.push_back(normalized({b, 0.0, a}));
      }
    }
    return out;
  }
  for (unsigned long i = 1; static_cast<int>(out.size()) < count; ++i) {
    Point p(N);
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
      p[k] = 2.0 * radical_inverse(i, nth_prime(k)) - 1.0;
      s += p[k] * p[k];
    }
    if (s > 1.0 || s < 1e-6) continue;
    p = normalized(std::move(p));
    Point q = p;
    for (double& v : q) v = -v;
    out.push_back(std::move(p));
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<double> family_ts(int count) {
  if (count < 1) throw ConfigError("t sample count must be positive");
  std::vector<double> ts(count, 0.0);
  for (int j = 1; j < count; ++j) ts[j] = (1.0 - kTCap) * j / (count - 1);
  return ts;
}

FamilySweep sweep(double R, const RieszOperator& op, const SweepOptions& options) {
  if (!(R > 0.0)) throw ConfigError("R must be positive");
  if (options.nSigma < 6) throw ConfigError("sweep needs at least 6 sigma samples");
  if (options.nT < 8) throw ConfigError("sweep needs at least 8 t samples");
  const Params& params = op.params();
  const DomainPtr& dom = op.domain();
  const GridDomain& d = *dom;
  const DomainShape& shape = d.shape();
  if (shape.kind != DomainKind::Annulus || std::abs(shape.r1 - 0.25 / R) > 1e-12 * R ||
      std::abs(shape.r2 - 4.0 * R) > 1e-12 * R) {
    throw ConfigError("sweep needs the annulus grid with radii 1/(4R) and 4R");
  }
  if (!options.allowUnresolvedHole && d.max_h() > 0.5 / R / 4.0) {
    throw ConfigError("grid spacing " + std::to_string(d.max_h()) + " does not resolve the inner radius 1/(2R) = " +
                      std::to_string(0.5 / R) + " with 4 cells");
  }

  FamilySweep out;
  out.R = R;
  out.sigmas = sphere_samples(params.N, options.nSigma);
  out.ts = family_ts(options.nT);
  const std::size_t nt = out.ts.size();
  const std::size_t ns = out.sigmas.size();
  out.quotients.assign(nt, std::vector<double>(ns, 0.0));
  out.dirichletGaps.assign(nt, std::vector<double>(ns, 0.0));

  // Bounding lattice of the annulus grid, unmasked except on the faces.
  for (int k = 1; k < params.N; ++k) {
    if (d.nodes(k) != d.nodes(0) || std::abs(d.extent(k) - d.extent(0)) > 1e-12 * d.extent(0)) {
      throw ConfigError("sweep needs a cubic annulus grid");
    }
  }
  const DomainPtr box = GridDomain::free_space(params.N, d.extent(0), d.nodes(0));
  const CutoffSpec cut{R};
  const double A = family_amplitude(params);
  for (std::size_t a = 0; a < nt; ++a) {
    for (std::size_t b = 0; b < ns; ++b) {
      const double t = out.ts[a];
      const TruncatedFamily fam = build_truncated_family(out.sigmas[b], t, cut, op);
      out.quotients[a][b] = dirichlet_energy(fam.g) / (fam.gNorm * fam.gNorm);
      const BubbleSpec bs = BubbleSpec::from_family(out.sigmas[b], t, A);
      const Field diff = Field::sample(box, [&](const Point& x) {
        return eval_bubble(bs, params, x) * (eval_cutoff(cut, x) - 1.0);
      });
      out.dirichletGaps[a][b] = dirichlet_energy(diff);
    }
  }
  for (const auto& row : out.quotients) {
    for (double q : row) out.supQuotient = std::max(out.supQuotient, q);
  }
  return out;
}

EmpiricalShl empirical_shl(double R, const RieszOperator& op) {
  if (!(R > 0.0)) throw ConfigError("R must be positive");
  const Params& params = op.params();
  const DomainPtr& dom = op.domain();
  const double h = dom->max_h();
  if (!(h <= 0.5 * R)) throw ConfigError("grid spacing exceeds R / 2");
  const CutoffSpec cut{R};
  EmpiricalShl out;
  out.value = std::numeric_limits<double>::infinity();
  const Point origin(params.N, 0.0);
  for (int j = 0;; ++j) {
    const double lam = h * std::exp2(0.5 * j);
    if (lam > 0.5 * R * (1.0 + 1e-12)) break;
    const BubbleSpec b{origin, lam, 1.0};
    const Field g = Field::sample(dom, [&](const Point& x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      const double r = std::sqrt(r2);
      const double outer = r <= 2.0 * R ? 1.0 : eval_cutoff_radius(cut, r);
      return eval_bubble(b, params, x) * outer;
    });
    const double q = quotient(g, op);
    out.scales.push_back(lam);
    out.quotients.push_back(q);
    if (q < out.value) {
      out.value = q;
      out.scale = lam;
    }
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs two or more matching points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("slope fit needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ConfigError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

TruncationCurve truncation_error_curve(double t, const Point& sigma, const std::vector<double>& Rs, int nodes,
                                       const Params& params, RieszMethod method) {
  params.validate();
  if (Rs.size() < 2) throw ConfigError("truncation curve needs at least two radii");
  const BubbleSpec bs = BubbleSpec::from_family(sigma, t, family_amplitude(params));
  TruncationCurve out;
  std::vector<double> rs, dg, ng;
  for (double R : Rs) {
    if (!(R > 0.0)) throw ConfigError("R must be positive");
    const CutoffSpec cut{R};
    const DomainPtr dom = GridDomain::free_space(params.N, 8.0 * R, nodes);
    const RieszOperator op(params, dom, method);
    const Field u = sample_bubble(bs, params, dom);
    const Field g = Field::sample(dom, [&](const Point& x) { return eval_bubble(bs, params, x) * eval_cutoff(cut, x); });
    TruncationRecord rec;
    rec.R = R;
    rec.h = dom->max_h();
    rec.dirichletGap = dirichlet_energy(g - u);
    rec.nlGap = std::abs(nonlocal_energy(g, op) - nonlocal_energy(u, op));
    out.records.push_back(rec);
    rs.push_back(R);
    dg.push_back(rec.dirichletGap);
    ng.push_back(rec.nlGap);
  }
  out.dirichletSlope = loglog_slope(rs, dg);
  out.nlSlope = loglog_slope(rs, ng);
  return out;
}

}  // namespace choquard
