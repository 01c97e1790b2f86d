#include "choquard/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "choquard/errors.hpp"
#include "choquard/functionals.hpp"
#include "choquard/poisson.hpp"

namespace choquard {

void SolveConfig::validate() const {
  if (maxIters < 1) throw ConfigError("maxIters must be >= 1");
  if (!(stepSize > 0.0)) throw ConfigError("stepSize must be positive");
  if (!(gradTol > 0.0)) throw ConfigError("gradTol must be positive");
  if (traceEvery < 1) throw ConfigError("traceEvery must be >= 1");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

std::string to_string(WindowClass c) {
  switch (c) {
    case WindowClass::Below: return "below";
    case WindowClass::Inside: return "inside";
    case WindowClass::Above: return "above";
  }
  return "unknown";
}

namespace {

Field smooth_noise(const DomainPtr& d, std::uint64_t seed) {
  const int N = d->dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  constexpr int kModes = 6;
  std::vector<std::vector<double>> k(kModes, std::vector<double>(N));
  std::vector<double> phase(kModes);
  std::vector<double> amp(kModes);
  double ext = 0.0;
  for (int a = 0; a < N; ++a) ext = std::max(ext, d->extent(a));
  for (int m = 0; m < kModes; ++m) {
    for (int a = 0; a < N; ++a) k[m][a] = 2.0 * std::numbers::pi * 3.0 * uni(rng) / ext;
    phase[m] = std::numbers::pi * uni(rng);
    amp[m] = uni(rng);
  }
  double asum = 0.0;
  for (double a : amp) asum += std::abs(a);
  return Field::sample(d, [&](const Point& x) {
    double s = 0.0;
    for (int m = 0; m < kModes; ++m) {
      double arg = phase[m];
      for (int a = 0; a < N; ++a) arg += k[m][a] * x[a];
      s += amp[m] * std::sin(arg);
    }
    return s / asum;
  });
}

}  // namespace

Field make_seed(const Seed& seed, const RieszOperator& op) {
  const DomainPtr& d = op.domain();
  const Params& p = op.params();
  Field u(d);
  if (const auto* b = std::get_if<BubbleSeed>(&seed)) {
    b->bubble.validate(d->dim());
    double half = 0.0;
    for (int a = 0; a < d->dim(); ++a) half = half == 0.0 ? 0.5 * d->extent(a) : std::min(half, 0.5 * d->extent(a));
    const double width = b->taperFraction * half;
    u = Field::sample(d, [&](const Point& x) {
      const double taper = width > 0.0 ? smooth_step(d->boundary_distance(x) / width) : 1.0;
      return eval_bubble(b->bubble, p, x) * taper;
    });
    if (b->perturbation != 0.0) {
      const Field xi = smooth_noise(d, b->perturbSeed);
      auto& v = u.mutable_values();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= 1.0 + b->perturbation * xi[i];
    }
  } else if (const auto* f = std::get_if<FamilySeed>(&seed)) {
    u = build_truncated_family(f->sigma, f->t, CutoffSpec{f->R}, op).f;
  } else {
    const auto& fs = std::get<FieldSeed>(seed);
    if (!fs.field.domain().same_layout(*d)) throw ConfigError("seed field grid does not match the solve grid");
    u = Field(d, fs.field.values());
  }
  return u;
}

Field project_to_manifold(const Field& u, const RieszOperator& op) {
  const double n = nl_norm(u, op);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("cannot project onto the constraint manifold: nonlocal norm is zero");
  }
  return (1.0 / n) * u;
}

namespace {

struct State {
  Field u;
  double D = 0.0;
  double K = 0.0;
  double Q = 0.0;
  Field w;  // R(u_+^s) u_+^{s-1} on the core
};

State evaluate(Field u, const RieszOperator& op, const PoissonSolver& ps, bool withW) {
  const double s = derive_exponents(op.params()).twoStarMu;
  State st{std::move(u), 0.0, 0.0, 0.0, Field(op.domain())};
  Field F(op.domain());
  auto& fv = F.mutable_values();
  for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = st.u[i] > 0.0 ? std::pow(st.u[i], s) : 0.0;
  st.D = dirichlet_energy(st.u);
  if (F.max() <= 0.0) throw NumericalError("iterate has no positive part");
  const Field V = op.apply(F);
  st.K = l2_inner(V, F);
  st.Q = st.D / std::pow(st.K, 1.0 / s);
  if (withW) {
    auto& w = st.w.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = st.u[i] > 0.0 ? V[i] * std::pow(st.u[i], s - 1.0) : 0.0;
    ps.restrict_to_core(st.w);
  }
  return st;
}

}  // namespace

SolveResult minimize_quotient(const SolveConfig& cfg, const RieszOperator& op) {
  cfg.validate();
  const Params& p = op.params();
  const double s = derive_exponents(p).twoStarMu;
  const PoissonSolver ps(op.domain());

  Field u0 = make_seed(cfg.seed, op);
  ps.restrict_to_core(u0);
  State st = evaluate(project_to_manifold(u0, op), op, ps, true);

  SolveResult res{st.u, 0.0, 0.0, false, SolveStatus::MaxIters, 0, {}, 0.0, Field(op.domain()), 0.0, std::nullopt};
  double alphaPrev = cfg.stepSize;

  auto diagnostics = [&](TraceEntry& e, const Field& u) {
    e.barycenterNorm = barycenter(u).normalized;
    const MorreyResult m = morrey_norm(u);
    e.morreyRadius = m.radius;
    e.morreyCenter = m.center;
  };

  int it = 0;
  for (;; ++it) {
    // Normal direction n solves -Delta n = w; the projected H^1 gradient is
    // (2 / NL^2) (u - (K / <n, n>_H) n).
    const Field n = ps.solve(st.w);
    const double nn = l2_inner(n, st.w);
    const double nl2 = std::pow(st.K, 1.0 / s);
    Field dir = st.u;
    dir.axpy(-st.K / nn, n);
    dir *= 2.0 / nl2;
    const double g2 = dirichlet_energy(dir);
    const double pg = std::sqrt(g2 / st.D);

    TraceEntry e;
    e.iter = it;
    e.quotient = st.Q;
    e.projGradNorm = pg;
    e.step = it == 0 ? 0.0 : alphaPrev;
    const bool done = pg <= cfg.gradTol || it >= cfg.maxIters;
    if (it % cfg.traceEvery == 0 || done) diagnostics(e, st.u);
    res.trace.push_back(e);
    res.projGradNorm = pg;
    if (pg <= cfg.gradTol) {
      res.status = SolveStatus::Converged;
      res.converged = true;
      break;
    }
    if (it >= cfg.maxIters) {
      res.status = SolveStatus::MaxIters;
      break;
    }

    double alpha = std::min(cfg.stepSize, 2.0 * alphaPrev);
    bool accepted = false;
    for (int bt = 0; bt <= 40; ++bt) {
      Field trial = st.u;
      trial.axpy(-alpha, dir);
      try {
        State cand = evaluate(project_to_manifold(trial, op), op, ps, true);
        if (cand.Q <= st.Q - 1e-4 * alpha * g2) {
          st = std::move(cand);
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.status = SolveStatus::LineSearchFailed;
      TraceEntry& last = res.trace.back();
      if (last.morreyRadius == 0.0) diagnostics(last, st.u);
      break;
    }
    alphaPrev = alpha;
  }

  res.iterations = it;
  res.u = st.u;
  res.quotient = st.Q;
  res.lambdaStar = std::pow(st.Q, rescaling_exponent(p));
  res.solution = res.lambdaStar * st.u;
  {
    const Field g = gradient(res.solution, op);
    Field gc = g;
    ps.restrict_to_core(gc);
    const Field y = ps.solve(gc);
    const double dual = std::sqrt(std::max(0.0, l2_inner(y, gc)));
    res.weakResidual = dual / std::sqrt(dirichlet_energy(res.solution));
  }
  if (cfg.windowCheck) res.window = window_report(res, best_constants(p), p);
  return res;
}

namespace {

WindowClass classify(double v, const Interval& w) {
  if (v > w.lo && v < w.hi) return WindowClass::Inside;
  return v <= w.lo ? WindowClass::Below : WindowClass::Above;
}

}  // namespace

WindowReport window_report(double quotient, const ConstantSet& consts, const Params& params) {
  WindowReport r;
  r.quotient = quotient;
  r.level = level_of_quotient(params, quotient);
  r.quotientWindow = consts.quotientWindow;
  r.levelWindow = {level_of_quotient(params, consts.quotientWindow.lo),
                   level_of_quotient(params, consts.quotientWindow.hi)};
  r.quotientClass = classify(quotient, r.quotientWindow);
  r.levelClass = classify(r.level, r.levelWindow);
  r.agree = r.quotientClass == r.levelClass;
  return r;
}

WindowReport window_report(const SolveResult& result, const ConstantSet& consts, const Params& params) {
  return window_report(result.quotient, consts, params);
}

}  // namespace choquard
