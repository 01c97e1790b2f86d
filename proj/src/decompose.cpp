#include "choquard/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "choquard/errors.hpp"

namespace choquard {

namespace {

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double sphere_area(int N) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

// r^{-2} int_{B_r} (1 + |x|^2)^{-(N-2)} dx by composite Simpson.
double unit_ball_mass_ratio(int N, double r) {
  const int n = 2000;
  const double h = r / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    const double f = std::pow(x, N - 1) * std::pow(1.0 + x * x, -(N - 2));
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * f;
  }
  return sphere_area(N) * s * h / 3.0 / (r * r);
}

// Ratio of the Morrey argmax radius to the bubble scale.
double morrey_radius_ratio(int N) {
  double best = 0.0;
  double arg = 1.0;
  for (int i = 0; i <= 400; ++i) {
    const double r = std::exp(std::log(0.1) + i * (std::log(20.0) - std::log(0.1)) / 400.0);
    const double v = unit_ball_mass_ratio(N, r);
    if (v > best) {
      best = v;
      arg = r;
    }
  }
  return arg;
}

double bounding_diameter(const GridDomain& d) {
  double s = 0.0;
  for (int k = 0; k < d.dim(); ++k) s += d.extent(k) * d.extent(k);
  return std::sqrt(s);
}

}  // namespace

double bubble_energy_inf(double amplitude, const Params& params) {
  const Exponents e = derive_exponents(params);
  const double D = amplitude * amplitude * unit_bubble_dirichlet(params);
  const double nl2 = D / best_constants(params).liebSHL;
  const double K = std::pow(nl2, e.twoStarMu);
  return 0.5 * D - K / (2.0 * e.twoStarMu);
}

double bubble_morrey_value(const Params& params) {
  const double A = solution_amplitude(params);
  return A * A * unit_ball_mass_ratio(params.N, morrey_radius_ratio(params.N));
}

Field synthesize_ps_field(const V0Source& v0, const std::vector<ProfileSpec>& profiles,
                          DomainPtr domain, const Params& params) {
  params.validate();
  const GridDomain& d = *domain;
  if (d.dim() != params.N) throw ConfigError("grid dimension does not match N");
  const double h = d.max_h();
  for (const auto& p : profiles) {
    if (static_cast<int>(p.center.size()) != params.N) throw ConfigError("profile center has wrong dimension");
    if (!(p.scale >= 4.0 * h * (1.0 - 1e-12))) {
      throw ConfigError("profile scale " + std::to_string(p.scale) + " is below 4h = " + std::to_string(4.0 * h));
    }
    if (p.sign != 1 && p.sign != -1) throw ConfigError("profile sign must be +1 or -1");
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    for (std::size_t j = i + 1; j < profiles.size(); ++j) {
      const auto& a = profiles[i];
      const auto& b = profiles[j];
      const double big = std::max(a.scale, b.scale);
      const double small = std::min(a.scale, b.scale);
      if (distance(a.center, b.center) < 4.0 * big && big < 4.0 * small) {
        throw ConfigError("profiles " + std::to_string(i) + " and " + std::to_string(j) +
                          " are neither separated in space nor in scale");
      }
    }
  }

  Field out(domain);
  if (const auto* b = std::get_if<BubbleSpec>(&v0)) {
    out = sample_bubble(*b, params, domain);
  } else if (const auto* f = std::get_if<Field>(&v0)) {
    if (!f->domain().same_layout(d)) throw ConfigError("v0 field lives on a different grid");
    out = *f;
    out.enforce_mask();
  }
  const double A = solution_amplitude(params);
  for (const auto& p : profiles) {
    out.axpy(p.sign, sample_bubble(BubbleSpec{p.center, p.scale, A}, params, domain));
  }
  return out;
}

void DecomposeOptions::validate() const {
  if (!(theta > 0.0)) throw ConfigError("theta must be positive");
  if (!(stopFraction >= 0.0 && stopFraction < 1.0)) throw ConfigError("stopFraction must lie in [0, 1)");
  if (!(windowFactor > 0.0)) throw ConfigError("windowFactor must be positive");
  if (!(broadFactor > 0.0)) throw ConfigError("broadFactor must be positive");
  if (!(selectFraction > 0.0 && selectFraction <= 1.0)) throw ConfigError("selectFraction must lie in (0, 1]");
  if (backfitSweeps < 0) throw ConfigError("backfitSweeps must be nonnegative");
}

DecompositionResult decompose(const Field& u, const RieszOperator& op, int maxBubbles,
                              const DecomposeOptions& options) {
  if (maxBubbles < 0) throw ConfigError("maxBubbles must be nonnegative");
  options.validate();
  if (!op.domain()->same_layout(u.domain())) throw ConfigError("operator and field live on different grids");
  const Params& params = op.params();
  const GridDomain& d = u.domain();
  const DomainPtr dom = u.domain_ptr();

  DecompositionResult out{Field(dom), true, {}, u, 0.0, {}, 0, false, ""};
  const double Din = dirichlet_energy(u);
  out.ledger.inputDirichlet = Din;
  if (Din == 0.0 && u.max_abs() == 0.0) {
    out.stopReason = "zero input";
    return out;
  }

  const MorreyResult m0 = morrey_norm(u);
  const double threshold = options.theta * std::max(m0.value, bubble_morrey_value(params));
  const double broadRadius = bounding_diameter(d) / options.broadFactor;
  const double radiusRatio = morrey_radius_ratio(params.N);

  Field& res = out.residual;
  auto fit_window = [&](const Field& target, const Point& center, double scale) {
    FitOptions fo;
    fo.initialCenter = center;
    fo.initialScale = scale;
    fo.windowCenter = center;
    fo.windowHalfWidth = options.windowFactor * scale;
    fo.fitBackground = true;
    return fit_bubble(target, params, fo);
  };
  auto sample_signed = [&](const BubbleSpec& spec) {
    BubbleSpec a = spec;
    a.amplitude = std::abs(a.amplitude);
    Field f = sample_bubble(a, params, dom);
    if (spec.amplitude < 0.0) f *= -1.0;
    return f;
  };
  auto usable = [](const FitResult& f) {
    return f.converged && std::isfinite(f.spec.scale) && f.spec.scale > 0.0 && std::isfinite(f.spec.amplitude);
  };

  struct Part {
    BubbleSpec spec;  // signed amplitude
    int sign;
    double fitResidual;
    MorreyLevel level;
  };
  std::vector<Part> parts;
  for (int round = 0;; ++round) {
    const MorreyResult full = round == 0 ? m0 : morrey_norm(res);
    if (full.value < threshold) {
      out.stopReason = "no concentration above threshold";
      break;
    }
    // The smallest radius that is a local maximum in r and carries a fixed
    // share of the sup; a thin profile on top of a broad one is found first.
    std::optional<MorreyLevel> pick;
    const auto& lv = full.levels;
    for (std::size_t j = 0; j < lv.size() && lv[j].radius < broadRadius; ++j) {
      const bool localMax = j + 1 == lv.size() || lv[j].value >= lv[j + 1].value;
      if (localMax && lv[j].value >= options.selectFraction * full.value && lv[j].value >= threshold) {
        pick = lv[j];
        break;
      }
    }
    if (!pick && full.radius < broadRadius) pick = MorreyLevel{full.radius, full.value, full.centerIndex};
    if (!pick) {
      out.stopReason = "remaining mass is broad";
      break;
    }
    if (round >= maxBubbles) {
      out.stopReason = "bubble limit reached";
      break;
    }
    const int sign = res[pick->centerIndex] < 0.0 ? -1 : 1;
    Field target = res;
    if (sign < 0) target *= -1.0;
    FitResult fit;
    try {
      fit = fit_window(target, d.point(pick->centerIndex), std::max(pick->radius / radiusRatio, d.min_h()));
    } catch (const std::exception&) {
      out.partial = true;
      out.stopReason = "fit failed";
      break;
    }
    if (!usable(fit)) {
      out.partial = true;
      out.stopReason = "fit did not converge";
      break;
    }
    BubbleSpec spec = fit.spec;
    spec.amplitude *= sign;
    res -= sample_signed(spec);
    parts.push_back({spec, sign, fit.residual, *pick});
    if (dirichlet_energy(res) <= options.stopFraction * Din) {
      out.stopReason = "residual energy below stop fraction";
      break;
    }
  }

  // Back-fitting: refit each profile against the input minus all other
  // profiles, with the window tied to its current scale.
  if (!parts.empty()) {
    std::vector<Field> sampled;
    for (const auto& p : parts) sampled.push_back(sample_signed(p.spec));
    for (int sweep = 0; sweep < options.backfitSweeps; ++sweep) {
      double change = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        Field target = res + sampled[i];
        if (parts[i].sign < 0) target *= -1.0;
        FitResult fit;
        try {
          fit = fit_window(target, parts[i].spec.center, parts[i].spec.scale);
        } catch (const std::exception&) {
          continue;
        }
        if (!usable(fit)) continue;
        BubbleSpec spec = fit.spec;
        spec.amplitude *= parts[i].sign;
        change = std::max(change, std::abs(std::log(spec.scale / parts[i].spec.scale)));
        change = std::max(change, distance(spec.center, parts[i].spec.center) / spec.scale);
        Field next = sample_signed(spec);
        res += sampled[i];
        res -= next;
        sampled[i] = std::move(next);
        parts[i].spec = spec;
        parts[i].fitResidual = fit.residual;
      }
      if (change < 1e-8) break;
    }
    const double twoStarMu = derive_exponents(params).twoStarMu;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      ExtractedBubble b;
      b.spec = parts[i].spec;
      b.fitResidual = parts[i].fitResidual;
      b.morreyValue = parts[i].level.value;
      b.morreyRadius = parts[i].level.radius;
      b.boundaryAdjacent = d.boundary_distance(b.spec.center) < options.windowFactor * b.spec.scale;
      b.dirichlet = dirichlet_energy(sampled[i]);
      b.energyInf = bubble_energy_inf(std::abs(b.spec.amplitude), params);
      const Field pos = parts[i].sign < 0 ? -1.0 * sampled[i] : sampled[i];
      b.energyGrid = 0.5 * b.dirichlet - nonlocal_energy(pos, op) / (2.0 * twoStarMu);
      out.bubbles.push_back(std::move(b));
    }
  }
  out.k = static_cast<int>(out.bubbles.size());

  const double Dres = dirichlet_energy(res);
  // A failed fit on what back-fitting later reduces to noise is not a partial result.
  if (out.partial && !parts.empty() && Dres <= options.stopFraction * Din) {
    out.partial = false;
    out.stopReason = "residual energy below stop fraction";
  }
  bool broad = res.max_abs() == 0.0;
  if (!broad) {
    const MorreyResult mr = morrey_norm(res);
    broad = mr.radius >= broadRadius;
  }
  double sumBubbles = 0.0;
  for (const auto& b : out.bubbles) sumBubbles += b.dirichlet;
  if (broad) {
    out.v0 = res;
    out.v0Resolved = true;
    out.residualDirichlet = 0.0;
    out.ledger.sumParts = Dres + sumBubbles;
  } else {
    out.v0 = Field(dom);
    out.v0Resolved = false;
    out.residualDirichlet = Dres;
    out.ledger.sumParts = sumBubbles;
  }
  out.ledger.relativeGap =
      Din > 0.0 ? std::abs(Din - out.ledger.sumParts - out.residualDirichlet) / Din : 0.0;
  return out;
}

}  // namespace choquard
