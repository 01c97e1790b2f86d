#include "choquard/closed_forms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "choquard/errors.hpp"
#include "choquard/functionals.hpp"

namespace choquard {

BubbleSpec BubbleSpec::from_family(const Point& sigma, double t, double amplitude) {
  double n2 = 0.0;
  for (double s : sigma) n2 += s * s;
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) throw ConfigError("sigma must be a unit vector");
  if (!(t >= 0.0) || !(t <= 1.0 - kTCap + 1e-15)) {
    std::ostringstream os;
    os << "family parameter t must lie in [0, " << 1.0 - kTCap << "] (got " << t << ")";
    throw ConfigError(os.str());
  }
  BubbleSpec b;
  b.center.resize(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) b.center[k] = t * sigma[k];
  b.scale = 1.0 - t;
  b.amplitude = amplitude;
  return b;
}

void BubbleSpec::validate(int N) const {
  if (static_cast<int>(center.size()) != N) throw ConfigError("bubble center has wrong dimension");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("bubble scale must be positive");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw ConfigError("bubble amplitude must be positive");
  }
}

double eval_bubble(const BubbleSpec& spec, const Params& params, const Point& x) {
  double r2 = 0.0;
  for (std::size_t k = 0; k < spec.center.size(); ++k) {
    const double d = x[k] - spec.center[k];
    r2 += d * d;
  }
  const double b = spec.scale;
  return spec.amplitude * std::pow(b / (b * b + r2), 0.5 * (params.N - 2));
}

Field sample_bubble(const BubbleSpec& spec, const Params& params, DomainPtr domain) {
  spec.validate(domain->dim());
  return Field::sample(domain, [&](const Point& x) { return eval_bubble(spec, params, x); });
}

void CutoffSpec::validate() const {
  if (!(R > 1.0) || !std::isfinite(R)) throw ConfigError("cutoff R must exceed 1");
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double eval_cutoff_radius(const CutoffSpec& spec, double r) {
  const double R = spec.R;
  const double in0 = 0.25 / R;
  const double in1 = 0.5 / R;
  if (r <= in0) return 0.0;
  if (r < in1) return smooth_step((r - in0) / (in1 - in0));
  if (r <= 2.0 * R) return 1.0;
  if (r < 4.0 * R) return 1.0 - smooth_step((r - 2.0 * R) / (2.0 * R));
  return 0.0;
}

double eval_cutoff(const CutoffSpec& spec, const Point& x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return eval_cutoff_radius(spec, std::sqrt(r2));
}

TruncatedFamily build_truncated_family(const Point& sigma, double t, const CutoffSpec& spec,
                                       const RieszOperator& op) {
  spec.validate();
  const Params& params = op.params();
  const BubbleSpec b = BubbleSpec::from_family(sigma, t, family_amplitude(params));
  const DomainPtr& d = op.domain();
  Field g = Field::sample(d, [&](const Point& x) { return eval_bubble(b, params, x) * eval_cutoff(spec, x); });
  const double n = nl_norm(g, op);
  if (!(n > 0.0)) throw NumericalError("truncated family member has zero nonlocal norm on this grid");
  Field f = (1.0 / n) * g;
  return {std::move(g), std::move(f), n};
}

namespace {

struct FitData {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> u;
  bool background = false;
};

// theta = (log c1, log c2, x0, [background]).
double model(const Eigen::VectorXd& theta, const Eigen::VectorXd& x, double k, bool background,
             Eigen::VectorXd* grad) {
  const int N = static_cast<int>(x.size());
  const double c1 = std::exp(theta[0]);
  const double c2 = std::exp(theta[1]);
  const Eigen::VectorXd d = x - theta.segment(2, N);
  const double den = c2 + d.squaredNorm();
  const double m = std::pow(c1 / den, k);
  if (grad) {
    (*grad)[0] = k * m;
    (*grad)[1] = -k * m * c2 / den;
    grad->segment(2, N) = (2.0 * k * m / den) * d;
    if (background) (*grad)[2 + N] = 1.0;
  }
  return background ? m + theta[2 + N] : m;
}

double cost(const FitData& data, const Eigen::VectorXd& theta, double k) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.u.size(); ++i) {
    const double r = model(theta, data.x[i], k, data.background, nullptr) - data.u[i];
    s += r * r;
  }
  return s;
}

}  // namespace

FitResult fit_bubble(const Field& field, const Params& params, const FitOptions& options) {
  const GridDomain& d = field.domain();
  const int N = d.dim();
  if (N != params.N) throw ConfigError("field dimension does not match N");
  const double k = 0.5 * (N - 2);
  const double peak = field.max();
  if (!(peak > 0.0)) throw ConfigError("fit_bubble needs a field with a positive value");

  Point x0;
  if (options.initialCenter) {
    x0 = *options.initialCenter;
  } else {
    x0 = barycenter(field.positive_part()).normalized;
  }
  if (static_cast<int>(x0.size()) != N) throw ConfigError("initial center has wrong dimension");
  const Point wc = options.windowCenter.value_or(x0);

  FitData data;
  data.background = options.fitBackground;
  double halfMaxVolume = 0.0;
  double localPeak = 0.0;
  double localFloor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.in_mask(i)) continue;
    const Point x = d.point(i);
    if (options.windowHalfWidth) {
      bool inside = true;
      for (int c = 0; c < N; ++c) inside = inside && std::abs(x[c] - wc[c]) <= *options.windowHalfWidth;
      if (!inside) continue;
    }
    data.x.emplace_back(Eigen::Map<const Eigen::VectorXd>(x.data(), N));
    data.u.push_back(field[i]);
    localPeak = std::max(localPeak, field[i]);
    localFloor = std::min(localFloor, field[i]);
  }
  const double floor0 = options.fitBackground ? std::max(0.0, localFloor) : 0.0;
  if (data.u.size() < static_cast<std::size_t>(N + 2) || !(localPeak > 0.0)) {
    throw ConfigError("fit window contains no positive data");
  }
  for (double v : data.u) {
    if (v - floor0 >= 0.5 * (localPeak - floor0)) halfMaxVolume += d.cell_volume();
  }

  double c2;
  if (options.initialScale) {
    c2 = *options.initialScale * *options.initialScale;
  } else {
    const double ballVol = std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
    const double rHalf = std::pow(halfMaxVolume / ballVol, 1.0 / N);
    const double s = std::sqrt(std::pow(2.0, 1.0 / k) - 1.0);
    c2 = std::max(rHalf / s, d.min_h());
    c2 *= c2;
  }
  const double c1 = c2 * std::pow(localPeak - floor0, 1.0 / k);

  const int P = N + 2 + (options.fitBackground ? 1 : 0);
  Eigen::VectorXd theta(P);
  theta[0] = std::log(c1);
  theta[1] = std::log(c2);
  for (int c = 0; c < N; ++c) theta[2 + c] = x0[c];
  if (options.fitBackground) theta[2 + N] = floor0;

  double u2 = 0.0;
  for (double v : data.u) u2 += v * v;

  FitResult res;
  double damping = 1e-3;
  double f = cost(data, theta, k);
  Eigen::VectorXd g(P);
  for (int it = 1; it <= options.maxIters; ++it) {
    res.iterations = it;
    Eigen::MatrixXd JtJ = Eigen::MatrixXd::Zero(P, P);
    Eigen::VectorXd Jtr = Eigen::VectorXd::Zero(P);
    for (std::size_t i = 0; i < data.u.size(); ++i) {
      const double r = model(theta, data.x[i], k, data.background, &g) - data.u[i];
      JtJ.selfadjointView<Eigen::Lower>().rankUpdate(g);
      Jtr += r * g;
    }
    JtJ = JtJ.selfadjointView<Eigen::Lower>();
    const double gradScale = std::sqrt(JtJ.diagonal().maxCoeff() * u2);
    if (Jtr.lpNorm<Eigen::Infinity>() <= options.tol * gradScale) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    Eigen::VectorXd step;
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += damping * JtJ.diagonal().cwiseMax(1e-300);
      step = A.ldlt().solve(-Jtr);
      const Eigen::VectorXd cand = theta + step;
      const double fc = cost(data, cand, k);
      if (std::isfinite(fc) && fc <= f) {
        theta = cand;
        const double df = f - fc;
        f = fc;
        damping = std::max(damping / 3.0, 1e-12);
        accepted = true;
        if (step.norm() <= options.tol * (theta.norm() + options.tol) || df <= 1e-15 * f) {
          res.converged = true;
        }
        break;
      }
      damping *= 4.0;
    }
    if (!accepted || res.converged) {
      res.converged = res.converged || !accepted;
      break;
    }
  }

  res.c1 = std::exp(theta[0]);
  res.c2 = std::exp(theta[1]);
  res.spec.scale = std::sqrt(res.c2);
  res.spec.amplitude = std::pow(res.c1 / res.spec.scale, k);
  res.spec.center.assign(theta.data() + 2, theta.data() + 2 + N);
  if (options.fitBackground) res.background = theta[2 + N];
  res.residual = std::sqrt(f / u2);
  return res;
}

BubbleCheck bubble_check(const Field& field, const Params& params, double tolerance) {
  BubbleCheck out;
  out.fit = fit_bubble(field, params);
  const GridDomain& d = field.domain();
  const Point& c = out.fit.spec.center;
  const double w = 0.5 * d.min_h();
  std::vector<double> sum;
  std::vector<double> cnt;
  std::vector<double> rad(d.size(), -1.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.in_mask(i)) continue;
    const Point x = d.point(i);
    double r2 = 0.0;
    for (int k = 0; k < d.dim(); ++k) r2 += (x[k] - c[k]) * (x[k] - c[k]);
    rad[i] = std::sqrt(r2);
    const auto bin = static_cast<std::size_t>(rad[i] / w);
    if (bin >= sum.size()) {
      sum.resize(bin + 1, 0.0);
      cnt.resize(bin + 1, 0.0);
    }
    sum[bin] += field[i];
    cnt[bin] += 1.0;
  }
  std::vector<double> rc;
  std::vector<double> mean;
  for (std::size_t b = 0; b < sum.size(); ++b) {
    if (cnt[b] > 0) {
      rc.push_back((b + 0.5) * w);
      mean.push_back(sum[b] / cnt[b]);
    }
  }
  const double peak = field.max();
  // Radial profile by linear interpolation of shell means.
  double dev2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (rad[i] < 0.0) continue;
    auto it = std::lower_bound(rc.begin(), rc.end(), rad[i]);
    double prof;
    if (it == rc.begin()) {
      prof = mean.front();
    } else if (it == rc.end()) {
      prof = mean.back();
    } else {
      const std::size_t j = static_cast<std::size_t>(it - rc.begin());
      const double a = (rad[i] - rc[j - 1]) / (rc[j] - rc[j - 1]);
      prof = (1.0 - a) * mean[j - 1] + a * mean[j];
    }
    dev2 += (field[i] - prof) * (field[i] - prof);
    ref2 += field[i] * field[i];
  }
  out.radialSpread = ref2 > 0.0 ? std::sqrt(dev2 / ref2) : 0.0;
  // Monotonicity on shells of width h, restricted to the ball of radius
  // 4 * scale where the sampled profile is resolved.
  const double rMax = 4.0 * out.fit.spec.scale + d.max_h();
  for (std::size_t j = 1; j < mean.size(); ++j) {
    if (rc[j] > rMax) break;
    out.monotoneViolation = std::max(out.monotoneViolation, (mean[j] - mean[j - 1]) / peak);
  }
  out.isBubble = out.fit.residual < tolerance && out.radialSpread < tolerance &&
                 out.monotoneViolation < tolerance;
  return out;
}

}  // namespace choquard
