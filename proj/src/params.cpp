#include "choquard/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "choquard/errors.hpp"

namespace choquard {

namespace {

double gamma_fn(double x) {
  const double g = std::tgamma(x);
  if (!std::isfinite(g)) {
    std::ostringstream os;
    os << "Gamma evaluation failed at " << x;
    throw NumericalError(os.str());
  }
  return g;
}

double sphere_area(int N) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / gamma_fn(0.5 * N);
}

double hls_chain_sHL(const Params& p, double c) {
  return sobolev_constant(p) / std::pow(c, (p.N - 2.0) / (2.0 * p.N - p.mu));
}

double beta_of_sHL(const Params& p, double sHL) {
  const double a = p.N - p.mu + 2.0;
  const double b = 2.0 * p.N - p.mu;
  return 0.5 * (a / b) * std::pow(sHL, b / a);
}

}  // namespace

Params Params::make(int N, double mu) {
  Params p{N, mu};
  p.validate();
  return p;
}

void Params::validate() const {
  if (N < 3) {
    throw ConfigError("dimension N must satisfy N >= 3 (got " + std::to_string(N) + ")");
  }
  if (!std::isfinite(mu) || !(mu > 0.0) || !(mu < N)) {
    std::ostringstream os;
    os.precision(17);
    os << "exponent mu must satisfy 0 < mu < N = " << N << " (got " << mu << ")";
    throw ConfigError(os.str());
  }
}

Exponents derive_exponents(const Params& params) {
  params.validate();
  const double N = params.N;
  const double mu = params.mu;
  return {2.0 * N / (N - 2.0), (2.0 * N - mu) / (N - 2.0), (N + mu) / (N - 2.0)};
}

double sharp_hls_constant(const Params& params) {
  params.validate();
  const double N = params.N;
  const double mu = params.mu;
  return std::pow(std::numbers::pi, 0.5 * mu) * gamma_fn(0.5 * N - 0.5 * mu) /
         gamma_fn(N - 0.5 * mu) *
         std::pow(gamma_fn(0.5 * N) / gamma_fn(0.5 * mu), -1.0 + mu / N);
}

double lieb_hls_constant(const Params& params) {
  params.validate();
  const double N = params.N;
  const double mu = params.mu;
  return std::pow(std::numbers::pi, 0.5 * mu) * gamma_fn(0.5 * N - 0.5 * mu) /
         gamma_fn(N - 0.5 * mu) *
         std::pow(gamma_fn(0.5 * N) / gamma_fn(N), -1.0 + mu / N);
}

double sobolev_constant(const Params& params) {
  params.validate();
  const double N = params.N;
  return std::numbers::pi * N * (N - 2.0) *
         std::pow(gamma_fn(0.5 * N) / gamma_fn(N), 2.0 / N);
}

ConstantSet best_constants(const Params& params) {
  params.validate();
  ConstantSet c{};
  c.cNmu = sharp_hls_constant(params);
  c.S = sobolev_constant(params);
  c.sHL = hls_chain_sHL(params, c.cNmu);
  c.beta = beta_of_sHL(params, c.sHL);
  c.window = {c.beta, 2.0 * c.beta};
  const double up = std::pow(2.0, (params.N - params.mu + 2.0) / (2.0 * params.N - params.mu));
  c.quotientWindow = {c.sHL, up * c.sHL};
  c.liebCNmu = lieb_hls_constant(params);
  c.liebSHL = hls_chain_sHL(params, c.liebCNmu);
  c.liebBeta = beta_of_sHL(params, c.liebSHL);
  return c;
}

double level_of_quotient(const Params& params, double quotient) {
  const double a = params.N - params.mu + 2.0;
  const double b = 2.0 * params.N - params.mu;
  return 0.5 * (a / b) * std::pow(quotient, b / a);
}

double rescaling_exponent(const Params& params) {
  return (params.N - 2.0) / (2.0 * (params.N - params.mu + 2.0));
}

double family_amplitude(const Params& params) {
  params.validate();
  const double N = params.N;
  const double mu = params.mu;
  const double a = N - mu + 2.0;
  return std::pow(sobolev_constant(params), (N - mu) * (2.0 - N) / (4.0 * a)) *
         std::pow(sharp_hls_constant(params), (2.0 - N) / (2.0 * a));
}

double solution_amplitude(const Params& params) {
  params.validate();
  const double N = params.N;
  const double mu = params.mu;
  const double a = N - mu + 2.0;
  return std::pow(sobolev_constant(params), (N - mu) * (2.0 - N) / (4.0 * a)) *
         std::pow(lieb_hls_constant(params), (2.0 - N) / (2.0 * a)) *
         std::pow(N * (N - 2.0), (N - 2.0) / 4.0);
}

double unit_bubble_dirichlet(const Params& params) {
  params.validate();
  const double N = params.N;
  const double a = 0.5 * (N + 2.0);
  const double b = 0.5 * (N - 2.0);
  const double beta = gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
  return (N - 2.0) * (N - 2.0) * sphere_area(params.N) * 0.5 * beta;
}

}  // namespace choquard
