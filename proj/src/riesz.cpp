#include "choquard/riesz.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "choquard/errors.hpp"
#include "choquard/parallel.hpp"
#include "fftw_lock.hpp"

namespace choquard {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

std::mutex& planner_mutex() { return fftw_planner_mutex(); }

int next_smooth(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::string to_string(RieszMethod m) {
  return m == RieszMethod::DirectSum ? "direct" : "fourier";
}

RieszMethod riesz_method_from_string(const std::string& name) {
  if (name == "direct" || name == "DirectSum") return RieszMethod::DirectSum;
  if (name == "fourier" || name == "PaddedFourier") return RieszMethod::PaddedFourier;
  throw ConfigError("unknown riesz.method '" + name + "' (expected direct or fourier)");
}

double self_cell_weight(const Params& params, const GridDomain& domain) {
  const double N = domain.dim();
  const double ballVol = std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
  const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
  const double req = std::pow(domain.cell_volume() / ballVol, 1.0 / N);
  return area * std::pow(req, N - params.mu) / (N - params.mu);
}

struct RieszOperator::Impl {
  Params params;
  DomainPtr domain;
  RieszMethod method;
  double pad = 2.0;
  double w0 = 0.0;

  // Direct summation: kernel on the lag lattice [-(n-1), n-1]^N.
  std::vector<double> lagTable;
  std::vector<std::size_t> lagStrides;
  std::vector<std::size_t> maskNodes;

  // Padded Fourier.
  std::vector<int> padded;
  std::size_t realSize = 0;
  std::size_t complexSize = 0;
  std::unique_ptr<double, FftwFree> realBuf;
  std::unique_ptr<fftw_complex, FftwFree> cplxBuf;
  std::vector<double> kernelHat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  mutable std::mutex mtx;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  double kernel_at(const std::vector<long>& lag) const {
    double r2 = 0.0;
    bool zero = true;
    for (std::size_t k = 0; k < lag.size(); ++k) {
      const double x = lag[k] * domain->h(static_cast<int>(k));
      r2 += x * x;
      zero = zero && lag[k] == 0;
    }
    if (zero) return w0;
    return domain->cell_volume() * std::pow(r2, -0.5 * params.mu);
  }

  void build_direct() {
    const GridDomain& d = *domain;
    if (d.mask_count() > kDirectSumCap) {
      std::ostringstream os;
      os << "direct summation is capped at " << kDirectSumCap << " mask nodes (grid has "
         << d.mask_count() << "); use the fourier method";
      throw ConfigError(os.str());
    }
    const int N = d.dim();
    lagStrides.assign(N, 0);
    std::size_t total = 1;
    for (int k = N; k-- > 0;) {
      lagStrides[k] = total;
      total *= static_cast<std::size_t>(2 * d.nodes(k) - 1);
    }
    lagTable.assign(total, 0.0);
    std::vector<long> lag(N);
    for (std::size_t t = 0; t < total; ++t) {
      for (int k = 0; k < N; ++k) {
        const long m = 2 * d.nodes(k) - 1;
        lag[k] = static_cast<long>((t / lagStrides[k]) % static_cast<std::size_t>(m)) - (d.nodes(k) - 1);
      }
      lagTable[t] = kernel_at(lag);
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.in_mask(i)) maskNodes.push_back(i);
    }
  }

  void build_fourier() {
    const GridDomain& d = *domain;
    const int N = d.dim();
    padded.resize(N);
    realSize = 1;
    for (int k = 0; k < N; ++k) {
      const int want = std::max(2 * d.nodes(k) - 1, static_cast<int>(std::ceil(pad * d.nodes(k))));
      padded[k] = next_smooth(want);
      realSize *= static_cast<std::size_t>(padded[k]);
    }
    complexSize = realSize / static_cast<std::size_t>(padded[N - 1]) *
                  static_cast<std::size_t>(padded[N - 1] / 2 + 1);
    realBuf.reset(static_cast<double*>(fftw_malloc(sizeof(double) * realSize)));
    cplxBuf.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * complexSize)));
    if (!realBuf || !cplxBuf) throw NumericalError("FFT buffer allocation failed");
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      forward = fftw_plan_dft_r2c(N, padded.data(), realBuf.get(), cplxBuf.get(), FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r(N, padded.data(), cplxBuf.get(), realBuf.get(), FFTW_ESTIMATE);
    }
    if (!forward || !backward) throw NumericalError("FFTW planning failed");

    // Kernel on the padded lattice using minimal-image lags; it is even, so
    // its transform is real.
    std::vector<std::size_t> pstr(N);
    std::size_t s = 1;
    for (int k = N; k-- > 0;) {
      pstr[k] = s;
      s *= static_cast<std::size_t>(padded[k]);
    }
    double* kr = realBuf.get();
    std::vector<long> lag(N);
    for (std::size_t t = 0; t < realSize; ++t) {
      for (int k = 0; k < N; ++k) {
        long i = static_cast<long>((t / pstr[k]) % static_cast<std::size_t>(padded[k]));
        if (i > padded[k] / 2) i -= padded[k];
        lag[k] = i;
      }
      kr[t] = kernel_at(lag);
    }
    fftw_execute(forward);
    kernelHat.resize(complexSize);
    const double scale = 1.0 / static_cast<double>(realSize);
    for (std::size_t t = 0; t < complexSize; ++t) kernelHat[t] = cplxBuf.get()[t][0] * scale;
  }

  Field apply_direct(const Field& f) const {
    const GridDomain& d = *domain;
    const int N = d.dim();
    std::vector<std::size_t> src;
    for (std::size_t j : maskNodes) {
      if (f[j] != 0.0) src.push_back(j);
    }
    std::vector<std::size_t> srcLag(src.size(), 0);
    for (std::size_t s = 0; s < src.size(); ++s) {
      for (int k = 0; k < N; ++k) srcLag[s] += static_cast<std::size_t>(d.axis_index(src[s], k)) * lagStrides[k];
    }
    Field out(domain);
    auto& o = out.mutable_values();
    std::size_t center = 0;
    for (int k = 0; k < N; ++k) center += static_cast<std::size_t>(d.nodes(k) - 1) * lagStrides[k];
    parallel_for(maskNodes.size(), [&](std::size_t m) {
      const std::size_t i = maskNodes[m];
      std::size_t base = center;
      for (int k = 0; k < N; ++k) base += static_cast<std::size_t>(d.axis_index(i, k)) * lagStrides[k];
      double acc = 0.0;
      for (std::size_t s = 0; s < src.size(); ++s) acc += lagTable[base - srcLag[s]] * f[src[s]];
      o[i] = acc;
    });
    return out;
  }

  Field apply_fourier(const Field& f) const {
    const GridDomain& d = *domain;
    const int N = d.dim();
    std::lock_guard<std::mutex> lock(mtx);
    double* r = realBuf.get();
    std::fill(r, r + realSize, 0.0);
    std::vector<std::size_t> pstr(N);
    std::size_t s = 1;
    for (int k = N; k-- > 0;) {
      pstr[k] = s;
      s *= static_cast<std::size_t>(padded[k]);
    }
    auto padIndex = [&](std::size_t i) {
      std::size_t t = 0;
      for (int k = 0; k < N; ++k) t += static_cast<std::size_t>(d.axis_index(i, k)) * pstr[k];
      return t;
    };
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (f[i] != 0.0) r[padIndex(i)] = f[i];
    }
    fftw_execute(forward);
    fftw_complex* c = cplxBuf.get();
    for (std::size_t t = 0; t < complexSize; ++t) {
      c[t][0] *= kernelHat[t];
      c[t][1] *= kernelHat[t];
    }
    fftw_execute(backward);
    Field out(domain);
    auto& o = out.mutable_values();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.in_mask(i)) o[i] = r[padIndex(i)];
    }
    return out;
  }
};

RieszOperator::RieszOperator(Params params, DomainPtr domain, RieszMethod method, double pad)
    : impl_(std::make_unique<Impl>()) {
  params.validate();
  if (!domain) throw ConfigError("riesz operator requires a grid");
  if (domain->dim() != params.N) {
    throw ConfigError("grid dimension does not match N");
  }
  if (!(pad >= 2.0) || !std::isfinite(pad)) throw ConfigError("riesz.pad must be >= 2");
  impl_->params = params;
  impl_->domain = std::move(domain);
  impl_->method = method;
  impl_->pad = pad;
  impl_->w0 = choquard::self_cell_weight(params, *impl_->domain);
  if (method == RieszMethod::DirectSum) {
    impl_->build_direct();
  } else {
    impl_->build_fourier();
  }
}

RieszOperator::~RieszOperator() = default;
RieszOperator::RieszOperator(RieszOperator&&) noexcept = default;
RieszOperator& RieszOperator::operator=(RieszOperator&&) noexcept = default;

Field RieszOperator::apply(const Field& f) const {
  if (!f.domain().same_layout(*impl_->domain)) {
    throw ConfigError("field grid does not match the operator grid");
  }
  return impl_->method == RieszMethod::DirectSum ? impl_->apply_direct(f) : impl_->apply_fourier(f);
}

double RieszOperator::convolution_energy(const Field& f, const Field& g) const {
  require_same_grid(f, g);
  const bool swap = std::lexicographical_compare(g.values().begin(), g.values().end(),
                                                 f.values().begin(), f.values().end());
  const Field& a = swap ? g : f;
  const Field& b = swap ? f : g;
  const Field ra = apply(a);
  return l2_inner(ra, b);
}

const Params& RieszOperator::params() const { return impl_->params; }
const DomainPtr& RieszOperator::domain() const { return impl_->domain; }
RieszMethod RieszOperator::method() const { return impl_->method; }
double RieszOperator::self_cell_weight() const { return impl_->w0; }
double RieszOperator::pad() const { return impl_->pad; }

}  // namespace choquard
