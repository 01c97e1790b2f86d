#include "choquard/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "choquard/errors.hpp"

namespace choquard {

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Box: return "box";
    case DomainKind::Ball: return "ball";
    case DomainKind::Annulus: return "annulus";
    case DomainKind::HalfSpaceTrunc: return "halfspace";
    case DomainKind::FreeSpaceTrunc: return "freespace";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "box") return DomainKind::Box;
  if (name == "ball") return DomainKind::Ball;
  if (name == "annulus") return DomainKind::Annulus;
  if (name == "halfspace") return DomainKind::HalfSpaceTrunc;
  if (name == "freespace") return DomainKind::FreeSpaceTrunc;
  throw ConfigError("unknown domain kind '" + name +
                    "' (expected box, ball, annulus, halfspace or freespace)");
}

GridDomain::GridDomain(DomainShape shape, Point origin, std::vector<double> extent,
                       std::vector<int> nodes)
    : shape_(shape), origin_(std::move(origin)), extent_(std::move(extent)), nodes_(std::move(nodes)) {
  const std::size_t N = nodes_.size();
  if (N == 0 || origin_.size() != N || extent_.size() != N) {
    throw ConfigError("grid origin, extent and nodes must have the same nonzero length");
  }
  h_.resize(N);
  strides_.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    if (nodes_[k] < 8) throw ConfigError("grid needs at least 8 nodes per axis");
    if (!(extent_[k] > 0.0) || !std::isfinite(extent_[k])) {
      throw ConfigError("grid extent must be positive and finite");
    }
    h_[k] = extent_[k] / (nodes_[k] - 1);
  }
  size_ = 1;
  for (std::size_t k = N; k-- > 0;) {
    strides_[k] = size_;
    size_ *= static_cast<std::size_t>(nodes_[k]);
  }
  cellVolume_ = 1.0;
  for (double hk : h_) cellVolume_ *= hk;

  switch (shape_.kind) {
    case DomainKind::Ball:
      if (!(shape_.radius > 0.0)) throw ConfigError("ball radius must be positive");
      break;
    case DomainKind::Annulus:
      if (!(shape_.r1 >= 0.0) || !(shape_.r1 < shape_.r2)) {
        throw ConfigError("annulus radii must satisfy 0 <= R1 < R2");
      }
      break;
    case DomainKind::HalfSpaceTrunc:
      if (!(shape_.depth > 0.0)) throw ConfigError("half-space depth must be positive");
      break;
    case DomainKind::FreeSpaceTrunc:
      if (!(shape_.L > 0.0)) throw ConfigError("free-space box length must be positive");
      break;
    case DomainKind::Box: break;
  }

  mask_.assign(size_, 0);
  std::vector<double> x(N);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    bool onFace = false;
    double r2 = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const int i = axis_index(idx, static_cast<int>(k));
      if (i == 0 || i == nodes_[k] - 1) onFace = true;
      x[k] = coord(static_cast<int>(k), i);
      r2 += x[k] * x[k];
    }
    if (onFace) continue;
    bool in = true;
    const double r = std::sqrt(r2);
    if (shape_.kind == DomainKind::Ball) in = r < shape_.radius;
    if (shape_.kind == DomainKind::Annulus) in = r > shape_.r1 && r < shape_.r2;
    mask_[idx] = in ? 1 : 0;
  }
  maskCount_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));

  core_.assign(size_, 0);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    if (!mask_[idx]) continue;
    bool all = true;
    for (std::size_t k = 0; k < N && all; ++k) {
      const int i = axis_index(idx, static_cast<int>(k));
      if (i == 0 || i == nodes_[k] - 1) {
        all = false;
        break;
      }
      all = mask_[idx - strides_[k]] && mask_[idx + strides_[k]];
    }
    core_[idx] = all ? 1 : 0;
  }

  // FNV-1a over the layout and mask bytes.
  std::uint64_t hsh = 1469598103934665603ull;
  auto mix = [&hsh](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      hsh ^= b[i];
      hsh *= 1099511628211ull;
    }
  };
  for (std::size_t k = 0; k < N; ++k) {
    mix(&nodes_[k], sizeof(int));
    mix(&origin_[k], sizeof(double));
    mix(&extent_[k], sizeof(double));
  }
  mix(mask_.data(), mask_.size());
  maskHash_ = hsh;
}

std::shared_ptr<const GridDomain> GridDomain::box(Point origin, std::vector<double> extent,
                                                  std::vector<int> nodes) {
  return std::make_shared<const GridDomain>(DomainShape{DomainKind::Box}, std::move(origin),
                                            std::move(extent), std::move(nodes));
}

std::shared_ptr<const GridDomain> GridDomain::ball(int N, double radius, int nodes,
                                                   double halfWidth) {
  if (halfWidth <= 0.0) halfWidth = radius;
  DomainShape s{DomainKind::Ball};
  s.radius = radius;
  return std::make_shared<const GridDomain>(s, Point(N, -halfWidth),
                                            std::vector<double>(N, 2.0 * halfWidth),
                                            std::vector<int>(N, nodes));
}

std::shared_ptr<const GridDomain> GridDomain::annulus(int N, double r1, double r2, int nodes,
                                                      double halfWidth) {
  if (halfWidth <= 0.0) halfWidth = r2;
  DomainShape s{DomainKind::Annulus};
  s.r1 = r1;
  s.r2 = r2;
  return std::make_shared<const GridDomain>(s, Point(N, -halfWidth),
                                            std::vector<double>(N, 2.0 * halfWidth),
                                            std::vector<int>(N, nodes));
}

std::shared_ptr<const GridDomain> GridDomain::half_space(int N, double lateral, double depth,
                                                         std::vector<int> nodes) {
  DomainShape s{DomainKind::HalfSpaceTrunc};
  s.depth = depth;
  Point origin(N, -0.5 * lateral);
  origin[N - 1] = 0.0;
  std::vector<double> extent(N, lateral);
  extent[N - 1] = depth;
  if (static_cast<int>(nodes.size()) != N) throw ConfigError("half-space needs one node count per axis");
  return std::make_shared<const GridDomain>(s, std::move(origin), std::move(extent), std::move(nodes));
}

std::shared_ptr<const GridDomain> GridDomain::free_space(int N, double L, int nodes) {
  DomainShape s{DomainKind::FreeSpaceTrunc};
  s.L = L;
  return std::make_shared<const GridDomain>(s, Point(N, -0.5 * L), std::vector<double>(N, L),
                                            std::vector<int>(N, nodes));
}

double GridDomain::min_h() const { return *std::min_element(h_.begin(), h_.end()); }
double GridDomain::max_h() const { return *std::max_element(h_.begin(), h_.end()); }

Point GridDomain::point(std::size_t idx) const {
  Point x(nodes_.size());
  point(idx, x.data());
  return x;
}

void GridDomain::point(std::size_t idx, double* out) const {
  for (int k = 0; k < dim(); ++k) out[k] = coord(k, axis_index(idx, k));
}

std::size_t GridDomain::index_of(const std::vector<int>& multi) const {
  std::size_t idx = 0;
  for (int k = 0; k < dim(); ++k) idx += static_cast<std::size_t>(multi[k]) * strides_[k];
  return idx;
}

bool GridDomain::is_box_mask() const {
  return shape_.kind == DomainKind::Box || shape_.kind == DomainKind::HalfSpaceTrunc ||
         shape_.kind == DomainKind::FreeSpaceTrunc;
}

double GridDomain::trapezoid_weight(std::size_t idx) const {
  double w = 1.0;
  for (int k = 0; k < dim(); ++k) {
    const int i = axis_index(idx, k);
    w *= (i == 0 || i == nodes_[k] - 1) ? 0.5 * h_[k] : h_[k];
  }
  return w;
}

double GridDomain::boundary_distance(const Point& x) const {
  double d = std::numeric_limits<double>::infinity();
  double r2 = 0.0;
  for (int k = 0; k < dim(); ++k) {
    d = std::min(d, x[k] - origin_[k]);
    d = std::min(d, origin_[k] + extent_[k] - x[k]);
    r2 += x[k] * x[k];
  }
  const double r = std::sqrt(r2);
  if (shape_.kind == DomainKind::Ball) d = std::min(d, shape_.radius - r);
  if (shape_.kind == DomainKind::Annulus) d = std::min({d, r - shape_.r1, shape_.r2 - r});
  return d;
}

bool GridDomain::same_layout(const GridDomain& other) const {
  return this == &other || (nodes_ == other.nodes_ && origin_ == other.origin_ &&
                            extent_ == other.extent_ && mask_ == other.mask_);
}

Field::Field(DomainPtr domain) : domain_(std::move(domain)) {
  if (!domain_) throw ConfigError("field requires a domain");
  values_.assign(domain_->size(), 0.0);
}

Field::Field(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw ConfigError("field requires a domain");
  if (values_.size() != domain_->size()) {
    std::ostringstream os;
    os << "field has " << values_.size() << " values, grid has " << domain_->size() << " nodes";
    throw ConfigError(os.str());
  }
  enforce_mask();
}

void Field::enforce_mask() {
  const auto& m = domain_->mask();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!m[i]) values_[i] = 0.0;
  }
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field Field::positive_part() const {
  Field out(*this);
  for (double& v : out.values_) v = v > 0.0 ? v : 0.0;
  return out;
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  require_same_grid(*this, x);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }

void require_same_grid(const Field& a, const Field& b) {
  if (a.domain_ptr() == b.domain_ptr()) return;
  if (!a.domain().same_layout(b.domain())) throw ConfigError("fields live on different grids");
}

double integrate(const GridDomain& domain, const std::function<double(const Point&)>& expr) {
  const bool closure = domain.is_box_mask();
  return det_sum(domain.size(), [&](std::size_t i) {
    if (!closure && !domain.in_mask(i)) return 0.0;
    return domain.trapezoid_weight(i) * expr(domain.point(i));
  });
}

double integrate(const Field& u) {
  const GridDomain& d = u.domain();
  return det_sum(d.size(), [&](std::size_t i) { return d.trapezoid_weight(i) * u[i]; });
}

double l2_inner(const Field& a, const Field& b) {
  require_same_grid(a, b);
  const double cv = a.domain().cell_volume();
  return cv * det_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double lp_norm(const Field& u, double p) {
  const double cv = u.domain().cell_volume();
  const double s = det_sum(u.size(), [&](std::size_t i) { return std::pow(std::abs(u[i]), p); });
  return std::pow(cv * s, 1.0 / p);
}

namespace {

// Calls f(k, j) for every forward edge (i, j = i + stride_k) with both ends in the mask.
template <class F>
double edge_sum(const GridDomain& d, F&& f) {
  const int N = d.dim();
  return det_sum(d.size(), [&](std::size_t i) {
    if (!d.in_mask(i)) return 0.0;
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
      if (d.axis_index(i, k) + 1 >= d.nodes(k)) continue;
      const std::size_t j = i + d.stride(k);
      if (!d.in_mask(j)) continue;
      s += f(i, j, k);
    }
    return s;
  });
}

}  // namespace

double dirichlet_energy(const Field& u) {
  const GridDomain& d = u.domain();
  const double cv = d.cell_volume();
  std::vector<double> invh2(d.dim());
  for (int k = 0; k < d.dim(); ++k) invh2[k] = 1.0 / (d.h(k) * d.h(k));
  return cv * edge_sum(d, [&](std::size_t i, std::size_t j, int k) {
           const double du = u[j] - u[i];
           return du * du * invh2[k];
         });
}

double dirichlet_inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const GridDomain& d = u.domain();
  const double cv = d.cell_volume();
  std::vector<double> invh2(d.dim());
  for (int k = 0; k < d.dim(); ++k) invh2[k] = 1.0 / (d.h(k) * d.h(k));
  return cv * edge_sum(d, [&](std::size_t i, std::size_t j, int k) {
           return (u[j] - u[i]) * (v[j] - v[i]) * invh2[k];
         });
}

Field neg_laplacian(const Field& u) {
  const GridDomain& d = u.domain();
  const int N = d.dim();
  std::vector<double> invh2(N);
  for (int k = 0; k < N; ++k) invh2[k] = 1.0 / (d.h(k) * d.h(k));
  Field out(u.domain_ptr());
  auto& o = out.mutable_values();
  parallel_for(d.size(), [&](std::size_t i) {
    if (!d.in_mask(i)) return;
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
      const int ik = d.axis_index(i, k);
      if (ik + 1 < d.nodes(k) && d.in_mask(i + d.stride(k))) s += (u[i] - u[i + d.stride(k)]) * invh2[k];
      if (ik > 0 && d.in_mask(i - d.stride(k))) s += (u[i] - u[i - d.stride(k)]) * invh2[k];
    }
    o[i] = s;
  });
  return out;
}

Barycenter barycenter(const Field& u) {
  const GridDomain& d = u.domain();
  const int N = d.dim();
  const double cv = d.cell_volume();
  Barycenter b;
  b.energy = dirichlet_energy(u);
  if (!(b.energy > 0.0)) throw NumericalError("barycenter of a field with zero Dirichlet energy");
  b.G.assign(N, 0.0);
  b.normalized.assign(N, 0.0);
  for (int c = 0; c < N; ++c) {
    b.G[c] = cv * edge_sum(d, [&](std::size_t i, std::size_t j, int k) {
               const double du = u[j] - u[i];
               double x = d.coord(c, d.axis_index(i, c));
               if (k == c) x += 0.5 * d.h(k);
               return x * du * du / (d.h(k) * d.h(k));
             });
    b.normalized[c] = b.G[c] / b.energy;
  }
  return b;
}

}  // namespace choquard
