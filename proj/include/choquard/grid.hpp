#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "choquard/parallel.hpp"

namespace choquard {

using Point = std::vector<double>;

enum class DomainKind { Box, Ball, Annulus, HalfSpaceTrunc, FreeSpaceTrunc };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Geometry parameters; only the fields of the active kind are read.
struct DomainShape {
  DomainKind kind = DomainKind::Box;
  double radius = 0.0;  // Ball
  double r1 = 0.0;      // Annulus
  double r2 = 0.0;      // Annulus
  double depth = 0.0;   // HalfSpaceTrunc, last axis spans [0, depth]
  double L = 0.0;       // FreeSpaceTrunc, lattice [-L/2, L/2]^N
};

/// Uniform tensor lattice with a Dirichlet mask. Nodes are stored row-major
/// with the last axis fastest. The mask is false on every lattice face.
class GridDomain {
 public:
  GridDomain(DomainShape shape, Point origin, std::vector<double> extent, std::vector<int> nodes);

  static std::shared_ptr<const GridDomain> box(Point origin, std::vector<double> extent,
                                               std::vector<int> nodes);
  /// Lattice [-halfWidth, halfWidth]^N; halfWidth defaults to the radius.
  static std::shared_ptr<const GridDomain> ball(int N, double radius, int nodes,
                                                double halfWidth = 0.0);
  /// Lattice [-halfWidth, halfWidth]^N; halfWidth defaults to r2.
  static std::shared_ptr<const GridDomain> annulus(int N, double r1, double r2, int nodes,
                                                   double halfWidth = 0.0);
  /// Lateral axes span [-lateral/2, lateral/2], the last axis [0, depth].
  static std::shared_ptr<const GridDomain> half_space(int N, double lateral, double depth,
                                                      std::vector<int> nodes);
  static std::shared_ptr<const GridDomain> free_space(int N, double L, int nodes);

  int dim() const { return static_cast<int>(nodes_.size()); }
  std::size_t size() const { return size_; }
  int nodes(int axis) const { return nodes_[axis]; }
  const std::vector<int>& nodes() const { return nodes_; }
  double h(int axis) const { return h_[axis]; }
  double min_h() const;
  double max_h() const;
  double origin(int axis) const { return origin_[axis]; }
  const Point& origin() const { return origin_; }
  double extent(int axis) const { return extent_[axis]; }
  const std::vector<double>& extent() const { return extent_; }
  std::size_t stride(int axis) const { return strides_[axis]; }
  double coord(int axis, int i) const { return origin_[axis] + i * h_[axis]; }
  int axis_index(std::size_t idx, int axis) const {
    return static_cast<int>((idx / strides_[axis]) % static_cast<std::size_t>(nodes_[axis]));
  }
  Point point(std::size_t idx) const;
  void point(std::size_t idx, double* out) const;
  std::size_t index_of(const std::vector<int>& multi) const;

  bool in_mask(std::size_t idx) const { return mask_[idx] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  std::size_t mask_count() const { return maskCount_; }
  /// Nodes whose 2N lattice neighbours are all in the mask.
  const std::vector<std::uint8_t>& core() const { return core_; }
  bool is_box_mask() const;

  double cell_volume() const { return cellVolume_; }
  double trapezoid_weight(std::size_t idx) const;
  /// Distance from x to the complement of the open domain (faces included).
  double boundary_distance(const Point& x) const;

  const DomainShape& shape() const { return shape_; }
  std::uint64_t mask_hash() const { return maskHash_; }
  /// Same lattice and mask.
  bool same_layout(const GridDomain& other) const;

 private:
  DomainShape shape_;
  Point origin_;
  std::vector<double> extent_;
  std::vector<int> nodes_;
  std::vector<double> h_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> core_;
  std::size_t maskCount_ = 0;
  double cellVolume_ = 0.0;
  std::uint64_t maskHash_ = 0;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Node values on a GridDomain, zero at every node outside the mask.
class Field {
 public:
  explicit Field(DomainPtr domain);
  Field(DomainPtr domain, std::vector<double> values);

  template <class F>
  static Field sample(DomainPtr domain, F&& f) {
    Field out(domain);
    const GridDomain& d = *domain;
    parallel_for(d.size(), [&](std::size_t i) {
      if (!d.in_mask(i)) return;
      out.values_[i] = f(d.point(i));
    });
    return out;
  }

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  /// Raw access; callers must keep off-mask nodes at zero or call enforce_mask().
  std::vector<double>& mutable_values() { return values_; }
  void enforce_mask();

  double max() const;
  double min() const;
  double max_abs() const;
  Field positive_part() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double c);
  /// this += a * x
  Field& axpy(double a, const Field& x);

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);

/// Throws ConfigError unless both fields live on the same lattice and mask.
void require_same_grid(const Field& a, const Field& b);

/// Tensor-product trapezoid rule. On box-like masks the closure (faces
/// included) is integrated, so constants integrate exactly; on ball and
/// annulus masks only mask nodes contribute.
double integrate(const GridDomain& domain, const std::function<double(const Point&)>& expr);
/// Trapezoid quadrature of the field values.
double integrate(const Field& u);
/// Sum over mask nodes of cell_volume * a * b.
double l2_inner(const Field& a, const Field& b);
double lp_norm(const Field& u, double p);

/// Sum over lattice edges with both ends in the mask of cell_volume * (du/h)^2.
double dirichlet_energy(const Field& u);
double dirichlet_inner(const Field& u, const Field& v);
/// Graph Laplacian of the mask edge set: the exact L2 gradient of
/// dirichlet_energy / 2 divided by the cell volume.
Field neg_laplacian(const Field& u);

struct Barycenter {
  Point G;           // integral of x |grad u|^2
  Point normalized;  // G / dirichlet energy
  double energy = 0.0;
};

/// Energy density is placed at edge midpoints. Throws NumericalError on zero energy.
Barycenter barycenter(const Field& u);

}  // namespace choquard
