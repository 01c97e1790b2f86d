#include <doctest.h>

#include <cmath>
#include <random>

#include "choquard/errors.hpp"
#include "choquard/grid.hpp"

using namespace choquard;

namespace {

Field random_field(DomainPtr d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f(d);
  auto& v = f.mutable_values();
  for (double& x : v) x = U(rng);
  f.enforce_mask();
  return f;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("lattice geometry") {
    const DomainPtr d = GridDomain::box({-1.0, 0.0, 2.0}, {2.0, 1.0, 4.0}, {9, 11, 17});
    CHECK(d->dim() == 3);
    CHECK(d->size() == 9u * 11u * 17u);
    CHECK(d->h(0) == doctest::Approx(0.25));
    CHECK(d->h(1) == doctest::Approx(0.1));
    CHECK(d->h(2) == doctest::Approx(0.25));
    const std::size_t idx = d->index_of({2, 3, 4});
    CHECK(d->axis_index(idx, 0) == 2);
    CHECK(d->axis_index(idx, 2) == 4);
    const Point x = d->point(idx);
    CHECK(x[0] == doctest::Approx(-0.5));
    CHECK(x[1] == doctest::Approx(0.3));
    CHECK(x[2] == doctest::Approx(3.0));
    // Last axis is fastest.
    CHECK(d->index_of({0, 0, 1}) == 1u);
  }

  TEST_CASE("mask excludes faces and respects shapes") {
    const DomainPtr ball = GridDomain::ball(3, 1.0, 21);
    const DomainPtr ann = GridDomain::annulus(3, 0.3, 1.0, 21);
    for (std::size_t i = 0; i < ball->size(); ++i) {
      const Point x = ball->point(i);
      const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      bool face = false;
      for (int k = 0; k < 3; ++k) face = face || ball->axis_index(i, k) == 0 || ball->axis_index(i, k) == 20;
      CHECK(ball->in_mask(i) == (!face && r < 1.0));
      CHECK(ann->in_mask(i) == (!face && r > 0.3 && r < 1.0));
    }
    CHECK(ann->mask_count() < ball->mask_count());
    CHECK(ball->mask_hash() != ann->mask_hash());
  }

  TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(GridDomain::free_space(3, 10.0, 5), ConfigError);
    CHECK_THROWS_AS(GridDomain::annulus(3, 2.0, 1.0, 16), ConfigError);
    CHECK_THROWS_AS(GridDomain::box({0.0, 0.0}, {1.0, -1.0}, {9, 9}), ConfigError);
    CHECK_THROWS_AS(GridDomain::box({0.0, 0.0}, {1.0}, {9, 9}), ConfigError);
  }

  TEST_CASE("trapezoid rule integrates multilinear functions exactly on boxes") {
    const DomainPtr d = GridDomain::box({0.0, -1.0, 0.5}, {1.0, 2.0, 1.0}, {9, 12, 10});
    const double I = integrate(*d, [](const Point& x) { return 1.0 + x[0] * x[1] + 2.0 * x[2] - x[0] * x[1] * x[2]; });
    // 2 + 0 + 2 * 2 * 1 * 1 - 0 over [0,1] x [-1,1] x [0.5,1.5]
    CHECK(I == doctest::Approx(2.0 + 4.0).epsilon(1e-13));
  }

  TEST_CASE("Dirichlet energy of a linear function") {
    const DomainPtr d = GridDomain::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {11, 11, 11});
    const Field u = Field::sample(d, [](const Point& x) { return 2.0 * x[0] - x[2]; });
    // Gradient (2, 0, -1); interior mask is the open box with 9 interior nodes per axis.
    const double h = 0.1;
    const double edges0 = 8.0 * 9.0 * 9.0;  // edges along axis 0 with both ends interior
    const double expect = h * h * h * (edges0 * 4.0 + edges0 * 1.0);
    CHECK(dirichlet_energy(u) == doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("neg_laplacian is the symmetric gradient of the Dirichlet form") {
    for (const DomainPtr& d : {GridDomain::free_space(3, 2.0, 12), GridDomain::annulus(3, 0.3, 1.0, 14)}) {
      const Field u = random_field(d, 1);
      const Field v = random_field(d, 2);
      const double a = l2_inner(neg_laplacian(u), v);
      const double b = l2_inner(u, neg_laplacian(v));
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
      CHECK(a == doctest::Approx(dirichlet_inner(u, v)).epsilon(1e-12));
      CHECK(l2_inner(neg_laplacian(u), u) == doctest::Approx(dirichlet_energy(u)).epsilon(1e-12));
      CHECK(dirichlet_energy(u) > 0.0);
    }
  }

  TEST_CASE("field arithmetic keeps the mask") {
    const DomainPtr d = GridDomain::ball(3, 1.0, 12);
    Field f = random_field(d, 3);
    const Field g = 2.0 * f - f;
    for (std::size_t i = 0; i < d->size(); ++i) {
      CHECK(g[i] == doctest::Approx(f[i]));
      if (!d->in_mask(i)) CHECK(g[i] == 0.0);
    }
    const Field p = f.positive_part();
    CHECK(p.min() >= 0.0);
    const DomainPtr other = GridDomain::ball(3, 1.0, 13);
    CHECK_THROWS_AS(f += Field(other), ConfigError);
  }

  TEST_CASE("lp norms") {
    const DomainPtr d = GridDomain::free_space(3, 2.0, 11);
    const Field one = Field::sample(d, [](const Point&) { return 1.0; });
    const double vol = static_cast<double>(d->mask_count()) * d->cell_volume();
    CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(vol)));
    CHECK(lp_norm(one, 6.0) == doctest::Approx(std::pow(vol, 1.0 / 6.0)));
  }

  TEST_CASE("barycenter of symmetric and shifted fields") {
    const DomainPtr d = GridDomain::free_space(3, 4.0, 21);
    const Field u = Field::sample(d, [](const Point& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
    const Barycenter b = barycenter(u);
    for (double c : b.normalized) CHECK(std::abs(c) < 1e-12);
    const Field v = Field::sample(d, [](const Point& x) {
      return std::exp(-((x[0] - 0.4) * (x[0] - 0.4) + x[1] * x[1] + x[2] * x[2]));
    });
    CHECK(barycenter(v).normalized[0] > 0.3);
    CHECK_THROWS_AS(barycenter(Field(d)), NumericalError);
  }

  TEST_CASE("boundary distance") {
    const DomainPtr ball = GridDomain::ball(3, 1.0, 16);
    CHECK(ball->boundary_distance({0.0, 0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(ball->boundary_distance({0.5, 0.0, 0.0}) == doctest::Approx(0.5));
    const DomainPtr ann = GridDomain::annulus(3, 0.5, 2.0, 16);
    CHECK(ann->boundary_distance({1.0, 0.0, 0.0}) == doctest::Approx(0.5));
  }
}
