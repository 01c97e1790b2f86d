#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "choquard/errors.hpp"
#include "choquard/functionals.hpp"
#include "choquard/testfamily.hpp"

using namespace choquard;

namespace {

double norm(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// R = 2 annulus with h = 1/4; the inner hole is below the lattice spacing.
struct SmallSweep {
  Params p = Params::make(3, 1.0);
  RieszOperator op{p, GridDomain::annulus(3, 1.0 / 8.0, 8.0, 65)};
  FamilySweep s = sweep(2.0, op, {12, 8, true});
};

const SmallSweep& small_sweep() {
  static const SmallSweep s;
  return s;
}

}  // namespace

TEST_SUITE("testfamily") {
  TEST_CASE("sphere samples are unit and antipodal") {
    for (auto [N, count] : {std::pair{3, 12}, std::pair{3, 20}, std::pair{4, 16}, std::pair{5, 10}}) {
      const std::vector<Point> s = sphere_samples(N, count);
      REQUIRE(static_cast<int>(s.size()) == count);
      for (const Point& x : s) {
        CHECK(x.size() == static_cast<std::size_t>(N));
        CHECK(norm(x) == doctest::Approx(1.0).epsilon(1e-14));
        bool paired = false;
        for (const Point& y : s) {
          Point z(N);
          for (int k = 0; k < N; ++k) z[k] = x[k] + y[k];
          paired = paired || norm(z) < 1e-14;
        }
        CHECK(paired);
      }
    }
    CHECK(sphere_samples(3, 12) == sphere_samples(3, 12));
    CHECK_THROWS_AS(sphere_samples(3, 7), ConfigError);
    CHECK_THROWS_AS(sphere_samples(3, 0), ConfigError);
  }

  TEST_CASE("t samples") {
    const std::vector<double> t = family_ts(10);
    REQUIRE(t.size() == 10u);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == doctest::Approx(1.0 - kTCap));
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] - t[i - 1] == doctest::Approx(t[1] - t[0]));
  }

  TEST_CASE("sweep symmetries") {
    const FamilySweep& s = small_sweep().s;
    REQUIRE(s.quotients.size() == 8u);
    REQUIRE(s.sigmas.size() == 12u);
    double sup = 0.0;
    for (const auto& row : s.quotients) {
      for (double q : row) sup = std::max(sup, q);
    }
    CHECK(s.supQuotient == sup);
    // t = 0: every direction gives the same member.
    for (double q : s.quotients[0]) CHECK(q == doctest::Approx(s.quotients[0][0]).epsilon(1e-10));
    // The lattice is symmetric under x -> -x.
    for (std::size_t i = 0; i < s.sigmas.size(); ++i) {
      for (std::size_t j = 0; j < s.sigmas.size(); ++j) {
        if (norm({s.sigmas[i][0] + s.sigmas[j][0], s.sigmas[i][1] + s.sigmas[j][1], s.sigmas[i][2] + s.sigmas[j][2]}) > 1e-12) continue;
        for (std::size_t t = 0; t < s.ts.size(); ++t) {
          CHECK(s.quotients[t][i] == doctest::Approx(s.quotients[t][j]).epsilon(1e-10));
          CHECK(s.dirichletGaps[t][i] == doctest::Approx(s.dirichletGaps[t][j]).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("sweep entries match direct evaluation") {
    const SmallSweep& ss = small_sweep();
    for (std::size_t t : {std::size_t{0}, std::size_t{3}}) {
      const TruncatedFamily tf = build_truncated_family(ss.s.sigmas[1], ss.s.ts[t], CutoffSpec{2.0}, ss.op);
      CHECK(ss.s.quotients[t][1] == doctest::Approx(quotient(tf.g, ss.op)).epsilon(1e-12));
    }
  }

  TEST_CASE("resolved members sit above the empirical floor") {
    // Members whose scale 1 - t is below the spacing are not resolved by the lattice.
    const SmallSweep& ss = small_sweep();
    const RieszOperator box(ss.p, GridDomain::free_space(3, 16.0, 65));
    const EmpiricalShl e = empirical_shl(2.0, box);
    CHECK(e.scale == doctest::Approx(0.25));
    CHECK(e.value == doctest::Approx(*std::min_element(e.quotients.begin(), e.quotients.end())));
    const double h = ss.op.domain()->h(0);
    for (std::size_t t = 0; t < ss.s.ts.size(); ++t) {
      if (1.0 - ss.s.ts[t] < h) continue;
      for (double q : ss.s.quotients[t]) CHECK(q >= e.value * (1.0 - 1e-12));
    }
  }

  TEST_CASE("family norms are nearly constant along resolved t") {
    const SmallSweep& ss = small_sweep();
    const double n0 = build_truncated_family({0.0, 0.0, 1.0}, 0.0, CutoffSpec{2.0}, ss.op).gNorm;
    for (double t : {0.2, 0.4}) {
      const double n = build_truncated_family({0.0, 0.0, 1.0}, t, CutoffSpec{2.0}, ss.op).gNorm;
      CHECK(n == doctest::Approx(n0).epsilon(0.05));
    }
  }

  TEST_CASE("sweep input checks") {
    const Params p = Params::make(3, 1.0);
    const RieszOperator ann(p, GridDomain::annulus(3, 1.0 / 8.0, 8.0, 33));
    CHECK_THROWS_AS(sweep(2.0, ann), ConfigError);  // hole not resolved
    CHECK_THROWS_AS(sweep(3.0, ann, {12, 8, true}), ConfigError);
    CHECK_THROWS_AS(sweep(2.0, ann, {4, 8, true}), ConfigError);
    CHECK_THROWS_AS(sweep(2.0, ann, {12, 4, true}), ConfigError);
    const RieszOperator box(p, GridDomain::free_space(3, 16.0, 33));
    CHECK_THROWS_AS(sweep(2.0, box, {12, 8, true}), ConfigError);
  }

  TEST_CASE("log-log slope") {
    CHECK(loglog_slope({1.0, 2.0, 4.0}, {3.0, 0.75, 0.1875}) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(loglog_slope({1.0, 2.0}, {1.0, 0.0}), NumericalError);
  }

  TEST_CASE("truncation errors decay with R") {
    const Params p = Params::make(3, 1.0);
    const TruncationCurve c = truncation_error_curve(0.0, {1.0, 0.0, 0.0}, {4.0, 8.0, 16.0}, 64, p);
    REQUIRE(c.records.size() == 3u);
    CHECK(c.records[1].h == doctest::Approx(2.0 * c.records[0].h));
    CHECK(c.dirichletSlope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(c.nlSlope < -2.0);
    for (const auto& r : c.records) {
      CHECK(r.dirichletGap > 0.0);
      CHECK(r.nlGap > 0.0);
    }
  }
}
