#include <doctest.h>

#include <cmath>
#include <random>

#include "choquard/closed_forms.hpp"
#include "choquard/errors.hpp"
#include "choquard/functionals.hpp"

using namespace choquard;

TEST_SUITE("closed_forms") {
  TEST_CASE("bubble profile") {
    const Params p = Params::make(3, 1.0);
    const BubbleSpec b{{1.0, 0.0, 0.0}, 0.5, 2.0};
    CHECK(eval_bubble(b, p, {1.0, 0.0, 0.0}) == doctest::Approx(2.0 / std::sqrt(0.5)));
    CHECK(eval_bubble(b, p, {1.0, 0.5, 0.0}) == doctest::Approx(2.0 * std::sqrt(0.5 / 0.5)));
    const Params p5 = Params::make(5, 1.0);
    const BubbleSpec c{{0.0, 0.0, 0.0, 0.0, 0.0}, 2.0, 1.0};
    CHECK(eval_bubble(c, p5, {0.0, 0.0, 0.0, 0.0, 2.0}) == doctest::Approx(std::pow(0.25, 1.5)));
    CHECK_THROWS_AS(sample_bubble(BubbleSpec{{0.0, 0.0}, 1.0, 1.0}, p, GridDomain::free_space(3, 2.0, 9)), ConfigError);
    CHECK_THROWS_AS(BubbleSpec({0.0, 0.0, 0.0}, -1.0, 1.0).validate(3), ConfigError);
  }

  TEST_CASE("family members") {
    const BubbleSpec b = BubbleSpec::from_family({0.0, 0.6, 0.8}, 0.25, 1.5);
    CHECK(b.scale == doctest::Approx(0.75));
    CHECK(b.center[1] == doctest::Approx(0.15));
    CHECK(b.center[2] == doctest::Approx(0.2));
    CHECK(b.amplitude == 1.5);
    CHECK_THROWS_AS(BubbleSpec::from_family({1.0, 1.0, 0.0}, 0.2, 1.0), ConfigError);
    CHECK_THROWS_AS(BubbleSpec::from_family({1.0, 0.0, 0.0}, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(BubbleSpec::from_family({1.0, 0.0, 0.0}, -0.1, 1.0), ConfigError);
    CHECK_NOTHROW(BubbleSpec::from_family({1.0, 0.0, 0.0}, 1.0 - kTCap, 1.0));
  }

  TEST_CASE("smooth step and cutoff") {
    CHECK(smooth_step(-1.0) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
    CHECK(smooth_step(1.0) == 1.0);
    for (double s = 0.05; s < 1.0; s += 0.05) {
      CHECK(smooth_step(s) + smooth_step(1.0 - s) == doctest::Approx(1.0));
      CHECK(smooth_step(s) > smooth_step(s - 0.05));
    }
    const CutoffSpec c{8.0};
    CHECK(eval_cutoff_radius(c, 0.0) == 0.0);
    CHECK(eval_cutoff_radius(c, 1.0 / 32.0) == 0.0);
    CHECK(eval_cutoff_radius(c, 1.0 / 16.0) == 1.0);
    CHECK(eval_cutoff_radius(c, 1.0) == 1.0);
    CHECK(eval_cutoff_radius(c, 16.0) == 1.0);
    CHECK(eval_cutoff_radius(c, 24.0) == doctest::Approx(0.5));
    CHECK(eval_cutoff_radius(c, 32.0) == 0.0);
    double prev = 1.0;
    for (double r = 16.0; r <= 32.0; r += 0.5) {
      const double v = eval_cutoff_radius(c, r);
      CHECK(v <= prev);
      CHECK(v >= 0.0);
      prev = v;
    }
    CHECK(eval_cutoff(c, {3.0, 4.0, 0.0}) == eval_cutoff_radius(c, 5.0));
    CHECK_THROWS_AS(CutoffSpec{1.0}.validate(), ConfigError);
  }

  TEST_CASE("truncated family is normalized") {
    const Params p = Params::make(3, 1.0);
    const DomainPtr d = GridDomain::annulus(3, 1.0 / 8.0, 8.0, 49);
    const RieszOperator op(p, d);
    const TruncatedFamily tf = build_truncated_family({1.0, 0.0, 0.0}, 0.3, CutoffSpec{2.0}, op);
    CHECK(nl_norm(tf.f, op) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(nl_norm(tf.g, op) == doctest::Approx(tf.gNorm).epsilon(1e-12));
    CHECK(tf.g.min() >= 0.0);
  }

  TEST_CASE("fit recovers an exact bubble") {
    const Params p = Params::make(3, 1.0);
    const DomainPtr d = GridDomain::free_space(3, 6.0, 41);
    const BubbleSpec truth{{0.3, -0.2, 0.1}, 0.7, 1.3};
    const FitResult r = fit_bubble(sample_bubble(truth, p, d), p);
    CHECK(r.converged);
    CHECK(r.residual < 1e-8);
    CHECK(r.spec.scale == doctest::Approx(0.7).epsilon(1e-7));
    CHECK(r.spec.amplitude == doctest::Approx(1.3).epsilon(1e-7));
    for (int k = 0; k < 3; ++k) CHECK(r.spec.center[k] == doctest::Approx(truth.center[k]).epsilon(1e-7));
  }

  TEST_CASE("fit with a background offset") {
    const Params p = Params::make(3, 1.0);
    const DomainPtr d = GridDomain::free_space(3, 6.0, 41);
    const BubbleSpec truth{{0.0, 0.5, 0.0}, 0.4, 1.0};
    Field u = sample_bubble(truth, p, d);
    const Field bg = Field::sample(d, [](const Point&) { return 0.2; });
    u += bg;
    FitOptions o;
    o.fitBackground = true;
    o.windowHalfWidth = 2.0;
    o.windowCenter = Point{0.0, 0.5, 0.0};
    const FitResult r = fit_bubble(u, p, o);
    CHECK(r.converged);
    CHECK(r.background == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(r.spec.scale == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(fit_bubble(u, p).residual > 1e-3);
  }

  TEST_CASE("fit rejects unusable input") {
    const Params p = Params::make(3, 1.0);
    const DomainPtr d = GridDomain::free_space(3, 2.0, 11);
    CHECK_THROWS_AS(fit_bubble(Field(d), p), ConfigError);
    CHECK_THROWS_AS(fit_bubble(Field(d), Params::make(4, 1.0)), ConfigError);
  }

  TEST_CASE("bubble check separates bubbles from other shapes") {
    const Params p = Params::make(3, 1.0);
    const DomainPtr d = GridDomain::free_space(3, 8.0, 49);
    const BubbleCheck yes = bubble_check(sample_bubble({{0.2, 0.0, 0.0}, 0.6, 1.0}, p, d), p);
    CHECK(yes.isBubble);
    CHECK(yes.radialSpread < 0.02);
    const Field gauss = Field::sample(d, [](const Point& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
    const BubbleCheck g = bubble_check(gauss, p);
    CHECK_FALSE(g.isBubble);
    CHECK(g.fit.residual > 0.05);
    const Field aniso = Field::sample(d, [](const Point& x) { return 1.0 / std::sqrt(0.4 + x[0] * x[0] + 4.0 * x[1] * x[1] + x[2] * x[2]); });
    CHECK_FALSE(bubble_check(aniso, p).isBubble);
  }
}
