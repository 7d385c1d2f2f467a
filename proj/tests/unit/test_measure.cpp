#include <doctest.h>

#include <cmath>

#include "skewlab/limit.hpp"
#include "skewlab/measure.hpp"

using namespace skewlab;

TEST_SUITE("measure") {

TEST_CASE("functionals of the uniform density") {
  const DensityGrid u = DensityGrid::uniform(64, 128);
  CHECK(u.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.mass_on_y() == doctest::Approx(0.5).epsilon(1e-12));
  for (double w : {1.0 / 64, 1.0 / 128, 1.0 / 32}) {
    CHECK(slice_estimate(u, w).value == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (double m : u.x_marginal()) CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
  for (double m : u.omega_marginal()) CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(u.x_marginal_cdf(0.3) == doctest::Approx(0.3).epsilon(1e-9));
  const DensityGrid coarse = u.coarsen(8, 8);
  CHECK(coarse.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coarse.n_omega() == 8);
}

TEST_CASE("merging grids is order independent; shapes must match") {
  DensityGrid a(16, 32), b(16, 32), c(16, 32);
  for (int i = 0; i < 1000; ++i) {
    a.add(i / 1000.0, std::fmod(i * 0.618, 1.0));
    b.add(std::fmod(i * 0.31, 1.0), i / 1000.0);
    c.add(0.5, std::fmod(i * 0.1, 1.0));
  }
  DensityGrid ab = a, ba = b;
  ab.merge(b);
  ab.merge(c);
  ba.merge(c);
  ba.merge(a);
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < ab.n_x(); ++j) REQUIRE(ab.weight(i, j) == ba.weight(i, j));
  }
  CHECK_THROWS_AS(a.merge(DensityGrid(8, 32)), std::invalid_argument);
  CHECK_THROWS_AS(slice_estimate(DensityGrid(16, 32)), std::runtime_error);
}

TEST_CASE("closed-form constants against high-precision evaluation") {
  const ParamCurve c75(0.75, 0.1), c60(0.6, 0.1);
  CHECK(xn_limit_constant(c75) == doctest::Approx(1.6431380424085942).epsilon(1e-12));
  CHECK(xn_limit_constant(c60) == doctest::Approx(3.8647828276095306).epsilon(1e-12));
  CHECK(constant_A(c75, 1.0) == doctest::Approx(0.8215690212042971).epsilon(1e-12));
  CHECK(constant_A(c60, 1.0) == doctest::Approx(1.9323914138047653).epsilon(1e-12));
  CHECK(constant_A(c75, 2.6) == doctest::Approx(2.0 * constant_A(c75, 1.3)).epsilon(1e-15));
  CHECK(xn_limit_constant_two_sided(c75) * std::pow(2.0, 1 / 0.75) ==
        doctest::Approx(xn_limit_constant(c75)).epsilon(1e-14));
}

TEST_CASE("mean-field X_n against an mpmath solution") {
  const ParamCurve c60(0.6, 0.1), c75(0.75, 0.1);
  CHECK(xn_mean_field(c60, 1e4) == doctest::Approx(1.0220038858201012e-06).epsilon(1e-8));
  CHECK(xn_mean_field(c75, 1e3) == doctest::Approx(0.00015547192517022726).epsilon(1e-8));
  // Frozen ratios of the scaled mean-field value to C_2 (closed form as stated and
  // two-sided form), from the same oracle.
  const double n = 1e4;
  const double scale = std::pow(n / std::sqrt(std::log(n)), 1.0 / 0.6);
  CHECK(scale * xn_mean_field(c60, n) / xn_limit_constant(c60) ==
        doctest::Approx(0.19294389978927884).epsilon(1e-7));
  CHECK(scale * xn_mean_field(c60, n) / xn_limit_constant_two_sided(c60) ==
        doctest::Approx(0.6125586989926962).epsilon(1e-7));
  CHECK_THROWS_AS(xn_mean_field(c60, 0.5), std::invalid_argument);
}

TEST_CASE("Monte Carlo X_n constant: standard error scales like samples^-1/2") {
  const ParamCurve c(0.6, 0.1);
  const auto small = xn_asymptotic_constant(c, 1000, 200, 1, 1);
  const auto large = xn_asymptotic_constant(c, 1000, 800, 2, 1);
  CHECK(small.stderr_ / large.stderr_ == doctest::Approx(2.0).epsilon(0.3));
  CHECK(large.ratio == doctest::Approx(large.mean / large.c2));
  CHECK_THROWS_AS(xn_asymptotic_constant(c, 1, 10, 1), std::invalid_argument);
}

TEST_CASE("density estimate: mass, determinism across workers, Lebesgue omega marginal") {
  const ParamCurve c(0.6, 0.1);
  DensityOptions o;
  o.n_orbits = 8;
  o.n_steps = 50000;
  o.burn_in = 1000;
  o.n_omega = 16;
  o.n_x = 32;
  o.workers = 1;
  const DensityGrid one = estimate_density(c, o);
  o.workers = 3;
  const DensityGrid three = estimate_density(c, o);
  CHECK(one.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < one.n_x(); ++j) REQUIRE(one.weight(i, j) == three.weight(i, j));
  }
  for (double m : one.omega_marginal()) CHECK(m == doctest::Approx(1.0).epsilon(0.05));
  CHECK(one.mass_on_y() > 0.0);
  CHECK(one.mass_on_y() < 0.5);
}

TEST_CASE("invariant sampling") {
  const ParamCurve c(0.6, 0.1);
  Engine r1 = make_engine(1, 0), r2 = make_engine(2, 0);
  const SkewPoint a = sample_invariant(c, r1, 100), b = sample_invariant(c, r2, 100);
  CHECK(a.x != b.x);
  for (int i = 0; i < 200; ++i) {
    const SkewPoint p = sample_invariant(c, r1, 100);
    CHECK(p.x >= 0.0);
    CHECK(p.x <= 1.0);
    CHECK(sample_invariant_in_y(c, r2, 100).x > 0.5);
  }
}

TEST_CASE("tail fit: survival non-increasing, positive amplitude") {
  const ParamCurve c(0.75, 0.1);
  TailOptions o;
  o.n_excursions = 40000;
  o.chains = 4;
  o.n_hi = 1000;
  o.grid_points = 15;
  o.workers = 1;
  const TailFit f = tail_fit(c, o);
  for (std::size_t i = 1; i < f.survival.size(); ++i) CHECK(f.survival[i] <= f.survival[i - 1]);
  CHECK(f.amplitude > 0.0);
  CHECK(f.exponent > 1.0);
  CHECK(f.m_y == doctest::Approx(1.0 / f.mean_phi));
}

}
