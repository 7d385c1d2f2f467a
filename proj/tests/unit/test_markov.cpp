#include <doctest.h>

#include <cmath>

#include "skewlab/markov.hpp"
#include "skewlab/rng.hpp"

using namespace skewlab;

TEST_SUITE("markov") {

TEST_CASE("X_n chain: endpoints and strict decrease") {
  const ParamCurve c(0.6, 0.1);
  const XnSequence one = xn_sequence(OmegaState::from_seed(1), 1, c);
  REQUIRE(one.values.size() == 2);
  CHECK(one.values[0] == 1.0);
  CHECK(one.values[1] == 0.5);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const OmegaState w = OmegaState::from_seed(s);
    const XnSequence seq = xn_sequence(w, 5000, c);
    for (std::size_t k = 1; k < seq.values.size(); ++k) {
      REQUIRE(seq.values[k] < seq.values[k - 1]);
    }
    CHECK(xn_value(w, 5000, c) == seq.back());
  }
}

TEST_CASE("constant exponent reduces to the 1-D backward iteration") {
  // Independent mpmath iteration of the single map, tools/oracles.py.
  const ParamCurve c(0.5, 0.0, 0.0, true);
  const OmegaState w = OmegaState::from_seed(3);
  CHECK(xn_value(w, 2, c) == doctest::Approx(0.2849201454990266).epsilon(1e-13));
  CHECK(xn_value(w, 10, c) == doctest::Approx(0.024670894104620304).epsilon(1e-12));
  CHECK(xn_value(w, 100, c) == doctest::Approx(0.0002190559955072082).epsilon(1e-11));
}

TEST_CASE("log-log slope of X_n lies between -1/alpha_min and -1/alpha_max") {
  const ParamCurve c(0.6, 0.1);
  std::vector<double> mean(4, 0.0);
  const std::vector<std::size_t> ns{1000, 3000, 10000, 30000};
  for (std::uint64_t s = 0; s < 40; ++s) {
    const XnSequence seq = xn_sequence(OmegaState::from_seed(100 + s), ns.back(), c);
    for (std::size_t i = 0; i < ns.size(); ++i) mean[i] += std::log(seq.values[ns[i]]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(static_cast<double>(ns[i])), y = mean[i] / 40.0;
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  CHECK(slope >= -1.0 / 0.6);
  CHECK(slope <= -1.0 / 0.8);
}

TEST_CASE("Y_n endpoints") {
  const ParamCurve c(0.75, 0.1);
  const OmegaState w = OmegaState::from_seed(4);
  CHECK(yn_value(w, 1, c) == 1.0);
  CHECK(yn_value(w, 2, c) == 0.75);
}

TEST_CASE("points of (Y_{n+1}, Y_n] return in exactly n steps") {
  const ParamCurve c(0.75, 0.1);
  const Observable zero{"zero", [](double, double) { return 0.0; }};
  Engine rng = make_engine(5, 0);
  for (int i = 0; i < 2000; ++i) {
    const OmegaState w = OmegaState::from_seed(derive_seed(5, i, 1));
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 60);
    const double lo = yn_value(w, n + 1, c), hi = yn_value(w, n, c);
    const double x = lo + (hi - lo) * (0.01 + 0.98 * uniform01(rng));
    CHECK(return_time({w, x}, c, zero).phi == n);
  }
  CHECK(xy_consistency_check(c, 500, 100, 6).pass);
}

TEST_CASE("return records") {
  const ParamCurve c(0.75, 0.1);
  const Observable one{"one", [](double, double) { return 1.0; }};
  const Observable x{"x", [](double, double v) { return v - 0.25; }};
  CHECK(return_time({OmegaState::from_seed(1), 0.8}, c, one).phi == 1);
  CHECK_THROWS_AS(return_time({OmegaState::from_seed(1), 0.4}, c, one),
                  std::invalid_argument);
  for (std::uint64_t s = 0; s < 500; ++s) {
    Engine rng = make_engine(s, 0);
    const SkewPoint p{OmegaState::from_seed(s), 0.5 + 0.5 * (1.0 - uniform01(rng))};
    const ReturnRecord r1 = return_time(p, c, one);
    CHECK(r1.phi >= 1);
    CHECK(r1.f_sum == static_cast<double>(r1.phi));
    CHECK(r1.label_n == r1.phi);
    const ReturnRecord rx = return_time(p, c, x);
    CHECK(rx.max_abs >= std::abs(rx.f_sum));
  }
  ReturnOptions tight;
  tight.cap = 10;
  const SkewPoint deep{OmegaState::from_seed(2), 0.5 + 1e-9};
  CHECK_THROWS_AS(return_time(deep, c, one, tight), ReturnTimeTruncated);
}

TEST_CASE("induced orbit telescopes into the full orbit") {
  const ParamCurve c(0.6, 0.1);
  const Observable ind{"y", [](double, double v) { return v > 0.5 ? 1.0 : 0.0; }};
  const Observable one{"one", [](double, double) { return 1.0; }};
  const SkewPoint p{OmegaState::from_seed(8), 0.9};
  CHECK(induced_orbit(p, c, 0, ind).empty());
  const auto recs = induced_orbit(p, c, 2000, ind);
  std::uint64_t steps = 0;
  double fy = 0.0;
  for (const auto& r : recs) steps += r.phi, fy += r.f_sum;
  CHECK(fy == 2000.0);
  CHECK(orbit(p, c, steps, ind).sum == fy);
  CHECK(orbit(p, c, steps, one).sum == static_cast<double>(steps));
  SkewPoint q = p;
  run_induced(q, c, 2000, ind);
  SkewPoint r = p;
  for (std::uint64_t k = 0; k < steps; ++k) step(r, c);
  CHECK(q.x == r.x);
  CHECK(q.omega.window() == r.omega.window());
}

TEST_CASE("geometry constants") {
  for (double am : {0.4, 0.6, 0.75}) {
    const ParamCurve c(am, 0.09);
    const GeometryConstants g = compute_geometry(c);
    CHECK(g.lambda > 1.0);
    CHECK(g.lambda < 2.0);
    CHECK(g.a * g.slope_bound + g.lambda / 4.0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.slope_bound * g.eps0 < g.min_i1);
    CHECK(std::pow(4.0, -g.q) < g.eps0);
  }
}

TEST_CASE("expansion and distortion on partition pairs") {
  const ParamCurve c(0.75, 0.1);
  const GeometryConstants g = compute_geometry(c);
  const ExpansionReport first = expansion_check(c, g, 500, 1, 1);
  CHECK(first.min_ratio >= 2.0 * (1 - 1e-9));
  const ExpansionReport e = expansion_check(c, g, 3000, 50, 2);
  CHECK(e.pass);
  CHECK(e.min_ratio >= g.lambda * (1 - 1e-9));
  const DistortionReport d = distortion_check(c, g, 60, 50, 3);
  CHECK(d.pass);
  CHECK(std::isfinite(d.sup_all));
}

TEST_CASE("distortion quotient has a finite limit as the pair merges") {
  const ParamCurve c(0.75, 0.1);
  const auto q = distortion_refinement(c, OmegaState::from_seed(4), 20,
                                       {1e-3, 1e-4, 1e-5, 1e-6, 1e-7});
  REQUIRE(q.size() == 5);
  for (double v : q) CHECK(std::isfinite(v));
  CHECK(std::abs(q[4] - q[3]) <= 0.05 * std::abs(q[3]) + 1e-9);
}

TEST_CASE("structural property checks") {
  const ParamCurve c(0.6, 0.1);
  const GeometryConstants g = compute_geometry(c);
  CHECK(partition_label_check(c, g, 3000, 1).pass);
  CHECK(admissible_curve_check(c, g, 1000, 2).pass);
  CHECK(comparison_bound_check(c).pass);
  CHECK(xn_sandwich_check(c, 10000, 20, 3).pass);
}

}
