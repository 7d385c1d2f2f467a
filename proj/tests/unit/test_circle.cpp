#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "skewlab/circle.hpp"
#include "skewlab/rng.hpp"

using namespace skewlab;

TEST_SUITE("circle") {

TEST_CASE("same seed gives the same digit stream") {
  OmegaState a = OmegaState::from_seed(7), b = OmegaState::from_seed(7);
  for (int k = 0; k < 1000; ++k) {
    REQUIRE(a.window() == b.window());
    a.advance();
    b.advance();
  }
  CHECK(OmegaState::from_seed(7).window() != OmegaState::from_seed(8).window());
}

TEST_CASE("leading digits of 10^6 seeds fall in 4 sigma binomial bands") {
  std::array<int, 4> counts{};
  constexpr int kSeeds = 1'000'000;
  for (int s = 0; s < kSeeds; ++s) {
    const OmegaState w = OmegaState::from_seed(derive_seed(3, s));
    ++counts[static_cast<std::size_t>(w.digit(0))];
    CHECK_FALSE((w.value() < 0.0 || w.value() >= 1.0));
  }
  const double sigma = std::sqrt(kSeeds * 0.25 * 0.75);
  for (int c : counts) CHECK(std::abs(c - kSeeds / 4.0) <= 4.0 * sigma);
}

TEST_CASE("fixed points 0 and 1/3") {
  const std::array<std::uint8_t, 1> zero{0}, one{1};
  OmegaState a = OmegaState::periodic(zero), b = OmegaState::periodic(one);
  CHECK(b.value() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (int k = 0; k < 100; ++k) {
    a.advance();
    b.advance();
  }
  CHECK(a.value() == 0.0);
  CHECK(b.value() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("advancing drops the leading digit") {
  const std::array<std::uint8_t, 3> prefix{2, 0, 3};
  OmegaState w = OmegaState::from_digits(prefix, DigitSource::random(1));
  CHECK(w.digit(0) == 2);
  const double before = w.value();
  w.advance();
  CHECK(w.digit(0) == 0);
  CHECK(w.digit(1) == 3);
  const double expect = 4.0 * before - std::floor(4.0 * before);
  CHECK(std::abs(w.value() - expect) <= 5.0 * std::ldexp(1.0, -53));
}

TEST_CASE("shift consistency on random states") {
  for (std::uint64_t s = 0; s < 2000; ++s) {
    OmegaState w = OmegaState::from_seed(s);
    for (int k = 0; k < 40; ++k) w.advance();
    const OmegaState next = w.advanced();
    for (int i = 0; i + 1 < OmegaState::kWindowDigits; ++i) {
      REQUIRE(next.digit(i) == w.digit(i + 1));
    }
    const double f = 4.0 * w.value();
    CHECK(std::abs(next.value() - (f - std::floor(f))) <= 5.0 * std::ldexp(1.0, -53));
  }
}

TEST_CASE("orbits never collapse: 10^6 steps of a periodic point") {
  // Period (2, 0, 3) is the point 35/63; every third iterate returns to it.
  const std::array<std::uint8_t, 3> period{2, 0, 3};
  OmegaState w = OmegaState::periodic(period);
  const double start = w.value();
  for (int k = 0; k < 999'999; ++k) w.advance();
  CHECK(w.value() == start);
  CHECK(start == doctest::Approx(35.0 / 63.0).epsilon(1e-15));
}

TEST_CASE("from_value keeps the binary expansion") {
  const OmegaState w = OmegaState::from_value(0.8125);
  CHECK(w.value() == 0.8125);
  CHECK(w.advanced().value() == 0.25);
  CHECK(w.advanced().advanced().value() == 0.0);
}

TEST_CASE("curve: minimum, antipode, second derivative, range") {
  const ParamCurve c(0.75, 0.1, 0.2);
  CHECK(c(0.2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(c(0.7) == doctest::Approx(0.95).epsilon(1e-15));
  const double h = 1e-4;
  const double fd = (c(0.2 + h) - 2.0 * c(0.2) + c(0.2 - h)) / (h * h);
  CHECK(fd == doctest::Approx(4.0 * std::numbers::pi * std::numbers::pi * 0.1).epsilon(1e-6));
  CHECK(c.second_derivative() > 0.0);
  double best = 2.0, arg = -1.0;
  for (int i = 0; i < 100000; ++i) {
    const double w = i / 100000.0;
    const double a = c(w);
    REQUIRE(a >= c.alpha_min());
    REQUIRE(a <= c.alpha_max());
    if (a < best) best = a, arg = w;
  }
  CHECK(best == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(arg == doctest::Approx(0.2).epsilon(1e-5));
}

TEST_CASE("curve constraints") {
  CHECK_THROWS_AS(ParamCurve(0.6, 0.15), std::invalid_argument);
  CHECK_NOTHROW(ParamCurve(0.6, 0.15, 0.0, true));
  CHECK_THROWS_AS(ParamCurve(0.9, 0.06, 0.0, true), std::invalid_argument);
  CHECK_THROWS_AS(ParamCurve(0.6, 0.0), std::invalid_argument);
  CHECK_NOTHROW(ParamCurve(0.6, 0.0, 0.0, true));
  CHECK_THROWS_AS(ParamCurve(0.0, 0.0, 0.0, true), std::invalid_argument);
}

TEST_CASE("Laplace moment against the Bessel closed form") {
  // E exp(-eps w (1 + sin)) = exp(-eps w) I_0(eps w); values from tools/oracles.py.
  const ParamCurve c(0.75, 0.1);
  CHECK(laplace_moment(c, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(laplace_moment(c, 1.0) == doctest::Approx(0.9071009257823011).epsilon(1e-9));
  CHECK(laplace_moment(c, 10.0) == doctest::Approx(0.46575960759364043).epsilon(1e-9));
  CHECK(laplace_moment(c, 100.0) == doctest::Approx(0.1278333371634286).epsilon(1e-9));
  CHECK(laplace_moment(c, 1e4) == doctest::Approx(0.012617240455891257).epsilon(1e-8));
  double prev = 2.0;
  for (double w = 0.0; w <= 2000.0; w += 7.3) {
    const double v = laplace_moment(c, w);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("Laplace moment approaches the two-sided asymptote") {
  const ParamCurve c(0.75, 0.1);
  // Both sides of the minimum contribute, so the one-sided form is half the
  // true asymptote.
  CHECK(laplace_moment(c, 1e4) / laplace_asymptote(c, 1e4) ==
        doctest::Approx(1.0).epsilon(0.02));
  CHECK(laplace_moment(c, 1e4) / laplace_asymptote_one_sided(c, 1e4) ==
        doctest::Approx(2.0).epsilon(0.02));
  const double limit = laplace_asymptote(c, 1.0);
  double prev_gap = 1e9;
  for (double w : {1e2, 1e3, 1e4, 1e5}) {
    const double scaled = laplace_moment(c, w) * std::sqrt(w);
    const double gap = std::abs(scaled - limit);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap / limit < 1e-3);
}

}
