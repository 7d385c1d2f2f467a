#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "skewlab/limit.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/stable.hpp"

using namespace skewlab;

TEST_SUITE("stable") {

TEST_CASE("characteristic function") {
  const StableLaw law{1.6, 0.7, -0.4};
  CHECK(stable_cf(law, 0.0) == std::complex<double>(1.0, 0.0));
  for (double t = -5.0; t <= 5.0; t += 0.37) {
    const auto v = stable_cf(law, t);
    CHECK(std::abs(v) == doctest::Approx(std::exp(-0.7 * std::pow(std::abs(t), 1.6))));
    CHECK(stable_cf(law, -t) == std::conj(v));
  }
  for (double beta : {-1.0, 0.0, 0.6}) {
    const StableLaw g{2.0, 0.3, beta};
    for (double t : {0.5, 1.0, 3.0}) {
      CHECK(stable_cf(g, t).real() == doctest::Approx(std::exp(-0.3 * t * t)).epsilon(1e-14));
      CHECK(std::abs(stable_cf(g, t).imag()) <= 1e-15);
    }
  }
}

TEST_CASE("CDF against mpmath Gil-Pelaez and scipy") {
  const StableLaw a{1.6, 1.0, 1.0};
  CHECK(stable_cdf(a, -2.0) == doctest::Approx(0.122618061714).epsilon(1e-5));
  CHECK(std::abs(stable_cdf(a, -1.0) - 0.359963956015) <= 1e-6);
  CHECK(std::abs(stable_cdf(a, 0.0) - 0.625) <= 1e-6);
  CHECK(std::abs(stable_cdf(a, 1.0) - 0.804400504666) <= 1e-6);
  CHECK(std::abs(stable_cdf(a, 3.0) - 0.940013796900) <= 1e-6);
  CHECK(std::abs(stable_cdf({4.0 / 3.0, 1.0, 1.0}, 0.0) - 0.75) <= 1e-6);
  CHECK(std::abs(stable_cdf({1.5, 1.0, -1.0}, 0.0) - 1.0 / 3.0) <= 1e-6);
  CHECK(std::abs(stable_cdf({1.5, 0.5, 0.3}, -1.0) - 0.165016272497) <= 1e-6);
  CHECK(std::abs(stable_cdf({1.5, 0.5, 0.3}, 0.5) - 0.748112354702) <= 1e-6);
  CHECK(std::abs(stable_cdf({1.7, 2.0, 0.0}, 0.0) - 0.5) <= 1e-9);
}

TEST_CASE("CDF is monotone with limits 0 and 1") {
  const StableLaw law{1.3, 1.0, -0.8};
  double prev = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.25) {
    const double f = stable_cdf(law, x);
    CHECK(f >= prev - 2e-6);
    prev = f;
  }
  CHECK(stable_cdf(law, -1e4) < 1e-3);
  CHECK(stable_cdf(law, 1e4) > 1.0 - 1e-3);
}

TEST_CASE("CDF and CF are Fourier duals") {
  const StableLaw law{1.8, 1.0, 0.5};
  const StableCdfTable table(law, -20.0, 20.0, 0.1);
  for (double t : {0.3, 1.0, 2.0}) {
    std::complex<double> phi;
    double prev = table(-80.0);
    for (double x = -80.0; x < 80.0; x += 0.01) {
      const double next = table(x + 0.01);
      const double mid = x + 0.005;
      phi += std::complex<double>(std::cos(t * mid), std::sin(t * mid)) * (next - prev);
      prev = next;
    }
    CHECK(std::abs(phi - stable_cf(law, t)) <= 1e-3);
  }
}

TEST_CASE("sampler: Gaussian reduction, reproducibility, scaling") {
  const StableLaw g{2.0, 0.8, 0.7};
  double s = 0.0, s2 = 0.0;
  constexpr int kN = 1'000'000;
  for (int i = 0; i < kN; ++i) {
    Engine rng = make_engine(21, i);
    const double v = stable_sample(g, rng);
    s += v;
    s2 += v * v;
  }
  const double mean = s / kN;
  CHECK(s2 / kN - mean * mean == doctest::Approx(1.6).epsilon(0.01));

  Engine r1 = make_engine(3, 0), r2 = make_engine(3, 0);
  const StableLaw law{1.5, 1.0, 0.2};
  for (int i = 0; i < 100; ++i) CHECK(stable_sample(law, r1) == stable_sample(law, r2));

  std::vector<double> v(200000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Engine rng = make_engine(4, i);
    v[i] = 2.5 * stable_sample(law, rng);
  }
  std::sort(v.begin(), v.end());
  const StableLaw scaled{1.5, std::pow(2.5, 1.5), 0.2};
  CHECK(cf_distance({0, v}, [&](double t) { return stable_cf(scaled, t); }, default_t_grid()) <=
        0.01);
}

TEST_CASE("theorem parameters") {
  const ParamCurve c(0.75, 0.1);
  const StableLaw law = theorem_params(c, 0.4, -0.23);
  CHECK(law.p == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(law.scale == doctest::Approx(0.11449280359095436).epsilon(1e-12));
  CHECK(law.beta == -1.0);
  const StableLaw flip = theorem_params(c, 0.4, 0.23);
  CHECK(flip.scale == law.scale);
  CHECK(flip.beta == 1.0);
  for (double am = 0.51; am < 0.99; am += 0.02) {
    const ParamCurve ci(am, std::min(0.01, (1.0 - am) / 3.0));
    CHECK(theorem_params(ci, 1.0, 0.5).scale > 0.0);
  }
  CHECK_THROWS_AS(theorem_params(ParamCurve(0.5, 0.1), 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(theorem_params(c, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("gamma at negative arguments and law validation") {
  CHECK(gamma_fn(-1.0 / 3.0) == doctest::Approx(-4.062353818279202).epsilon(1e-13));
  CHECK(gamma_fn(2.5) == doctest::Approx(1.3293403881791372).epsilon(1e-14));
  CHECK_THROWS_AS((StableLaw{1.0, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((StableLaw{1.5, 0.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((StableLaw{1.5, 1.0, 1.5}.validate()), std::invalid_argument);
}

}
