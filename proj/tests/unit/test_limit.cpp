#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "skewlab/limit.hpp"
#include "skewlab/measure.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/stable.hpp"

using namespace skewlab;

namespace {

EmpiricalLaw law_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return {0, std::move(v)};
}

CenteringOptions quick_centering() {
  CenteringOptions o;
  o.orbits = 8;
  o.steps = 100000;
  o.burn_in = 1000;
  o.workers = 1;
  return o;
}

}  // namespace

TEST_SUITE("limit") {

TEST_CASE("observable ids") {
  CHECK(observable_by_id("x2")(0.3, 0.5) == 0.25);
  CHECK_THROWS_AS(observable_by_id("nope"), ConfigError);
}

TEST_CASE("regime classification") {
  const auto opts = quick_centering();
  const ParamCurve small(0.4, 0.05), stable(0.75, 0.1), mid(0.6, 0.1), half(0.5, 0.1);
  CHECK(classify_regime(small, center(small, observable_by_id("x"), opts)).regime ==
        Regime::kCltSmallAlpha);
  CHECK(classify_regime(small, center(small, observable_by_id("sin_omega"), opts)).regime ==
        Regime::kCltSmallAlpha);
  const CenteredObservable fs = center(stable, observable_by_id("x"), opts);
  const RegimeSpec s = classify_regime(stable, fs);
  CHECK(s.regime == Regime::kStable);
  CHECK(s.c == doctest::Approx(-fs.mean_raw).epsilon(1e-9));
  // g(x) = x^2 centred along the profile x keeps f(omega, 0) = 0.
  const CenteredObservable g =
      center_with_profile(mid, observable_by_id("x2"), observable_by_id("x"), opts);
  const RegimeSpec z = classify_regime(mid, g);
  CHECK(z.regime == Regime::kCltCZero);
  CHECK(z.c_is_zero);
  CHECK(g(0.37, 0.0) == 0.0);
  const RegimeSpec h = classify_regime(half, center_known(half, observable_by_id("zero"), 0.0));
  CHECK(h.regime == Regime::kCltCZero);
  CHECK(h.ambiguous);
  CHECK(classify_regime(half, center(half, observable_by_id("x"), opts)).regime ==
        Regime::kNonstandard);
  CHECK(regime_name(Regime::kCltSmallAlpha) == "CLT_SMALL_ALPHA");
  CHECK(regime_name(Regime::kStable) == "STABLE");
}

TEST_CASE("centred observable has empirical mean within 3 standard errors") {
  const ParamCurve c(0.4, 0.05);
  auto opts = quick_centering();
  const CenteredObservable f = center(c, observable_by_id("x"), opts);
  opts.seed = 99;
  const CenteredObservable again = center(c, [&] {
    Observable o{"centred", [f](double w, double x) { return f(w, x); }};
    return o;
  }(), opts);
  CHECK(std::abs(again.mean_raw) <= 3.0 * std::max(again.mean_stderr, f.mean_stderr));
}

TEST_CASE("normalizers") {
  RegimeSpec clt;
  clt.regime = Regime::kCltSmallAlpha;
  CHECK(normalizer(clt, 1e4) == doctest::Approx(100.0).epsilon(1e-15));
  RegimeSpec st;
  st.regime = Regime::kStable;
  st.alpha_min = 0.75;
  CHECK(normalizer(st, std::exp(4.0)) ==
        doctest::Approx(std::exp(3.0) * std::sqrt(3.0)).epsilon(1e-13));
  // B_2n / B_n = 2^a sqrt(1 + ln 2 / ln n): the slowly varying factor keeps
  // it 2.5% above 2^a at n = 2^20 and within 1% only from about n = 2^50.
  double prev_gap = 1.0;
  for (int e : {10, 20, 30, 40, 50, 60}) {
    const double n = std::ldexp(1.0, e);
    const double ratio = normalizer(st, 2 * n) / normalizer(st, n);
    CHECK(ratio == doctest::Approx(std::pow(2.0, 0.75) *
                                   std::sqrt(1.0 + std::log(2.0) / std::log(n)))
                       .epsilon(1e-12));
    const double gap = ratio / std::pow(2.0, 0.75) - 1.0;
    CHECK(gap < prev_gap);
    prev_gap = gap;
    if (e >= 50) CHECK(gap < 0.01);
  }
  RegimeSpec ns;
  ns.regime = Regime::kNonstandard;
  ns.alpha_min = 0.5;
  ns.c = 0.0;
  ns.c_is_zero = true;
  ns.a_const = 1.0;
  CHECK_THROWS_AS(normalizer(ns, 100.0), ConfigError);
  ns.c = 0.5;
  ns.c_is_zero = false;
  ns.a_const.reset();
  CHECK_THROWS_AS(normalizer(ns, 100.0), ConfigError);
  ns.a_const = 2.0;
  const double l = std::log(100.0);
  CHECK(normalizer(ns, 100.0) == doctest::Approx(std::sqrt(0.25 * 2.0 / 4.0 * 100 * l * l)));
  CHECK_THROWS_AS(normalizer(clt, 1.0), ConfigError);
}

TEST_CASE("stable target degenerates as c tends to zero") {
  const ParamCurve c(0.75, 0.1);
  double prev = 1e9;
  for (double cv : {0.5, 0.1, 0.01, 1e-4}) {
    const double s = theorem_params(c, 0.4, cv).scale;
    CHECK(s < prev);
    prev = s;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("ensembles: zero observable, sorting, worker independence") {
  const ParamCurve c(0.4, 0.05);
  RegimeSpec clt;
  EnsembleOptions o;
  o.burn_in = 500;
  o.workers = 1;
  const auto zero = birkhoff_ensemble(c, center_known(c, observable_by_id("zero"), 0.0), clt,
                                      100, 200, o);
  for (double v : zero.samples) CHECK(v == 0.0);
  const CenteredObservable f = center_known(c, observable_by_id("x"), 0.3);
  const auto one = birkhoff_ensembles(c, f, clt, {64, 256}, 300, o);
  o.workers = 4;
  const auto four = birkhoff_ensembles(c, f, clt, {256, 64}, 300, o);
  REQUIRE(one.size() == 2);
  CHECK(std::is_sorted(one[1].samples.begin(), one[1].samples.end()));
  CHECK(one[0].samples == four[1].samples);
  CHECK(one[1].samples == four[0].samples);
  for (double v : one[1].samples) CHECK(std::abs(v) <= 256 * 1.0 / std::sqrt(256.0));
}

TEST_CASE("KS distance") {
  std::vector<double> q(1000);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = (i + 0.5) / 1000.0;
  const EmpiricalLaw u = law_of(q);
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_distance(u, uniform) == doctest::Approx(0.0005).epsilon(1e-9));
  const auto self = [&](double x) {
    return static_cast<double>(std::upper_bound(q.begin(), q.end(), x) - q.begin()) / 1000.0;
  };
  CHECK(ks_distance(u, self) <= 1.0 / 1000.0 + 1e-15);
  std::vector<double> shifted = q;
  for (double& v : shifted) v += 10.0;
  CHECK(ks_distance(law_of(shifted), uniform) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ks_distance(law_of(std::vector<double>(50, 0.0)), uniform),
                  std::invalid_argument);

  std::vector<double> a(100), b(100);
  for (int i = 0; i < 100; ++i) a[i] = i, b[i] = i + 50;
  CHECK(ks_two_sample(law_of(a), law_of(b)) == doctest::Approx(0.5));
  CHECK(ks_two_sample(law_of(a), law_of(a)) == 0.0);
}

TEST_CASE("KS of 10^6 normal draws against the normal CDF") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, std::sqrt(2.0));
  std::vector<double> v(1'000'000);
  for (double& x : v) x = n(rng);
  CHECK(ks_distance(law_of(std::move(v)), [](double x) { return normal_cdf(x, 2.0); }) <= 0.005);
  CHECK(normal_cdf(1.0, 2.0) == doctest::Approx(0.7602499389065233).epsilon(1e-14));
  CHECK(normal_cdf(0.0, 3.0) == 0.5);
}

TEST_CASE("CF distance") {
  const EmpiricalLaw zero = law_of(std::vector<double>(200, 0.0));
  const auto grid = default_t_grid();
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(10.0));
  CHECK(cf_distance(zero, [](double) { return std::complex<double>(1.0, 0.0); }, grid) == 0.0);
  const auto normal = [](double t) { return std::complex<double>(std::exp(-0.5 * t * t), 0.0); };
  CHECK(cf_distance(zero, normal, {0.0}) == 0.0);
  CHECK(cf_distance(zero, normal, grid) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(default_t_grid(11.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(default_t_grid(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("stable samples against their own CF") {
  const StableLaw law{4.0 / 3.0, 1.0, 1.0};
  std::vector<double> v(1'000'000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Engine rng = make_engine(5, i);
    v[i] = stable_sample(law, rng);
  }
  std::vector<double> grid;
  for (double t = 0.0; t <= 10.0; t += 0.25) grid.push_back(t);
  CHECK(cf_distance(law_of(std::move(v)), [&](double t) { return stable_cf(law, t); }, grid) <=
        0.01);
}

TEST_CASE("variance estimates: zero, coboundary, plateau") {
  const ParamCurve c(0.4, 0.05);
  EnsembleOptions o;
  o.burn_in = 1000;
  o.workers = 1;
  const auto zero = variance_estimate(c, center_known(c, observable_by_id("zero"), 0.0),
                                      {100, 200}, 200, o);
  CHECK(zero.sigma2 == 0.0);
  // f = g - g o T with g(omega, x) = x telescopes to |S_n f| <= 1.
  const Observable cob{"coboundary", [c](double w, double x) { return x - t_alpha(x, c(w)); }};
  const auto v = variance_estimate(c, center_known(c, cob, 0.0), {250, 500, 1000}, 500, o);
  CHECK(v.sigma2 <= 1.0 / 1000.0);
  CHECK(v.var_over_n.back() < v.var_over_n.front());
  const CenteredObservable f = center(c, observable_by_id("x"), quick_centering());
  const auto p = variance_estimate(c, f, {500, 1000, 2000}, 2000, o);
  CHECK(p.plateau);
  CHECK(p.sigma2 > 0.0);
}

TEST_CASE("reduction and hypothesis suite with the zero observable") {
  const ParamCurve c(0.75, 0.1);
  const CenteredObservable z = center_known(c, observable_by_id("zero"), 0.0);
  RegimeSpec spec;
  spec.regime = Regime::kStable;
  spec.alpha_min = 0.75;
  EnsembleOptions o;
  o.burn_in = 1000;
  o.workers = 1;
  const ReductionReport r = induced_reduction_check(c, z, spec, 1000, 200, 0.2, o);
  CHECK(r.ks == 0.0);
  CHECK(r.pass);
  HypothesisOptions h;
  h.n_grid = {100, 200, 400, 800};
  h.chains = 2;
  h.excursions_per_chain = 5000;
  h.workers = 1;
  const HypothesisReport rep = hypothesis_suite(c, z, spec, h);
  for (const auto& row : rep.tail_counts) {
    for (double v : row.scaled) CHECK(v == 0.0);
  }
  CHECK(rep.birkhoff_f == 0.0);
  CHECK(rep.birkhoff_phi == doctest::Approx(rep.mean_phi).epsilon(0.02));
}

}
