#include "skewlab/limit.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "skewlab/markov.hpp"
#include "skewlab/measure.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/quadrature.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/warnings.hpp"

namespace skewlab {

namespace {

constexpr std::uint64_t kCenterStream = 0x63656e74;
constexpr std::uint64_t kEnsembleStream = 0x656e7362;
constexpr std::uint64_t kReductionStream = 0x72656475;
constexpr std::uint64_t kHypothesisStream = 0x68797074;
constexpr std::uint64_t kBootstrapStream = 0x626f6f74;

void finish_c(const ParamCurve& curve, CenteredObservable& c) {
  (void)curve;
  const auto res = integrate(
      [&](double w) { return c(w, 0.0); }, 0.0, 1.0, 1e-12);
  c.c = res.value;
  c.c_error = res.error;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

// max over the upper half of the grid relative to max over the lower half.
double half_growth(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const std::size_t mid = v.size() / 2;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  const double hi = *std::max_element(v.begin() + mid, v.end());
  if (hi == 0.0) return 0.0;
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

Observable observable_by_id(const std::string& id) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (id == "zero") return {id, [](double, double) { return 0.0; }, 0.0, 1.0};
  if (id == "one") return {id, [](double, double) { return 1.0; }, 0.0, 1.0};
  if (id == "x") return {id, [](double, double x) { return x; }, 1.0, 1.0};
  if (id == "x2") {
    return {id, [](double, double x) { return x * x; }, 2.0, 1.0};
  }
  if (id == "sin_omega") {
    return {id, [two_pi](double w, double) { return std::sin(two_pi * w); },
            two_pi, 1.0};
  }
  if (id == "x_sin_omega") {
    return {id,
            [two_pi](double w, double x) { return x * std::sin(two_pi * w); },
            two_pi + 1.0, 1.0};
  }
  throw ConfigError("unknown observable id '" + id + "'");
}

CenteredObservable center_with_profile(const ParamCurve& curve,
                                       const Observable& f,
                                       const Observable& k,
                                       const CenteringOptions& opts) {
  if (opts.orbits < 2 || opts.steps == 0) {
    throw std::invalid_argument("centering needs >= 2 orbits of >= 1 step");
  }
  std::vector<double> sum_f(opts.orbits), sum_k(opts.orbits);
  parallel_for(opts.orbits, opts.workers, [&](std::size_t i) {
    Engine rng = make_engine(opts.seed, i, kCenterStream);
    SkewPoint p = sample_invariant(curve, rng, opts.burn_in);
    double sk = 0.0;
    const auto acc = run_orbit(p, curve, opts.steps, [&](double w, double x) {
      sk += k.f(w, x);
      return f.f(w, x);
    });
    sum_f[i] = acc.sum;
    sum_k[i] = sk;
  });
  const double tf = std::accumulate(sum_f.begin(), sum_f.end(), 0.0);
  const double tk = std::accumulate(sum_k.begin(), sum_k.end(), 0.0);
  if (tk == 0.0) {
    throw std::invalid_argument("centering profile has zero mean");
  }
  CenteredObservable c;
  c.base = f;
  c.profile_id = k.id;
  c.profile = k.f;
  c.coefficient = tf / tk;
  const double steps = static_cast<double>(opts.steps);
  c.mean_raw = tf / (steps * static_cast<double>(opts.orbits));
  std::vector<double> centred(opts.orbits);
  for (std::size_t i = 0; i < opts.orbits; ++i) {
    centred[i] = (sum_f[i] - c.coefficient * sum_k[i]) / steps;
  }
  const double m = std::accumulate(centred.begin(), centred.end(), 0.0) /
                   static_cast<double>(opts.orbits);
  double ss = 0.0;
  for (double v : centred) ss += (v - m) * (v - m);
  const double n = static_cast<double>(opts.orbits);
  c.mean_stderr = std::sqrt(ss / (n - 1.0) / n);
  finish_c(curve, c);
  return c;
}

CenteredObservable center(const ParamCurve& curve, const Observable& f,
                          const CenteringOptions& opts) {
  return center_with_profile(curve, f, observable_by_id("one"), opts);
}

CenteredObservable center_known(const ParamCurve& curve, const Observable& f,
                                double mean) {
  CenteredObservable c;
  c.base = f;
  c.coefficient = mean;
  c.mean_raw = mean;
  finish_c(curve, c);
  return c;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::kCltSmallAlpha:
      return "CLT_SMALL_ALPHA";
    case Regime::kNonstandard:
      return "NONSTANDARD";
    case Regime::kStable:
      return "STABLE";
    case Regime::kCltCZero:
      return "CLT_C_ZERO";
  }
  return "UNKNOWN";
}

RegimeSpec classify_regime(const ParamCurve& curve,
                           const CenteredObservable& f) {
  RegimeSpec s;
  s.alpha_min = curve.alpha_min();
  s.c = f.c;
  s.c_error = f.c_error;
  s.c_is_zero = std::abs(f.c) <= 3.0 * std::max(f.c_error, 1e-14);
  if (s.alpha_min < 0.5) {
    s.regime = Regime::kCltSmallAlpha;
  } else if (s.c_is_zero) {
    s.regime = Regime::kCltCZero;
    s.ambiguous = s.alpha_min == 0.5;
  } else if (s.alpha_min == 0.5) {
    s.regime = Regime::kNonstandard;
  } else {
    s.regime = Regime::kStable;
  }
  return s;
}

double normalizer(const RegimeSpec& spec, double n) {
  if (!(n >= 2.0)) throw ConfigError("normalizer needs n >= 2");
  switch (spec.regime) {
    case Regime::kCltSmallAlpha:
    case Regime::kCltCZero:
      return std::sqrt(n);
    case Regime::kNonstandard: {
      if (!spec.a_const) {
        throw ConfigError("nonstandard normalizer needs the constant A");
      }
      if (spec.c_is_zero || spec.c == 0.0) {
        throw ConfigError("nonstandard normalizer degenerates at c = 0");
      }
      const double l = std::log(n);
      return std::sqrt(spec.c * spec.c * *spec.a_const / 4.0 * n * l * l);
    }
    case Regime::kStable:
      return std::pow(n, spec.alpha_min) *
             std::sqrt(spec.alpha_min * std::log(n));
  }
  throw ConfigError("unknown regime");
}

std::vector<EmpiricalLaw> birkhoff_ensembles(
    const ParamCurve& curve, const CenteredObservable& f,
    const RegimeSpec& spec, const std::vector<std::size_t>& ns,
    std::size_t n_samples, const EnsembleOptions& opts) {
  if (ns.empty()) throw std::invalid_argument("empty n list");
  std::vector<std::size_t> sorted = ns;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> b(ns.size());
  for (std::size_t j = 0; j < ns.size(); ++j) {
    b[j] = normalizer(spec, static_cast<double>(ns[j]));
  }
  std::vector<std::vector<double>> values(ns.size(),
                                          std::vector<double>(n_samples));
  parallel_for(n_samples, opts.workers, [&](std::size_t i) {
    Engine rng = make_engine(opts.seed, i, kEnsembleStream);
    SkewPoint p = sample_invariant(curve, rng, opts.burn_in);
    std::vector<double> at(sorted.size());
    double s = 0.0;
    std::uint64_t done = 0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      s += run_orbit(p, curve, sorted[j] - done,
                     [&](double w, double x) { return f(w, x); })
               .sum;
      done = sorted[j];
      at[j] = s;
    }
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(sorted.begin(), sorted.end(), ns[j]) -
          sorted.begin());
      values[j][i] = at[pos] / b[j];
    }
  });
  std::vector<EmpiricalLaw> out(ns.size());
  for (std::size_t j = 0; j < ns.size(); ++j) {
    out[j].n = ns[j];
    out[j].samples = std::move(values[j]);
    std::sort(out[j].samples.begin(), out[j].samples.end());
  }
  return out;
}

EmpiricalLaw birkhoff_ensemble(const ParamCurve& curve,
                               const CenteredObservable& f,
                               const RegimeSpec& spec, std::size_t n,
                               std::size_t n_samples,
                               const EnsembleOptions& opts) {
  return birkhoff_ensembles(curve, f, spec, {n}, n_samples, opts).front();
}

double ks_distance(const EmpiricalLaw& law,
                   const std::function<double(double)>& cdf) {
  const std::size_t n = law.count();
  if (n < 100) throw std::invalid_argument("ks_distance needs >= 100 samples");
  double d = 0.0;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(law.samples[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) * inv),
                  std::abs(static_cast<double>(i + 1) * inv - f)});
  }
  return d;
}

double ks_two_sample(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  if (a.count() == 0 || b.count() == 0) {
    throw std::invalid_argument("ks_two_sample needs non-empty samples");
  }
  const auto& x = a.samples;
  const auto& y = b.samples;
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double cf_distance(const EmpiricalLaw& law,
                   const std::function<std::complex<double>(double)>& cf,
                   const std::vector<double>& t_grid) {
  if (law.count() == 0) throw std::invalid_argument("empty law");
  double d = 0.0;
  const double inv = 1.0 / static_cast<double>(law.count());
  for (double t : t_grid) {
    if (!std::isfinite(t) || std::abs(t) > 10.0) {
      throw std::invalid_argument("t grid must lie in [-10, 10]");
    }
    double re = 0.0, im = 0.0;
    for (double x : law.samples) {
      re += std::cos(t * x);
      im += std::sin(t * x);
    }
    d = std::max(d, std::abs(std::complex<double>(re * inv, im * inv) - cf(t)));
  }
  return d;
}

std::vector<double> default_t_grid(double t_max, double step) {
  if (!(step > 0.0) || !(step <= t_max) || !(t_max <= 10.0)) {
    throw std::invalid_argument("need 0 < step <= t_max <= 10");
  }
  std::vector<double> t;
  const auto n = static_cast<std::size_t>(std::floor(t_max / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) * step);
  return t;
}

double normal_cdf(double x, double variance) {
  if (variance <= 0.0) return x < 0.0 ? 0.0 : 1.0;
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

ReductionReport induced_reduction_check(const ParamCurve& curve,
                                        const CenteredObservable& f,
                                        const RegimeSpec& spec, std::size_t n,
                                        std::size_t n_samples, double m_y,
                                        const EnsembleOptions& opts,
                                        double bound) {
  if (!(m_y > 0.0 && m_y < 1.0)) throw std::invalid_argument("m(Y) not in (0,1)");
  ReductionReport r;
  r.n = n;
  r.m_y = m_y;
  r.bound = bound;
  r.induced_steps = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * m_y));
  const double b = normalizer(spec, static_cast<double>(n));
  std::vector<double> direct(n_samples), induced(n_samples);
  const auto fn = [&](double w, double x) { return f(w, x); };
  parallel_for(n_samples, opts.workers, [&](std::size_t i) {
    Engine rng = make_engine(opts.seed, i, kReductionStream);
    const SkewPoint start = sample_invariant_in_y(curve, rng, opts.burn_in);
    SkewPoint p = start;
    direct[i] = run_orbit(p, curve, n, fn).sum / b;
    p = start;
    double s = 0.0;
    for (std::size_t k = 0; k < r.induced_steps; ++k) {
      s += next_return(p, curve, fn).f_sum;
    }
    induced[i] = s / b;
  });
  r.direct.n = r.induced.n = n;
  r.direct.samples = std::move(direct);
  r.induced.samples = std::move(induced);
  std::sort(r.direct.samples.begin(), r.direct.samples.end());
  std::sort(r.induced.samples.begin(), r.induced.samples.end());
  r.ks = ks_two_sample(r.direct, r.induced);
  r.pass = r.ks <= bound;
  return r;
}

HypothesisReport hypothesis_suite(const ParamCurve& curve,
                                  const CenteredObservable& f,
                                  const RegimeSpec& spec,
                                  const HypothesisOptions& opts) {
  if (opts.chains == 0 || opts.excursions_per_chain == 0 ||
      opts.n_grid.empty()) {
    throw std::invalid_argument("hypothesis suite needs chains and a grid");
  }
  struct Excursion {
    std::uint64_t phi;
    double f_sum;
    double max_abs;
  };
  std::vector<std::vector<Excursion>> chains(opts.chains);
  const auto fn = [&](double w, double x) { return f(w, x); };
  parallel_for(opts.chains, opts.workers, [&](std::size_t c) {
    Engine rng = make_engine(opts.seed, c, kHypothesisStream);
    SkewPoint p = sample_invariant_in_y(curve, rng);
    auto& out = chains[c];
    out.reserve(opts.excursions_per_chain);
    std::size_t skipped = 0;
    while (out.size() < opts.excursions_per_chain) {
      try {
        const ReturnRecord r = next_return(p, curve, fn);
        if (skipped < opts.burn_in_returns) {
          ++skipped;
          continue;
        }
        out.push_back({r.phi, r.f_sum, r.max_abs});
      } catch (const ReturnTimeTruncated& e) {
        std::ostringstream msg;
        msg << "hypothesis suite: chain " << c << " " << e.what()
            << "; restarting from a fresh sample";
        warn(msg.str());
        p = sample_invariant_in_y(curve, rng);
      }
    }
  });

  HypothesisReport rep;
  rep.n_grid = opts.n_grid;
  std::uint64_t steps = 0, count = 0;
  for (const auto& ch : chains) {
    for (const auto& e : ch) steps += e.phi;
    count += ch.size();
  }
  rep.mean_phi = static_cast<double>(steps) / static_cast<double>(count);
  rep.m_y = 1.0 / rep.mean_phi;

  std::vector<double> maxima;
  maxima.reserve(count);
  for (const auto& ch : chains) {
    for (const auto& e : ch) maxima.push_back(e.max_abs);
  }
  std::sort(maxima.begin(), maxima.end());
  std::vector<double> bn(opts.n_grid.size());
  for (std::size_t j = 0; j < bn.size(); ++j) {
    bn[j] = normalizer(spec, static_cast<double>(opts.n_grid[j]));
  }
  rep.pass = true;
  for (double eps : opts.eps) {
    TailCountRow row;
    row.eps = eps;
    for (std::size_t j = 0; j < bn.size(); ++j) {
      const auto above = static_cast<double>(
          maxima.end() -
          std::lower_bound(maxima.begin(), maxima.end(), eps * bn[j]));
      row.scaled.push_back(static_cast<double>(opts.n_grid[j]) * rep.m_y *
                           above / static_cast<double>(count));
    }
    row.sup = *std::max_element(row.scaled.begin(), row.scaled.end());
    row.growth = half_growth(row.scaled);
    row.bounded = row.growth <= opts.growth_bound;
    rep.pass = rep.pass && row.bounded;
    rep.tail_counts.push_back(std::move(row));
  }

  for (std::size_t j = 0; j < bn.size(); ++j) {
    const std::size_t n = opts.n_grid[j];
    std::vector<double> stats;
    for (const auto& ch : chains) {
      for (std::size_t s = 0; s + n <= ch.size(); s += n) {
        double sum = 0.0;
        for (std::size_t k = s; k < s + n; ++k) {
          sum += static_cast<double>(ch[k].phi);
        }
        stats.push_back(std::abs(sum - static_cast<double>(n) * rep.mean_phi) /
                        bn[j]);
      }
    }
    std::sort(stats.begin(), stats.end());
    rep.phi_q95.push_back(quantile_sorted(stats, 0.95));
  }
  rep.phi_q95_growth = half_growth(rep.phi_q95);
  rep.phi_tight = rep.phi_q95_growth <= opts.growth_bound;

  double bf = 0.0, bp = 0.0;
  for (const auto& ch : chains) {
    double sf = 0.0, sp = 0.0;
    for (const auto& e : ch) {
      sf += e.f_sum;
      sp += static_cast<double>(e.phi);
    }
    bf += sf / static_cast<double>(ch.size());
    bp += sp / static_cast<double>(ch.size());
  }
  rep.birkhoff_f = bf / static_cast<double>(opts.chains);
  rep.birkhoff_phi = bp / static_cast<double>(opts.chains);
  rep.birkhoff_pass = std::abs(rep.birkhoff_f) <= opts.birkhoff_tol;
  rep.pass = rep.pass && rep.phi_tight && rep.birkhoff_pass;
  return rep;
}

VarianceProfile variance_estimate(const ParamCurve& curve,
                                  const CenteredObservable& f,
                                  const std::vector<std::size_t>& n_grid,
                                  std::size_t n_samples,
                                  const EnsembleOptions& opts, double tol,
                                  double warn_drift) {
  if (n_grid.empty() || n_samples < 2) {
    throw std::invalid_argument("variance estimate needs a grid and >= 2 samples");
  }
  std::vector<std::size_t> grid = n_grid;
  std::sort(grid.begin(), grid.end());
  if (grid.front() == 0) throw std::invalid_argument("n must be positive");
  std::vector<std::vector<double>> sums(grid.size(),
                                        std::vector<double>(n_samples));
  parallel_for(n_samples, opts.workers, [&](std::size_t i) {
    Engine rng = make_engine(opts.seed, i, kEnsembleStream);
    SkewPoint p = sample_invariant(curve, rng, opts.burn_in);
    double s = 0.0;
    std::uint64_t done = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      s += run_orbit(p, curve, grid[j] - done,
                     [&](double w, double x) { return f(w, x); })
               .sum;
      done = grid[j];
      sums[j][i] = s;
    }
  });

  const auto var_over_n = [&](const std::vector<double>& v,
                              const std::vector<std::size_t>* idx, double n) {
    const std::size_t m = idx ? idx->size() : v.size();
    double mean = 0.0;
    for (std::size_t k = 0; k < m; ++k) mean += v[idx ? (*idx)[k] : k];
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double d = v[idx ? (*idx)[k] : k] - mean;
      ss += d * d;
    }
    return ss / static_cast<double>(m - 1) / n;
  };

  VarianceProfile prof;
  prof.n = grid;
  constexpr std::size_t kBoot = 200;
  std::vector<std::vector<std::size_t>> boots(kBoot);
  Engine rng = make_engine(opts.seed, 0, kBootstrapStream);
  std::uniform_int_distribution<std::size_t> pick(0, n_samples - 1);
  for (auto& b : boots) {
    b.resize(n_samples);
    for (auto& k : b) k = pick(rng);
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double n = static_cast<double>(grid[j]);
    prof.var_over_n.push_back(var_over_n(sums[j], nullptr, n));
    double m = 0.0, ss = 0.0;
    std::vector<double> bv(kBoot);
    for (std::size_t b = 0; b < kBoot; ++b) {
      bv[b] = var_over_n(sums[j], &boots[b], n);
      m += bv[b];
    }
    m /= kBoot;
    for (double v : bv) ss += (v - m) * (v - m);
    prof.stderr_.push_back(std::sqrt(ss / (kBoot - 1)));
  }
  prof.sigma2 = prof.var_over_n.back();
  const double top = static_cast<double>(grid.back());
  double lo = prof.sigma2, hi = prof.sigma2;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (static_cast<double>(grid[j]) >= top / 2.0) {
      lo = std::min(lo, prof.var_over_n[j]);
      hi = std::max(hi, prof.var_over_n[j]);
    }
  }
  prof.drift = prof.sigma2 > 0.0 ? (hi - lo) / prof.sigma2 : 0.0;
  prof.plateau = prof.drift <= tol;
  if (prof.drift > warn_drift) {
    std::ostringstream msg;
    msg << "variance estimate: no plateau, drift " << prof.drift
        << " over the top octave";
    warn(msg.str());
  }
  return prof;
}

}  // namespace skewlab
