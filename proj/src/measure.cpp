#include "skewlab/measure.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "skewlab/markov.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/quadrature.hpp"
#include "skewlab/warnings.hpp"

namespace skewlab {
namespace {

constexpr double kRatio = 1.05;

// Doubles in (0, 1) that are never exactly 0, so x = 0 (a fixed point of
// every fibre map) is never used as a start.
double open_uniform(Engine& rng) { return uniform01(rng) + 0x1p-54; }

SkewPoint lebesgue_point(Engine& rng) {
  SkewPoint p;
  p.omega = OmegaState::from_seed(rng());
  p.x = open_uniform(rng);
  return p;
}

}  // namespace

DensityGrid::DensityGrid(std::size_t n_omega, std::size_t n_x)
    : n_omega_(n_omega) {
  if (n_omega < 1 || n_x < 4) {
    throw std::invalid_argument("DensityGrid needs n_omega >= 1, n_x >= 4");
  }
  const std::size_t n_uniform = 3 * n_x / 4;
  const std::size_t n_geom = n_x - n_uniform;
  x_edges_.reserve(n_x + 1);
  x_edges_.push_back(0.0);
  for (std::size_t k = n_geom - 1; k >= 1; --k) {
    x_edges_.push_back(0.25 * std::pow(kRatio, -static_cast<double>(k)));
  }
  for (std::size_t j = 0; j < n_uniform; ++j) {
    x_edges_.push_back(0.25 + 0.75 * static_cast<double>(j) / n_uniform);
  }
  x_edges_.push_back(1.0);
  weights_.assign(n_omega_ * n_x, 0.0);
}

std::size_t DensityGrid::omega_bin(double omega) const noexcept {
  const auto i = static_cast<std::size_t>(omega * static_cast<double>(n_omega_));
  return std::min(i, n_omega_ - 1);
}

std::size_t DensityGrid::x_bin(double x) const noexcept {
  const std::size_t nx = n_x();
  const std::size_t n_geom = nx - 3 * nx / 4;
  std::size_t j;
  if (x >= 0.25) {
    const double step = 0.75 / static_cast<double>(3 * nx / 4);
    j = n_geom + static_cast<std::size_t>((x - 0.25) / step);
  } else if (x <= x_edges_[1]) {
    j = 0;
  } else {
    const double k = std::ceil(std::log(0.25 / x) / std::log(kRatio));
    j = n_geom - static_cast<std::size_t>(std::max(1.0, k));
  }
  j = std::min(j, nx - 1);
  // Correct the closed-form guess against the stored edges.
  while (j > 0 && x < x_edges_[j]) --j;
  while (j + 1 < nx && x >= x_edges_[j + 1]) ++j;
  return j;
}

void DensityGrid::merge(const DensityGrid& other) {
  if (other.n_omega_ != n_omega_ || other.x_edges_ != x_edges_) {
    throw std::invalid_argument("DensityGrid::merge: shape mismatch");
  }
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    weights_[k] += other.weights_[k];
  }
  total_ += other.total_;
}

double DensityGrid::mass(std::size_t i, std::size_t j) const {
  return total_ > 0.0 ? weight(i, j) / total_ : 0.0;
}

double DensityGrid::density(std::size_t i, std::size_t j) const {
  return mass(i, j) * static_cast<double>(n_omega_) / x_width(j);
}

double DensityGrid::total_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_omega_; ++i) {
    for (std::size_t j = 0; j < n_x(); ++j) s += mass(i, j);
  }
  return s;
}

double DensityGrid::strip_weight(double lo, double hi) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_x(); ++j) {
    const double overlap =
        std::min(hi, x_edges_[j + 1]) - std::max(lo, x_edges_[j]);
    if (overlap <= 0.0) continue;
    double col = 0.0;
    for (std::size_t i = 0; i < n_omega_; ++i) col += weight(i, j);
    s += col * overlap / x_width(j);
  }
  return s;
}

double DensityGrid::strip_mean(double lo, double hi) const {
  if (!(hi > lo) || total_ <= 0.0) return 0.0;
  return strip_weight(lo, hi) / total_ / (hi - lo);
}

double DensityGrid::mass_on_y() const {
  return total_ > 0.0 ? strip_weight(0.5, 1.0) / total_ : 0.0;
}

std::vector<double> DensityGrid::x_marginal() const {
  std::vector<double> out(n_x(), 0.0);
  for (std::size_t j = 0; j < n_x(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n_omega_; ++i) col += mass(i, j);
    out[j] = col / x_width(j);
  }
  return out;
}

double DensityGrid::x_marginal_cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return strip_weight(0.0, x) / total_;
}

std::vector<double> DensityGrid::omega_marginal() const {
  std::vector<double> out(n_omega_, 0.0);
  for (std::size_t i = 0; i < n_omega_; ++i) {
    for (std::size_t j = 0; j < n_x(); ++j) out[i] += mass(i, j);
    out[i] *= static_cast<double>(n_omega_);
  }
  return out;
}

std::vector<std::size_t> DensityGrid::starved_bins(double min_weight) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (weights_[k] < min_weight) out.push_back(k);
  }
  return out;
}

DensityGrid DensityGrid::coarsen(std::size_t fo, std::size_t fx) const {
  if (fo == 0 || fx == 0 || n_omega_ % fo != 0 || n_x() % fx != 0) {
    throw std::invalid_argument("coarsen factors must divide the grid shape");
  }
  DensityGrid g{Empty{}};
  g.n_omega_ = n_omega_ / fo;
  for (std::size_t j = 0; j <= n_x(); j += fx) g.x_edges_.push_back(x_edges_[j]);
  const std::size_t nx = g.n_x();
  g.weights_.assign(g.n_omega_ * nx, 0.0);
  for (std::size_t i = 0; i < n_omega_; ++i) {
    for (std::size_t j = 0; j < n_x(); ++j) {
      g.weights_[(i / fo) * nx + j / fx] += weight(i, j);
    }
  }
  g.total_ = total_;
  return g;
}

DensityGrid DensityGrid::uniform(std::size_t n_omega, std::size_t n_x,
                                 double weight_per_unit_area) {
  DensityGrid g(n_omega, n_x);
  for (std::size_t i = 0; i < n_omega; ++i) {
    for (std::size_t j = 0; j < g.n_x(); ++j) {
      const double w = weight_per_unit_area * g.x_width(j) / n_omega;
      g.weights_[i * g.n_x() + j] = w;
      g.total_ += w;
    }
  }
  return g;
}

DensityGrid estimate_density(const ParamCurve& curve,
                             const DensityOptions& opts) {
  const unsigned blocks = block_count(opts.n_orbits, opts.workers);
  std::vector<DensityGrid> partial(blocks,
                                   DensityGrid(opts.n_omega, opts.n_x));
  parallel_blocks(opts.n_orbits, blocks,
                  [&](unsigned b, std::size_t begin, std::size_t end) {
                    DensityGrid& g = partial[b];
                    for (std::size_t o = begin; o < end; ++o) {
                      Engine rng = make_engine(opts.seed, o, 0x64656e73);
                      SkewPoint p = lebesgue_point(rng);
                      for (std::uint64_t k = 0; k < opts.burn_in; ++k) {
                        step(p, curve);
                      }
                      for (std::uint64_t k = 0; k < opts.n_steps; ++k) {
                        g.add(p.omega.value(), p.x);
                        step(p, curve);
                      }
                    }
                  });
  DensityGrid grid = std::move(partial[0]);
  for (unsigned b = 1; b < blocks; ++b) grid.merge(partial[b]);

  const auto starved = grid.starved_bins(opts.starved_below);
  if (!starved.empty()) {
    std::ostringstream msg;
    msg << starved.size() << " of " << grid.n_omega() * grid.n_x()
        << " density bins hold fewer than " << opts.starved_below
        << " hits; x ranges:";
    std::size_t shown = 0;
    std::vector<bool> seen(grid.n_x(), false);
    for (std::size_t k : starved) {
      const std::size_t j = k % grid.n_x();
      if (seen[j]) continue;
      seen[j] = true;
      if (shown++ == 8) {
        msg << " ...";
        break;
      }
      msg << " [" << grid.x_edges()[j] << ", " << grid.x_edges()[j + 1] << ")";
    }
    warn(msg.str());
  }
  return grid;
}

SliceEstimate slice_estimate(const DensityGrid& grid, double w,
                             double min_weight) {
  if (!(w > 0.0 && w <= 0.25)) {
    throw std::invalid_argument("slice strip width must lie in (0, 1/4]");
  }
  if (grid.strip_weight(0.5, 0.5 + w) < min_weight) {
    throw std::runtime_error(
        "slice strip starved: fewer than " + std::to_string(min_weight) +
        " hits in x in [1/2, 1/2 + w]");
  }
  SliceEstimate s;
  s.width = w;
  s.mean_w = grid.strip_mean(0.5, 0.5 + w);
  s.mean_2w = grid.strip_mean(0.5, 0.5 + 2.0 * w);
  s.value = 2.0 * s.mean_w - s.mean_2w;
  s.extrapolation_error = std::abs(s.mean_2w - s.mean_w);
  return s;
}

double slice_integral(const DensityGrid& grid, double w) {
  return slice_estimate(grid, w).value;
}

double closed_form_core(const ParamCurve& curve) {
  const double am = curve.alpha_min();
  return std::pow(am, 1.5) *
         std::sqrt(std::numbers::pi / (2.0 * curve.second_derivative()));
}

double constant_A(const ParamCurve& curve, double slice) {
  return slice /
         (4.0 * std::pow(closed_form_core(curve), 1.0 / curve.alpha_min()));
}

double constant_A_two_sided(const ParamCurve& curve, double slice) {
  return constant_A(curve, slice) / std::pow(2.0, 1.0 / curve.alpha_min());
}

double xn_limit_constant(const ParamCurve& curve) {
  const double am = curve.alpha_min();
  return 1.0 / std::pow(std::pow(2.0, am) * closed_form_core(curve), 1.0 / am);
}

double xn_limit_constant_two_sided(const ParamCurve& curve) {
  return xn_limit_constant(curve) / std::pow(2.0, 1.0 / curve.alpha_min());
}

double xn_mean_field(const ParamCurve& curve, double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("xn_mean_field needs n >= 1");
  const double am = curve.alpha_min();
  const double eps = curve.epsilon();
  // Integrand in t = ln y: dk/dt = 1 / ((2y)^am g(y)).
  const auto rate = [&](double t) {
    const double w = -std::log(2.0) - t;
    const double g = std::exp(-eps * w) * std::cyl_bessel_i(0.0, eps * w);
    return 1.0 / (std::exp(am * (std::log(2.0) + t)) * g);
  };
  const double top = std::log(0.5);
  const auto panel = [&](double a, double b) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    return Rule::integrate(rate, a, b, 15, 1e-13);
  };
  // Walk down in unit panels of t until the step count passes n, then
  // bisect inside the last panel.
  double acc = 0.0;
  double t = top;
  double piece = panel(t - 1.0, t);
  while (acc + piece < n) {
    acc += piece;
    t -= 1.0;
    piece = panel(t - 1.0, t);
  }
  double lo = t - 1.0, hi = t;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * std::abs(lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (acc + panel(mid, t) < n ? hi : lo) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

XnConstantEstimate xn_asymptotic_constant(const ParamCurve& curve,
                                          std::size_t n, std::size_t samples,
                                          std::uint64_t seed,
                                          unsigned workers) {
  if (n < 2) throw std::invalid_argument("xn_asymptotic_constant needs n >= 2");
  if (samples < 2) {
    throw std::invalid_argument("xn_asymptotic_constant needs >= 2 samples");
  }
  const double nd = static_cast<double>(n);
  const double scale = std::pow(nd / std::sqrt(std::log(nd)),
                                1.0 / curve.alpha_min());
  std::vector<double> v(samples);
  parallel_for(samples, workers, [&](std::size_t i) {
    const auto omega = OmegaState::from_seed(derive_seed(seed, i, 0x786e));
    v[i] = scale * xn_value(omega, n, curve);
  });
  XnConstantEstimate r;
  r.n = n;
  r.samples = samples;
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / samples;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.stderr_ = std::sqrt(ss / (samples - 1) / samples);
  r.c2 = xn_limit_constant(curve);
  r.c2_two_sided = xn_limit_constant_two_sided(curve);
  r.ratio = r.mean / r.c2;
  r.ratio_two_sided = r.mean / r.c2_two_sided;
  return r;
}

SkewPoint sample_invariant(const ParamCurve& curve, Engine& rng,
                           std::uint64_t burn_in) {
  SkewPoint p = lebesgue_point(rng);
  for (std::uint64_t k = 0; k < burn_in; ++k) step(p, curve);
  return p;
}

SkewPoint sample_invariant_in_y(const ParamCurve& curve, Engine& rng,
                                std::uint64_t burn_in) {
  SkewPoint p = sample_invariant(curve, rng, burn_in);
  while (!in_y(p.x)) step(p, curve);
  return p;
}

ExcursionSample sample_excursions(const ParamCurve& curve,
                                  const TailOptions& opts) {
  if (opts.chains == 0 || opts.n_excursions < opts.chains) {
    throw std::invalid_argument("need at least one excursion per chain");
  }
  std::vector<std::vector<std::uint64_t>> per_chain(opts.chains);
  const auto zero = [](double, double) { return 0.0; };
  parallel_for(opts.chains, opts.workers, [&](std::size_t c) {
    Engine rng = make_engine(opts.seed, c, 0x7461696c);
    const auto fresh = [&] {
      SkewPoint p = lebesgue_point(rng);
      p.x = 0.5 + 0.5 * p.x;
      return p;
    };
    SkewPoint p = fresh();
    const std::size_t count = opts.n_excursions * (c + 1) / opts.chains -
                              opts.n_excursions * c / opts.chains;
    auto& out = per_chain[c];
    out.reserve(count);
    for (std::size_t k = 0; k < opts.burn_in_returns + count; ++k) {
      std::uint64_t phi;
      try {
        phi = next_return(p, curve, zero).phi;
      } catch (const ReturnTimeTruncated& e) {
        // Kept as a censored value; the chain restarts from a fresh point.
        phi = e.partial().phi;
        warn("excursion truncated at " + std::to_string(phi) + " steps");
        p = fresh();
      }
      if (k >= opts.burn_in_returns) out.push_back(phi);
    }
  });
  ExcursionSample s;
  s.phi.reserve(opts.n_excursions);
  for (const auto& chain : per_chain) {
    s.chain_offsets.push_back(s.phi.size());
    s.phi.insert(s.phi.end(), chain.begin(), chain.end());
  }
  s.chain_offsets.push_back(s.phi.size());
  for (auto v : s.phi) s.total_steps += v;
  return s;
}

TailFit fit_tail(const ExcursionSample& sample, const TailOptions& opts,
                 double alpha_min) {
  if (sample.phi.empty()) throw std::invalid_argument("no excursions");
  if (!(opts.n_hi > opts.n_lo && opts.n_lo >= 2.0 && opts.grid_points >= 3)) {
    throw std::invalid_argument("tail fit needs 2 <= n_lo < n_hi, >= 3 points");
  }
  std::vector<std::uint64_t> sorted = sample.phi;
  std::sort(sorted.begin(), sorted.end());
  const double total = static_cast<double>(sorted.size());
  const auto exceed = [&](double n) {
    const auto k = static_cast<std::uint64_t>(std::floor(n));
    return static_cast<std::uint64_t>(
        sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), k));
  };

  TailFit fit;
  fit.excursions = sorted.size();
  fit.longest = sorted.back();
  fit.mean_phi = static_cast<double>(sample.total_steps) / total;
  fit.m_y = 1.0 / fit.mean_phi;
  fit.n_lo = opts.n_lo;
  fit.n_hi = opts.n_hi;
  while (exceed(fit.n_hi) < opts.min_tail && fit.n_hi > 2.0 * fit.n_lo) {
    fit.n_hi /= 1.25;
    fit.range_shrunk = true;
  }
  if (fit.range_shrunk) {
    warn("tail fit: fewer than " + std::to_string(opts.min_tail) +
         " excursions beyond the requested n_hi; range shrunk to n_hi = " +
         std::to_string(fit.n_hi));
  }

  // Weighted least squares y = b0 + b1 u.
  double sw = 0, su = 0, sy = 0, suu = 0, suy = 0;
  double fixed_w = 0.0, fixed_sum = 0.0;
  std::vector<double> us, ys, ws;
  const double ratio = std::pow(fit.n_hi / fit.n_lo,
                                1.0 / static_cast<double>(opts.grid_points - 1));
  double n = fit.n_lo;
  for (std::size_t g = 0; g < opts.grid_points; ++g, n *= ratio) {
    const std::uint64_t e = exceed(n);
    const double sy_cond = static_cast<double>(e) / total;
    fit.n.push_back(n);
    fit.exceed.push_back(e);
    fit.survival.push_back(fit.m_y * sy_cond);
    const double local =
        fit.m_y * sy_cond * std::pow(n / std::sqrt(std::log(n)), 1.0 / alpha_min);
    fit.local_amplitude.push_back(local);
    if (e == 0) continue;
    const double var = (1.0 - sy_cond) / (total * sy_cond);
    const double w = 1.0 / std::max(var, 1e-300);
    const double u = std::log(std::sqrt(std::log(n)) / n);
    const double y = std::log(fit.m_y * sy_cond);
    us.push_back(u);
    ys.push_back(y);
    ws.push_back(w);
    // The log-survival weight carries over to the amplitude in log form.
    fixed_w += w;
    fixed_sum += w * std::log(local);
    sw += w;
    su += w * u;
    sy += w * y;
    suu += w * u * u;
    suy += w * u * y;
  }
  if (us.size() < 2) {
    throw std::runtime_error("tail fit: fewer than two populated grid points");
  }
  const double det = sw * suu - su * su;
  const double b1 = (sw * suy - su * sy) / det;
  const double b0 = (sy - b1 * su) / sw;
  fit.exponent = b1;
  fit.amplitude = std::exp(b0);
  fit.amplitude_fixed = std::exp(fixed_sum / fixed_w);
  double chi2 = 0.0;
  for (std::size_t k = 0; k < us.size(); ++k) {
    const double r = ys[k] - (b0 + b1 * us[k]);
    fit.residuals.push_back(r);
    chi2 += ws[k] * r * r;
  }
  // Residual-scaled standard error (cumulative survival points are
  // correlated, so the nominal weights understate the spread).
  const double dof = std::max<double>(1.0, static_cast<double>(us.size()) - 2);
  fit.exponent_stderr = std::sqrt(std::max(chi2 / dof, 1.0) * sw / det);
  return fit;
}

TailFit tail_fit(const ParamCurve& curve, const TailOptions& opts) {
  return fit_tail(sample_excursions(curve, opts), opts, curve.alpha_min());
}

KacEstimate kac_check(const ParamCurve& curve, const ExcursionSample& sample,
                      std::size_t orbits, std::uint64_t steps,
                      std::uint64_t seed, unsigned workers) {
  if (orbits < 2 || steps == 0) {
    throw std::invalid_argument("kac_check needs >= 2 orbits and steps > 0");
  }
  KacEstimate k;
  const double total = static_cast<double>(sample.phi.size());
  k.mean_phi = static_cast<double>(sample.total_steps) / total;
  // Batch means over chains.
  const std::size_t chains = sample.chain_offsets.size() - 1;
  if (chains >= 2) {
    double ss = 0.0;
    for (std::size_t c = 0; c < chains; ++c) {
      const auto b = sample.chain_offsets[c], e = sample.chain_offsets[c + 1];
      double s = 0.0;
      for (auto i = b; i < e; ++i) s += static_cast<double>(sample.phi[i]);
      const double m = s / static_cast<double>(e - b);
      ss += (m - k.mean_phi) * (m - k.mean_phi);
    }
    k.mean_phi_stderr = std::sqrt(ss / (chains - 1) / chains);
  }
  std::vector<double> frac(orbits);
  parallel_for(orbits, workers, [&](std::size_t o) {
    Engine rng = make_engine(seed, o, 0x6b6163);
    SkewPoint p = sample_invariant(curve, rng);
    const auto acc = run_orbit(p, curve, steps, [](double, double) { return 0.0; });
    frac[o] = static_cast<double>(acc.time_in_y) / static_cast<double>(steps);
  });
  k.m_y = std::accumulate(frac.begin(), frac.end(), 0.0) / orbits;
  double ss = 0.0;
  for (double f : frac) ss += (f - k.m_y) * (f - k.m_y);
  k.m_y_stderr = std::sqrt(ss / (orbits - 1) / orbits);
  k.product = k.mean_phi * k.m_y;
  return k;
}

double transport_l1(const ParamCurve& curve, const DensityGrid& grid,
                    std::size_t points_per_bin, std::uint64_t seed) {
  if (points_per_bin == 0) throw std::invalid_argument("points_per_bin == 0");
  const std::size_t no = grid.n_omega(), nx = grid.n_x();
  const auto& edges = grid.x_edges();
  const double dw = 1.0 / static_cast<double>(no);
  // Inside each bin the density is modelled as linear in omega and a power
  // of x, with slopes from neighbouring bins; near x = 0 the density varies
  // like x^-alpha(omega), which a flat-in-bin model transports badly.
  const auto centre = [&](std::size_t j) {
    return j == 0 ? 0.5 * edges[1] : std::sqrt(edges[j] * edges[j + 1]);
  };
  std::vector<double> out(no * nx, 0.0);
  Engine rng = make_engine(seed, 0, 0x7472616e);
  for (std::size_t i = 0; i < no; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      const double m = grid.mass(i, j);
      if (m == 0.0) continue;
      const double d = grid.density(i, j);
      const std::size_t jl = j == 0 ? 0 : j - 1;
      const std::size_t jh = std::min(j + 1, nx - 1);
      double sx = 0.0;
      const double dl = grid.density(i, jl), dh = grid.density(i, jh);
      if (jh > jl && dl > 0.0 && dh > 0.0) {
        sx = std::log(dh / dl) / std::log(centre(jh) / centre(jl));
      }
      sx = std::clamp(sx, -0.95, 4.0);
      double g = 0.0;
      if (no >= 3) {
        const double up = grid.density((i + 1) % no, j);
        const double down = grid.density((i + no - 1) % no, j);
        g = std::clamp((up - down) / (2.0 * dw * d), -1.8 / dw, 1.8 / dw);
      }
      const double a = std::pow(edges[j], sx + 1.0);
      const double b = std::pow(edges[j + 1], sx + 1.0);
      const double share = m / static_cast<double>(points_per_bin);
      for (std::size_t k = 0; k < points_per_bin; ++k) {
        double u;
        double omega;
        do {
          u = uniform01(rng) - 0.5;
          omega = (static_cast<double>(i) + 0.5 + u) * dw;
        } while (uniform01(rng) * (1.0 + 0.9) > 1.0 + g * u * dw);
        const double x =
            std::pow(a + uniform01(rng) * (b - a), 1.0 / (sx + 1.0));
        double w2 = 4.0 * omega;
        w2 -= std::floor(w2);
        const double x2 = t_alpha(x, curve(omega));
        out[grid.omega_bin(w2) * nx + grid.x_bin(x2)] += share;
      }
    }
  }
  double l1 = 0.0;
  for (std::size_t i = 0; i < no; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      l1 += std::abs(out[i * nx + j] - grid.mass(i, j));
    }
  }
  return l1;
}

double omega_variation(const DensityGrid& grid, double x) {
  const std::size_t j = grid.x_bin(x);
  const std::size_t no = grid.n_omega();
  double mean = 0.0, tv = 0.0;
  for (std::size_t i = 0; i < no; ++i) {
    mean += grid.density(i, j);
    tv += std::abs(grid.density((i + 1) % no, j) - grid.density(i, j));
  }
  mean /= static_cast<double>(no);
  return mean > 0.0 ? tv / mean : 0.0;
}

}  // namespace skewlab
