#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <json.hpp>

#include "skewlab/circle.hpp"
#include "skewlab/decorrelation.hpp"
#include "skewlab/interval.hpp"
#include "skewlab/limit.hpp"
#include "skewlab/markov.hpp"
#include "skewlab/measure.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/stable.hpp"
#include "skewlab/warnings.hpp"

namespace skewlab::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kVersion = "1.0.0";

struct Common {
  double alpha_min = 0.75;
  double epsilon = 0.1;
  double x0 = 0.0;
  bool unsafe = false;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string out;
  std::vector<std::string> blocking;
  std::vector<std::string> advisory;

  ParamCurve curve() const {
    try {
      return ParamCurve(alpha_min, epsilon, x0, unsafe);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  json to_json() const {
    return {{"alpha_min", alpha_min}, {"epsilon", epsilon}, {"x0", x0},
            {"unsafe_params", unsafe}, {"seed", seed}};
  }
};

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One experiment: collects results and assertions, then writes the
// artifacts. Warnings raised while it runs are captured into the summary.
class Experiment {
 public:
  Experiment(std::string command, const Common& common, json params)
      : command_(std::move(command)), common_(common),
        params_(std::move(params)) {
    dir_ = common_.out.empty() ? fs::path("skewlab-out") / command_
                               : fs::path(common_.out);
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw OutputError("cannot create " + dir_.string() + ": " + ec.message());
    previous_ = set_warning_sink([this](const std::string& m) {
      std::lock_guard lock(mutex_);
      warnings_.push_back(m);
      std::cerr << "warning: " << m << '\n';
    });
    write_json("manifest.json", manifest());
  }
  ~Experiment() { set_warning_sink(previous_); }
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  json& results() { return results_; }

  void check(const std::string& name, bool pass, bool blocking_default,
             json detail = json::object()) {
    bool blocking = blocking_default;
    if (listed(common_.blocking, name)) blocking = true;
    if (listed(common_.advisory, name)) blocking = false;
    assertions_.push_back({{"name", name},
                           {"pass", pass},
                           {"blocking", blocking},
                           {"detail", std::move(detail)}});
    if (blocking && !pass) blocking_failed_ = true;
  }

  void csv(const std::string& file, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    std::ofstream os(dir_ / file);
    if (!os) throw OutputError("cannot write " + (dir_ / file).string());
    for (std::size_t i = 0; i < header.size(); ++i) {
      os << (i ? "," : "") << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "") << fmt(row[i]);
      }
      os << '\n';
    }
  }

  int finish() {
    std::vector<std::string> w;
    {
      std::lock_guard lock(mutex_);
      w = warnings_;
    }
    std::sort(w.begin(), w.end());
    json summary = {{"command", command_},
                    {"version", kVersion},
                    {"parameters", params_},
                    {"common", common_.to_json()},
                    {"results", results_},
                    {"assertions", assertions_},
                    {"warnings", w},
                    {"status", blocking_failed_ ? "fail" : "pass"}};
    write_json("summary.json", summary);
    for (const auto& a : assertions_) {
      std::cout << (a["pass"].get<bool>() ? "PASS " : "FAIL ")
                << (a["blocking"].get<bool>() ? "[blocking] " : "[advisory] ")
                << a["name"].get<std::string>() << '\n';
    }
    std::cout << "wrote " << dir_.string() << '\n';
    return blocking_failed_ ? 1 : 0;
  }

 private:
  static bool listed(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  }

  json manifest() const {
    const auto now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json config = common_.to_json();
    config["workers"] = common_.workers;
    config["out"] = dir_.string();
    config["blocking"] = common_.blocking;
    config["advisory"] = common_.advisory;
    config[command_] = params_;
    return {{"tool", "skewlab"},
            {"version", kVersion},
            {"command", command_},
            {"config", config},
            {"seed", common_.seed},
            {"compiler", __VERSION__},
            {"boost", BOOST_LIB_VERSION},
            {"cli11", CLI11_VERSION},
            {"started_utc", stamp}};
  }

  void write_json(const std::string& file, const json& j) const {
    std::ofstream os(dir_ / file);
    if (!os) throw OutputError("cannot write " + (dir_ / file).string());
    os << j.dump(2) << '\n';
  }

  std::string command_;
  Common common_;
  json params_;
  fs::path dir_;
  json results_ = json::object();
  json assertions_ = json::array();
  bool blocking_failed_ = false;
  std::mutex mutex_;
  std::vector<std::string> warnings_;
  WarningSink previous_;
};

bool decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::uint64_t steps = 10000;
  double x_start = -1.0;
  std::string observable = "x";
  std::uint64_t record_every = 1;
};

int run_simulate(const Common& c, const SimulateOpts& o) {
  const ParamCurve curve = c.curve();
  const Observable f = observable_by_id(o.observable);
  Experiment ex("simulate", c,
                {{"steps", o.steps}, {"x_start", o.x_start},
                 {"observable", o.observable}, {"record_every", o.record_every}});
  Engine rng = make_engine(c.seed, 0, 0x73696d);
  SkewPoint p{OmegaState::from_seed(derive_seed(c.seed, 0, 0x6f6d)),
              o.x_start >= 0.0 ? o.x_start : uniform01(rng)};
  if (!(p.x >= 0.0 && p.x <= 1.0)) throw ConfigError("x-start must be in [0, 1]");
  std::vector<std::vector<double>> rows;
  bool in_range = true, shift_exact = true;
  double sum = 0.0;
  std::uint64_t in_y_count = 0;
  for (std::uint64_t k = 0; k < o.steps; ++k) {
    if (o.record_every && k % o.record_every == 0) {
      rows.push_back({static_cast<double>(k), p.omega.value(), p.x});
    }
    sum += f(p.omega.value(), p.x);
    if (in_y(p.x)) ++in_y_count;
    const int next_digit = p.omega.digit(1);
    step(p, curve);
    shift_exact = shift_exact && p.omega.digit(0) == next_digit;
    in_range = in_range && p.x >= 0.0 && p.x <= 1.0;
  }
  const double n = static_cast<double>(std::max<std::uint64_t>(o.steps, 1));
  ex.results() = {{"birkhoff_average", sum / n},
                  {"time_in_y_fraction", static_cast<double>(in_y_count) / n},
                  {"final_omega", p.omega.value()},
                  {"final_x", p.x}};
  if (o.record_every) ex.csv("orbit.csv", {"k", "omega", "x"}, rows);
  ex.check("orbit_in_unit_interval", in_range, true);
  ex.check("omega_shift_exact", shift_exact, true);
  return ex.finish();
}

// ---------------------------------------------------------------------- xn

struct XnOpts {
  std::size_t n = 100000;
  std::size_t samples = 2000;
  std::size_t chain_points = 60;
};

int run_xn(const Common& c, const XnOpts& o) {
  const ParamCurve curve = c.curve();
  if (o.n < 2) throw ConfigError("n must be >= 2");
  Experiment ex("xn", c, {{"n", o.n}, {"samples", o.samples}});
  const auto est = xn_asymptotic_constant(curve, o.n, o.samples, c.seed, c.workers);
  const double scale =
      std::pow(static_cast<double>(o.n) / std::sqrt(std::log(static_cast<double>(o.n))),
               1.0 / curve.alpha_min());
  const double mf = scale * xn_mean_field(curve, static_cast<double>(o.n));
  ex.results() = {{"mean", est.mean},
                  {"stderr", est.stderr_},
                  {"c2", est.c2},
                  {"c2_two_sided", est.c2_two_sided},
                  {"ratio", est.ratio},
                  {"ratio_two_sided", est.ratio_two_sided},
                  {"mean_field", mf},
                  {"mean_field_ratio", mf / est.c2}};

  const OmegaState w = OmegaState::from_seed(derive_seed(c.seed, 0, 0x786e));
  const XnSequence seq = xn_sequence(w, o.n, curve);
  bool strictly = true;
  for (std::size_t k = 1; k < seq.values.size(); ++k) {
    strictly = strictly && seq.values[k] < seq.values[k - 1];
  }
  std::vector<std::vector<double>> rows;
  const double top = std::log(static_cast<double>(o.n));
  std::size_t last = 0;
  for (std::size_t i = 0; i < o.chain_points; ++i) {
    const auto k = static_cast<std::size_t>(std::llround(
        std::exp(top * static_cast<double>(i) / (o.chain_points - 1))));
    if (k == last || k > o.n) continue;
    last = k;
    rows.push_back({static_cast<double>(k), seq.values[k]});
  }
  ex.csv("xn_chain.csv", {"n", "x_n"}, rows);
  ex.check("x1_is_half", seq.values[1] == 0.5, true);
  ex.check("xn_strictly_decreasing", strictly, true);
  ex.check("c2_within_15pct", std::abs(est.ratio - 1.0) <= 0.15, false,
           {{"ratio", est.ratio}});
  return ex.finish();
}

// -------------------------------------------------------------------- tail

struct TailCliOpts {
  TailOptions tail;
  std::size_t density_orbits = 100;
  std::uint64_t density_steps = 1'000'000;
  std::uint64_t density_burn_in = 100'000;
  std::size_t kac_orbits = 200;
  std::uint64_t kac_steps = 100'000;
};

int run_tail(const Common& c, TailCliOpts o) {
  const ParamCurve curve = c.curve();
  o.tail.seed = c.seed;
  o.tail.workers = c.workers;
  Experiment ex("tail", c,
                {{"excursions", o.tail.n_excursions}, {"chains", o.tail.chains},
                 {"n_lo", o.tail.n_lo}, {"n_hi", o.tail.n_hi},
                 {"grid_points", o.tail.grid_points},
                 {"density_orbits", o.density_orbits},
                 {"density_steps", o.density_steps},
                 {"density_burn_in", o.density_burn_in},
                 {"kac_orbits", o.kac_orbits}, {"kac_steps", o.kac_steps}});
  const ExcursionSample sample = sample_excursions(curve, o.tail);
  const TailFit fit = fit_tail(sample, o.tail, curve.alpha_min());
  const double target = 1.0 / curve.alpha_min();
  json r = {{"exponent", fit.exponent},
            {"exponent_stderr", fit.exponent_stderr},
            {"exponent_target", target},
            {"amplitude", fit.amplitude},
            {"amplitude_fixed_exponent", fit.amplitude_fixed},
            {"n_lo", fit.n_lo},
            {"n_hi", fit.n_hi},
            {"range_shrunk", fit.range_shrunk},
            {"excursions", fit.excursions},
            {"longest", fit.longest},
            {"m_y_from_excursions", fit.m_y}};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < fit.n.size(); ++i) {
    rows.push_back({fit.n[i], fit.survival[i], static_cast<double>(fit.exceed[i]),
                    fit.local_amplitude[i], fit.residuals[i]});
  }
  ex.csv("tail.csv", {"n", "survival", "exceed", "local_amplitude", "residual"},
         rows);
  ex.check("exponent_within_5pct", std::abs(fit.exponent / target - 1.0) <= 0.05,
           false, {{"exponent", fit.exponent}, {"target", target}});
  if (o.density_orbits > 0) {
    DensityOptions d;
    d.n_orbits = o.density_orbits;
    d.n_steps = o.density_steps;
    d.burn_in = o.density_burn_in;
    d.seed = c.seed;
    d.workers = c.workers;
    const DensityGrid grid = estimate_density(curve, d);
    const SliceEstimate s = slice_estimate(grid);
    const double a = constant_A(curve, s.value);
    const double a2 = constant_A_two_sided(curve, s.value);
    r["slice"] = s.value;
    r["slice_extrapolation_error"] = s.extrapolation_error;
    r["A"] = a;
    r["A_two_sided"] = a2;
    r["amplitude_ratio_to_A"] = fit.amplitude_fixed / a;
    r["amplitude_ratio_to_A_two_sided"] = fit.amplitude_fixed / a2;
    ex.check("amplitude_within_20pct", std::abs(fit.amplitude_fixed / a - 1.0) <= 0.2,
             false, {{"amplitude", fit.amplitude_fixed}, {"A", a}});
  }
  if (o.kac_orbits > 0) {
    const KacEstimate k =
        kac_check(curve, sample, o.kac_orbits, o.kac_steps, c.seed, c.workers);
    r["kac"] = {{"mean_phi", k.mean_phi}, {"mean_phi_stderr", k.mean_phi_stderr},
                {"m_y", k.m_y}, {"m_y_stderr", k.m_y_stderr},
                {"product", k.product}};
    ex.check("kac_product", k.product >= 0.98 && k.product <= 1.02, false,
             {{"product", k.product}});
  }
  ex.results() = r;
  return ex.finish();
}

// ----------------------------------------------------------------- density

struct DensityCliOpts {
  DensityOptions d;
  std::size_t transport_points = 4000;
  std::size_t coarsen = 8;
};

int run_density(const Common& c, DensityCliOpts o) {
  const ParamCurve curve = c.curve();
  o.d.seed = c.seed;
  o.d.workers = c.workers;
  Experiment ex("density", c,
                {{"orbits", o.d.n_orbits}, {"steps", o.d.n_steps},
                 {"burn_in", o.d.burn_in}, {"n_omega", o.d.n_omega},
                 {"n_x", o.d.n_x}, {"transport_points", o.transport_points},
                 {"coarsen", o.coarsen}});
  const DensityGrid grid = estimate_density(curve, o.d);
  json r = {{"total_mass", grid.total_mass()},
            {"m_y", grid.mass_on_y()},
            {"starved_bins", grid.starved_bins(o.d.starved_below).size()}};
  try {
    const SliceEstimate s = slice_estimate(grid);
    r["slice"] = s.value;
    r["slice_extrapolation_error"] = s.extrapolation_error;
    if (curve.alpha_min() > 0.5 && curve.alpha_min() < 1.0) {
      r["A"] = constant_A(curve, s.value);
      r["A_two_sided"] = constant_A_two_sided(curve, s.value);
    }
  } catch (const std::runtime_error& e) {
    warn(std::string("slice not estimated: ") + e.what());
  }
  std::vector<std::vector<double>> rows;
  const auto& edges = grid.x_edges();
  const double dw = 1.0 / static_cast<double>(grid.n_omega());
  for (std::size_t i = 0; i < grid.n_omega(); ++i) {
    for (std::size_t j = 0; j < grid.n_x(); ++j) {
      rows.push_back({static_cast<double>(i) * dw, static_cast<double>(i + 1) * dw,
                      edges[j], edges[j + 1], grid.weight(i, j), grid.density(i, j)});
    }
  }
  ex.csv("density.csv", {"omega_lo", "omega_hi", "x_lo", "x_hi", "weight", "density"},
         rows);
  rows.clear();
  const auto marg = grid.x_marginal();
  for (std::size_t j = 0; j < grid.n_x(); ++j) {
    rows.push_back({edges[j], edges[j + 1], marg[j]});
  }
  ex.csv("x_marginal.csv", {"x_lo", "x_hi", "density"}, rows);
  ex.check("total_mass_one", std::abs(grid.total_mass() - 1.0) <= 1e-12, true);
  if (o.transport_points > 0) {
    if (grid.n_omega() % o.coarsen || grid.n_x() % o.coarsen) {
      throw ConfigError("coarsen must divide both grid dimensions");
    }
    const double l1 = transport_l1(curve, grid.coarsen(o.coarsen, o.coarsen),
                                   o.transport_points, c.seed);
    r["transport_l1"] = l1;
    ex.check("transport_l1", l1 <= 0.05, false, {{"l1", l1}});
  }
  ex.results() = r;
  return ex.finish();
}

// ------------------------------------------------------------------- limit

struct LimitOpts {
  std::string regime = "auto";
  std::string observable = "x";
  std::string profile = "one";
  std::vector<std::size_t> n = {1000, 10000};
  std::size_t samples = 10000;
  std::size_t center_orbits = 200;
  std::uint64_t center_steps = 1'000'000;
  std::uint64_t burn_in = 10'000;
  std::optional<double> a_const;
  std::vector<std::size_t> variance_grid;
  std::size_t reduction_n = 0;
  bool hypothesis = false;
  double t_max = 10.0;
  double t_step = 0.05;
};

Regime parse_regime(const std::string& s) {
  for (Regime r : {Regime::kCltSmallAlpha, Regime::kNonstandard, Regime::kStable,
                   Regime::kCltCZero}) {
    if (regime_name(r) == s) return r;
  }
  throw ConfigError("unknown regime '" + s + "'");
}

int run_limit(const Common& c, LimitOpts o) {
  const ParamCurve curve = c.curve();
  if (o.n.empty()) throw ConfigError("need at least one n");
  std::sort(o.n.begin(), o.n.end());
  json params = {{"regime", o.regime}, {"observable", o.observable},
                 {"profile", o.profile}, {"n", o.n}, {"samples", o.samples},
                 {"center_orbits", o.center_orbits},
                 {"center_steps", o.center_steps}, {"burn_in", o.burn_in},
                 {"variance_grid", o.variance_grid},
                 {"reduction_n", o.reduction_n}, {"hypothesis", o.hypothesis},
                 {"t_max", o.t_max}, {"t_step", o.t_step}};
  params["A"] = o.a_const ? json(*o.a_const) : json(nullptr);
  const Observable f = observable_by_id(o.observable);
  const auto t_grid = default_t_grid(o.t_max, o.t_step);
  Experiment ex("limit", c, params);

  CenteringOptions co;
  co.orbits = o.center_orbits;
  co.steps = o.center_steps;
  co.seed = c.seed;
  co.workers = c.workers;
  const CenteredObservable g =
      o.profile == "one" ? center(curve, f, co)
                         : center_with_profile(curve, f, observable_by_id(o.profile), co);
  RegimeSpec spec = classify_regime(curve, g);
  const Regime classified = spec.regime;
  if (o.regime != "auto") spec.regime = parse_regime(o.regime);
  spec.a_const = o.a_const;
  json r = {{"regime", regime_name(spec.regime)},
            {"classified", regime_name(classified)},
            {"forced", o.regime != "auto"},
            {"ambiguous", spec.ambiguous},
            {"c", g.c},
            {"c_error", g.c_error},
            {"c_is_zero", spec.c_is_zero},
            {"mean", g.mean_raw},
            {"centring_coefficient", g.coefficient},
            {"centred_mean_stderr", g.mean_stderr}};

  EnsembleOptions eo;
  eo.seed = c.seed;
  eo.burn_in = o.burn_in;
  eo.workers = c.workers;
  const bool clt = spec.regime == Regime::kCltSmallAlpha ||
                   spec.regime == Regime::kCltCZero;
  std::optional<double> sigma2;
  if (clt) {
    std::vector<std::size_t> vg = o.variance_grid;
    if (vg.empty()) {
      for (std::size_t k = o.n.back(); k >= 16 && vg.size() < 5; k /= 2) vg.push_back(k);
    }
    const VarianceProfile v = variance_estimate(curve, g, vg, o.samples, eo);
    sigma2 = v.sigma2;
    r["variance"] = {{"n", v.n}, {"var_over_n", v.var_over_n},
                     {"stderr", v.stderr_}, {"sigma2", v.sigma2},
                     {"drift", v.drift}};
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < v.n.size(); ++i) {
      rows.push_back({static_cast<double>(v.n[i]), v.var_over_n[i], v.stderr_[i]});
    }
    ex.csv("variance.csv", {"n", "var_over_n", "stderr"}, rows);
    ex.check("variance_plateau", v.plateau, false, {{"drift", v.drift}});
  }

  const auto laws = birkhoff_ensembles(curve, g, spec, o.n, o.samples, eo);
  std::function<double(double)> cdf;
  std::function<std::complex<double>(double)> cf;
  std::unique_ptr<StableCdfTable> table;
  json target;
  if (clt) {
    const double s2 = *sigma2;
    cdf = [s2](double x) { return normal_cdf(x, s2); };
    cf = [s2](double t) { return std::complex<double>(std::exp(-0.5 * s2 * t * t), 0.0); };
    target = {{"law", "normal"}, {"variance", s2}};
  } else if (spec.regime == Regime::kNonstandard) {
    cdf = [](double x) { return normal_cdf(x, 1.0); };
    cf = [](double t) { return std::complex<double>(std::exp(-0.5 * t * t), 0.0); };
    target = {{"law", "normal"}, {"variance", 1.0}};
  } else if (o.a_const) {
    const StableLaw law = theorem_params(curve, *o.a_const, g.c);
    table = std::make_unique<StableCdfTable>(law, -20.0, 20.0, 0.01);
    cdf = [&t = *table](double x) { return t(x); };
    cf = [law](double t) { return stable_cf(law, t); };
    target = {{"law", "stable"}, {"p", law.p}, {"scale", law.scale}, {"beta", law.beta}};
  } else {
    warn("stable target needs --A; distances not computed");
  }
  r["target"] = target;
  std::vector<double> ks, cfd;
  json per_n = json::array();
  for (const auto& law : laws) {
    json row = {{"n", law.n}, {"normalizer", normalizer(spec, static_cast<double>(law.n))}};
    if (cdf) {
      ks.push_back(ks_distance(law, cdf));
      cfd.push_back(cf_distance(law, cf, t_grid));
      row["ks"] = ks.back();
      row["cf"] = cfd.back();
    }
    per_n.push_back(row);
    std::vector<std::vector<double>> rows;
    for (double v : law.samples) rows.push_back({v});
    ex.csv("sums_n" + std::to_string(law.n) + ".csv", {"value"}, rows);
  }
  r["per_n"] = per_n;
  if (cdf && laws.size() >= 2) {
    ex.check("ks_decreasing", decreasing(ks), false);
    ex.check("cf_decreasing", decreasing(cfd), false);
  }
  if (cdf && spec.regime == Regime::kStable) {
    ex.check("final_cf_le_0.15", cfd.back() <= 0.15, false, {{"cf", cfd.back()}});
  }
  if (cdf && clt) {
    ex.check("final_ks_le_0.05", ks.back() <= 0.05, false, {{"ks", ks.back()}});
  }

  if (o.reduction_n > 0 || o.hypothesis) {
    HypothesisOptions ho;
    ho.seed = c.seed;
    ho.workers = c.workers;
    const HypothesisReport h = hypothesis_suite(curve, g, spec, ho);
    if (o.hypothesis) {
      json rows = json::array();
      for (const auto& t : h.tail_counts) {
        rows.push_back({{"eps", t.eps}, {"scaled", t.scaled}, {"sup", t.sup},
                        {"growth", t.growth}, {"bounded", t.bounded}});
      }
      r["hypotheses"] = {{"m_y", h.m_y}, {"mean_phi", h.mean_phi},
                         {"n_grid", h.n_grid}, {"tail_counts", rows},
                         {"phi_q95", h.phi_q95}, {"phi_q95_growth", h.phi_q95_growth},
                         {"birkhoff_f", h.birkhoff_f}, {"birkhoff_phi", h.birkhoff_phi}};
      bool bounded = true;
      for (const auto& t : h.tail_counts) bounded = bounded && t.bounded;
      ex.check("tail_counts_bounded", bounded, false);
      ex.check("phi_fluctuations_tight", h.phi_tight, false);
      ex.check("induced_birkhoff", h.birkhoff_pass, false,
               {{"value", h.birkhoff_f}});
    }
    if (o.reduction_n > 0) {
      const ReductionReport red =
          induced_reduction_check(curve, g, spec, o.reduction_n, o.samples, h.m_y, eo);
      r["reduction"] = {{"n", red.n}, {"induced_steps", red.induced_steps},
                        {"m_y", red.m_y}, {"ks", red.ks}, {"bound", red.bound}};
      ex.check("reduction_ks", red.pass, false, {{"ks", red.ks}});
    }
  }
  ex.results() = r;
  return ex.finish();
}

// ------------------------------------------------------------------ stable

struct StableOpts {
  double p = 1.5;
  double scale = 1.0;
  double beta = 0.0;
  std::string grid = "-5:5:0.1";
  std::size_t count = 10000;
  double a_const = 0.0;
  double c_obs = 0.0;
};

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    double v = 0.0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size()) {
      throw ConfigError("bad grid '" + s + "', expected lo:hi:step");
    }
    parts.push_back(v);
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] >= parts[0])) {
    throw ConfigError("bad grid '" + s + "', expected lo:hi:step");
  }
  std::vector<double> x;
  const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  if (n > 1'000'000) throw ConfigError("grid has too many points");
  for (std::size_t i = 0; i <= n; ++i) x.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return x;
}

StableLaw law_of(const StableOpts& o) {
  StableLaw law{o.p, o.scale, o.beta};
  try {
    law.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return law;
}

int run_stable_eval(const Common& c, const StableOpts& o) {
  const StableLaw law = law_of(o);
  const auto xs = parse_grid(o.grid);
  Experiment ex("stable-eval", c,
                {{"p", o.p}, {"scale", o.scale}, {"beta", o.beta}, {"grid", o.grid}});
  std::vector<std::vector<double>> rows;
  bool monotone = true;
  double prev = -1.0;
  for (double x : xs) {
    const double f = stable_cdf(law, x);
    // Each value carries up to 1e-6 of quadrature error.
    monotone = monotone && f >= prev - 2e-6;
    prev = f;
    const auto phi = stable_cf(law, x);
    rows.push_back({x, f, phi.real(), phi.imag()});
  }
  ex.csv("cdf.csv", {"x", "cdf", "cf_re", "cf_im"}, rows);
  ex.results() = {{"points", xs.size()}};
  ex.check("cdf_monotone", monotone, true);
  return ex.finish();
}

int run_stable_sample(const Common& c, const StableOpts& o) {
  const StableLaw law = law_of(o);
  Experiment ex("stable-sample", c,
                {{"p", o.p}, {"scale", o.scale}, {"beta", o.beta}, {"count", o.count}});
  std::vector<double> v(o.count);
  for (std::size_t i = 0; i < o.count; ++i) {
    Engine rng = make_engine(c.seed, i, 0x73746162);
    v[i] = stable_sample(law, rng);
  }
  std::vector<std::vector<double>> rows;
  for (double x : v) rows.push_back({x});
  ex.csv("samples.csv", {"value"}, rows);
  std::sort(v.begin(), v.end());
  EmpiricalLaw emp{0, v};
  json r = {{"count", o.count}};
  if (o.count >= 100) {
    const StableCdfTable table(law, -20.0, 20.0, 0.01);
    const double ks = ks_distance(emp, [&](double x) { return table(x); });
    r["ks_to_cdf"] = ks;
    ex.check("sampler_matches_cdf", ks <= 1.63 / std::sqrt(static_cast<double>(o.count)),
             false, {{"ks", ks}});
  }
  ex.results() = r;
  return ex.finish();
}

int run_stable_params(const Common& c, const StableOpts& o) {
  const ParamCurve curve = c.curve();
  Experiment ex("stable-params", c, {{"A", o.a_const}, {"c", o.c_obs}});
  StableLaw law;
  try {
    law = theorem_params(curve, o.a_const, o.c_obs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ex.results() = {{"p", law.p}, {"scale", law.scale}, {"beta", law.beta}};
  return ex.finish();
}

// ------------------------------------------------------------------ decorr

struct DecorrOpts {
  std::string observable = "sin";
  std::vector<double> p = {2.0, 4.0};
  int lo = 4;
  int hi = 14;
  std::size_t samples = 10000;
  int decay_max = 10;
};

BaseFn base_by_id(const std::string& id) {
  const double tp = 2.0 * std::numbers::pi;
  if (id == "sin") return [tp](double w) { return std::sin(tp * w); };
  if (id == "quad") return [](double w) { return w * (1.0 - w); };
  if (id == "kink") {
    return [tp](double w) { return std::abs(w - 0.3) + 0.2 * std::sin(tp * w); };
  }
  throw ConfigError("unknown base observable '" + id + "' (sin, quad, kink)");
}

int run_decorr(const Common& c, const DecorrOpts& o) {
  const BaseFn chi = base_by_id(o.observable);
  Experiment ex("decorr", c,
                {{"observable", o.observable}, {"p", o.p}, {"lo", o.lo},
                 {"hi", o.hi}, {"samples", o.samples}, {"decay_max", o.decay_max}});
  json r;
  const TrigPoly s = TrigPoly::sin_mode(1);
  const double exact = correlation_exact(s, s, 1);
  r["sin_covariance_n1"] = exact;
  ex.check("sin_exact_zero_covariance", std::abs(exact) <= 1e-12, true);
  std::vector<std::vector<double>> rows;
  json profiles = json::array();
  for (double p : o.p) {
    const BirkhoffProfile prof =
        dyadic_profile(chi, p, o.lo, o.hi, o.samples, c.seed, c.workers);
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
      rows.push_back({static_cast<double>(prof.rows[i].n), p, prof.rows[i].sum_norm,
                      prof.sum_ratio[i], prof.rows[i].max_norm, prof.max_ratio[i]});
    }
    profiles.push_back({{"p", p}, {"sum_ratio", prof.sum_ratio},
                        {"max_ratio", prof.max_ratio}, {"k_hat", prof.sum_sup},
                        {"k_hat_max", prof.max_sup}});
    ex.check("sum_trend_p" + fmt(p), prof.sum_trend_ok, false);
    ex.check("max_trend_p" + fmt(p), prof.max_trend_ok, false);
  }
  ex.csv("decorr.csv", {"n", "p", "norm", "ratio", "max_norm", "max_ratio"}, rows);
  r["profiles"] = profiles;
  if (o.decay_max >= 2) {
    const DecayFit fit = decay_fit(chi, chi, o.decay_max);
    r["decay"] = {{"n", fit.n}, {"cov", fit.cov}, {"delta", fit.delta},
                  {"c", fit.c}, {"used", fit.used}};
  }
  ex.results() = r;
  return ex.finish();
}

// ------------------------------------------------------------------- check

struct CheckOpts {
  std::size_t pairs = 100000;
  std::size_t max_n = 50;
  std::size_t distortion_pairs = 2000;
  std::size_t xy_samples = 2000;
  std::size_t xy_max_n = 200;
  std::size_t label_samples = 20000;
  std::size_t segments = 2000;
  std::size_t sandwich_n = 100000;
  std::size_t sandwich_orbits = 200;
};

int run_check(const Common& c, const CheckOpts& o) {
  const ParamCurve curve = c.curve();
  Experiment ex("check", c,
                {{"pairs", o.pairs}, {"max_n", o.max_n},
                 {"distortion_pairs", o.distortion_pairs},
                 {"xy_samples", o.xy_samples}, {"xy_max_n", o.xy_max_n},
                 {"label_samples", o.label_samples}, {"segments", o.segments},
                 {"sandwich_n", o.sandwich_n}, {"sandwich_orbits", o.sandwich_orbits}});
  const GeometryConstants g = compute_geometry(curve);
  json r = {{"geometry",
             {{"lambda", g.lambda}, {"lambda_raw", g.lambda_raw},
              {"lambda_clamped", g.lambda_clamped}, {"a", g.a},
              {"slope_bound", g.slope_bound}, {"eps0", g.eps0}, {"q", g.q}}}};
  json records = json::array();
  const auto add = [&](const CheckRecord& rec) {
    records.push_back({{"name", rec.name}, {"samples", rec.samples},
                       {"worst", rec.worst}, {"threshold", rec.threshold},
                       {"pass", rec.pass}});
    ex.check(rec.name, rec.pass, true);
  };
  add(xy_consistency_check(curve, o.xy_samples, o.xy_max_n, c.seed));
  add(partition_label_check(curve, g, o.label_samples, c.seed + 1));
  add(admissible_curve_check(curve, g, o.segments, c.seed + 2));
  add(comparison_bound_check(curve));
  add(xn_sandwich_check(curve, o.sandwich_n, o.sandwich_orbits, c.seed + 3));
  const ExpansionReport e = expansion_check(curve, g, o.pairs, o.max_n, c.seed + 4);
  records.push_back({{"name", "expansion"}, {"samples", e.pairs_tested},
                     {"worst", e.min_ratio}, {"threshold", e.lambda},
                     {"pass", e.pass}});
  ex.check("expansion", e.pass, true, {{"min_ratio", e.min_ratio}, {"lambda", e.lambda}});
  const DistortionReport d =
      distortion_check(curve, g, o.distortion_pairs, o.max_n, c.seed + 5);
  records.push_back({{"name", "distortion"}, {"samples", d.pairs_tested},
                     {"worst", d.sup_all}, {"threshold", d.growth_threshold},
                     {"pass", d.pass}});
  ex.check("distortion_no_growth", d.pass, false,
           {{"growth_ratio", d.growth_ratio}, {"sup", d.sup_all}});
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 1; n < d.sup_by_n.size(); ++n) {
    rows.push_back({static_cast<double>(n), d.sup_by_n[n],
                    n < e.min_ratio_by_n.size() ? e.min_ratio_by_n[n] : NAN});
  }
  ex.csv("markov_by_n.csv", {"n", "distortion_sup", "expansion_min_ratio"}, rows);
  r["checks"] = records;
  ex.results() = r;
  return ex.finish();
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Simulations and checks for a random intermittent skew product",
               "skewlab"};
  app.set_config("--config", "", "key = value file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--alpha-min", c.alpha_min, "minimum of the exponent curve");
  app.add_option("--epsilon", c.epsilon, "amplitude of the exponent curve");
  app.add_option("--x0", c.x0, "location of the minimum");
  app.add_flag("--unsafe-params", c.unsafe,
               "allow alpha_max >= 3/2 alpha_min and epsilon = 0");
  app.add_option("--seed", c.seed, "master seed");
  app.add_option("--workers", c.workers, "worker threads (0 = all cores)");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--blocking", c.blocking, "assertions to make blocking")->delimiter(',');
  app.add_option("--advisory", c.advisory, "assertions to make advisory")->delimiter(',');

  std::function<int()> action;

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "one orbit of the skew product");
  sim->add_option("--steps", so.steps);
  sim->add_option("--x-start", so.x_start, "initial x (negative: random)");
  sim->add_option("--observable", so.observable);
  sim->add_option("--record-every", so.record_every, "0 disables orbit.csv");
  sim->callback([&] { action = [&] { return run_simulate(c, so); }; });

  XnOpts xo;
  auto* xn = app.add_subcommand("xn", "asymptotic constant of X_n");
  xn->add_option("--n", xo.n);
  xn->add_option("--samples", xo.samples);
  xn->callback([&] { action = [&] { return run_xn(c, xo); }; });

  TailCliOpts to;
  auto* tail = app.add_subcommand("tail", "return-time tail, amplitude and Kac");
  tail->add_option("--excursions", to.tail.n_excursions);
  tail->add_option("--chains", to.tail.chains);
  tail->add_option("--n-lo", to.tail.n_lo);
  tail->add_option("--n-hi", to.tail.n_hi);
  tail->add_option("--grid-points", to.tail.grid_points);
  tail->add_option("--density-orbits", to.density_orbits, "0 skips the amplitude");
  tail->add_option("--density-steps", to.density_steps);
  tail->add_option("--density-burn-in", to.density_burn_in);
  tail->add_option("--kac-orbits", to.kac_orbits, "0 skips the Kac check");
  tail->add_option("--kac-steps", to.kac_steps);
  tail->callback([&] { action = [&] { return run_tail(c, to); }; });

  DensityCliOpts dopt;
  auto* dens = app.add_subcommand("density", "histogram of the invariant density");
  dens->add_option("--orbits", dopt.d.n_orbits);
  dens->add_option("--steps", dopt.d.n_steps);
  dens->add_option("--burn-in", dopt.d.burn_in);
  dens->add_option("--n-omega", dopt.d.n_omega);
  dens->add_option("--n-x", dopt.d.n_x);
  dens->add_option("--transport-points", dopt.transport_points, "0 skips transport");
  dens->add_option("--coarsen", dopt.coarsen);
  dens->callback([&] { action = [&] { return run_density(c, dopt); }; });

  LimitOpts lo;
  double a_value = 0.0;
  auto* lim = app.add_subcommand("limit", "limit laws of Birkhoff sums");
  lim->add_option("--regime", lo.regime, "auto or a regime tag");
  lim->add_option("--observable", lo.observable);
  lim->add_option("--profile", lo.profile, "centring profile (one, x)");
  lim->add_option("--n", lo.n)->delimiter(',');
  lim->add_option("--samples", lo.samples);
  lim->add_option("--center-orbits", lo.center_orbits);
  lim->add_option("--center-steps", lo.center_steps);
  lim->add_option("--burn-in", lo.burn_in);
  auto* a_opt = lim->add_option("--A", a_value, "tail constant A");
  lim->add_option("--variance-grid", lo.variance_grid)->delimiter(',');
  lim->add_option("--reduction-n", lo.reduction_n, "0 skips the reduction check");
  lim->add_flag("--hypothesis", lo.hypothesis, "run the induced-map hypothesis suite");
  lim->add_option("--t-max", lo.t_max);
  lim->add_option("--t-step", lo.t_step);
  lim->callback([&] {
    if (a_opt->count() > 0) lo.a_const = a_value;
    action = [&] { return run_limit(c, lo); };
  });

  StableOpts sto;
  auto* stab = app.add_subcommand("stable", "stable-law services");
  stab->require_subcommand(1);
  stab->fallthrough();
  auto* ev = stab->add_subcommand("eval", "CDF and CF on a grid");
  auto* sa = stab->add_subcommand("sample", "exact samples");
  auto* pa = stab->add_subcommand("params", "limit law of the stable regime");
  for (auto* s : {ev, sa}) {
    s->add_option("--p", sto.p);
    s->add_option("--scale", sto.scale);
    s->add_option("--beta", sto.beta);
  }
  ev->add_option("--grid", sto.grid, "lo:hi:step");
  sa->add_option("--count", sto.count);
  pa->add_option("--A", sto.a_const)->required();
  pa->add_option("--c", sto.c_obs)->required();
  ev->callback([&] { action = [&] { return run_stable_eval(c, sto); }; });
  sa->callback([&] { action = [&] { return run_stable_sample(c, sto); }; });
  pa->callback([&] { action = [&] { return run_stable_params(c, sto); }; });

  DecorrOpts deo;
  auto* dec = app.add_subcommand("decorr", "Birkhoff norms and correlations of 4 omega");
  dec->add_option("--observable", deo.observable, "sin, quad or kink");
  dec->add_option("--p", deo.p)->delimiter(',');
  dec->add_option("--lo", deo.lo, "smallest n = 2^lo");
  dec->add_option("--hi", deo.hi, "largest n = 2^hi");
  dec->add_option("--samples", deo.samples);
  dec->add_option("--decay-max", deo.decay_max);
  dec->callback([&] { action = [&] { return run_decorr(c, deo); }; });

  CheckOpts co;
  auto* chk = app.add_subcommand("check", "property suite of the Markov structure");
  chk->add_option("--pairs", co.pairs);
  chk->add_option("--max-n", co.max_n);
  chk->add_option("--distortion-pairs", co.distortion_pairs);
  chk->add_option("--xy-samples", co.xy_samples);
  chk->add_option("--xy-max-n", co.xy_max_n);
  chk->add_option("--label-samples", co.label_samples);
  chk->add_option("--segments", co.segments);
  chk->add_option("--sandwich-n", co.sandwich_n);
  chk->add_option("--sandwich-orbits", co.sandwich_orbits);
  chk->callback([&] { action = [&] { return run_check(c, co); }; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action ? action() : 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << '\n';
  }
  return 2;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace skewlab::cli
