#include "skewlab/circle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "skewlab/quadrature.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

DigitSource DigitSource::random(std::uint64_t seed) noexcept {
  DigitSource s;
  s.kind_ = Kind::kRandom;
  s.seed_ = splitmix64(seed ^ 0xd1b54a32d192ed03ULL);
  return s;
}

DigitSource DigitSource::periodic(std::span<const std::uint8_t> period) {
  if (period.empty()) throw std::invalid_argument("empty digit period");
  for (auto d : period) {
    if (d > 3) throw std::invalid_argument("base-4 digit out of range");
  }
  DigitSource s;
  s.kind_ = Kind::kPeriodic;
  s.pattern_ = std::make_shared<const std::vector<std::uint8_t>>(
      period.begin(), period.end());
  return s;
}

DigitSource DigitSource::prefixed(std::span<const std::uint8_t> prefix,
                                  DigitSource tail) {
  for (auto d : prefix) {
    if (d > 3) throw std::invalid_argument("base-4 digit out of range");
  }
  tail.prefix_ = std::make_shared<const std::vector<std::uint8_t>>(
      prefix.begin(), prefix.end());
  tail.prefix_pos_ = 0;
  return tail;
}

std::uint64_t DigitSource::fresh_tail_word() noexcept {
  if (kind_ == Kind::kRandom) {
    // SplitMix64 sequence: word j is mix(seed + j * gamma).
    return splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * counter_++);
  }
  std::uint64_t word = 0;
  for (int i = 0; i < 32; ++i) {
    word = (word << 2) | (*pattern_)[phase_];
    phase_ = (phase_ + 1) % pattern_->size();
  }
  return word;
}

std::uint8_t DigitSource::next_tail_digit() noexcept {
  if (tail_buffered_ == 0) {
    tail_buffer_ = fresh_tail_word();
    tail_buffered_ = 32;
  }
  const auto d = static_cast<std::uint8_t>(tail_buffer_ >> 62);
  tail_buffer_ <<= 2;
  --tail_buffered_;
  return d;
}

std::uint64_t DigitSource::next_tail_word() noexcept {
  if (tail_buffered_ == 0) return fresh_tail_word();
  std::uint64_t word = 0;
  for (int i = 0; i < 32; ++i) word = (word << 2) | next_tail_digit();
  return word;
}

std::uint64_t DigitSource::next_word() noexcept {
  if (!prefix_ || prefix_pos_ >= prefix_->size()) return next_tail_word();
  std::uint64_t word = 0;
  for (int i = 0; i < 32; ++i) {
    const std::uint8_t d = prefix_pos_ < prefix_->size()
                               ? (*prefix_)[prefix_pos_++]
                               : next_tail_digit();
    word = (word << 2) | d;
  }
  return word;
}

OmegaState::OmegaState(DigitSource source, int precision)
    : precision_(precision), source_(std::move(source)) {
  if (precision < 1 || precision > kWindowDigits) {
    throw std::invalid_argument("omega precision must be in [1, 32] digits");
  }
  window_ = source_.next_word();
}

OmegaState OmegaState::from_seed(std::uint64_t seed, int precision) {
  return OmegaState(DigitSource::random(seed), precision);
}

OmegaState OmegaState::from_digits(std::span<const std::uint8_t> prefix,
                                   DigitSource tail, int precision) {
  return OmegaState(DigitSource::prefixed(prefix, std::move(tail)), precision);
}

OmegaState OmegaState::periodic(std::span<const std::uint8_t> period,
                                int precision) {
  return OmegaState(DigitSource::periodic(period), precision);
}

OmegaState OmegaState::from_value(double value, int precision) {
  if (!(value >= 0.0 && value < 1.0)) {
    throw std::invalid_argument("omega value must lie in [0,1)");
  }
  // 2^64 * value is an exact integer below 2^64 for any double in [0,1).
  const auto bits = static_cast<std::uint64_t>(std::ldexp(value, 64));
  std::vector<std::uint8_t> digits(32);
  for (int i = 0; i < 32; ++i) {
    digits[i] = static_cast<std::uint8_t>((bits >> (62 - 2 * i)) & 3U);
  }
  const std::uint8_t zero = 0;
  return from_digits(digits, DigitSource::periodic({&zero, 1}), precision);
}

ParamCurve::ParamCurve(double alpha_min, double epsilon, double x0,
                       bool allow_unsafe)
    : alpha_min_(alpha_min),
      epsilon_(epsilon),
      x0_(x0 - std::floor(x0)),
      unsafe_(allow_unsafe) {
  const double amax = alpha_max();
  if (!(alpha_min > 0.0 && alpha_min < 1.0)) {
    throw std::invalid_argument("alpha_min must lie in (0,1)");
  }
  if (epsilon < 0.0 || (epsilon == 0.0 && !allow_unsafe)) {
    throw std::invalid_argument(
        "epsilon must be positive (alpha''(x0) > 0 needs a non-flat curve)");
  }
  if (!(amax < 1.0)) {
    throw std::invalid_argument("alpha_max = alpha_min + 2 epsilon must be < 1");
  }
  if (!allow_unsafe && !(amax < 1.5 * alpha_min)) {
    throw std::invalid_argument(
        "alpha_max must be < 3/2 alpha_min (epsilon < alpha_min / 4); "
        "override with unsafe parameters");
  }
}

double ParamCurve::second_derivative() const noexcept {
  return 4.0 * std::numbers::pi * std::numbers::pi * epsilon_;
}

double ParamCurve::operator()(double omega) const noexcept {
  return alpha_min_ +
         epsilon_ *
             (1.0 + std::sin(2.0 * std::numbers::pi * (omega - x0_ - 0.25)));
}

double ParamCurve::excess(double omega) const noexcept {
  const double s = std::sin(std::numbers::pi * (omega - x0_));
  return 2.0 * epsilon_ * s * s;
}

double ParamCurve::derivative(double omega) const noexcept {
  return 2.0 * std::numbers::pi * epsilon_ *
         std::cos(2.0 * std::numbers::pi * (omega - x0_ - 0.25));
}

double ParamCurve::max_abs_derivative() const noexcept {
  return 2.0 * std::numbers::pi * epsilon_;
}

double laplace_moment(const ParamCurve& curve, double w, double tol) {
  if (w < 0.0) throw std::invalid_argument("laplace_moment needs w >= 0");
  if (w == 0.0) return 1.0;
  const auto integrand = [&](double omega) {
    return std::exp(-curve.excess(omega) * w);
  };
  // One period centred on the minimum, panels refined toward x0.
  const double x0 = curve.x0();
  const auto r = integrate_toward(integrand, x0 - 0.5, x0 + 0.5, x0, tol);
  if (!(r.error <= tol)) {
    throw QuadratureError("laplace_moment did not converge at w=" +
                              std::to_string(w),
                          r.error);
  }
  return r.value;
}

double laplace_asymptote(const ParamCurve& curve, double w) {
  return std::sqrt(2.0 * std::numbers::pi / curve.second_derivative()) /
         std::sqrt(w);
}

double laplace_asymptote_one_sided(const ParamCurve& curve, double w) {
  return std::sqrt(std::numbers::pi / (2.0 * curve.second_derivative())) /
         std::sqrt(w);
}

}  // namespace skewlab
