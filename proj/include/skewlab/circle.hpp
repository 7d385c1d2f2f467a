#pragma once

// Base dynamics on the circle: the x4 map acting on base-4 digit streams, and
// the exponent curve alpha(omega) that drives the fibre maps.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace skewlab {

/// Supplies base-4 digits in packed words of 32 digits, first digit in the
/// two most significant bits.
class DigitSource {
 public:
  /// Counter-based pseudo-random digits keyed by `seed`.
  static DigitSource random(std::uint64_t seed) noexcept;
  /// Repeats `period` forever (1 <= period.size()).
  static DigitSource periodic(std::span<const std::uint8_t> period);
  /// Emits `prefix` first, then continues with `tail`.
  static DigitSource prefixed(std::span<const std::uint8_t> prefix,
                              DigitSource tail);

  std::uint64_t next_word() noexcept;

 private:
  enum class Kind : std::uint8_t { kRandom, kPeriodic };

  std::uint64_t next_tail_word() noexcept;
  std::uint8_t next_tail_digit() noexcept;
  std::uint64_t fresh_tail_word() noexcept;

  Kind kind_ = Kind::kRandom;
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> pattern_;
  std::size_t phase_ = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> prefix_;
  std::size_t prefix_pos_ = 0;
  // Partially consumed tail word (only used after a prefix that is not a
  // multiple of 32 digits).
  std::uint64_t tail_buffer_ = 0;
  int tail_buffered_ = 0;
};

/// A point of the circle held as its base-4 expansion. The next 32 digits
/// live in a 64-bit window; the shift omega -> 4 omega drops the leading
/// digit, so orbits of any length are exact at the digit level.
class OmegaState {
 public:
  static constexpr int kWindowDigits = 32;

  /// Same as from_seed(0).
  OmegaState() : OmegaState(DigitSource::random(0), 32) {}

  /// Lebesgue-distributed point: i.i.d. uniform digits keyed by `seed`.
  static OmegaState from_seed(std::uint64_t seed, int precision = 32);
  static OmegaState from_digits(std::span<const std::uint8_t> prefix,
                                DigitSource tail, int precision = 32);
  /// Periodic expansion, e.g. {1} gives 1/3 and {0} gives 0.
  static OmegaState periodic(std::span<const std::uint8_t> period,
                             int precision = 32);
  /// The exact binary expansion of `value` in [0,1), continued by zeros.
  static OmegaState from_value(double value, int precision = 32);

  /// Sum of the leading `precision` digits times 4^-i, rounded down to 53
  /// bits when 2*precision > 53. Always in [0,1).
  double value() const noexcept {
    if (precision_ >= 27) return static_cast<double>(window_ >> 11) * 0x1p-53;
    const int bits = 2 * precision_;
    return static_cast<double>(window_ >> (64 - bits)) *
           std::ldexp(1.0, -bits);
  }

  /// Digit at position i (0-based) of the current expansion, i < 32.
  int digit(int i) const noexcept {
    return static_cast<int>((window_ >> (62 - 2 * i)) & 3U);
  }
  /// The next 32 digits packed, first digit most significant.
  std::uint64_t window() const noexcept { return window_; }
  int precision() const noexcept { return precision_; }

  /// omega <- F(omega) = 4 omega mod 1.
  void advance() noexcept {
    if (buffered_ == 0) {
      buffer_ = source_.next_word();
      buffered_ = 32;
    }
    window_ = (window_ << 2) | (buffer_ >> 62);
    buffer_ <<= 2;
    --buffered_;
  }

  OmegaState advanced() const noexcept {
    OmegaState next = *this;
    next.advance();
    return next;
  }

 private:
  OmegaState(DigitSource source, int precision);

  std::uint64_t window_ = 0;
  std::uint64_t buffer_ = 0;
  int buffered_ = 0;
  int precision_ = 32;
  DigitSource source_;
};

/// omega_from_seed.
inline OmegaState omega_from_seed(std::uint64_t seed, int precision = 32) {
  return OmegaState::from_seed(seed, precision);
}

/// omega_advance (pure form).
inline OmegaState omega_advance(const OmegaState& omega) noexcept {
  return omega.advanced();
}

/// The exponent curve
///   alpha(w) = alpha_min + epsilon * (1 + sin 2 pi (w - x0 - 1/4)),
/// which attains alpha_min only at x0 and alpha_max = alpha_min + 2 epsilon
/// at x0 + 1/2.
class ParamCurve {
 public:
  /// Throws std::invalid_argument unless 0 < alpha_min < alpha_max < 1 and
  /// alpha_max < 3/2 alpha_min. `allow_unsafe` lifts only the 3/2 condition
  /// and permits epsilon == 0 (constant exponent).
  ParamCurve(double alpha_min, double epsilon, double x0 = 0.0,
             bool allow_unsafe = false);

  double alpha_min() const noexcept { return alpha_min_; }
  double epsilon() const noexcept { return epsilon_; }
  double x0() const noexcept { return x0_; }
  double alpha_max() const noexcept { return alpha_min_ + 2.0 * epsilon_; }
  /// alpha''(x0) = 4 pi^2 epsilon.
  double second_derivative() const noexcept;
  bool unsafe() const noexcept { return unsafe_; }

  double operator()(double omega) const noexcept;
  /// alpha(omega) - alpha_min = 2 epsilon sin^2(pi (omega - x0)), without
  /// the cancellation of the subtraction.
  double excess(double omega) const noexcept;
  double derivative(double omega) const noexcept;
  /// sup |alpha'| = 2 pi epsilon.
  double max_abs_derivative() const noexcept;

 private:
  double alpha_min_;
  double epsilon_;
  double x0_;
  bool unsafe_;
};

inline double alpha_eval(const ParamCurve& curve, double omega) noexcept {
  return curve(omega);
}

/// E(exp(-(alpha - alpha_min) w)) over Lebesgue omega, adaptive quadrature
/// to absolute tolerance `tol`. Throws QuadratureError on non-convergence.
double laplace_moment(const ParamCurve& curve, double w, double tol = 1e-10);

/// sqrt(2 pi / alpha''(x0)) / sqrt(w), the large-w equivalent of
/// laplace_moment (both sides of the minimum contribute).
double laplace_asymptote(const ParamCurve& curve, double w);

/// sqrt(pi / (2 alpha''(x0))) / sqrt(w): the one-sided form, half of
/// laplace_asymptote. The closed-form constants below are built on it.
double laplace_asymptote_one_sided(const ParamCurve& curve, double w);

}  // namespace skewlab
