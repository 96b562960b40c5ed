#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "qcopt/errors.hpp"
#include "qcopt/numeric.hpp"

namespace qcopt {

/// Symmetric mid-rise quantizer with unbounded range:
///   q(x) = delta * (floor(x / delta) + 1/2).
/// Outputs are odd multiples of delta/2; zero is never an output.
struct MidRiseInfinite {
  Rational delta;

  explicit MidRiseInfinite(Rational level) : delta(std::move(level)) {
    if (delta <= 0) throw Error("quantization level must be positive");
  }
};

/// floor(x / delta) with mathematical floor. This integer (not the mid-rise
/// value itself) is the payload handed to the consensus protocol.
inline Int floor_level(const MidRiseInfinite& q, const Rational& x) {
  return floor_rational(x / q.delta);
}

inline Int floor_level(const MidRiseInfinite& q, double x) {
  return floor_level(q, rational_from_double(x));
}

inline Rational quantize_infinite(const MidRiseInfinite& q, const Rational& x) {
  return q.delta * (Rational(floor_level(q, x)) + Rational(1, 2));
}

inline Rational quantize_infinite(const MidRiseInfinite& q, double x) {
  return quantize_infinite(q, rational_from_double(x));
}

/// Smallest bit width that distinguishes `level_count` symbols.
inline int bits_for_levels(long level_count) {
  int bits = 0;
  while ((1L << bits) < level_count) ++bits;
  return bits;
}

/// Bounded mid-rise quantizer with a movable basis. Exposes 2N levels with
/// indices in [-N, N-1]; the output for index j is basis + (j + 1/2) * delta
/// and out-of-range inputs clamp to the outermost steps.
struct BoundedMidRise {
  Rational basis;
  Rational delta;
  long half_levels;  // N

  BoundedMidRise(Rational basis_, Rational level, long n)
      : basis(std::move(basis_)), delta(std::move(level)), half_levels(n) {
    if (delta <= 0) throw Error("quantization level must be positive");
    if (half_levels < 1) throw Error("bounded quantizer needs at least one level per side");
  }

  int bits_per_symbol() const { return bits_for_levels(2 * half_levels); }

  Rational lower_bound() const { return basis - half_levels * delta; }
  Rational upper_bound() const { return basis + half_levels * delta; }
};

struct QuantizedValue {
  Rational value;
  long level;  // index in [-N, N-1]
};

inline QuantizedValue quantize_bounded(const BoundedMidRise& q, const Rational& x) {
  Int raw = floor_rational((x - q.basis) / q.delta);
  const Int lo = -q.half_levels;
  const Int hi = q.half_levels - 1;
  if (raw < lo) raw = lo;
  if (raw > hi) raw = hi;
  const long level = raw.convert_to<long>();
  return {q.basis + (Rational(level) + Rational(1, 2)) * q.delta, level};
}

inline QuantizedValue quantize_bounded(const BoundedMidRise& q, double x) {
  return quantize_bounded(q, rational_from_double(x));
}

/// Fixed-length code for the 2N bounded levels. Code word = level + N,
/// rendered big-endian as ASCII '0'/'1'; code 0 is the lowest step.
class FlcCodec {
 public:
  explicit FlcCodec(long half_levels) : half_levels_(half_levels) {
    if (half_levels_ < 1) throw Error("codec needs at least one level per side");
    bits_ = bits_for_levels(2 * half_levels_);
  }

  int bits_per_symbol() const { return bits_; }
  long half_levels() const { return half_levels_; }

  std::string encode(long level) const {
    if (level < -half_levels_ || level >= half_levels_)
      throw IndexOutOfRange("level " + std::to_string(level) + " outside [-N, N-1] for N=" +
                            std::to_string(half_levels_));
    const unsigned long code = static_cast<unsigned long>(level + half_levels_);
    std::string bits(static_cast<std::size_t>(bits_), '0');
    for (int b = 0; b < bits_; ++b)
      if (code & (1UL << (bits_ - 1 - b))) bits[static_cast<std::size_t>(b)] = '1';
    return bits;
  }

  long decode(std::string_view bits) const {
    if (static_cast<int>(bits.size()) != bits_)
      throw BadLength("expected " + std::to_string(bits_) + " bits, got " +
                      std::to_string(bits.size()));
    unsigned long code = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw BadLength("bit-string may only contain '0' and '1'");
      code = (code << 1) | static_cast<unsigned long>(c == '1');
    }
    if (code >= static_cast<unsigned long>(2 * half_levels_))
      throw IndexOutOfRange("code word " + std::string(bits) + " has no level for N=" +
                            std::to_string(half_levels_));
    return static_cast<long>(code) - half_levels_;
  }

 private:
  long half_levels_;
  int bits_ = 0;
};

/// Message width for unbounded-quantizer payloads. An explicitly configured
/// width wins; the canonical levels 0.1 / 0.01 / 0.001 carry 7 / 10 / 14 bits;
/// otherwise the width is derived as ceil(log2(range / delta)) + 1 from a
/// configured value range (+1 for the sign).
inline int bits_for_infinite_message(const Rational& delta,
                                     std::optional<int> configured_width = std::nullopt,
                                     std::optional<Rational> range = std::nullopt) {
  if (configured_width) {
    if (*configured_width < 1) throw Error("message width must be positive");
    return *configured_width;
  }
  if (delta <= 0) throw Error("quantization level must be positive");
  if (delta == Rational(1, 10)) return 7;
  if (delta == Rational(1, 100)) return 10;
  if (delta == Rational(1, 1000)) return 14;
  if (range) {
    if (*range <= 0) throw Error("value range must be positive");
    return static_cast<int>(ceil_log2(*range / delta)) + 1;
  }
  throw MissingWidth("no message width rule for quantization level " + rational_to_string(delta) +
                     ": configure a width or a value range");
}

}  // namespace qcopt
