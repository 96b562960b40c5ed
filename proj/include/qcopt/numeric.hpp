#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcopt {

// Exact arithmetic backbone. Quantization levels, bases and shared estimates
// are carried as rationals so that lattice equality tests and ledger
// identities (delta = delta0 * c_out^out / c_in^in, ...) hold exactly even
// after long refinement chains.
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const Int& v) { return v.convert_to<double>(); }

/// Floor division toward -infinity; b > 0.
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;  // truncates toward zero
  if (a % b != 0 && (a < 0) != (b < 0)) --q;
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) { return -floor_div(-a, b); }

/// floor(q) toward -infinity. cpp_rational keeps its denominator positive.
inline Int floor_rational(const Rational& q) {
  return floor_div(numerator(q), denominator(q));
}

inline Int ceil_rational(const Rational& q) { return -floor_rational(-q); }

inline Rational abs_rational(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Exact rational value of a finite double (every finite double is rational).
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite input");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(x, &exp);           // x = mant * 2^exp, |mant| in [0.5, 1)
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(scaled);
  if (exp > 0) {
    r *= Rational(Int(1) << exp);
  } else if (exp < 0) {
    r /= Rational(Int(1) << -exp);
  }
  return r;
}

/// Parses "7", "-0.12", "1e-3" or "4/3" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    try {
      Int num(std::string(s.substr(0, slash)));
      Int den(std::string(s.substr(slash + 1)));
      if (den == 0) return fail();
      return Rational(num, den);
    } catch (const std::exception&) {
      return fail();
    }
  }

  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  Int mantissa = 0;
  long frac_digits = 0;
  bool any_digit = false;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
    mantissa = mantissa * 10 + (s[i] - '0');
    any_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      mantissa = mantissa * 10 + (s[i] - '0');
      ++frac_digits;
      any_digit = true;
    }
  }
  if (!any_digit) return fail();
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) exp_neg = s[i++] == '-';
    if (i == s.size()) return fail();
    long e = 0;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      e = e * 10 + (s[i] - '0');
      if (e > 100000) return fail();
    }
    exponent = exp_neg ? -e : e;
  }
  if (i != s.size()) return fail();

  Rational value(mantissa);
  long shift = exponent - frac_digits;
  if (shift != 0) {
    Int pow10 = 1;
    for (long k = 0; k < (shift > 0 ? shift : -shift); ++k) pow10 *= 10;
    if (shift > 0) value *= Rational(pow10);
    else value /= Rational(pow10);
  }
  return negative ? Rational(-value) : value;
}

/// "num/den" for non-integers, plain decimal string for integers. Round-trips
/// through parse_rational exactly.
inline std::string rational_to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Smallest integer k with 2^k >= q; requires q > 0.
inline long ceil_log2(const Rational& q) {
  if (q <= 0) throw std::invalid_argument("ceil_log2: argument must be positive");
  const Int num = numerator(q);
  const Int den = denominator(q);
  long k = static_cast<long>(boost::multiprecision::msb(num)) -
           static_cast<long>(boost::multiprecision::msb(den)) - 1;
  auto holds = [&](long kk) {
    return kk >= 0 ? (Int(den) << kk) >= num : den >= (Int(num) << -kk);
  };
  while (!holds(k)) ++k;
  return k;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent substream seed (per trial, per outer step, ...).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Deterministic RNG wrapper. mt19937_64 output is pinned by the standard and
/// the bounded draw below is rejection-sampled, so runs replay bit-for-bit on
/// any conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Unbiased uniform draw from [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  long pick(long lo, long hi) {  // inclusive range
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qcopt
