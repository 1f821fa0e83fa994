#pragma once

// Exact rationals with unbounded numerator and denominator.
//
// Always reduced, denominator strictly positive, zero stored as 0/1.
// Values are immutable: every operation returns a new Rational.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gabor {

using BigInt = mpz_class;

class Rational {
public:
  Rational() : value_(0) {}
  Rational(long n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(int n) : value_(n) {}   // NOLINT(google-explicit-constructor)
  explicit Rational(const BigInt &n) : value_(n) {}

  Rational(const BigInt &num, const BigInt &den) {
    if (den == 0) throw std::domain_error("rational: zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
  }

  static Rational from_mpq(mpq_class q) {
    q.canonicalize();
    Rational r;
    r.value_ = std::move(q);
    return r;
  }

  /// Accepts "n", "n/d" and "-n/d" with optional leading '+'. Decimal
  /// points and exponents are rejected.
  static Rational parse(std::string_view text) {
    auto fail = [&](const char *why) {
      throw std::invalid_argument("malformed rational '" + std::string(text) + "': " + why);
    };
    if (text.empty()) fail("empty");
    if (text.find_first_of(".eE") != std::string_view::npos)
      fail("decimal notation is not accepted, write it as num/den (e.g. 0.25 -> 1/4)");
    auto slash = text.find('/');
    auto parse_int = [&](std::string_view s) {
      if (!s.empty() && s.front() == '+') s.remove_prefix(1);
      std::string_view digits = s;
      if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
      if (digits.empty()) fail("missing digits");
      for (char c : digits)
        if (c < '0' || c > '9') fail("unexpected character");
      return BigInt(std::string(s));
    };
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    BigInt num = parse_int(text.substr(0, slash));
    BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) fail("zero denominator");
    return Rational(num, den);
  }

  const mpq_class &mpq() const { return value_; }
  BigInt num() const { return value_.get_num(); }
  BigInt den() const { return value_.get_den(); }

  bool is_integer() const { return value_.get_den() == 1; }
  int sign() const { return sgn(value_); }
  double to_double() const { return value_.get_d(); }

  /// Largest integer <= value.
  BigInt floor() const {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
    return q;
  }

  BigInt ceil() const {
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
    return q;
  }

  /// Representative of value modulo `period` in [0, period).
  Rational mod(const Rational &period) const {
    if (period.sign() <= 0) throw std::domain_error("rational: mod by non-positive period");
    Rational quotient = *this / period;
    return *this - period * Rational(quotient.floor());
  }

  Rational abs() const { return from_mpq(::abs(value_)); }

  std::string str() const {
    if (value_.get_den() == 1) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  friend Rational operator+(const Rational &a, const Rational &b) { return from_mpq(a.value_ + b.value_); }
  friend Rational operator-(const Rational &a, const Rational &b) { return from_mpq(a.value_ - b.value_); }
  friend Rational operator*(const Rational &a, const Rational &b) { return from_mpq(a.value_ * b.value_); }
  friend Rational operator/(const Rational &a, const Rational &b) {
    if (b.value_ == 0) throw std::domain_error("rational: division by zero");
    return from_mpq(a.value_ / b.value_);
  }
  Rational operator-() const { return from_mpq(-value_); }

  Rational &operator+=(const Rational &o) { return *this = *this + o; }
  Rational &operator-=(const Rational &o) { return *this = *this - o; }
  Rational &operator*=(const Rational &o) { return *this = *this * o; }

  friend bool operator==(const Rational &a, const Rational &b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
    int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream &operator<<(std::ostream &os, const Rational &r) { return os << r.str(); }

private:
  mpq_class value_;
};

inline Rational make_rational(const BigInt &num, const BigInt &den) { return Rational(num, den); }

/// Machine-size view of a BigInt; throws when it does not fit.
inline std::int64_t to_int64(const BigInt &n) {
  if (!n.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits: " + n.get_str());
  return n.get_si();
}

/// alpha * beta = p / q in lowest terms.
struct DensityFraction {
  std::int64_t p = 0;
  std::int64_t q = 0;
  bool subcritical_or_critical = false;  // p <= q
};

inline DensityFraction density_fraction(const Rational &alpha, const Rational &beta) {
  if (alpha.sign() <= 0 || beta.sign() <= 0)
    throw std::domain_error("density_fraction: alpha and beta must be positive");
  Rational d = alpha * beta;
  DensityFraction out;
  out.p = to_int64(d.num());
  out.q = to_int64(d.den());
  out.subcritical_or_critical = out.p <= out.q;
  return out;
}

/// Dense row-major matrix of exact rationals.
struct RationalMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> entries;

  RationalMatrix() = default;
  RationalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {}

  Rational &operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const Rational &operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

}  // namespace gabor
