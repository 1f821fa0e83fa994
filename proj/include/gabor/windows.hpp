#pragma once

// Window functions g on the real line.
//
// Three variants: exact piecewise polynomials (B-splines and user data),
// characteristic functions of half-open intervals, and Gaussians.  Every
// piecewise window is right-continuous: at a breakpoint the piece on the
// right supplies the value, and the last breakpoint already evaluates to 0.

#include "gabor/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gabor {

/// Compactly supported piecewise polynomial with rational data.
///
/// Piece i lives on [breakpoints[i], breakpoints[i+1]) and is stored in the
/// local variable t = x - breakpoints[i], ascending powers.
class PiecewisePolyWindow {
public:
  PiecewisePolyWindow(std::vector<Rational> breakpoints, std::vector<std::vector<Rational>> pieces)
      : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (breaks_.size() < 2) throw std::invalid_argument("piecewise window: need at least two breakpoints");
    if (pieces_.size() != breaks_.size() - 1)
      throw std::invalid_argument("piecewise window: need exactly one piece per interval");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
      if (!(breaks_[i] < breaks_[i + 1]))
        throw std::invalid_argument("piecewise window: breakpoints must be strictly ascending");
    for (auto &piece : pieces_) {
      while (piece.size() > 1 && piece.back().sign() == 0) piece.pop_back();
      if (piece.empty()) piece.emplace_back(0);
    }
    breaks_d_.reserve(breaks_.size());
    for (const auto &b : breaks_) breaks_d_.push_back(b.to_double());
    pieces_d_.reserve(pieces_.size());
    for (const auto &piece : pieces_) {
      std::vector<double> c;
      c.reserve(piece.size());
      for (const auto &a : piece) c.push_back(a.to_double());
      pieces_d_.push_back(std::move(c));
    }
  }

  const std::vector<Rational> &breakpoints() const { return breaks_; }
  const std::vector<std::vector<Rational>> &pieces() const { return pieces_; }
  const Rational &support_begin() const { return breaks_.front(); }
  const Rational &support_end() const { return breaks_.back(); }

  double eval(double x) const {
    if (!(x >= breaks_d_.front()) || x >= breaks_d_.back()) return 0.0;
    auto it = std::upper_bound(breaks_d_.begin(), breaks_d_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - breaks_d_.begin()) - 1;
    const auto &c = pieces_d_[i];
    double t = x - breaks_d_[i];
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
  }

  Rational eval_exact(const Rational &x) const {
    if (x < breaks_.front() || x >= breaks_.back()) return Rational(0);
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    const auto &c = pieces_[i];
    Rational t = x - breaks_[i];
    mpq_class acc = 0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t.mpq() + c[k].mpq();
    return Rational::from_mpq(acc);
  }

  /// Left limit of the piece ending at breakpoint i+1.
  Rational left_limit(std::size_t piece) const {
    const auto &c = pieces_[piece];
    Rational t = breaks_[piece + 1] - breaks_[piece];
    mpq_class acc = 0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t.mpq() + c[k].mpq();
    return Rational::from_mpq(acc);
  }

  /// True when the function (extended by 0 outside the support) has no jumps.
  bool is_continuous() const {
    if (pieces_.front().front().sign() != 0) return false;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
      if (left_limit(i) != pieces_[i + 1].front()) return false;
    return left_limit(pieces_.size() - 1).sign() == 0;
  }

private:
  std::vector<Rational> breaks_;
  std::vector<std::vector<Rational>> pieces_;
  std::vector<double> breaks_d_;
  std::vector<std::vector<double>> pieces_d_;
};

/// Indicator of the half-open interval [a, b).
class CharacteristicWindow {
public:
  CharacteristicWindow(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {
    if (!(a_ < b_)) throw std::invalid_argument("characteristic window: need a < b");
    a_d_ = a_.to_double();
    b_d_ = b_.to_double();
  }

  const Rational &a() const { return a_; }
  const Rational &b() const { return b_; }

  double eval(double x) const { return (x >= a_d_ && x < b_d_) ? 1.0 : 0.0; }
  Rational eval_exact(const Rational &x) const { return (x >= a_ && x < b_) ? Rational(1) : Rational(0); }

private:
  Rational a_, b_;
  double a_d_ = 0.0, b_d_ = 0.0;
};

/// g(x) = exp(-pi x^2 / width^2), peak value 1 at the origin.
class GaussianWindow {
public:
  explicit GaussianWindow(double width) : width_(width) {
    if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("gaussian window: width must be positive");
  }

  double width() const { return width_; }

  double eval(double x) const { return std::exp(-std::numbers::pi * x * x / (width_ * width_)); }

  /// Upper bound on |g(x)| for |x| >= radius.
  double tail_bound(double radius) const { return eval(std::max(radius, 0.0)); }

  /// Upper bound on sum |g(x - spacing*r)| over all r with |x - spacing*r| > radius,
  /// uniform in x.  Each side is a sequence of points at distances >= radius
  /// spaced by `spacing`, bounded by a geometric series.
  double lattice_tail_bound(double radius, double spacing) const {
    if (radius <= 0.0) return std::numeric_limits<double>::infinity();
    double w2 = width_ * width_;
    double ratio = std::exp(-2.0 * std::numbers::pi * radius * spacing / w2);
    return 2.0 * tail_bound(radius) / (1.0 - ratio);
  }

  /// Smallest radius on a width/8 ladder whose lattice tail is <= budget.
  double truncation_radius(double budget, double spacing) const {
    double step = width_ / 8.0;
    double radius = step;
    while (lattice_tail_bound(radius, spacing) > budget) radius += step;
    return radius;
  }

private:
  double width_;
};

class Window {
public:
  using Variant = std::variant<PiecewisePolyWindow, CharacteristicWindow, GaussianWindow>;

  Window(PiecewisePolyWindow w, std::string label) : v_(std::move(w)), label_(std::move(label)) { cache_support(); }
  Window(CharacteristicWindow w, std::string label) : v_(std::move(w)), label_(std::move(label)) { cache_support(); }
  Window(GaussianWindow w, std::string label) : v_(std::move(w)), label_(std::move(label)) {}

  const Variant &variant() const { return v_; }
  const std::string &label() const { return label_; }

  /// Exact rational evaluation is available (piecewise and characteristic variants).
  bool is_exact() const { return !std::holds_alternative<GaussianWindow>(v_); }

  bool is_continuous() const {
    if (auto *pw = std::get_if<PiecewisePolyWindow>(&v_)) return pw->is_continuous();
    return std::holds_alternative<GaussianWindow>(v_);
  }

  const GaussianWindow *gaussian() const { return std::get_if<GaussianWindow>(&v_); }

  /// [begin, end) outside of which g vanishes, for the exact variants.
  std::optional<std::pair<Rational, Rational>> support() const {
    if (auto *pw = std::get_if<PiecewisePolyWindow>(&v_)) return std::make_pair(pw->support_begin(), pw->support_end());
    if (auto *cw = std::get_if<CharacteristicWindow>(&v_)) return std::make_pair(cw->a(), cw->b());
    return std::nullopt;
  }

  /// support() rounded to doubles, cached at construction.
  const std::optional<std::pair<double, double>> &support_d() const { return support_d_; }

  /// Points where g may fail to be smooth.
  std::vector<Rational> breakpoints() const {
    if (auto *pw = std::get_if<PiecewisePolyWindow>(&v_)) return pw->breakpoints();
    if (auto *cw = std::get_if<CharacteristicWindow>(&v_)) return {cw->a(), cw->b()};
    return {};
  }

  double eval(double x) const {
    return std::visit([x](const auto &w) { return w.eval(x); }, v_);
  }

  Rational eval_exact(const Rational &x) const {
    if (auto *pw = std::get_if<PiecewisePolyWindow>(&v_)) return pw->eval_exact(x);
    if (auto *cw = std::get_if<CharacteristicWindow>(&v_)) return cw->eval_exact(x);
    throw std::domain_error("eval_exact: window '" + label_ + "' has no exact rational values");
  }

private:
  void cache_support() {
    auto s = support();
    support_d_ = std::make_pair(s->first.to_double(), s->second.to_double());
  }

  Variant v_;
  std::string label_;
  std::optional<std::pair<double, double>> support_d_;
};

namespace detail {

inline Rational binomial(unsigned n, unsigned k) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return Rational(out);
}

inline Rational factorial(unsigned n) {
  BigInt out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return Rational(out);
}

}  // namespace detail

/// Centered cardinal B-spline B_N = B_{N-1} * chi_[-1/2,1/2], support [-N/2, N/2].
///
/// Uses the truncated-power form
///   B_N(x) = 1/(N-1)! sum_{k=0}^{N} (-1)^k C(N,k) (x + N/2 - k)_+^{N-1},
/// so on [-N/2 + i, -N/2 + i + 1) only k <= i contribute and, in the local
/// variable t, each term is (t + i - k)^{N-1}.
inline Window bspline(int order) {
  if (order < 1) throw std::invalid_argument("bspline: order must be >= 1");
  const auto n = static_cast<unsigned>(order);
  const Rational left = Rational(-order) / Rational(2);
  std::vector<Rational> breaks;
  for (unsigned i = 0; i <= n; ++i) breaks.push_back(left + Rational(static_cast<long>(i)));

  const unsigned degree = n - 1;
  const Rational scale = Rational(1) / detail::factorial(degree);
  std::vector<std::vector<Rational>> pieces;
  for (unsigned i = 0; i < n; ++i) {
    std::vector<Rational> coeffs(degree + 1);
    for (unsigned k = 0; k <= i; ++k) {
      Rational sign_binom = detail::binomial(n, k) * Rational(k % 2 == 0 ? 1 : -1);
      const long shift = static_cast<long>(i) - static_cast<long>(k);
      // (t + shift)^degree = sum_e C(degree, e) shift^(degree-e) t^e
      for (unsigned e = 0; e <= degree; ++e) {
        BigInt power;
        mpz_pow_ui(power.get_mpz_t(), BigInt(shift).get_mpz_t(), degree - e);
        coeffs[e] += sign_binom * detail::binomial(degree, e) * Rational(power);
      }
    }
    for (auto &c : coeffs) c = c * scale;
    pieces.push_back(std::move(coeffs));
  }
  return Window(PiecewisePolyWindow(std::move(breaks), std::move(pieces)), "bspline:" + std::to_string(order));
}

inline Window characteristic(const Rational &a, const Rational &b) {
  return Window(CharacteristicWindow(a, b), "chi:" + a.str() + "," + b.str());
}

inline Window gaussian(double width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "gauss:%.17g", width);
  return Window(GaussianWindow(width), buf);
}

/// True for windows where membership in the Feichtinger algebra is known:
/// continuous compactly supported piecewise polynomials and Gaussians.
inline bool known_in_feichtinger_algebra(const Window &g) { return g.is_continuous(); }

// --- partition of unity ---------------------------------------------------

struct PartitionOfUnityReport {
  bool holds = true;
  bool exact = false;           // sums computed in exact arithmetic
  double witness_x = 0.0;       // sample with the largest deviation
  double deviation = 0.0;       // |sum_s g(x - s) - 1| at the witness
  std::optional<Rational> exact_witness;
  std::optional<Rational> exact_deviation;
  std::size_t samples_checked = 0;
};

/// k-th element of the base-2 van der Corput sequence, exactly.
inline Rational van_der_corput(unsigned long k) {
  BigInt num = 0;
  BigInt den = 1;
  while (k > 0) {
    num = num * 2 + (k & 1UL);
    den *= 2;
    k >>= 1;
  }
  return Rational(num, den);
}

/// Sample set in [0, 1): `count` van der Corput points plus every breakpoint
/// folded into [0, 1), sorted and deduplicated.
inline std::vector<Rational> partition_sample_points(const Window &g, std::size_t count) {
  std::vector<Rational> pts;
  for (std::size_t k = 0; k < count; ++k) pts.push_back(van_der_corput(k));
  for (const auto &b : g.breakpoints()) pts.push_back(b.mod(Rational(1)));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// Exact integer-shift periodization sum_s g(x - s) for an exact window.
inline Rational periodization_exact(const Window &g, const Rational &x) {
  auto supp = g.support();
  if (!supp) throw std::domain_error("periodization_exact: window has no compact support");
  // g(x - s) != 0 requires begin <= x - s < end, i.e. x - end < s <= x - begin.
  BigInt lo = (x - supp->second).floor();
  BigInt hi = (x - supp->first).floor();
  Rational sum(0);
  for (BigInt s = lo; s <= hi; ++s) sum += g.eval_exact(x - Rational(s));
  return sum;
}

/// Floating periodization with absolute truncation error <= tol for Gaussians.
inline double periodization(const Window &g, double x, double tol) {
  long lo = 0, hi = 0;
  if (const auto &supp = g.support_d()) {
    lo = static_cast<long>(std::floor(x - supp->second)) - 1;
    hi = static_cast<long>(std::floor(x - supp->first)) + 1;
  } else {
    const GaussianWindow *gw = g.gaussian();
    double radius = gw->truncation_radius(tol / 2.0, 1.0);
    lo = static_cast<long>(std::ceil(x - radius));
    hi = static_cast<long>(std::floor(x + radius));
  }
  double sum = 0.0;
  for (long s = lo; s <= hi; ++s) sum += g.eval(x - static_cast<double>(s));
  return sum;
}

/// Checks sum_{s in Z} g(x - s) = 1 on the deterministic sample set.  Exact
/// windows are summed exactly (tol ignored); Gaussians numerically.
inline PartitionOfUnityReport check_partition_of_unity(const Window &g, std::size_t sample_count = 64,
                                                       double tol = 1e-12) {
  if (sample_count < 1) throw std::invalid_argument("check_partition_of_unity: sample_count must be >= 1");
  PartitionOfUnityReport rep;
  auto pts = partition_sample_points(g, sample_count);
  rep.samples_checked = pts.size();
  if (g.is_exact()) {
    rep.exact = true;
    Rational worst(-1);
    for (const auto &x : pts) {
      Rational dev = (periodization_exact(g, x) - Rational(1)).abs();
      if (dev > worst) {
        worst = dev;
        rep.exact_witness = x;
        rep.witness_x = x.to_double();
      }
    }
    rep.exact_deviation = worst;
    rep.deviation = worst.to_double();
    rep.holds = worst.sign() == 0;
    return rep;
  }
  double worst = -1.0;
  for (const auto &xr : pts) {
    double x = xr.to_double();
    double dev = std::abs(periodization(g, x, tol * 1e-3) - 1.0);
    if (dev > worst) {
      worst = dev;
      rep.witness_x = x;
    }
  }
  rep.deviation = worst;
  rep.holds = worst <= tol;
  return rep;
}

}  // namespace gabor
