#pragma once

// Zak transform Z_alpha g(x, xi) = sum_r g(x - alpha r) e^{2 pi i r xi}.
//
// Compactly supported windows give an exact finite sum; Gaussians are
// truncated at a radius whose rigorous tail bound is below tol / 2.

#include "gabor/rational.hpp"
#include "gabor/windows.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace gabor {

using Complex = std::complex<double>;

struct EvaluationPoint {
  double x = 0.0;
  double xi = 0.0;  // reduced mod 1 before use
};

inline constexpr double kDefaultZakTol = 1e-15;

inline double reduce_unit(double xi) {
  double r = xi - std::floor(xi);
  return r >= 1.0 ? 0.0 : r;
}

namespace detail {

/// e^{2 pi i r xi} with r xi reduced mod 1 before the trig call.
inline Complex unit_phase(long r, double xi) {
  if (xi == 0.0 || r == 0) return {1.0, 0.0};
  double t = reduce_unit(static_cast<double>(r) * xi);
  double angle = 2.0 * std::numbers::pi * t;
  return {std::cos(angle), std::sin(angle)};
}

struct ShiftRange {
  long lo = 0;
  long hi = -1;
};

/// How many terms to sum for a given window and period.  Compact windows use
/// their support; Gaussians a radius whose dropped tail is at most tol / 2
/// (safety factor 2 on tol).
struct SumPlan {
  bool compact = true;
  double begin = 0.0, end = 0.0;  // support, compact windows
  double radius = 0.0;            // Gaussians

  SumPlan(const Window &g, double alpha, double tol) {
    if (const auto &supp = g.support_d()) {
      begin = supp->first;
      end = supp->second;
    } else {
      compact = false;
      radius = g.gaussian()->truncation_radius(tol / 2.0, alpha);
    }
  }

  /// All r whose term g(x - alpha r) can be nonzero (a superset for compact support).
  ShiftRange range(double alpha, double x) const {
    // begin <= x - alpha r < end  <=>  (x - end) / alpha < r <= (x - begin) / alpha
    if (compact)
      return {static_cast<long>(std::floor((x - end) / alpha)) - 1, static_cast<long>(std::floor((x - begin) / alpha)) + 1};
    return {static_cast<long>(std::ceil((x - radius) / alpha)), static_cast<long>(std::floor((x + radius) / alpha))};
  }
};

inline Complex zak_sum(const Window &g, const SumPlan &plan, double alpha, double x, double xi) {
  auto range = plan.range(alpha, x);
  Complex sum{0.0, 0.0};
  for (long r = range.lo; r <= range.hi; ++r) {
    double v = g.eval(x - alpha * static_cast<double>(r));
    if (v != 0.0) sum += v * unit_phase(r, xi);
  }
  return sum;
}

}  // namespace detail

/// Floating Zak transform at a real point.  `alpha_d` is alpha rounded once.
inline Complex zak(const Window &g, double alpha_d, EvaluationPoint pt, double tol = kDefaultZakTol) {
  if (!(alpha_d > 0.0)) throw std::domain_error("zak: alpha must be positive");
  return detail::zak_sum(g, detail::SumPlan(g, alpha_d, tol), alpha_d, pt.x, reduce_unit(pt.xi));
}

inline Complex zak(const Window &g, const Rational &alpha, EvaluationPoint pt, double tol = kDefaultZakTol) {
  if (alpha.sign() <= 0) throw std::domain_error("zak: alpha must be positive");
  return zak(g, alpha.to_double(), pt, tol);
}

/// Zak transform at a rational x: every argument x - alpha r is formed
/// exactly and rounded once, and exact windows are evaluated exactly, so the
/// result is consistent with zak_exact at breakpoints.
inline Complex zak(const Window &g, const Rational &alpha, const Rational &x, double xi, double tol = kDefaultZakTol) {
  if (alpha.sign() <= 0) throw std::domain_error("zak: alpha must be positive");
  if (!g.is_exact()) return zak(g, alpha, EvaluationPoint{x.to_double(), xi}, tol);
  auto supp = *g.support();
  xi = reduce_unit(xi);
  BigInt lo = ((x - supp.second) / alpha).floor();
  BigInt hi = ((x - supp.first) / alpha).floor();
  Complex sum{0.0, 0.0};
  for (BigInt r = lo; r <= hi; ++r) {
    Rational v = g.eval_exact(x - alpha * Rational(r));
    if (v.sign() != 0) sum += v.to_double() * detail::unit_phase(r.get_si(), xi);
  }
  return sum;
}

/// Exact xi = 0 Zak transform: the rational periodization sum_r g(x - alpha r).
inline Rational zak_exact(const Window &g, const Rational &alpha, const Rational &x) {
  if (!g.is_exact()) throw std::domain_error("zak_exact: window '" + g.label() + "' is not exact");
  if (alpha.sign() <= 0) throw std::domain_error("zak_exact: alpha must be positive");
  auto supp = *g.support();
  BigInt lo = ((x - supp.second) / alpha).floor();
  BigInt hi = ((x - supp.first) / alpha).floor();
  mpq_class sum = 0;
  for (BigInt r = lo; r <= hi; ++r) sum += g.eval_exact(x - alpha * Rational(r)).mpq();
  return Rational::from_mpq(sum);
}

}  // namespace gabor
