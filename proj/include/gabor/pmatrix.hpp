#pragma once

// The p x q matrix P(x, xi)_{kl} = Z_{alpha q} g(x + alpha l + k / beta, xi)
// for alpha beta = p / q in lowest terms, k in [0, p), l in [0, q).

#include "gabor/rational.hpp"
#include "gabor/windows.hpp"
#include "gabor/zak.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gabor {

/// Raised when a P matrix is requested above critical density (p > q).
class DensityAboveCritical : public std::domain_error {
public:
  DensityAboveCritical(std::int64_t p, std::int64_t q)
      : std::domain_error("density above critical: alpha*beta = " + std::to_string(p) + "/" + std::to_string(q) +
                          " > 1, no Gabor frame exists"),
        p_(p), q_(q) {}
  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }

private:
  std::int64_t p_, q_;
};

struct LatticeParams {
  Rational alpha;
  Rational beta;
  std::int64_t p = 0;
  std::int64_t q = 0;
  Rational zak_period;  // alpha * q

  static LatticeParams make(const Rational &alpha, const Rational &beta) {
    auto d = density_fraction(alpha, beta);
    LatticeParams lat;
    lat.alpha = alpha;
    lat.beta = beta;
    lat.p = d.p;
    lat.q = d.q;
    lat.zak_period = alpha * Rational(static_cast<long>(d.q));
    return lat;
  }

  bool supercritical() const { return p > q; }

  /// alpha l + k / beta, exactly.
  Rational offset(std::int64_t k, std::int64_t l) const {
    return alpha * Rational(static_cast<long>(l)) + Rational(static_cast<long>(k)) / beta;
  }
};

using ComplexMatrix = Eigen::MatrixXcd;

struct PMatrix {
  ComplexMatrix entries;  // rows k, cols l
  double x = 0.0;
  double xi = 0.0;
};

struct ExactPMatrix {
  RationalMatrix entries;
  Rational x;
};

/// Builds P(x, xi) repeatedly for one window and lattice.  The exact offsets
/// alpha l + k / beta are computed once; each entry argument is then
/// offset + x with a single rounding, independent of evaluation order.
class PMatrixBuilder {
public:
  PMatrixBuilder(const Window &g, LatticeParams lat, double tol = kDefaultZakTol)
      : g_(g), lat_(std::move(lat)), tol_(tol), period_d_(lat_.zak_period.to_double()), plan_(g, period_d_, tol) {
    if (lat_.supercritical()) throw DensityAboveCritical(lat_.p, lat_.q);
    offsets_.reserve(static_cast<std::size_t>(lat_.p * lat_.q));
    for (std::int64_t k = 0; k < lat_.p; ++k)
      for (std::int64_t l = 0; l < lat_.q; ++l) offsets_.push_back(lat_.offset(k, l));
    offsets_d_.reserve(offsets_.size());
    for (const auto &o : offsets_) offsets_d_.push_back(o.to_double());
  }

  const LatticeParams &lattice() const { return lat_; }
  const Window &window() const { return g_; }

  PMatrix build(EvaluationPoint pt) const {
    PMatrix out;
    out.x = pt.x;
    out.xi = reduce_unit(pt.xi);
    out.entries.resize(lat_.p, lat_.q);
    std::size_t idx = 0;
    for (std::int64_t k = 0; k < lat_.p; ++k)
      for (std::int64_t l = 0; l < lat_.q; ++l, ++idx)
        out.entries(k, l) = detail::zak_sum(g_, plan_, period_d_, pt.x + offsets_d_[idx], out.xi);
    return out;
  }

  /// Rational x: arguments x + offset are formed exactly.
  PMatrix build(const Rational &x, double xi) const {
    PMatrix out;
    out.x = x.to_double();
    out.xi = reduce_unit(xi);
    out.entries.resize(lat_.p, lat_.q);
    std::size_t idx = 0;
    for (std::int64_t k = 0; k < lat_.p; ++k)
      for (std::int64_t l = 0; l < lat_.q; ++l, ++idx)
        out.entries(k, l) = zak(g_, lat_.zak_period, x + offsets_[idx], out.xi, tol_);
    return out;
  }

  ExactPMatrix build_exact(const Rational &x) const {
    if (!g_.is_exact()) throw std::domain_error("build_p_exact: window '" + g_.label() + "' is not exact");
    ExactPMatrix out;
    out.x = x;
    out.entries = RationalMatrix(static_cast<std::size_t>(lat_.p), static_cast<std::size_t>(lat_.q));
    std::size_t idx = 0;
    for (std::int64_t k = 0; k < lat_.p; ++k)
      for (std::int64_t l = 0; l < lat_.q; ++l, ++idx)
        out.entries(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) =
            zak_exact(g_, lat_.zak_period, x + offsets_[idx]);
    return out;
  }

private:
  const Window &g_;
  LatticeParams lat_;
  double tol_;
  double period_d_;
  detail::SumPlan plan_;
  std::vector<Rational> offsets_;
  std::vector<double> offsets_d_;
};

inline PMatrix build_p(const Window &g, const LatticeParams &lat, EvaluationPoint pt, double tol = kDefaultZakTol) {
  return PMatrixBuilder(g, lat, tol).build(pt);
}

inline PMatrix build_p(const Window &g, const LatticeParams &lat, const Rational &x, double xi,
                       double tol = kDefaultZakTol) {
  return PMatrixBuilder(g, lat, tol).build(x, xi);
}

inline ExactPMatrix build_p_exact(const Window &g, const LatticeParams &lat, const Rational &x) {
  return PMatrixBuilder(g, lat).build_exact(x);
}

/// Checks k / beta == alpha q k / p for every row index k.
inline bool index_formula_consistency(const LatticeParams &lat) {
  const Rational alpha_q_over_p = lat.alpha * Rational(static_cast<long>(lat.q)) / Rational(static_cast<long>(lat.p));
  for (std::int64_t k = 0; k < lat.p; ++k) {
    Rational kk(static_cast<long>(k));
    if (kk / lat.beta != alpha_q_over_p * kk) return false;
  }
  return true;
}

}  // namespace gabor
