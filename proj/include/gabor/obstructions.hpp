#pragma once

// Partition-of-unity obstructions.
//
// For m, n, r >= 1 and 1 <= j <= r-1 with (r-1)m + 1 < rn + j < rm and
// gcd(rn + j, rm) = 1, the lattice (1/m, n + j/r) has p = rn + j, q = rm and
// Zak period alpha q = r.  If g has the partition of unity property, every
// column-comb vector v_l (ones at l, l+m, ..., l+(r-1)m) satisfies
// P(x, 0) v_l = (1, ..., 1), so v_0 - v_l lies in the kernel for l = 1..m-1
// and rank P(x, 0) <= (r-1)m + 1 < p.

#include "gabor/pmatrix.hpp"
#include "gabor/rational.hpp"
#include "gabor/ranktest.hpp"
#include "gabor/windows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gabor {

struct PropTwoParams {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t r = 0;
  std::int64_t j = 0;

  std::int64_t p() const { return r * n + j; }
  std::int64_t q() const { return r * m; }
  std::int64_t rank_bound() const { return (r - 1) * m + 1; }

  friend bool operator==(const PropTwoParams &, const PropTwoParams &) = default;
};

enum class Admissibility { Admissible, FailsInequality, FailsCoprimality };

inline const char *to_string(Admissibility a) {
  switch (a) {
    case Admissibility::Admissible: return "admissible";
    case Admissibility::FailsInequality: return "inequality";
    case Admissibility::FailsCoprimality: return "coprimality";
  }
  return "?";
}

struct AdmissibilityReport {
  Admissibility status = Admissibility::Admissible;
  bool inequality_holds = false;
  bool coprime = false;
  /// Set when only coprimality fails: the reduced denominator of alpha*beta,
  /// which is then strictly smaller than rm.
  std::optional<std::int64_t> reduced_q;

  bool admissible() const { return status == Admissibility::Admissible; }
};

inline AdmissibilityReport prop2_applies(const PropTwoParams &pp) {
  if (pp.m < 1 || pp.n < 1 || pp.r < 1) throw std::invalid_argument("prop2_applies: m, n, r must be positive");
  if (pp.j < 1 || pp.j > pp.r - 1)
    throw std::invalid_argument("prop2_applies: j must satisfy 1 <= j <= r-1 (got j=" + std::to_string(pp.j) +
                                ", r=" + std::to_string(pp.r) + ")");
  AdmissibilityReport rep;
  const std::int64_t p = pp.p(), q = pp.q();
  rep.inequality_holds = pp.rank_bound() < p && p < q;
  rep.coprime = std::gcd(p, q) == 1;
  if (!rep.inequality_holds)
    rep.status = Admissibility::FailsInequality;
  else if (!rep.coprime) {
    rep.status = Admissibility::FailsCoprimality;
    rep.reduced_q = q / std::gcd(p, q);
  } else
    rep.status = Admissibility::Admissible;
  return rep;
}

struct Lattice {
  Rational alpha;
  Rational beta;
};

inline void require_admissible(const PropTwoParams &pp, const char *op) {
  auto rep = prop2_applies(pp);
  if (!rep.admissible())
    throw std::invalid_argument(std::string(op) + ": parameters are inadmissible (" + to_string(rep.status) + ")");
}

/// (1/m, (rn + j)/r).
inline Lattice lattice_of(const PropTwoParams &pp) {
  require_admissible(pp, "lattice_of");
  return {Rational(1, pp.m), Rational(pp.p(), pp.r)};
}

/// Inverse of lattice_of: the unique parameters with alpha = 1/m and
/// beta = n + j/r, when alpha has unit numerator and beta is not an integer.
/// Admissibility is not checked.
inline std::optional<PropTwoParams> params_of(const Rational &alpha, const Rational &beta) {
  if (alpha.sign() <= 0 || beta.sign() <= 0) return std::nullopt;
  if (alpha.num() != 1 || beta.is_integer()) return std::nullopt;
  PropTwoParams pp;
  pp.m = to_int64(alpha.den());
  pp.r = to_int64(beta.den());
  pp.n = to_int64(beta.floor());
  pp.j = to_int64(beta.num()) - pp.r * pp.n;
  if (pp.n < 1) return std::nullopt;
  return pp;
}

struct KernelCertificate {
  PropTwoParams params;
  std::vector<std::vector<int>> combs;         // v_0 .. v_{m-1}, each of length q
  std::vector<int> ones;                       // e, length p
  std::vector<std::vector<int>> kernel_basis;  // v_0 - v_l, l = 1 .. m-1
  std::int64_t rank_bound = 0;
};

inline KernelCertificate kernel_certificate(const PropTwoParams &pp) {
  require_admissible(pp, "kernel_certificate");
  KernelCertificate cert;
  cert.params = pp;
  const auto q = static_cast<std::size_t>(pp.q());
  for (std::int64_t l = 0; l < pp.m; ++l) {
    std::vector<int> v(q, 0);
    for (std::int64_t t = 0; t < pp.r; ++t) v[static_cast<std::size_t>(l + t * pp.m)] = 1;
    cert.combs.push_back(std::move(v));
  }
  cert.ones.assign(static_cast<std::size_t>(pp.p()), 1);
  for (std::int64_t l = 1; l < pp.m; ++l) {
    std::vector<int> d(q);
    for (std::size_t i = 0; i < q; ++i) d[i] = cert.combs[0][i] - cert.combs[static_cast<std::size_t>(l)][i];
    cert.kernel_basis.push_back(std::move(d));
  }
  cert.rank_bound = pp.rank_bound();
  return cert;
}

class PartitionOfUnityViolated : public std::domain_error {
public:
  explicit PartitionOfUnityViolated(const std::string &label)
      : std::domain_error("partition-of-unity hypothesis violated: window '" + label + "' does not generate a partition of unity") {}
};

/// Residuals of P(x,0) against the certificate.  Exact mode fills the
/// rational fields; float mode the double fields.
struct CertificateReport {
  PropTwoParams params;
  bool exact = false;
  std::int64_t p = 0;
  std::int64_t q = 0;
  std::int64_t rank_bound = 0;
  int rank = 0;
  PartitionOfUnityReport partition;

  std::vector<Rational> comb_residuals_exact;    // ||P v_l - e||_inf
  std::vector<Rational> kernel_residuals_exact;  // ||P (v_0 - v_l)||_inf
  std::vector<double> comb_residuals;
  std::vector<double> kernel_residuals;
  std::optional<Rational> x_exact;
  double x = 0.0;

  double max_comb_residual() const {
    return comb_residuals.empty() ? 0.0 : *std::max_element(comb_residuals.begin(), comb_residuals.end());
  }
  double max_kernel_residual() const {
    return kernel_residuals.empty() ? 0.0 : *std::max_element(kernel_residuals.begin(), kernel_residuals.end());
  }
  bool residuals_exactly_zero() const {
    auto zero = [](const Rational &v) { return v.sign() == 0; };
    return exact && std::all_of(comb_residuals_exact.begin(), comb_residuals_exact.end(), zero) &&
           std::all_of(kernel_residuals_exact.begin(), kernel_residuals_exact.end(), zero);
  }
  /// Rank deficiency established: rank <= bound < p.
  bool certifies() const { return rank <= rank_bound && rank_bound < p; }
};

namespace detail {

inline LatticeParams certificate_lattice(const PropTwoParams &pp) {
  auto lat = lattice_of(pp);
  auto lp = LatticeParams::make(lat.alpha, lat.beta);
  if (lp.p != pp.p() || lp.q != pp.q())
    throw std::logic_error("certificate lattice: density fraction collapsed despite coprimality");
  return lp;
}

inline PartitionOfUnityReport require_partition(const Window &g) {
  auto pou = check_partition_of_unity(g);
  if (!pou.holds) throw PartitionOfUnityViolated(g.label());
  return pou;
}

}  // namespace detail

inline CertificateReport verify_certificate_exact(const Window &g, const PropTwoParams &pp, const Rational &x) {
  auto cert = kernel_certificate(pp);
  CertificateReport rep;
  rep.partition = detail::require_partition(g);
  auto lat = detail::certificate_lattice(pp);
  rep.params = pp;
  rep.exact = true;
  rep.p = lat.p;
  rep.q = lat.q;
  rep.rank_bound = cert.rank_bound;
  rep.x_exact = x;
  rep.x = x.to_double();

  auto pm = build_p_exact(g, lat, x);
  const auto &a = pm.entries;
  auto apply = [&](const std::vector<int> &v, std::size_t k) {
    mpq_class acc = 0;
    for (std::size_t l = 0; l < a.cols; ++l)
      if (v[l] != 0) acc += v[l] * a(k, l).mpq();
    return Rational::from_mpq(acc);
  };
  for (const auto &v : cert.combs) {
    Rational worst(0);
    for (std::size_t k = 0; k < a.rows; ++k) worst = std::max(worst, (apply(v, k) - Rational(1)).abs());
    rep.comb_residuals_exact.push_back(worst);
    rep.comb_residuals.push_back(worst.to_double());
  }
  for (const auto &v : cert.kernel_basis) {
    Rational worst(0);
    for (std::size_t k = 0; k < a.rows; ++k) worst = std::max(worst, apply(v, k).abs());
    rep.kernel_residuals_exact.push_back(worst);
    rep.kernel_residuals.push_back(worst.to_double());
  }
  rep.rank = exact_rank(pm);
  return rep;
}

inline CertificateReport verify_certificate_float(const Window &g, const PropTwoParams &pp, double x,
                                                  double rel_tol = kDefaultRankTol) {
  auto cert = kernel_certificate(pp);
  CertificateReport rep;
  rep.partition = detail::require_partition(g);
  auto lat = detail::certificate_lattice(pp);
  rep.params = pp;
  rep.exact = false;
  rep.p = lat.p;
  rep.q = lat.q;
  rep.rank_bound = cert.rank_bound;
  rep.x = x;

  auto pm = build_p(g, lat, EvaluationPoint{x, 0.0});
  auto to_vec = [](const std::vector<int> &v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = static_cast<double>(v[i]);
    return out;
  };
  for (const auto &v : cert.combs) {
    Eigen::VectorXcd img = pm.entries * to_vec(v);
    rep.comb_residuals.push_back((img.array() - 1.0).abs().maxCoeff());
  }
  for (const auto &v : cert.kernel_basis) {
    Eigen::VectorXcd img = pm.entries * to_vec(v);
    rep.kernel_residuals.push_back(img.array().abs().maxCoeff());
  }
  rep.rank = numeric_rank(singular_values(pm), rel_tol);
  return rep;
}

/// Integer beta >= 2 with a partition-of-unity window: never a frame.
inline bool delprete_applies(const Window &g, const Rational &beta) {
  if (!beta.is_integer() || beta < Rational(2)) return false;
  return check_partition_of_unity(g).holds;
}

struct ExcludedPoint {
  PropTwoParams params;
  Lattice lattice;
  std::int64_t p = 0;
  std::int64_t q = 0;
  std::int64_t rank_bound = 0;
  /// (n + 1) - beta, present when m = n + 1.
  std::optional<Rational> distance_to_accumulation;
};

/// Every admissible (m, n, r, j) with 2 <= r <= r_max, ordered by beta.
inline std::vector<ExcludedPoint> enumerate_excluded(std::int64_t n, std::int64_t m, std::int64_t r_max) {
  if (r_max < 2) throw std::invalid_argument("enumerate_excluded: r_max must be >= 2");
  if (n < 1 || m < 1) throw std::invalid_argument("enumerate_excluded: n and m must be positive");
  std::vector<ExcludedPoint> out;
  for (std::int64_t r = 2; r <= r_max; ++r) {
    for (std::int64_t j = 1; j <= r - 1; ++j) {
      PropTwoParams pp{m, n, r, j};
      if (!prop2_applies(pp).admissible()) continue;
      ExcludedPoint e;
      e.params = pp;
      e.lattice = lattice_of(pp);
      e.p = pp.p();
      e.q = pp.q();
      e.rank_bound = pp.rank_bound();
      if (m == n + 1) e.distance_to_accumulation = Rational(n + 1) - e.lattice.beta;
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end(), [](const ExcludedPoint &a, const ExcludedPoint &b) {
    if (a.lattice.beta != b.lattice.beta) return a.lattice.beta < b.lattice.beta;
    return a.params.r < b.params.r;
  });
  return out;
}

}  // namespace gabor
