#pragma once

// Lattice-level frame verdicts for G(g, alpha, beta) at rational density.
//
// G(g, alpha, beta) is a frame iff P(x, xi) has full row rank p for every
// (x, xi).  The tester first tries structural and exact certificates for the
// negative answer, then falls back to a sampled scan of
// sigma_min / sigma_max over the fundamental domain [0, alpha q) x [0, 1).
// Only negative answers are ever certified; a clean scan yields LikelyFrame.

#include "gabor/obstructions.hpp"
#include "gabor/pmatrix.hpp"
#include "gabor/rational.hpp"
#include "gabor/ranktest.hpp"
#include "gabor/windows.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace gabor {

enum class VerdictKind { CertifiedNotFrame, NumericNotFrame, LikelyFrame, Inconclusive };
enum class CertificateSource { None, Density, DelPrete, Prop2 };

inline const char *to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::CertifiedNotFrame: return "CertifiedNotFrame";
    case VerdictKind::NumericNotFrame: return "NumericNotFrame";
    case VerdictKind::LikelyFrame: return "LikelyFrame";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline const char *to_string(CertificateSource s) {
  switch (s) {
    case CertificateSource::None: return "";
    case CertificateSource::Density: return "density";
    case CertificateSource::DelPrete: return "delprete";
    case CertificateSource::Prop2: return "prop2";
  }
  return "?";
}

/// Sample grid over [0, L) x [0, 1) with L = alpha q, or L = alpha when
/// reduced_domain is set (valid by the column-shift property of P).
struct GridSpec {
  std::size_t nx = 64;
  std::size_t nxi = 64;
  bool reduced_domain = false;
  bool breakpoint_offsets = true;  // add breakpoint-derived x samples, see grid_x_points
};

/// Margins in [rel_tol, rel_tol * kInconclusiveBand) are reported as Inconclusive.
inline constexpr double kInconclusiveBand = 100.0;

struct TestOptions {
  double rel_tol = kDefaultRankTol;
  bool force_scan = false;  // run the grid scan even when a certificate exists
  unsigned threads = 1;
  std::uint64_t seed = 0x5eed'6ab0'2016ULL;
};

struct GridWitness {
  double x = 0.0;
  double xi = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double margin = 0.0;
  std::size_t points = 0;  // grid points evaluated
};

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  CertificateSource source = CertificateSource::None;
  Rational alpha;
  Rational beta;
  std::int64_t p = 0;
  std::int64_t q = 0;
  GridSpec grid;
  double rel_tol = kDefaultRankTol;

  std::optional<GridWitness> scan;            // numeric scan (always for numeric verdicts)
  std::optional<GridWitness> delprete_check;  // first rank drop found for a del Prete lattice
  std::optional<PropTwoParams> prop2_params;
  std::vector<CertificateReport> certificate_reports;
  std::string reason;
  std::vector<std::string> caveats;

  bool not_frame() const { return kind == VerdictKind::CertifiedNotFrame || kind == VerdictKind::NumericNotFrame; }
  bool certified() const { return kind == VerdictKind::CertifiedNotFrame; }
};

// --- grid ---------------------------------------------------------------

/// Deterministic x samples: i L / nx for i < nx plus breakpoint offsets,
/// sorted and deduplicated in exact arithmetic.  Entries of P jump where
/// x + alpha l + k/beta hits a breakpoint b, so discontinuous windows get every
/// (b - k/beta) mod alpha; continuous windows only b mod alpha.
inline std::vector<double> grid_x_points(const Window &g, const LatticeParams &lat, const GridSpec &grid) {
  if (grid.nx < 1 || grid.nxi < 1) throw std::invalid_argument("grid: nx and nxi must be >= 1");
  const Rational length = grid.reduced_domain ? lat.alpha : lat.zak_period;
  std::vector<Rational> xs;
  xs.reserve(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i)
    xs.push_back(length * Rational(static_cast<long>(i)) / Rational(static_cast<long>(grid.nx)));
  if (grid.breakpoint_offsets) {
    const std::int64_t rows = g.is_continuous() ? 1 : lat.p;
    for (const auto &b : g.breakpoints())
      for (std::int64_t k = 0; k < rows; ++k)
        xs.push_back((b - Rational(static_cast<long>(k)) / lat.beta).mod(lat.alpha));
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto &x : xs) out.push_back(x.to_double());
  return out;
}

inline std::vector<double> grid_xi_points(const GridSpec &grid) {
  std::vector<double> out;
  out.reserve(grid.nxi);
  for (std::size_t j = 0; j < grid.nxi; ++j) out.push_back(static_cast<double>(j) / static_cast<double>(grid.nxi));
  return out;
}

namespace detail {

/// Strict total order used by every margin reduction: smaller margin first,
/// then lexicographically smaller (x, xi).
inline bool witness_before(const GridWitness &a, const GridWitness &b) {
  return std::tie(a.margin, a.x, a.xi) < std::tie(b.margin, b.x, b.xi);
}

inline GridWitness evaluate_point(const PMatrixBuilder &builder, double x, double xi) {
  auto prof = singular_values(builder.build(EvaluationPoint{x, xi}));
  GridWitness w;
  w.x = x;
  w.xi = xi;
  w.sigma_max = prof.largest();
  w.sigma_min = prof.smallest();
  w.margin = prof.margin();
  w.points = 1;
  return w;
}

/// Runs `fn(begin, end, chunk)` over [0, count) split into `threads` contiguous chunks.
template <class Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn fn) {
  threads = std::max(1U, threads);
  if (threads == 1 || count < 2) {
    fn(std::size_t{0}, count, 0U);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t begin = count * t / threads;
    std::size_t end = count * (t + 1) / threads;
    pool.emplace_back([=, &fn] { fn(begin, end, t); });
  }
  for (auto &th : pool) th.join();
}

}  // namespace detail

/// Minimum of sigma_min / sigma_max over the grid.  The result does not
/// depend on `threads`.
inline GridWitness scan_margin(const Window &g, const LatticeParams &lat, const GridSpec &grid, unsigned threads = 1) {
  PMatrixBuilder builder(g, lat);
  const auto xs = grid_x_points(g, lat, grid);
  const auto xis = grid_xi_points(grid);
  const std::size_t total = xs.size() * xis.size();
  std::vector<GridWitness> partial(std::max(1U, threads));
  for (auto &w : partial) w.margin = std::numeric_limits<double>::infinity();
  detail::parallel_chunks(total, threads, [&](std::size_t begin, std::size_t end, unsigned t) {
    GridWitness best;
    best.margin = std::numeric_limits<double>::infinity();
    for (std::size_t idx = begin; idx < end; ++idx) {
      auto w = detail::evaluate_point(builder, xs[idx / xis.size()], xis[idx % xis.size()]);
      if (detail::witness_before(w, best)) best = w;
    }
    best.points = end - begin;
    partial[t] = best;
  });
  GridWitness best = partial.front();
  std::size_t points = 0;
  for (const auto &w : partial) {
    points += w.points;
    if (detail::witness_before(w, best)) best = w;
  }
  best.points = points;
  return best;
}

/// First grid point, in (xi = 0 row first, then row-major) order, whose
/// margin is below rel_tol.
inline std::optional<GridWitness> find_rank_drop(const Window &g, const LatticeParams &lat, const GridSpec &grid,
                                                 double rel_tol) {
  PMatrixBuilder builder(g, lat);
  const auto xs = grid_x_points(g, lat, grid);
  const auto xis = grid_xi_points(grid);
  std::size_t points = 0;
  for (double xi : xis) {
    for (double x : xs) {
      auto w = detail::evaluate_point(builder, x, xi);
      ++points;
      if (w.margin < rel_tol) {
        w.points = points;
        return w;
      }
    }
  }
  return std::nullopt;
}

/// Deterministic rational sample points in [0, 1/m) for certificate checks.
inline std::vector<Rational> certificate_sample_points(std::int64_t m, std::size_t count, std::uint64_t seed) {
  constexpr long kDen = 1009;  // prime, so samples rarely coincide with breakpoints
  std::mt19937_64 gen(seed);
  std::vector<Rational> out;
  for (std::size_t i = 0; i < count; ++i) {
    long a = static_cast<long>(gen() % kDen);
    out.push_back(Rational(a, kDen * m));
  }
  return out;
}

inline Verdict test_lattice(const Window &g, const Rational &alpha, const Rational &beta, const GridSpec &grid = {},
                            const TestOptions &opt = {}) {
  if (alpha.sign() <= 0 || beta.sign() <= 0) throw std::domain_error("test_lattice: alpha and beta must be positive");
  Verdict v;
  v.alpha = alpha;
  v.beta = beta;
  v.grid = grid;
  v.rel_tol = opt.rel_tol;
  auto lat = LatticeParams::make(alpha, beta);
  v.p = lat.p;
  v.q = lat.q;
  if (!known_in_feichtinger_algebra(g))
    v.caveats.emplace_back("window is discontinuous: the rank criterion assumes g in the Feichtinger algebra, rank verdicts are heuristic");

  // (1) density
  if (lat.supercritical()) {
    v.kind = VerdictKind::CertifiedNotFrame;
    v.source = CertificateSource::Density;
    v.reason = "alpha*beta = " + std::to_string(lat.p) + "/" + std::to_string(lat.q) + " > 1";
    return v;
  }

  // (2) integer beta with a partition of unity
  if (delprete_applies(g, beta)) {
    v.kind = VerdictKind::CertifiedNotFrame;
    v.source = CertificateSource::DelPrete;
    v.reason = "integer beta >= 2 and g generates a partition of unity";
    v.delprete_check = find_rank_drop(g, lat, grid, opt.rel_tol);
    if (!v.delprete_check) v.caveats.emplace_back("no numeric rank drop found on the grid for the del Prete lattice");
  }

  // (3) partition-of-unity kernel certificate
  if (!v.certified()) {
    if (auto pp = params_of(alpha, beta)) {
      auto adm = prop2_applies(*pp);
      if (adm.admissible() && g.is_exact() && check_partition_of_unity(g).holds) {
        bool all_ok = true;
        for (const auto &x : certificate_sample_points(pp->m, 3, opt.seed)) {
          auto rep = verify_certificate_exact(g, *pp, x);
          all_ok = all_ok && rep.residuals_exactly_zero() && rep.certifies();
          v.certificate_reports.push_back(std::move(rep));
        }
        if (all_ok) {
          v.kind = VerdictKind::CertifiedNotFrame;
          v.source = CertificateSource::Prop2;
          v.prop2_params = *pp;
          v.reason = "kernel certificate: rank P(x,0) <= (r-1)m+1 = " + std::to_string(pp->rank_bound()) +
                     " < p = " + std::to_string(pp->p());
        } else {
          v.certificate_reports.clear();
          v.caveats.emplace_back("admissible obstruction parameters but the exact certificate did not verify");
        }
      }
    }
  }

  // (4) numeric scan
  if (v.certified() && !opt.force_scan) return v;
  auto w = scan_margin(g, lat, grid, opt.threads);
  v.scan = w;
  if (v.certified()) return v;
  if (w.margin < opt.rel_tol) {
    v.kind = VerdictKind::NumericNotFrame;
    v.reason = "sigma_min/sigma_max below tolerance on the grid";
  } else if (w.margin < opt.rel_tol * kInconclusiveBand) {
    v.kind = VerdictKind::Inconclusive;
    v.reason = "grid margin within two decades of the rank tolerance";
  } else {
    v.kind = VerdictKind::LikelyFrame;
    v.reason = "full rank at every grid point (sampled, not a proof)";
  }
  return v;
}

// --- plane scan ---------------------------------------------------------

struct RationalRange {
  Rational min;
  Rational max;
};

/// Reduced fractions a/b in [lo, hi] with 1 <= b <= max_den, ascending.
inline std::vector<Rational> rationals_in_range(const RationalRange &range, std::int64_t max_den) {
  if (max_den < 1) throw std::invalid_argument("rationals_in_range: max_den must be >= 1");
  if (range.max < range.min) throw std::invalid_argument("rationals_in_range: empty range");
  std::vector<Rational> out;
  for (std::int64_t b = 1; b <= max_den; ++b) {
    Rational bb(static_cast<long>(b));
    BigInt lo = (range.min * bb).ceil();
    BigInt hi = (range.max * bb).floor();
    for (BigInt a = lo; a <= hi; ++a) out.push_back(Rational(a, BigInt(static_cast<long>(b))));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct ScanResult {
  std::vector<Rational> alphas;  // ascending
  std::vector<Rational> betas;   // ascending
  std::vector<Verdict> verdicts; // sorted by (alpha, beta); index = ia * betas.size() + ib
};

inline ScanResult scan_plane(const Window &g, const RationalRange &alpha_range, const RationalRange &beta_range,
                             std::int64_t max_den, const GridSpec &grid = {}, const TestOptions &opt = {}) {
  if (alpha_range.min.sign() <= 0 || beta_range.min.sign() <= 0)
    throw std::invalid_argument("scan_plane: ranges must be positive");
  ScanResult res;
  res.alphas = rationals_in_range(alpha_range, max_den);
  res.betas = rationals_in_range(beta_range, max_den);
  if (res.alphas.empty() || res.betas.empty()) throw std::invalid_argument("scan_plane: empty range");
  const std::size_t total = res.alphas.size() * res.betas.size();
  res.verdicts.resize(total);
  TestOptions inner = opt;
  inner.threads = 1;
  detail::parallel_chunks(total, opt.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t idx = begin; idx < end; ++idx)
      res.verdicts[idx] =
          test_lattice(g, res.alphas[idx / res.betas.size()], res.betas[idx % res.betas.size()], grid, inner);
  });
  return res;
}

// --- output -------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Columns: alpha, beta, p, q, verdict, source, margin, witness_x, witness_xi.
/// Margin and witness are empty when no numeric scan ran.
inline void write_scan_csv(const ScanResult &res, std::ostream &os) {
  os << "alpha,beta,p,q,verdict,source,margin,witness_x,witness_xi\n";
  for (const auto &v : res.verdicts) {
    os << v.alpha << ',' << v.beta << ',' << v.p << ',' << v.q << ',' << to_string(v.kind) << ','
       << to_string(v.source) << ',';
    if (v.scan)
      os << format_double(v.scan->margin) << ',' << format_double(v.scan->x) << ',' << format_double(v.scan->xi);
    else
      os << ",,";
    os << '\n';
  }
}

struct Rgb {
  unsigned char r, g, b;
  friend bool operator==(const Rgb &, const Rgb &) = default;
};

/// Pixel colour for one verdict.
///   CertifiedNotFrame, prop2 or delprete: (255, 0, 0)
///   CertifiedNotFrame, density:           (96, 0, 0)
///   NumericNotFrame:                      (255, 160, 0)
///   Inconclusive:                         (128, 128, 128)
///   LikelyFrame:                          (0, G, 64) with G = 64 + 191 * clamp(1 + log10(margin) / 8, 0, 1)
inline Rgb verdict_color(const Verdict &v) {
  switch (v.kind) {
    case VerdictKind::CertifiedNotFrame:
      return v.source == CertificateSource::Density ? Rgb{96, 0, 0} : Rgb{255, 0, 0};
    case VerdictKind::NumericNotFrame: return {255, 160, 0};
    case VerdictKind::Inconclusive: return {128, 128, 128};
    case VerdictKind::LikelyFrame: {
      double m = v.scan ? v.scan->margin : 1.0;
      double level = m > 0.0 ? std::clamp(1.0 + std::log10(m) / 8.0, 0.0, 1.0) : 0.0;
      return {0, static_cast<unsigned char>(64 + std::lround(191.0 * level)), 64};
    }
  }
  return {0, 0, 0};
}

/// Binary PPM (P6): width = #alphas (ascending left to right), height =
/// #betas (largest beta on the top row), 3 bytes per pixel.
inline void write_heatmap(const ScanResult &res, std::ostream &os) {
  if (res.verdicts.empty()) throw std::invalid_argument("render_heatmap: empty scan result");
  const std::size_t w = res.alphas.size(), h = res.betas.size();
  os << "P6\n" << w << ' ' << h << "\n255\n";
  for (std::size_t row = 0; row < h; ++row) {
    std::size_t ib = h - 1 - row;
    for (std::size_t ia = 0; ia < w; ++ia) {
      Rgb c = verdict_color(res.verdicts[ia * h + ib]);
      os.put(static_cast<char>(c.r)).put(static_cast<char>(c.g)).put(static_cast<char>(c.b));
    }
  }
}

inline void render_heatmap(const ScanResult &res, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("render_heatmap: cannot open '" + path + "' for writing");
  write_heatmap(res, out);
  if (!out) throw std::runtime_error("render_heatmap: write to '" + path + "' failed");
}

inline nlohmann::json witness_to_json(const GridWitness &w) {
  return {{"x", w.x}, {"xi", w.xi}, {"sigma_min", w.sigma_min}, {"sigma_max", w.sigma_max}, {"margin", w.margin},
          {"points", w.points}};
}

inline nlohmann::json params_to_json(const PropTwoParams &pp) {
  return {{"m", pp.m}, {"n", pp.n}, {"r", pp.r}, {"j", pp.j}};
}

inline nlohmann::json report_to_json(const CertificateReport &rep) {
  nlohmann::json j = {{"params", params_to_json(rep.params)},
                      {"exact", rep.exact},
                      {"p", rep.p},
                      {"q", rep.q},
                      {"rank", rep.rank},
                      {"rank_bound", rep.rank_bound},
                      {"max_comb_residual", rep.max_comb_residual()},
                      {"max_kernel_residual", rep.max_kernel_residual()}};
  if (rep.x_exact) j["x"] = rep.x_exact->str();
  else j["x"] = rep.x;
  if (rep.exact) j["residuals_exactly_zero"] = rep.residuals_exactly_zero();
  return j;
}

/// Verdict schema: verdict, source, alpha, beta, p, q, rel_tol, grid, margin
/// (null without a scan), witness (null without a scan), reason, caveats, and
/// optional delprete_check / prop2 blocks.
inline nlohmann::json verdict_to_json(const Verdict &v) {
  nlohmann::json j;
  j["verdict"] = to_string(v.kind);
  j["source"] = v.source == CertificateSource::None ? nlohmann::json(nullptr) : nlohmann::json(to_string(v.source));
  j["alpha"] = v.alpha.str();
  j["beta"] = v.beta.str();
  j["p"] = v.p;
  j["q"] = v.q;
  j["rel_tol"] = v.rel_tol;
  j["grid"] = {{"nx", v.grid.nx}, {"nxi", v.grid.nxi}, {"reduced_domain", v.grid.reduced_domain}};
  j["margin"] = v.scan ? nlohmann::json(v.scan->margin) : nlohmann::json(nullptr);
  j["witness"] = v.scan ? witness_to_json(*v.scan) : nlohmann::json(nullptr);
  j["reason"] = v.reason;
  j["caveats"] = v.caveats;
  if (v.delprete_check) j["delprete_check"] = witness_to_json(*v.delprete_check);
  if (v.prop2_params) {
    nlohmann::json reports = nlohmann::json::array();
    for (const auto &r : v.certificate_reports) reports.push_back(report_to_json(r));
    j["prop2"] = {{"params", params_to_json(*v.prop2_params)}, {"reports", reports}};
  }
  return j;
}

}  // namespace gabor
