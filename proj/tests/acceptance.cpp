// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include "gabor/frameset.hpp"

#include "oracles.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace gabor;

namespace {

int failures = 0;

void report(int id, const std::string &title, bool ok, const std::vector<std::string> &details) {
  std::cout << (ok ? "PASS " : "FAIL ") << id << ": " << title << '\n';
  for (const auto &d : details) std::cout << "    " << d << '\n';
  std::cout.flush();
  if (!ok) ++failures;
}

std::string num(double v) { return format_double(v); }

std::string join(const std::vector<Rational> &v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].str();
  return s + "}";
}

const std::vector<PropTwoParams> kParams = {{3, 2, 2, 1}, {3, 2, 5, 4}, {5, 3, 2, 1}, {3, 2, 3, 2}};
const std::vector<Rational> kListedBetas = {Rational(5, 2), Rational(8, 3), Rational(11, 4), Rational(13, 5), Rational(14, 5)};

void criterion1() {
  auto b2 = bspline(2);
  bool ok = true;
  std::vector<std::string> d;
  for (const auto &pp : kParams) {
    int worst_rank = 0, zero = 0;
    bool rank_ok = true;
    for (const auto &x : certificate_sample_points(pp.m, 20, 2016)) {
      auto rep = verify_certificate_exact(b2, pp, x);
      zero += rep.residuals_exactly_zero();
      rank_ok = rank_ok && rep.rank <= pp.rank_bound() && rep.rank < pp.p();
      worst_rank = std::max(worst_rank, rep.rank);
    }
    ok = ok && zero == 20 && rank_ok;
    std::ostringstream s;
    s << "(m,n,r,j)=(" << pp.m << "," << pp.n << "," << pp.r << "," << pp.j << "): exact-zero residuals " << zero
      << "/20, max rank " << worst_rank << " <= bound " << pp.rank_bound() << " < p " << pp.p();
    d.push_back(s.str());
  }
  report(1, "kernel certificate suite, B2, exact arithmetic at 20 rational x", ok, d);
}

void criterion2() {
  auto b2 = bspline(2);
  bool ok = true;
  std::vector<std::string> d;
  TestOptions forced;
  forced.force_scan = true;
  for (auto [a, b] : {std::pair{Rational(1, 3), Rational(5, 2)}, {Rational(1, 5), Rational(7, 2)}}) {
    auto v = test_lattice(b2, a, b);
    bool cert = v.kind == VerdictKind::CertifiedNotFrame && v.source == CertificateSource::Prop2;
    auto f = test_lattice(b2, a, b, GridSpec{}, forced);
    auto lat = LatticeParams::make(a, b);
    PMatrixBuilder builder(b2, lat);
    double worst = 0.0;
    for (double x : grid_x_points(b2, lat, GridSpec{})) worst = std::max(worst, singular_values(builder.build(EvaluationPoint{x, 0.0})).margin());
    bool numeric = f.scan && f.scan->margin < 1e-8 && worst < 1e-8;
    ok = ok && cert && numeric;
    d.push_back("(" + a.str() + ", " + b.str() + "): " + to_string(v.kind) + "(" + to_string(v.source) +
                "), forced-scan min margin " + num(f.scan ? f.scan->margin : -1) + ", max margin over xi=0 grid row " +
                num(worst));
  }
  report(2, "hat-window lattices (1/3, 5/2) and (1/5, 7/2) certified, confirmed by forced scan", ok, d);
}

void criterion3() {
  auto b2 = bspline(2);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double comb = 0.0, kern = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto rep = verify_certificate_float(b2, {3, 2, 2, 1}, u(gen));
    comb = std::max(comb, rep.max_comb_residual());
    kern = std::max(kern, rep.max_kernel_residual());
  }
  report(3, "floating kernel residuals at 100 random real x, (3,2,2,1)", comb < 1e-10 && kern < 1e-10,
         {"max ||P v_l - e||_inf = " + num(comb), "max ||P (v_0 - v_l)||_inf = " + num(kern)});
}

void criterion4() {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), uxi(0.0, 1.0);
  const std::vector<Rational> alphas = {Rational(1, 3), Rational(1), Rational(2), Rational(5, 2)};
  bool ok = true;
  std::vector<std::string> d;
  for (int n = 2; n <= 4; ++n) {
    auto g = bspline(n);
    double quasi = 0.0, period = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Rational &alpha = alphas[static_cast<std::size_t>(i) % alphas.size()];
      double a = alpha.to_double(), x = ux(gen), xi = uxi(gen);
      Complex ph(std::cos(2 * std::numbers::pi * xi), std::sin(2 * std::numbers::pi * xi));
      quasi = std::max(quasi, std::abs(zak(g, alpha, EvaluationPoint{x + a, xi}) - ph * zak(g, alpha, EvaluationPoint{x, xi})));
      auto raw = oracle::brute_zak(g, a, x, xi + 1.0, 40);
      period = std::max(period, std::abs(zak(g, alpha, EvaluationPoint{x, xi}) - raw));
      period = std::max(period, std::abs(oracle::brute_zak(g, a, x, xi, 40) - raw));
    }
    ok = ok && quasi < 1e-12 && period < 1e-12;
    d.push_back(g.label() + ": quasi-periodicity residual " + num(quasi) + ", xi-periodicity residual " + num(period));
  }
  report(4, "Zak transform invariants at 1000 random points per spline", ok, d);
}

void criterion5() {
  std::vector<Rational> got;
  for (const auto &e : enumerate_excluded(2, 3, 5)) got.push_back(e.lattice.beta);
  std::vector<Rational> brute;
  for (const auto &b : oracle::brute_excluded_betas(2, 3, 5)) brute.push_back(Rational::from_mpq(b));
  auto far = enumerate_excluded(2, 3, 50);
  Rational top = far.back().lattice.beta;
  bool listed = got == kListedBetas;
  bool ok = listed && got == brute && top > Rational(3) - Rational(1, 25);
  std::vector<std::string> d = {"enumerate_excluded(2, 3, 5) = " + join(got), "brute force over (r, j)  = " + join(brute),
                                "expected list            = " + join(kListedBetas),
                                "r_max = 50: max beta " + top.str() + " vs 3 - 1/25 = " + (Rational(3) - Rational(1, 25)).str()};
  if (!listed)
    d.push_back("13/5 needs (m,n,r,j) = (3,2,5,3), where (r-1)m+1 = 13 < rn+j = 13 is false; the expected list "
                "cannot be produced by the admissibility rule");
  report(5, "excluded-point enumeration n=2, m=3", ok, d);
}

void criterion6() {
  auto v = test_lattice(bspline(2), Rational(1, 3), Rational(2));
  bool ok = v.kind == VerdictKind::CertifiedNotFrame && v.source == CertificateSource::DelPrete && v.delprete_check &&
            v.delprete_check->margin < 1e-8;
  report(6, "integer beta = 2 with the hat window", ok,
         {std::string(to_string(v.kind)) + "(" + to_string(v.source) + "), numeric rank drop margin " +
          (v.delprete_check ? num(v.delprete_check->margin) + " at x=" + num(v.delprete_check->x) + " xi=" + num(v.delprete_check->xi)
                            : std::string("none found"))});
}

void criterion7() {
  auto g = gaussian(1.0);
  auto coarse = test_lattice(g, Rational(1), Rational(1, 2), GridSpec{64, 64});
  auto fine = test_lattice(g, Rational(1), Rational(1, 2), GridSpec{128, 128});
  double m64 = coarse.scan ? coarse.scan->margin : 0.0, m128 = fine.scan ? fine.scan->margin : 0.0;
  double change = std::abs(m128 - m64) / m64;
  bool ok = coarse.kind == VerdictKind::LikelyFrame && m64 > 0.01 && change < 0.1;
  report(7, "Gaussian positive control (1, 1/2)", ok,
         {std::string(to_string(coarse.kind)) + " margin 64x64 " + num(m64) + ", 128x128 " + num(m128) +
              ", relative change " + num(change),
          "p = 1 here, so P is 1x1 and its margin is identically 1 wherever Z g does not vanish"});
}

void criterion8() {
  std::mt19937_64 gen(8);
  const std::vector<Window> windows = {bspline(1), bspline(2), bspline(3), bspline(4), bspline(5),
                                       characteristic(Rational(0), Rational(1)), characteristic(Rational(-1, 3), Rational(2, 3))};
  std::vector<std::pair<Rational, Rational>> lats;
  for (const auto &pp : kParams) {
    auto l = lattice_of(pp);
    lats.emplace_back(l.alpha, l.beta);
  }
  lats.emplace_back(Rational(1, 3), Rational(2));
  std::uniform_int_distribution<long> small(1, 6), xnum(0, 996);
  while (lats.size() < 40) {
    Rational a(small(gen), small(gen)), b(small(gen), small(gen));
    if (a * b <= Rational(1)) lats.emplace_back(a, b);
  }
  int agree = 0;
  std::vector<std::string> d;
  for (int t = 0; t < 200; ++t) {
    const auto &g = windows[static_cast<std::size_t>(t) % windows.size()];
    const auto &[a, b] = lats[static_cast<std::size_t>(t) % lats.size()];
    auto lat = LatticeParams::make(a, b);
    Rational x(xnum(gen), 997);
    int nr = numeric_rank(singular_values(build_p(g, lat, x, 0.0)), 1e-8);
    int er = exact_rank(build_p_exact(g, lat, x));
    if (nr == er) ++agree;
    else if (d.size() < 5)
      d.push_back("mismatch: " + g.label() + " (" + a.str() + ", " + b.str() + ") x=" + x.str() + " numeric " +
                  std::to_string(nr) + " exact " + std::to_string(er));
  }
  d.insert(d.begin(), std::to_string(agree) + "/200 triples agree");
  report(8, "numeric rank (rel_tol 1e-8) equals exact rank", agree == 200, d);
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CsvRow {
  Rational alpha, beta;
  std::string verdict, source;
};

std::vector<CsvRow> parse_csv(const std::string &text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() < 6) continue;
    rows.push_back({Rational::parse(f[0]), Rational::parse(f[1]), f[4], f[5]});
  }
  return rows;
}

std::vector<CsvRow> scan_rows;  // shared with criterion 10

void criterion9() {
  auto dir = std::filesystem::temp_directory_path() / "gaborframe_acceptance";
  std::filesystem::create_directories(dir);
  auto run = [&](int threads) {
    std::string prefix = (dir / ("scan_t" + std::to_string(threads))).string();
    std::string cmd = std::string(GABORFRAME_EXE) +
                      " scan --window bspline:2 --alpha-min 1/4 --alpha-max 1 --beta-min 1 --beta-max 3 --max-den 6"
                      " --threads " + std::to_string(threads) + " --out " + prefix + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return std::tuple{rc, slurp(prefix + ".csv"), slurp(prefix + ".ppm")};
  };
  auto [rc1, csv1, ppm1] = run(1);
  auto [rc8, csv8, ppm8] = run(8);
  bool identical = rc1 == 0 && rc8 == 0 && !csv1.empty() && csv1 == csv8 && ppm1 == ppm8;
  scan_rows = parse_csv(csv1);
  std::vector<Rational> strip;
  for (const auto &r : scan_rows)
    if (r.alpha == Rational(1, 3) && r.source == "prop2") strip.push_back(r.beta);
  std::vector<Rational> enumerated;
  for (const auto &e : enumerate_excluded(2, 3, 6))
    if (e.lattice.beta >= Rational(1) && e.lattice.beta <= Rational(3)) enumerated.push_back(e.lattice.beta);
  bool listed = strip == kListedBetas;
  std::vector<std::string> d = {
      std::string("1 vs 8 threads: CSV ") + (csv1 == csv8 ? "identical" : "differs") + " (" + std::to_string(csv1.size()) +
          " bytes), PPM " + (ppm1 == ppm8 ? "identical" : "differs") + " (" + std::to_string(ppm1.size()) + " bytes)",
      "certified kernel points at alpha = 1/3: " + join(strip),
      "criterion 5 list:                       " + join(kListedBetas),
      "enumerate_excluded(2, 3, 6) in [1, 3]:  " + join(enumerated) + (strip == enumerated ? " (matches)" : " (differs)")};
  if (!listed)
    d.push_back("13/5 is inadmissible (see criterion 5) and max_den 6 admits r = 6, which adds 17/6");
  report(9, "scan determinism and the alpha = 1/3 strip", identical && listed, d);
  std::filesystem::remove_all(dir);
}

std::string verdict_key(const Verdict &v) { return std::string(to_string(v.kind)) + "/" + to_string(v.source); }

void criterion10() {
  auto b2 = bspline(2);
  GridSpec full, reduced;
  reduced.reduced_domain = true;
  TestOptions forced;
  forced.force_scan = true;
  int same = 0, total = 0;
  std::vector<std::string> d;
  auto compare = [&](const Window &g, Rational a, Rational b, const TestOptions &opt) {
    auto vf = test_lattice(g, a, b, full, opt);
    auto vr = test_lattice(g, a, b, reduced, opt);
    bool eq = verdict_key(vf) == verdict_key(vr);
    bool numeric_eq = !vf.scan || (vr.scan && (vf.scan->margin < opt.rel_tol) == (vr.scan->margin < opt.rel_tol));
    ++total;
    same += eq && numeric_eq;
    if (!(eq && numeric_eq))
      d.push_back("differs: " + g.label() + " (" + a.str() + ", " + b.str() + "): " + verdict_key(vf) + " vs " + verdict_key(vr));
  };
  for (auto [a, b] : {std::pair{Rational(1, 3), Rational(5, 2)}, {Rational(1, 5), Rational(7, 2)}, {Rational(1, 3), Rational(2)}}) {
    compare(b2, a, b, {});
    compare(b2, a, b, forced);
  }
  compare(gaussian(1.0), Rational(1), Rational(1, 2), {});
  for (const auto &pp : kParams) {
    auto l = lattice_of(pp);
    compare(b2, l.alpha, l.beta, forced);
  }
  auto res = scan_plane(b2, {Rational(1, 4), Rational(1)}, {Rational(1), Rational(3)}, 6, reduced);
  int scan_same = 0;
  if (res.verdicts.size() == scan_rows.size()) {
    for (std::size_t i = 0; i < scan_rows.size(); ++i) {
      const auto &v = res.verdicts[i];
      bool eq = v.alpha == scan_rows[i].alpha && v.beta == scan_rows[i].beta && scan_rows[i].verdict == to_string(v.kind) &&
                scan_rows[i].source == to_string(v.source);
      scan_same += eq;
      if (!eq && d.size() < 8)
        d.push_back("scan differs at (" + v.alpha.str() + ", " + v.beta.str() + "): full " + scan_rows[i].verdict + "/" +
                    scan_rows[i].source + ", reduced " + verdict_key(v));
    }
  }
  d.insert(d.begin(), std::to_string(same) + "/" + std::to_string(total) + " lattice tests agree; " +
                          std::to_string(scan_same) + "/" + std::to_string(res.verdicts.size()) + " scan points agree");
  report(10, "x-domain [0, alpha) gives the same verdicts as [0, alpha q)",
         same == total && !scan_rows.empty() && scan_same == static_cast<int>(scan_rows.size()), d);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion/criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
