#pragma once

// Subcommand front end: zak, pmat, pou, obstruct [enumerate], test, scan.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.  Machine output goes
// to `out` (JSON with --json), human summaries to `err`.

#include "gabor/config.hpp"
#include "gabor/frameset.hpp"
#include "gabor/obstructions.hpp"
#include "gabor/pmatrix.hpp"
#include "gabor/ranktest.hpp"
#include "gabor/windows.hpp"
#include "gabor/zak.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace gabor {

namespace cli_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);  // + 0.0 folds -0 into 0
  return buf;
}

inline std::string fmt_complex(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real() + 0.0, z.imag() + 0.0);
  return buf;
}

inline void require(bool ok, const std::string &msg) {
  if (!ok) throw UsageError(msg);
}

inline Rational positive_rational(const std::string &name, const std::string &text) {
  require(!text.empty(), "--" + name + " is required");
  Rational v = detail::parse_rational_arg("--" + name, text);
  require(v.sign() > 0, "--" + name + " must be positive, got " + v.str());
  return v;
}

inline GridSpec parse_grid(const RunConfig &cfg) {
  auto xpos = cfg.grid.find('x');
  require(xpos != std::string::npos, "--grid expects NXxNXI, e.g. 64x64");
  GridSpec grid;
  try {
    grid.nx = std::stoul(cfg.grid.substr(0, xpos));
    grid.nxi = std::stoul(cfg.grid.substr(xpos + 1));
  } catch (const std::exception &) {
    throw UsageError("--grid expects NXxNXI, got '" + cfg.grid + "'");
  }
  require(grid.nx >= 1 && grid.nxi >= 1, "--grid sizes must be >= 1");
  grid.reduced_domain = cfg.reduced_domain;
  return grid;
}

inline TestOptions test_options(const RunConfig &cfg) {
  require(cfg.tol > 0.0 && cfg.tol < 1.0, "--tol must lie in (0, 1)");
  require(cfg.threads >= 1, "--threads must be >= 1");
  TestOptions opt;
  opt.rel_tol = cfg.tol;
  opt.force_scan = cfg.force_scan;
  opt.threads = cfg.threads;
  opt.seed = cfg.seed;
  return opt;
}

inline Window window_of(const RunConfig &cfg) {
  require(!cfg.window.empty(), "--window is required");
  return parse_window_spec(cfg.window);
}

inline bool is_rational_text(const std::string &s) { return s.find_first_of(".eE") == std::string::npos; }

inline int run_zak(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  Window g = window_of(cfg);
  Rational alpha = positive_rational("alpha", cfg.alpha);
  require(!cfg.x.empty(), "--x is required");
  double xi = cfg.xi.empty() ? 0.0 : detail::parse_real_arg("--xi", cfg.xi);
  if (cfg.exact) {
    require(xi == 0.0, "--exact is only defined at xi = 0");
    require(g.is_exact(), "--exact needs a piecewise polynomial or characteristic window");
    Rational x = detail::parse_rational_arg("--x", cfg.x);
    out << zak_exact(g, alpha, x).str() << '\n';
    return 0;
  }
  Complex z = is_rational_text(cfg.x) ? zak(g, alpha, detail::parse_rational_arg("--x", cfg.x), xi)
                                      : zak(g, alpha, EvaluationPoint{detail::parse_real_arg("--x", cfg.x), xi});
  out << fmt(z.real()) << ' ' << fmt(z.imag()) << '\n';
  err << "Z_" << alpha << ' ' << g.label() << " at (" << cfg.x << ", " << fmt(xi) << ")\n";
  return 0;
}

inline int run_pmat(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  Window g = window_of(cfg);
  auto lat = LatticeParams::make(positive_rational("alpha", cfg.alpha), positive_rational("beta", cfg.beta));
  std::string xtext = cfg.x.empty() ? "0" : cfg.x;
  double xi = cfg.xi.empty() ? 0.0 : detail::parse_real_arg("--xi", cfg.xi);
  if (lat.supercritical()) throw DensityAboveCritical(lat.p, lat.q);
  err << "P(x, xi) for " << g.label() << ", alpha*beta = " << lat.p << "/" << lat.q << " (" << lat.p << "x" << lat.q
      << ")\n";
  if (cfg.exact) {
    require(xi == 0.0, "--exact is only defined at xi = 0");
    require(g.is_exact(), "--exact needs a piecewise polynomial or characteristic window");
    auto pm = build_p_exact(g, lat, detail::parse_rational_arg("--x", xtext));
    for (std::size_t k = 0; k < pm.entries.rows; ++k) {
      for (std::size_t l = 0; l < pm.entries.cols; ++l) out << (l ? "," : "") << pm.entries(k, l).str();
      out << '\n';
    }
    if (cfg.rank) out << "rank=" << exact_rank(pm) << '\n';
    return 0;
  }
  PMatrix pm = is_rational_text(xtext) ? build_p(g, lat, detail::parse_rational_arg("--x", xtext), xi)
                                       : build_p(g, lat, EvaluationPoint{detail::parse_real_arg("--x", xtext), xi});
  for (Eigen::Index k = 0; k < pm.entries.rows(); ++k) {
    for (Eigen::Index l = 0; l < pm.entries.cols(); ++l) out << (l ? "," : "") << fmt_complex(pm.entries(k, l));
    out << '\n';
  }
  if (cfg.rank) {
    require(cfg.tol > 0.0 && cfg.tol < 1.0, "--tol must lie in (0, 1)");
    out << "rank=" << numeric_rank(singular_values(pm), cfg.tol) << '\n';
  }
  return 0;
}

inline int run_pou(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  Window g = window_of(cfg);
  require(cfg.samples >= 1, "--samples must be >= 1");
  auto rep = check_partition_of_unity(g, static_cast<std::size_t>(cfg.samples), cfg.tol);
  if (cfg.json) {
    nlohmann::json j = {{"window", g.label()},
                        {"holds", rep.holds},
                        {"exact", rep.exact},
                        {"samples", rep.samples_checked},
                        {"witness_x", rep.witness_x},
                        {"deviation", rep.deviation}};
    if (rep.exact_witness) j["witness_x_exact"] = rep.exact_witness->str();
    if (rep.exact_deviation) j["deviation_exact"] = rep.exact_deviation->str();
    out << j.dump(2) << '\n';
    return 0;
  }
  if (rep.holds) out << "holds" << (rep.exact ? " (exact)" : "") << '\n';
  else
    out << "fails x=" << (rep.exact_witness ? rep.exact_witness->str() : fmt(rep.witness_x))
        << " deviation=" << (rep.exact_deviation ? rep.exact_deviation->str() : fmt(rep.deviation)) << '\n';
  return 0;
}

inline PropTwoParams params_from(const RunConfig &cfg) {
  require(cfg.m >= 1 && cfg.n >= 1 && cfg.r >= 1, "--m, --n and --r must be positive");
  require(cfg.j >= 1 && cfg.j <= cfg.r - 1, "--j must satisfy 1 <= j <= r-1");
  return {cfg.m, cfg.n, cfg.r, cfg.j};
}

inline int run_obstruct(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  Window g = window_of(cfg);
  PropTwoParams pp = params_from(cfg);
  auto adm = prop2_applies(pp);
  if (!adm.admissible()) {
    err << "parameters (m,n,r,j) = (" << pp.m << "," << pp.n << "," << pp.r << "," << pp.j
        << ") are inadmissible: " << to_string(adm.status) << '\n';
    if (adm.reduced_q) err << "reduced density denominator " << *adm.reduced_q << " < rm = " << pp.q() << '\n';
    return 1;
  }
  std::string xtext = cfg.x.empty() ? "0" : cfg.x;
  CertificateReport rep = cfg.exact ? verify_certificate_exact(g, pp, detail::parse_rational_arg("--x", xtext))
                                    : verify_certificate_float(g, pp, detail::parse_real_arg("--x", xtext), cfg.tol);
  if (cfg.json) {
    out << report_to_json(rep).dump(2) << '\n';
    return 0;
  }
  auto lat = lattice_of(pp);
  out << "lattice alpha=" << lat.alpha << " beta=" << lat.beta << " p=" << rep.p << " q=" << rep.q << '\n';
  out << "x=" << (rep.x_exact ? rep.x_exact->str() : fmt(rep.x)) << " mode=" << (rep.exact ? "exact" : "float") << '\n';
  for (std::size_t l = 0; l < rep.comb_residuals.size(); ++l)
    out << "||P v_" << l << " - e||_inf = "
        << (rep.exact ? rep.comb_residuals_exact[l].str() : fmt(rep.comb_residuals[l])) << '\n';
  for (std::size_t l = 0; l < rep.kernel_residuals.size(); ++l)
    out << "||P (v_0 - v_" << l + 1 << ")||_inf = "
        << (rep.exact ? rep.kernel_residuals_exact[l].str() : fmt(rep.kernel_residuals[l])) << '\n';
  out << "rank=" << rep.rank << " bound=" << rep.rank_bound << " p=" << rep.p << '\n';
  out << (rep.certifies() ? "not a frame: rank P(x,0) < p" : "certificate did not establish rank < p") << '\n';
  return 0;
}

inline int run_enumerate(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  require(cfg.n >= 1 && cfg.m >= 1, "--n and --m must be positive");
  require(cfg.rmax >= 2, "--rmax must be >= 2");
  auto pts = enumerate_excluded(cfg.n, cfg.m, cfg.rmax);
  out << "m,n,r,j,alpha,beta,p,q,rank_bound\n";
  for (const auto &e : pts)
    out << e.params.m << ',' << e.params.n << ',' << e.params.r << ',' << e.params.j << ',' << e.lattice.alpha << ','
        << e.lattice.beta << ',' << e.p << ',' << e.q << ',' << e.rank_bound << '\n';
  err << pts.size() << " excluded lattice point(s)\n";
  if (cfg.m == cfg.n + 1 && !pts.empty())
    err << "closest to accumulation point beta = " << cfg.n + 1 << ": " << pts.back().lattice.beta
        << " (distance " << *pts.back().distance_to_accumulation << ")\n";
  return 0;
}

inline std::string verdict_line(const Verdict &v) {
  std::string s = to_string(v.kind);
  if (v.source != CertificateSource::None) s += std::string("(") + to_string(v.source) + ")";
  return s;
}

inline int run_test(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  Window g = window_of(cfg);
  Rational alpha = positive_rational("alpha", cfg.alpha);
  Rational beta = positive_rational("beta", cfg.beta);
  GridSpec grid = parse_grid(cfg);
  Verdict v = test_lattice(g, alpha, beta, grid, test_options(cfg));
  if (cfg.json) out << verdict_to_json(v).dump(2) << '\n';
  else out << verdict_line(v) << '\n';
  err << g.label() << " alpha=" << v.alpha << " beta=" << v.beta << " (p/q = " << v.p << "/" << v.q
      << "): " << verdict_line(v) << '\n';
  if (!v.reason.empty()) err << "  " << v.reason << '\n';
  if (v.scan)
    err << "  grid margin " << fmt(v.scan->margin) << " at x=" << fmt(v.scan->x) << " xi=" << fmt(v.scan->xi) << '\n';
  for (const auto &c : v.caveats) err << "  caveat: " << c << '\n';
  return 0;
}

inline int run_scan(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  Window g = window_of(cfg);
  RationalRange ar{positive_rational("alpha-min", cfg.alpha_min), positive_rational("alpha-max", cfg.alpha_max)};
  RationalRange br{positive_rational("beta-min", cfg.beta_min), positive_rational("beta-max", cfg.beta_max)};
  require(!(ar.max < ar.min) && !(br.max < br.min), "empty scan range");
  require(cfg.max_den >= 1, "--max-den must be >= 1");
  require(!cfg.out.empty(), "--out prefix is required");
  auto res = scan_plane(g, ar, br, cfg.max_den, parse_grid(cfg), test_options(cfg));
  const std::string csv = cfg.out + ".csv", ppm = cfg.out + ".ppm";
  {
    std::ofstream f(csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + csv + "'");
    write_scan_csv(res, f);
  }
  render_heatmap(res, ppm);
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto &v : res.verdicts) ++counts[static_cast<int>(v.kind)];
  out << csv << '\n' << ppm << '\n';
  err << res.verdicts.size() << " lattice points (" << res.alphas.size() << " alpha x " << res.betas.size()
      << " beta): " << counts[0] << " certified, " << counts[1] << " numeric not-frame, " << counts[2]
      << " likely frame, " << counts[3] << " inconclusive\n";
  return 0;
}

}  // namespace cli_detail

/// Executes a fully populated configuration.
inline int run_config(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  try {
    const std::string &c = cfg.command;
    if (c == "zak") return cli_detail::run_zak(cfg, out, err);
    if (c == "pmat") return cli_detail::run_pmat(cfg, out, err);
    if (c == "pou") return cli_detail::run_pou(cfg, out, err);
    if (c == "obstruct") return cli_detail::run_obstruct(cfg, out, err);
    if (c == "enumerate" || c == "obstruct enumerate") return cli_detail::run_enumerate(cfg, out, err);
    if (c == "test") return cli_detail::run_test(cfg, out, err);
    if (c == "scan") return cli_detail::run_scan(cfg, out, err);
    throw UsageError(c.empty() ? "no subcommand given" : "unknown subcommand '" + c + "'");
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int parse_and_dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  RunConfig cfg;
  try {
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") cfg.load_file(argv[i + 1]);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Gabor frame tester for rational lattices"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override its values");

  auto add_window = [&](CLI::App *sub) { sub->add_option("--window", cfg.window, "bspline:N | chi:a,b | gauss:w | poly:file"); };
  auto add_lattice = [&](CLI::App *sub) {
    sub->add_option("--alpha", cfg.alpha, "time step as num/den");
    sub->add_option("--beta", cfg.beta, "frequency step as num/den");
  };
  auto add_scan_opts = [&](CLI::App *sub) {
    sub->add_option("--grid", cfg.grid, "NXxNXI sample grid");
    sub->add_option("--tol", cfg.tol, "relative rank tolerance");
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("--seed", cfg.seed, "seed for certificate sample points");
    sub->add_flag("--reduced-domain", cfg.reduced_domain, "scan x over [0, alpha) instead of [0, alpha q)");
    sub->add_flag("--force-scan", cfg.force_scan, "run the grid scan even for certified lattices");
  };

  auto *zak_cmd = app.add_subcommand("zak", "Zak transform Z_alpha g(x, xi)");
  add_window(zak_cmd);
  zak_cmd->add_option("--alpha", cfg.alpha, "Zak period");
  zak_cmd->add_option("--x", cfg.x);
  zak_cmd->add_option("--xi", cfg.xi);
  zak_cmd->add_flag("--exact", cfg.exact, "exact rational value (xi = 0 only)");

  auto *pmat_cmd = app.add_subcommand("pmat", "print P(x, xi) as CSV");
  add_window(pmat_cmd);
  add_lattice(pmat_cmd);
  pmat_cmd->add_option("--x", cfg.x);
  pmat_cmd->add_option("--xi", cfg.xi);
  pmat_cmd->add_option("--tol", cfg.tol, "relative rank tolerance for --rank");
  pmat_cmd->add_flag("--exact", cfg.exact);
  pmat_cmd->add_flag("--rank", cfg.rank, "append the rank");

  auto *pou_cmd = app.add_subcommand("pou", "partition of unity check");
  add_window(pou_cmd);
  pou_cmd->add_option("--samples", cfg.samples);
  pou_cmd->add_option("--tol", cfg.tol);
  pou_cmd->add_flag("--json", cfg.json);

  auto *obs_cmd = app.add_subcommand("obstruct", "verify the kernel certificate for (m, n, r, j)");
  obs_cmd->require_subcommand(0, 1);
  add_window(obs_cmd);
  obs_cmd->add_option("--m", cfg.m);
  obs_cmd->add_option("--n", cfg.n);
  obs_cmd->add_option("--r", cfg.r);
  obs_cmd->add_option("--j", cfg.j);
  obs_cmd->add_option("--x", cfg.x);
  obs_cmd->add_option("--tol", cfg.tol);
  obs_cmd->add_flag("--exact", cfg.exact);
  obs_cmd->add_flag("--json", cfg.json);
  auto *enum_cmd = obs_cmd->add_subcommand("enumerate", "list excluded lattices (CSV)");
  enum_cmd->add_option("--n", cfg.n);
  enum_cmd->add_option("--m", cfg.m);
  enum_cmd->add_option("--rmax", cfg.rmax);

  auto *test_cmd = app.add_subcommand("test", "frame verdict for one lattice");
  add_window(test_cmd);
  add_lattice(test_cmd);
  add_scan_opts(test_cmd);
  test_cmd->add_flag("--json", cfg.json);

  auto *scan_cmd = app.add_subcommand("scan", "verdict map over a rectangle of rational lattices");
  add_window(scan_cmd);
  scan_cmd->add_option("--alpha-min", cfg.alpha_min);
  scan_cmd->add_option("--alpha-max", cfg.alpha_max);
  scan_cmd->add_option("--beta-min", cfg.beta_min);
  scan_cmd->add_option("--beta-max", cfg.beta_max);
  scan_cmd->add_option("--max-den", cfg.max_den);
  scan_cmd->add_option("--out", cfg.out, "output prefix for .csv and .ppm");
  add_scan_opts(scan_cmd);

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  if (enum_cmd->parsed()) cfg.command = "enumerate";
  else if (auto subs = app.get_subcommands(); !subs.empty()) cfg.command = subs.front()->get_name();
  return run_config(cfg, out, err);
}

}  // namespace gabor
