#pragma once

// Run configuration and window specifiers shared by the command line tool.

#include "gabor/rational.hpp"
#include "gabor/windows.hpp"

#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gabor {

/// Thrown for malformed user input (exit code 2 in the CLI).
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline Rational parse_rational_arg(const std::string &what, const std::string &text) {
  try {
    return Rational::parse(trim(text));
  } catch (const std::exception &e) {
    throw UsageError(what + ": " + e.what());
  }
}

inline double parse_real_arg(const std::string &what, const std::string &text) {
  std::string t = trim(text);
  if (t.find('/') != std::string::npos) return parse_rational_arg(what, t).to_double();
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception &) {
    throw UsageError(what + ": malformed number '" + text + "'");
  }
}

}  // namespace detail

/// Piecewise polynomial from JSON:
///   {"breakpoints": ["-1", "0", "1"], "pieces": [["0", "1"], ["1", "-1"]]}
/// Piece i holds coefficients in t = x - breakpoints[i], ascending powers,
/// each a "num/den" string (plain integers allowed).
inline Window load_poly_window(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw UsageError("poly window: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception &e) {
    throw UsageError("poly window: '" + path + "' is not valid JSON: " + e.what());
  }
  auto as_rational = [&](const nlohmann::json &v) {
    if (!v.is_string()) throw UsageError("poly window: coefficients and breakpoints must be \"num/den\" strings");
    return detail::parse_rational_arg("poly window", v.get<std::string>());
  };
  if (!doc.contains("breakpoints") || !doc.contains("pieces"))
    throw UsageError("poly window: expected keys 'breakpoints' and 'pieces'");
  std::vector<Rational> breaks;
  for (const auto &b : doc.at("breakpoints")) breaks.push_back(as_rational(b));
  std::vector<std::vector<Rational>> pieces;
  for (const auto &piece : doc.at("pieces")) {
    std::vector<Rational> coeffs;
    for (const auto &c : piece) coeffs.push_back(as_rational(c));
    pieces.push_back(std::move(coeffs));
  }
  try {
    return Window(PiecewisePolyWindow(std::move(breaks), std::move(pieces)), "poly:" + path);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
}

/// `bspline:N`, `chi:a,b`, `gauss:width`, `poly:<path>`.
inline Window parse_window_spec(const std::string &spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("unknown window spec '" + spec + "' (expected kind:args)");
  std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "bspline") {
    Rational n = detail::parse_rational_arg("bspline order", arg);
    if (!n.is_integer() || n.sign() <= 0 || n > Rational(64))
      throw UsageError("bspline order must be an integer in [1, 64], got '" + arg + "'");
    return bspline(static_cast<int>(to_int64(n.num())));
  }
  if (kind == "chi") {
    auto comma = arg.find(',');
    if (comma == std::string::npos) throw UsageError("chi window expects chi:a,b");
    Rational a = detail::parse_rational_arg("chi lower end", arg.substr(0, comma));
    Rational b = detail::parse_rational_arg("chi upper end", arg.substr(comma + 1));
    if (!(a < b)) throw UsageError("chi window needs a < b");
    return characteristic(a, b);
  }
  if (kind == "gauss") {
    double w = detail::parse_real_arg("gauss width", arg);
    if (!(w > 0.0)) throw UsageError("gauss width must be positive");
    return gaussian(w);
  }
  if (kind == "poly") return load_poly_window(arg);
  throw UsageError("unknown window kind '" + kind + "' (use bspline, chi, gauss or poly)");
}

/// Every setting a subcommand can take.  Serialises to `key = value` lines;
/// unset strings are omitted.
struct RunConfig {
  std::string command;
  std::string window;
  std::string alpha, beta;
  std::string x, xi;
  std::string alpha_min, alpha_max, beta_min, beta_max;
  std::string out;
  std::string grid = "64x64";
  double tol = 1e-8;
  std::int64_t m = 0, n = 0, r = 0, j = 0;
  std::int64_t rmax = 0;
  std::int64_t max_den = 0;
  std::int64_t samples = 64;
  unsigned threads = 1;
  std::uint64_t seed = 0x5eed'6ab0'2016ULL;
  bool exact = false;
  bool json = false;
  bool rank = false;
  bool reduced_domain = false;
  bool force_scan = false;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;

  std::string to_text() const {
    std::ostringstream os;
    auto put = [&](const char *key, const std::string &v) {
      if (!v.empty()) os << key << " = " << v << '\n';
    };
    put("command", command);
    put("window", window);
    put("alpha", alpha);
    put("beta", beta);
    put("x", x);
    put("xi", xi);
    put("alpha_min", alpha_min);
    put("alpha_max", alpha_max);
    put("beta_min", beta_min);
    put("beta_max", beta_max);
    put("out", out);
    put("grid", grid);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", tol);
    put("tol", buf);
    put("m", std::to_string(m));
    put("n", std::to_string(n));
    put("r", std::to_string(r));
    put("j", std::to_string(j));
    put("rmax", std::to_string(rmax));
    put("max_den", std::to_string(max_den));
    put("samples", std::to_string(samples));
    put("threads", std::to_string(threads));
    put("seed", std::to_string(seed));
    put("exact", exact ? "true" : "false");
    put("json", json ? "true" : "false");
    put("rank", rank ? "true" : "false");
    put("reduced_domain", reduced_domain ? "true" : "false");
    put("force_scan", force_scan ? "true" : "false");
    return os.str();
  }

  /// Applies `key = value` lines on top of the current values.  '#' starts a
  /// comment; unknown keys are rejected.
  void apply_text(const std::string &text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
      set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
  }

  static RunConfig from_text(const std::string &text) {
    RunConfig cfg;
    cfg.apply_text(text);
    return cfg;
  }

  void load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    apply_text(ss.str());
  }

  void set(const std::string &key, const std::string &value) {
    auto as_int = [&]() -> std::int64_t {
      try {
        std::size_t used = 0;
        long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
      } catch (const std::exception &) {
        throw UsageError("config key '" + key + "': expected an integer, got '" + value + "'");
      }
    };
    auto as_bool = [&] {
      if (value == "true" || value == "1") return true;
      if (value == "false" || value == "0") return false;
      throw UsageError("config key '" + key + "': expected true or false, got '" + value + "'");
    };
    std::map<std::string, std::string *> strings = {
        {"command", &command}, {"window", &window},       {"alpha", &alpha},         {"beta", &beta},
        {"x", &x},             {"xi", &xi},               {"alpha_min", &alpha_min}, {"alpha_max", &alpha_max},
        {"beta_min", &beta_min}, {"beta_max", &beta_max}, {"out", &out},             {"grid", &grid}};
    std::map<std::string, std::int64_t *> ints = {{"m", &m},       {"n", &n},             {"r", &r},
                                                  {"j", &j},       {"rmax", &rmax},       {"max_den", &max_den},
                                                  {"samples", &samples}};
    std::map<std::string, bool *> flags = {{"exact", &exact},
                                           {"json", &json},
                                           {"rank", &rank},
                                           {"reduced_domain", &reduced_domain},
                                           {"force_scan", &force_scan}};
    if (auto it = strings.find(key); it != strings.end()) *it->second = value;
    else if (auto ii = ints.find(key); ii != ints.end()) *ii->second = as_int();
    else if (auto fi = flags.find(key); fi != flags.end()) *fi->second = as_bool();
    else if (key == "tol") tol = detail::parse_real_arg("tol", value);
    else if (key == "threads") {
      long long t = as_int();
      if (t < 1 || t > 1024) throw UsageError("config key 'threads': expected 1..1024, got '" + value + "'");
      threads = static_cast<unsigned>(t);
    }
    else if (key == "seed") {
      try {
        std::size_t used = 0;
        if (value.empty() || value[0] == '-') throw std::invalid_argument("");
        seed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
      } catch (const std::exception &) {
        throw UsageError("config key 'seed': expected a non-negative integer, got '" + value + "'");
      }
    }
    else throw UsageError("unknown config key '" + key + "'");
  }
};

}  // namespace gabor
