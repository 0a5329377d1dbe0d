/// @file config.hpp
/// @brief Run configuration: a flat `key = value` text format (a TOML subset)
///        parsed into RunConfig.
///
/// Values are numbers, booleans, double-quoted strings, or one-line arrays of
/// those. `[section]` headers prefix the following keys with `section.`.
/// `#` starts a comment outside strings. Unknown keys are errors.
#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pqfrac/error.hpp"
#include "pqfrac/exponents.hpp"
#include "pqfrac/expr.hpp"
#include "pqfrac/grid.hpp"
#include "pqfrac/solver.hpp"

namespace pqfrac {

struct DomainSpec {
  DomainKind kind = DomainKind::Interval;
  double lx = 1.0, ly = 1.0, radius = 1.0;
  int nx = 129, ny = 129;

  GridPtr make_grid() const { return make_grid(nx, ny); }
  GridPtr make_grid(int n_x, int n_y) const {
    switch (kind) {
      case DomainKind::Interval: return Grid::interval(lx, n_x);
      case DomainKind::Rectangle: return Grid::rectangle(lx, ly, n_x, n_y);
      default: return Grid::disc(radius, n_x);
    }
  }
};

/// Lists of values to sweep over; the run covers their Cartesian product.
struct SweepSpec {
  std::vector<int> n;
  std::vector<double> eps_min, f_scale, s, p, q;
  bool empty() const { return n.empty() && eps_min.empty() && f_scale.empty() && s.empty() && p.empty() && q.empty(); }
};

struct RunConfig {
  DomainSpec domain;
  ProblemParams params;
  std::string f = "const 0";
  SolveConfig solve;
  double eps_min = 1e-6;
  std::vector<std::string> checks;  ///< empty selects every applicable check
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  double check_eps = 0.5;
  int catalog_count = 3;
  long lemp4_samples = 100000;
  std::vector<double> identity_t{0.0, 1.0, 2.0};
  double theorem_bound = 10.0;
  double stability_tol = 0.25;
  SweepSpec sweep;
  std::string source;  ///< the configuration text as read
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> k{"lemp4", "lemp5",  "leme1", "leme2", "leme3", "prope1",
                                          "prope2", "lemb3", "T1",    "T2",    "T3a",   "T3b"};
  return k;
}

/// Checks that only make sense with beta > 0.
inline bool needs_beta(const std::string& check) {
  return check == "prope2" || check == "T2" || check == "T3a" || check == "T3b";
}

namespace detail {

using ConfigScalar = std::variant<double, bool, std::string>;
struct ConfigValue {
  std::vector<ConfigScalar> items;
  bool is_array = false;
};

class ConfigParser {
 public:
  std::map<std::string, ConfigValue> parse(std::string_view text) {
    std::map<std::string, ConfigValue> out;
    std::string section;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string line(text.substr(pos, end - pos));
      pos = end + 1;
      ++lineno;
      line_ = lineno;
      line = strip(strip_comment(line));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail("unterminated section header");
        section = strip(line.substr(1, line.size() - 2));
        if (section.empty()) fail("empty section name");
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) fail("expected key = value");
      std::string key = strip(line.substr(0, eq));
      if (key.empty()) fail("missing key");
      if (!section.empty()) key = section + "." + key;
      if (out.count(key)) fail("duplicate key '" + key + "'");
      out[key] = value(strip(line.substr(eq + 1)));
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + why);
  }

  static std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }

  ConfigScalar scalar(const std::string& v) const {
    if (v.empty()) fail("missing value");
    if (v.front() == '"') {
      if (v.size() < 2 || v.back() != '"') fail("unterminated string");
      return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail("cannot read value '" + v + "'");
    return d;
  }

  ConfigValue value(const std::string& v) const {
    ConfigValue out;
    if (!v.empty() && v.front() == '[') {
      if (v.back() != ']') fail("arrays must be written on one line");
      out.is_array = true;
      const std::string body = strip(v.substr(1, v.size() - 2));
      if (body.empty()) return out;
      std::string item;
      bool quoted = false;
      for (char c : body) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
          out.items.push_back(scalar(strip(item)));
          item.clear();
        } else {
          item += c;
        }
      }
      if (!strip(item).empty()) out.items.push_back(scalar(strip(item)));
      return out;
    }
    out.items.push_back(scalar(v));
    return out;
  }

  int line_ = 0;
};

class ConfigReader {
 public:
  explicit ConfigReader(std::map<std::string, ConfigValue> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& k) const { return kv_.count(k) != 0; }

  double number(const std::string& k) {
    const ConfigScalar& s = single(k);
    if (!std::holds_alternative<double>(s)) throw ConfigError("'" + k + "' must be a number");
    return std::get<double>(s);
  }
  int integer(const std::string& k) {
    const double d = number(k);
    if (d != static_cast<double>(static_cast<long>(d))) throw ConfigError("'" + k + "' must be an integer");
    return static_cast<int>(d);
  }
  bool boolean(const std::string& k) {
    const ConfigScalar& s = single(k);
    if (!std::holds_alternative<bool>(s)) throw ConfigError("'" + k + "' must be true or false");
    return std::get<bool>(s);
  }
  std::string string(const std::string& k) {
    const ConfigScalar& s = single(k);
    if (!std::holds_alternative<std::string>(s)) throw ConfigError("'" + k + "' must be a quoted string");
    return std::get<std::string>(s);
  }
  std::vector<double> numbers(const std::string& k) {
    const ConfigValue& v = get(k);
    std::vector<double> out;
    for (const auto& s : v.items) {
      if (!std::holds_alternative<double>(s)) throw ConfigError("'" + k + "' must hold numbers");
      out.push_back(std::get<double>(s));
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& k) {
    const ConfigValue& v = get(k);
    std::vector<std::string> out;
    for (const auto& s : v.items) {
      if (!std::holds_alternative<std::string>(s)) throw ConfigError("'" + k + "' must hold quoted strings");
      out.push_back(std::get<std::string>(s));
    }
    return out;
  }

  /// Throws if a key was never read.
  void finish() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }

 private:
  const ConfigValue& get(const std::string& k) {
    auto it = kv_.find(k);
    if (it == kv_.end()) throw ConfigError("missing config key '" + k + "'");
    used_.insert(k);
    return it->second;
  }
  const ConfigScalar& single(const std::string& k) {
    const ConfigValue& v = get(k);
    if (v.is_array || v.items.size() != 1) throw ConfigError("'" + k + "' must be a single value");
    return v.items.front();
  }

  std::map<std::string, ConfigValue> kv_;
  std::set<std::string> used_;
};

}  // namespace detail

/// Parses and validates a configuration. Throws ConfigError,
/// HypothesisViolation or InapplicableTheorem.
inline RunConfig parse_config(std::string_view text) {
  detail::ConfigReader rd(detail::ConfigParser().parse(text));
  RunConfig c;
  c.source = std::string(text);

  if (rd.has("domain")) {
    const std::string d = rd.string("domain");
    if (d == "interval") c.domain.kind = DomainKind::Interval;
    else if (d == "rectangle") c.domain.kind = DomainKind::Rectangle;
    else if (d == "disc") c.domain.kind = DomainKind::Disc;
    else throw ConfigError("domain must be interval, rectangle or disc");
  }
  if (rd.has("length")) c.domain.lx = rd.number("length");
  if (rd.has("lx")) c.domain.lx = rd.number("lx");
  if (rd.has("ly")) c.domain.ly = rd.number("ly");
  if (rd.has("radius")) c.domain.radius = rd.number("radius");
  if (rd.has("n")) c.domain.nx = c.domain.ny = rd.integer("n");
  if (rd.has("nx")) c.domain.nx = rd.integer("nx");
  if (rd.has("ny")) c.domain.ny = rd.integer("ny");

  ProblemParams& pp = c.params;
  if (rd.has("p")) pp.p = rd.number("p");
  if (rd.has("q")) pp.q = rd.number("q");
  if (rd.has("alpha")) pp.alpha = rd.number("alpha");
  if (rd.has("beta")) pp.beta = rd.number("beta");
  if (rd.has("s")) pp.s = rd.number("s");
  if (rd.has("sigma")) pp.sigma = rd.number("sigma");
  if (rd.has("f")) c.f = rd.string("f");

  if (rd.has("eps_min")) c.eps_min = rd.number("eps_min");
  const double ratio = rd.has("eps_ratio") ? rd.number("eps_ratio") : 0.5;
  c.solve.eps_schedule = rd.has("eps_schedule") ? rd.numbers("eps_schedule") : geometric_schedule(c.eps_min, ratio);
  if (rd.has("newton_tol")) c.solve.newton_tol = rd.number("newton_tol");
  if (rd.has("max_newton_iters")) c.solve.max_newton_iters = rd.integer("max_newton_iters");
  if (rd.has("linesearch_backtrack")) c.solve.linesearch.backtrack = rd.number("linesearch_backtrack");
  if (rd.has("linesearch_armijo")) c.solve.linesearch.armijo = rd.number("linesearch_armijo");
  if (rd.has("linear_tol")) c.solve.linear_tol = rd.number("linear_tol");

  if (rd.has("checks")) c.checks = rd.strings("checks");
  if (rd.has("output_dir")) c.output_dir = rd.string("output_dir");
  if (rd.has("seed")) {
    const double s = rd.number("seed");
    if (s < 0 || s != static_cast<double>(static_cast<std::uint64_t>(s))) throw ConfigError("seed must be a nonnegative integer");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (rd.has("check_eps")) c.check_eps = rd.number("check_eps");
  if (rd.has("catalog_count")) c.catalog_count = rd.integer("catalog_count");
  if (rd.has("lemp4_samples")) c.lemp4_samples = rd.integer("lemp4_samples");
  if (rd.has("identity_t")) c.identity_t = rd.numbers("identity_t");
  if (rd.has("theorem_bound")) c.theorem_bound = rd.number("theorem_bound");
  if (rd.has("stability_tol")) c.stability_tol = rd.number("stability_tol");

  if (rd.has("sweep.n"))
    for (double v : rd.numbers("sweep.n")) {
      if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError("sweep.n must hold integers");
      c.sweep.n.push_back(static_cast<int>(v));
    }
  if (rd.has("sweep.eps_min")) c.sweep.eps_min = rd.numbers("sweep.eps_min");
  if (rd.has("sweep.f_scale")) c.sweep.f_scale = rd.numbers("sweep.f_scale");
  if (rd.has("sweep.s")) c.sweep.s = rd.numbers("sweep.s");
  if (rd.has("sweep.p")) c.sweep.p = rd.numbers("sweep.p");
  if (rd.has("sweep.q")) c.sweep.q = rd.numbers("sweep.q");
  rd.finish();

  validate(pp);
  validate(c.solve);
  parse_expr(c.f);
  if (c.catalog_count < 1) throw ConfigError("catalog_count must be positive");
  if (c.lemp4_samples < 1) throw ConfigError("lemp4_samples must be positive");
  if (!(c.check_eps > 0.0 && c.check_eps <= 1.0)) throw ConfigError("check_eps must lie in (0,1]");

  const ExponentTable table = derive_exponents(pp);
  for (const std::string& ch : c.checks) {
    bool known = false;
    for (const auto& k : known_checks()) known = known || k == ch;
    if (!known) throw ConfigError("unknown check '" + ch + "'");
    if (needs_beta(ch) && !(pp.beta > 0.0)) throw ConfigError("check '" + ch + "' needs beta > 0");
    if ((ch == "T3a" && !table.thm3a) || (ch == "T3b" && !table.thm3b))
      throw InapplicableTheorem("check '" + ch + "' is not applicable to these parameters");
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// The check list to run: the configured one, or every check applicable to
/// the parameters.
inline std::vector<std::string> active_checks(const RunConfig& c) {
  if (!c.checks.empty()) return c.checks;
  const ExponentTable t = derive_exponents(c.params);
  std::vector<std::string> out;
  for (const auto& k : known_checks()) {
    if (needs_beta(k) && !(c.params.beta > 0.0)) continue;
    if ((k == "T3a" && !t.thm3a) || (k == "T3b" && !t.thm3b)) continue;
    out.push_back(k);
  }
  return out;
}

}  // namespace pqfrac
