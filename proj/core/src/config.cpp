#include "shearlab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

namespace shearlab {
namespace {

using Kind = ConfigError::Kind;

struct Value;
using ValueList = std::vector<Value>;

struct Value {
  enum class Type { String, Number, Bool, List, Tuple } type = Type::Number;
  std::string text;  // string contents or the raw number token
  bool flag = false;
  ValueList items;
};

const char* type_label(Value::Type t) {
  switch (t) {
    case Value::Type::String: return "string";
    case Value::Type::Number: return "number";
    case Value::Type::Bool: return "bool";
    case Value::Type::List: return "list";
    case Value::Type::Tuple: return "tuple";
  }
  return "value";
}

class ValueParser {
 public:
  ValueParser(std::string_view text, int line, std::string key)
      : text_(text), line_(line), key_(std::move(key)) {}

  Value parse() {
    Value v = value();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing text");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(Kind::Syntax, line_, key_, what + " in value of '" + key_ + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Value value() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return string();
    if (c == '[') return sequence(']', Value::Type::List);
    if (c == '(') return sequence(')', Value::Type::Tuple);
    return scalar();
  }

  Value string() {
    ++pos_;
    const auto end = text_.find('"', pos_);
    if (end == std::string_view::npos) fail("unterminated string");
    Value v;
    v.type = Value::Type::String;
    v.text = std::string(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return v;
  }

  Value sequence(char close, Value::Type type) {
    ++pos_;
    Value v;
    v.type = type;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == close) {
      ++pos_;
      return v;
    }
    while (true) {
      v.items.push_back(value());
      skip_space();
      if (pos_ >= text_.size()) fail(std::string("missing '") + close + "'");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == close) {
        ++pos_;
        return v;
      }
      fail(std::string("expected ',' or '") + close + "'");
    }
  }

  Value scalar() {
    const auto start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string token(text_.substr(start, pos_ - start));
    if (token.empty()) fail("empty value");
    Value v;
    if (token == "true" || token == "false") {
      v.type = Value::Type::Bool;
      v.flag = token == "true";
      return v;
    }
    v.type = Value::Type::Number;
    v.text = token;
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  std::string key_;
};

struct Context {
  int line;
  std::string key;

  [[noreturn]] void mismatch(const std::string& expected, const Value& got) const {
    throw ConfigError(Kind::TypeMismatch, line, key,
                      "'" + key + "' expects " + expected + ", got " + type_label(got.type) +
                          (got.type == Value::Type::Number ? " " + got.text : std::string()));
  }
  [[noreturn]] void invariant(const std::string& what) const {
    throw ConfigError(Kind::Invariant, line, key, "'" + key + "': " + what);
  }
};

std::string as_string(const Value& v, const Context& ctx) {
  if (v.type != Value::Type::String) ctx.mismatch("a quoted string", v);
  return v.text;
}

bool as_bool(const Value& v, const Context& ctx) {
  if (v.type != Value::Type::Bool) ctx.mismatch("true or false", v);
  return v.flag;
}

double as_double(const Value& v, const Context& ctx) {
  if (v.type != Value::Type::Number) ctx.mismatch("a number", v);
  double out = 0.0;
  const char* first = v.text.data();
  const char* last = first + v.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) ctx.mismatch("a finite number", v);
  return out;
}

template <typename Int>
Int as_integer(const Value& v, const Context& ctx) {
  if (v.type != Value::Type::Number) ctx.mismatch("an integer", v);
  Int out = 0;
  const char* first = v.text.data();
  const char* last = first + v.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) ctx.mismatch("an integer", v);
  return out;
}

const ValueList& as_list(const Value& v, const Context& ctx) {
  if (v.type != Value::Type::List) ctx.mismatch("a [list]", v);
  if (v.items.empty()) ctx.invariant("empty grid");
  return v.items;
}

const ValueList& as_tuple(const Value& v, std::size_t arity, const Context& ctx) {
  if (v.type != Value::Type::Tuple || v.items.size() != arity) {
    ctx.mismatch("a tuple of " + std::to_string(arity) + " entries", v);
  }
  return v.items;
}

std::vector<double> doubles(const Value& v, const Context& ctx) {
  std::vector<double> out;
  for (const auto& item : as_list(v, ctx)) out.push_back(as_double(item, ctx));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const Value&, const Context&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"name", [](auto& c, const auto& v, const auto& x) { c.name = as_string(v, x); }},
      {"engine",
       [](auto& c, const auto& v, const auto& x) {
         const auto name = as_string(v, x);
         const auto e = parse_engine(name);
         if (!e) x.invariant("unknown engine \"" + name + "\"");
         c.engine = *e;
       }},
      {"profile", [](auto& c, const auto& v, const auto& x) { c.profile = as_string(v, x); }},
      {"profile_modes",
       [](auto& c, const auto& v, const auto& x) {
         c.profile_modes.clear();
         for (const auto& item : as_list(v, x)) {
           const auto& t = as_tuple(item, 3, x);
           c.profile_modes.push_back(
               {as_integer<int>(t[0], x), as_double(t[1], x), as_double(t[2], x)});
         }
       }},
      {"nu_grid", [](auto& c, const auto& v, const auto& x) { c.nu_grid = doubles(v, x); }},
      {"k_grid",
       [](auto& c, const auto& v, const auto& x) {
         c.k_grid.clear();
         for (const auto& item : as_list(v, x)) c.k_grid.push_back(as_integer<int>(item, x));
       }},
      {"t_grid", [](auto& c, const auto& v, const auto& x) { c.t_grid = doubles(v, x); }},
      {"y_grid", [](auto& c, const auto& v, const auto& x) { c.y_grid = doubles(v, x); }},
      {"xy_points",
       [](auto& c, const auto& v, const auto& x) {
         c.xy_points.clear();
         for (const auto& item : as_list(v, x)) {
           const auto& t = as_tuple(item, 2, x);
           c.xy_points.emplace_back(as_double(t[0], x), as_double(t[1], x));
         }
       }},
      {"initial_datum",
       [](auto& c, const auto& v, const auto& x) {
         c.initial_datum.clear();
         for (const auto& item : as_list(v, x)) {
           const auto& t = as_tuple(item, 4, x);
           c.initial_datum.push_back({as_integer<int>(t[0], x), as_integer<int>(t[1], x),
                                      {as_double(t[2], x), as_double(t[3], x)}});
         }
       }},
      {"n_y", [](auto& c, const auto& v, const auto& x) { c.n_y = as_integer<int>(v, x); }},
      {"n_steps", [](auto& c, const auto& v, const auto& x) { c.n_steps = as_integer<int>(v, x); }},
      {"n_samples", [](auto& c, const auto& v, const auto& x) { c.n_samples = as_integer<int>(v, x); }},
      {"p", [](auto& c, const auto& v, const auto& x) { c.p = as_integer<int>(v, x); }},
      {"theta", [](auto& c, const auto& v, const auto& x) { c.theta = as_double(v, x); }},
      {"seed", [](auto& c, const auto& v, const auto& x) { c.seed = as_integer<std::uint64_t>(v, x); }},
      {"workers", [](auto& c, const auto& v, const auto& x) { c.workers = as_integer<int>(v, x); }},
      {"output_dir", [](auto& c, const auto& v, const auto& x) { c.output_dir = as_string(v, x); }},
      {"nu_tilde", [](auto& c, const auto& v, const auto& x) { c.nu_tilde = as_double(v, x); }},
      {"gevrey_time", [](auto& c, const auto& v, const auto& x) { c.gevrey_time = as_double(v, x); }},
      {"slope_nu", [](auto& c, const auto& v, const auto& x) { c.slope_nu = as_double(v, x); }},
      {"slope_t", [](auto& c, const auto& v, const auto& x) { c.slope_t = as_double(v, x); }},
      {"with_kernel", [](auto& c, const auto& v, const auto& x) { c.with_kernel = as_bool(v, x); }},
      {"bootstrap_resamples",
       [](auto& c, const auto& v, const auto& x) { c.bootstrap_resamples = as_integer<int>(v, x); }},
      {"nu_slope_tol", [](auto& c, const auto& v, const auto& x) { c.nu_slope_tol = as_double(v, x); }},
      {"k_slope_tol", [](auto& c, const auto& v, const auto& x) { c.k_slope_tol = as_double(v, x); }},
      {"mc_slope_tol", [](auto& c, const auto& v, const auto& x) { c.mc_slope_tol = as_double(v, x); }},
      {"mc_nu_slope_tol",
       [](auto& c, const auto& v, const auto& x) { c.mc_nu_slope_tol = as_double(v, x); }},
      {"r2_min", [](auto& c, const auto& v, const auto& x) { c.r2_min = as_double(v, x); }},
      {"fk_sigma", [](auto& c, const auto& v, const auto& x) { c.fk_sigma = as_double(v, x); }},
  };
  return table;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
      return false;
    }
  }
  return true;
}

// Strips a trailing comment, ignoring '#' inside strings.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

int bracket_depth(std::string_view text) {
  int depth = 0;
  bool in_string = false;
  for (char c : text) {
    if (c == '"') in_string = !in_string;
    if (in_string) continue;
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
  }
  return depth;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void missing(const char* key, Engine e) {
  throw ConfigError(Kind::Missing, 0, key,
                    std::string("engine ") + std::string(engine_name(e)) + " needs '" + key + "'");
}

void check_engine_inputs(const ExperimentConfig& c, Engine e) {
  auto need = [&](bool present, const char* key) {
    if (!present) missing(key, e);
  };
  switch (e) {
    case Engine::Solve:
      need(!c.t_grid.empty(), "t_grid");
      need(!c.nu_grid.empty(), "nu_grid");
      need(!c.xy_points.empty(), "xy_points");
      need(!c.initial_datum.empty(), "initial_datum");
      break;
    case Engine::SpectralScan:
    case Engine::GevreyScan:
      need(!c.nu_grid.empty(), "nu_grid");
      need(!c.k_grid.empty(), "k_grid");
      break;
    case Engine::McInverseMoment:
    case Engine::McSkorokhod:
      need(!c.y_grid.empty(), "y_grid");
      need(!c.nu_grid.empty(), "nu_grid");
      need(!c.t_grid.empty(), "t_grid");
      need(c.n_samples > 0, "n_samples");
      break;
    case Engine::FeynmanKacCheck:
      need(!c.t_grid.empty(), "t_grid");
      need(!c.nu_grid.empty(), "nu_grid");
      need(!c.xy_points.empty(), "xy_points");
      need(!c.initial_datum.empty(), "initial_datum");
      need(c.n_samples > 0, "n_samples");
      break;
    case Engine::BoundCrosscheck:
      need(!c.k_grid.empty(), "k_grid");
      need(!c.nu_grid.empty(), "nu_grid");
      need(!c.t_grid.empty(), "t_grid");
      need(c.n_samples > 0, "n_samples");
      break;
    case Engine::FullReport:
      break;
  }
}

}  // namespace

std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::Solve: return "solve";
    case Engine::SpectralScan: return "spectral-scan";
    case Engine::GevreyScan: return "gevrey-scan";
    case Engine::McInverseMoment: return "mc-inverse-moment";
    case Engine::McSkorokhod: return "mc-skorokhod";
    case Engine::FeynmanKacCheck: return "feynman-kac-check";
    case Engine::BoundCrosscheck: return "bound-crosscheck";
    case Engine::FullReport: return "full-report";
  }
  return "unknown";
}

std::optional<Engine> parse_engine(std::string_view name) {
  for (Engine e : {Engine::Solve, Engine::SpectralScan, Engine::GevreyScan, Engine::McInverseMoment,
                   Engine::McSkorokhod, Engine::FeynmanKacCheck, Engine::BoundCrosscheck,
                   Engine::FullReport}) {
    if (engine_name(e) == name) return e;
  }
  return std::nullopt;
}

ConfigError::ConfigError(Kind kind, int line, std::string key, const std::string& message)
    : Error(std::string(kind_name(kind)) + (line > 0 ? " at line " + std::to_string(line) : "") +
            ": " + message),
      kind_(kind),
      line_(line),
      key_(std::move(key)) {}

std::string_view kind_name(ConfigError::Kind kind) {
  switch (kind) {
    case Kind::Syntax: return "syntax error";
    case Kind::UnknownKey: return "unknown key";
    case Kind::TypeMismatch: return "type mismatch";
    case Kind::Invariant: return "invalid value";
    case Kind::Missing: return "missing key";
  }
  return "config error";
}

ShearProfile ExperimentConfig::shear_profile() const {
  if (profile == "custom") {
    if (profile_modes.empty()) throw InvalidArgument("custom profile needs profile_modes");
    return ShearProfile::from_modes(profile_modes);
  }
  if (!profile_modes.empty()) throw InvalidArgument("profile_modes requires profile = \"custom\"");
  return ShearProfile::preset(profile);
}

InitialDatum ExperimentConfig::datum() const { return InitialDatum::from_terms(initial_datum); }

void validate(const ExperimentConfig& c) {
  auto bad = [](const char* key, const std::string& what) {
    throw ConfigError(Kind::Invariant, 0, key, std::string("'") + key + "': " + what);
  };
  try {
    (void)c.shear_profile();
  } catch (const InvalidArgument& e) {
    bad(c.profile_modes.empty() ? "profile" : "profile_modes", e.what());
  }
  for (double nu : c.nu_grid) {
    if (!(nu > 0.0 && nu <= 1.0)) bad("nu_grid", "diffusivities must lie in (0, 1]");
  }
  for (int k : c.k_grid) {
    if (k < 1) bad("k_grid", "modes must be integers >= 1");
  }
  for (double t : c.t_grid) {
    if (!(t > 0.0)) bad("t_grid", "times must be positive");
  }
  if (!c.initial_datum.empty()) {
    try {
      (void)c.datum();
    } catch (const InvalidArgument& e) {
      bad("initial_datum", e.what());
    }
  }
  if (!is_power_of_two(c.n_y) || c.n_y < 4) bad("n_y", "must be a power of two >= 4");
  if (c.n_steps < 1) bad("n_steps", "must be >= 1");
  if (c.n_samples < 0) bad("n_samples", "must be >= 0");
  if (c.p < 0 || c.p > 2) bad("p", "inverse moments are supported for p in {0, 1, 2}");
  if (!(c.theta > 0.0 && c.theta <= 1.0)) bad("theta", "must lie in (0, 1]");
  if (c.workers < 1) bad("workers", "must be >= 1");
  if (c.output_dir.empty()) bad("output_dir", "must not be empty");
  if (!(c.nu_tilde > 0.0)) bad("nu_tilde", "must be positive");
  if (c.gevrey_time && !(*c.gevrey_time > 0.0)) bad("gevrey_time", "must be positive");
  if (c.slope_nu && !(*c.slope_nu > 0.0 && *c.slope_nu <= 1.0)) bad("slope_nu", "must lie in (0, 1]");
  if (c.slope_t && !(*c.slope_t > 0.0)) bad("slope_t", "must be positive");
  if (c.bootstrap_resamples < 2) bad("bootstrap_resamples", "must be >= 2");
  for (auto [key, value] : {std::pair{"nu_slope_tol", c.nu_slope_tol}, {"k_slope_tol", c.k_slope_tol},
                            {"mc_slope_tol", c.mc_slope_tol}, {"mc_nu_slope_tol", c.mc_nu_slope_tol},
                            {"fk_sigma", c.fk_sigma}}) {
    if (!(value > 0.0)) bad(key, "tolerances must be positive");
  }
  if (!(c.r2_min >= 0.0 && c.r2_min <= 1.0)) bad("r2_min", "must lie in [0, 1]");
  if (!c.seed) throw ConfigError(Kind::Missing, 0, "seed", "'seed' is required (no clock seeding)");
  check_engine_inputs(c, c.engine);
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::map<std::string, int, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const int start_line = line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    while (bracket_depth(line) > 0) {
      if (!std::getline(in, raw)) {
        throw ConfigError(Kind::Syntax, start_line, "", "unbalanced brackets at end of file");
      }
      ++line_no;
      line += ' ' + trim(strip_comment(raw));
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(Kind::Syntax, start_line, "", "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!is_identifier(key)) throw ConfigError(Kind::Syntax, start_line, key, "malformed key '" + key + "'");
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(Kind::UnknownKey, start_line, key, "unknown key '" + key + "'");
    }
    if (seen.count(key)) {
      throw ConfigError(Kind::Syntax, start_line, key,
                        "duplicate key '" + key + "' (first set at line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = start_line;
    const Value value = ValueParser(std::string_view(line).substr(eq + 1), start_line, key).parse();
    it->second(config, value, Context{start_line, key});
  }
  try {
    validate(config);
  } catch (const ConfigError& e) {
    const auto at = seen.find(e.key());
    if (at == seen.end() || e.line() != 0) throw;
    std::string message = e.what();
    message = message.substr(message.find(": ") + 2);
    throw ConfigError(e.kind(), at->second, e.key(), message);
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(Kind::Missing, 0, "", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto list = [&](const char* key, const auto& xs, auto fmt) {
    if (xs.empty()) return;
    out << key << " = [";
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << fmt(xs[i]);
    out << "]\n";
  };
  auto quoted = [](const std::string& s) { return '"' + s + '"'; };
  out << "name = " << quoted(c.name) << '\n';
  out << "engine = " << quoted(std::string(engine_name(c.engine))) << '\n';
  out << "profile = " << quoted(c.profile) << '\n';
  list("profile_modes", c.profile_modes,
       [](const TrigMode& m) { return "(" + std::to_string(m.m) + ", " + real(m.a) + ", " + real(m.b) + ")"; });
  list("nu_grid", c.nu_grid, real);
  list("k_grid", c.k_grid, [](int k) { return std::to_string(k); });
  list("t_grid", c.t_grid, real);
  list("y_grid", c.y_grid, real);
  list("xy_points", c.xy_points,
       [](const std::pair<double, double>& p) { return "(" + real(p.first) + ", " + real(p.second) + ")"; });
  list("initial_datum", c.initial_datum, [](const FourierTerm& t) {
    return "(" + std::to_string(t.k) + ", " + std::to_string(t.eta) + ", " + real(t.coeff.real()) +
           ", " + real(t.coeff.imag()) + ")";
  });
  out << "n_y = " << c.n_y << '\n';
  out << "n_steps = " << c.n_steps << '\n';
  out << "n_samples = " << c.n_samples << '\n';
  out << "p = " << c.p << '\n';
  out << "theta = " << real(c.theta) << '\n';
  if (c.seed) out << "seed = " << *c.seed << '\n';
  out << "workers = " << c.workers << '\n';
  out << "output_dir = " << quoted(c.output_dir) << '\n';
  out << "nu_tilde = " << real(c.nu_tilde) << '\n';
  if (c.gevrey_time) out << "gevrey_time = " << real(*c.gevrey_time) << '\n';
  if (c.slope_nu) out << "slope_nu = " << real(*c.slope_nu) << '\n';
  if (c.slope_t) out << "slope_t = " << real(*c.slope_t) << '\n';
  out << "with_kernel = " << (c.with_kernel ? "true" : "false") << '\n';
  out << "bootstrap_resamples = " << c.bootstrap_resamples << '\n';
  out << "nu_slope_tol = " << real(c.nu_slope_tol) << '\n';
  out << "k_slope_tol = " << real(c.k_slope_tol) << '\n';
  out << "mc_slope_tol = " << real(c.mc_slope_tol) << '\n';
  out << "mc_nu_slope_tol = " << real(c.mc_nu_slope_tol) << '\n';
  out << "r2_min = " << real(c.r2_min) << '\n';
  out << "fk_sigma = " << real(c.fk_sigma) << '\n';
  return out.str();
}

}  // namespace shearlab
