#include "soh/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "soh/errors.hpp"

extern char** environ;

namespace soh::config {
namespace {

std::string describe(const Value& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "real";
    case 3: return "string";
    default: return "list";
  }
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  bool start = true;
  for (char c : key) {
    if (c == '.') {
      if (start) return false;
      start = true;
      continue;
    }
    const bool alpha = std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    if (start && !alpha) return false;
    if (!alpha && !std::isdigit(static_cast<unsigned char>(c))) return false;
    start = false;
  }
  return !start;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, std::size_t col, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
}

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 0;
  std::size_t base = 0;  // column of text[0], 1-based

  std::size_t col() const { return base + pos; }
  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() const { return pos >= text.size(); }
};

bool parse_number(Cursor& c, Value& out) {
  const std::size_t start = c.pos;
  while (c.pos < c.text.size() && (std::isalnum(static_cast<unsigned char>(c.text[c.pos])) || c.text[c.pos] == '.' ||
                                   c.text[c.pos] == '-' || c.text[c.pos] == '+')) {
    ++c.pos;
  }
  std::string_view tok = c.text.substr(start, c.pos - start);
  if (tok.empty()) return false;
  const bool real = tok.find_first_of(".eEnN") != std::string_view::npos;
  std::string_view digits = tok;
  if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
  if (real) {
    double v = 0.0;
    const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (r.ec != std::errc() || r.ptr != digits.data() + digits.size() || !std::isfinite(v)) return false;
    out = v;
  } else {
    long v = 0;
    const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (r.ec != std::errc() || r.ptr != digits.data() + digits.size()) return false;
    out = v;
  }
  return true;
}

Value parse_value(Cursor& c) {
  c.skip_space();
  if (c.done()) parse_fail(c.line, c.col(), "missing value");
  const char ch = c.text[c.pos];
  if (ch == '"') {
    std::string s;
    ++c.pos;
    while (true) {
      if (c.done()) parse_fail(c.line, c.col(), "unterminated string");
      char x = c.text[c.pos++];
      if (x == '"') break;
      if (x == '\\') {
        if (c.done()) parse_fail(c.line, c.col(), "unterminated escape");
        x = c.text[c.pos++];
        if (x == 'n') x = '\n';
        else if (x == 't') x = '\t';
        else if (x != '"' && x != '\\') parse_fail(c.line, c.col() - 1, "unknown escape");
      }
      s += x;
    }
    return s;
  }
  if (ch == '[') {
    ++c.pos;
    std::vector<double> list;
    c.skip_space();
    if (!c.done() && c.text[c.pos] == ']') {
      ++c.pos;
      return list;
    }
    while (true) {
      c.skip_space();
      Value v;
      const std::size_t at = c.col();
      if (!parse_number(c, v)) parse_fail(c.line, at, "expected a number in list");
      list.push_back(v.index() == 1 ? static_cast<double>(std::get<long>(v)) : std::get<double>(v));
      c.skip_space();
      if (c.done()) parse_fail(c.line, c.col(), "unterminated list");
      if (c.text[c.pos] == ',') {
        ++c.pos;
        continue;
      }
      if (c.text[c.pos] == ']') {
        ++c.pos;
        break;
      }
      parse_fail(c.line, c.col(), "expected ',' or ']'");
    }
    return list;
  }
  if (c.text.substr(c.pos, 4) == "true") {
    c.pos += 4;
    return true;
  }
  if (c.text.substr(c.pos, 5) == "false") {
    c.pos += 5;
    return false;
  }
  Value v;
  const std::size_t at = c.col();
  if (!parse_number(c, v)) parse_fail(c.line, at, "expected a number, boolean, string or list");
  return v;
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
      continue;
    }
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw Error(ErrorCode::RangeError, key + " " + what);
}

}  // namespace

Config Config::defaults() {
  Config c;
  auto& v = c.values_;
  v["grid.dim"] = 2L;
  v["grid.n"] = 64L;
  v["grid.length"] = 2.0 * std::numbers::pi;
  v["time.dt"] = 1e-3;
  v["time.t_end"] = 1.0;
  v["time.cfl_safety"] = 0.9;
  v["time.imex"] = true;
  v["time.output_every"] = 100L;
  v["params.a"] = 1.0;
  v["params.b"] = 0.2;
  v["params.nu"] = 1.0;
  v["params.D"] = 1.0;
  v["params.lambda"] = 1.0;
  v["params.Re"] = 1.0;
  v["params.R"] = 1.0;
  v["params.kernel"] = std::string("gaussian");
  v["params.kernel_scale"] = 1.0;
  v["sphere.L"] = 12L;
  v["sphere.gci_degree"] = static_cast<long>(vmf::kDefaultGciDegree);
  v["init.preset"] = std::string("benchmark");
  v["init.file"] = std::string();
  v["init.well_prepared"] = std::string();
  v["init.rho"] = 1.0;
  v["init.phi"] = 0.0;
  v["init.psi"] = 0.0;
  v["kinetic.epsilon"] = 0.1;
  v["kinetic.current_floor"] = 1e-8;
  v["output.snapshots"] = true;
  v["diagnostics.s"] = 2L;
  v["diagnostics.eta0"] = 1.0;
  v["limit.epsilons"] = std::vector<double>{0.2, 0.1, 0.05};
  v["limit.t_end"] = 0.5;
  v["limit.sample_interval"] = 0.05;
  v["limit.grid_n"] = 32L;
  v["limit.reference_n"] = 64L;
  v["limit.reference_dt"] = 1e-3;
  v["limit.kinetic_dt"] = 0.0;
  v["run.seed"] = 0L;
  v["run.threads"] = 1L;
  return c;
}

const Value& Config::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::UnknownKey, "unknown key '" + key + "'");
  return it->second;
}

namespace {

template <class T>
const T& typed(const Value& v, const std::string& key) {
  if (const auto* x = std::get_if<T>(&v)) return *x;
  throw Error(ErrorCode::ParseError, key + " holds a " + describe(v));
}

}  // namespace

double Config::real(const std::string& key) const {
  const auto& v = at(key);
  if (const auto* l = std::get_if<long>(&v)) return static_cast<double>(*l);
  return typed<double>(v, key);
}
long Config::integer(const std::string& key) const { return typed<long>(at(key), key); }
bool Config::boolean(const std::string& key) const { return typed<bool>(at(key), key); }
const std::string& Config::text(const std::string& key) const { return typed<std::string>(at(key), key); }
const std::vector<double>& Config::list(const std::string& key) const {
  return typed<std::vector<double>>(at(key), key);
}

void Config::set(const std::string& key, const Value& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::UnknownKey, "unknown key '" + key + "'");
  const auto want = it->second.index();
  if (want == value.index()) {
    it->second = value;
  } else if (want == 2 && value.index() == 1) {
    it->second = static_cast<double>(std::get<long>(value));
  } else {
    throw Error(ErrorCode::ParseError, key + " expects a " + describe(it->second) + ", got a " + describe(value));
  }
}

void Config::set_from_text(const std::string& key, std::string_view raw) {
  const auto& current = at(key);
  Cursor c{raw, 0, 0, 1};
  Value v;
  // bare words are accepted for string keys (handy for environment overrides)
  if (current.index() == 3 && (raw.empty() || raw.front() != '"')) {
    v = std::string(trim(raw));
  } else {
    v = parse_value(c);
    c.skip_space();
    if (!c.done()) throw Error(ErrorCode::ParseError, key + ": trailing characters in '" + std::string(raw) + "'");
  }
  set(key, v);
}

void Config::validate() const {
  const long dim = integer("grid.dim");
  require(dim >= 1 && dim <= 3, "grid.dim", "must be 1, 2 or 3");
  const long n = integer("grid.n");
  require(n >= 8 && (n & (n - 1)) == 0, "grid.n", "must be a power of two >= 8");
  require(real("grid.length") > 0.0, "grid.length", "must be positive");
  require(real("time.dt") > 0.0, "time.dt", "must be positive");
  require(real("time.t_end") >= 0.0, "time.t_end", "must be >= 0");
  const double cfl = real("time.cfl_safety");
  require(cfl > 0.0 && cfl <= 1.0, "time.cfl_safety", "must be in (0, 1]");
  require(integer("time.output_every") >= 1, "time.output_every", "must be >= 1");
  require(real("params.nu") > 0.0, "params.nu", "must be positive");
  require(real("params.D") > 0.0, "params.D", "must be positive");
  require(real("params.Re") > 0.0, "params.Re", "must be positive");
  require(real("params.R") > 0.0, "params.R", "must be positive");
  const double kappa = real("params.nu") / real("params.D");
  require(kappa >= vmf::kKappaMin && kappa <= vmf::kKappaMax, "params.nu",
          "gives kappa = nu / D outside [1e-3, 100]");
  const auto& kernel = text("params.kernel");
  require(kernel == "gaussian" || kernel == "tophat" || kernel == "exponential", "params.kernel",
          "must be gaussian, tophat or exponential");
  require(real("params.kernel_scale") > 0.0, "params.kernel_scale", "must be positive");
  require(integer("sphere.L") >= 2, "sphere.L", "must be >= 2");
  require(integer("sphere.gci_degree") >= 8, "sphere.gci_degree", "must be >= 8");
  const auto& preset = text("init.preset");
  require(preset == "benchmark" || preset == "uniform", "init.preset", "must be benchmark or uniform");
  require(real("init.rho") > 0.0, "init.rho", "must be positive");
  require(real("kinetic.epsilon") > 0.0, "kinetic.epsilon", "must be positive");
  require(real("kinetic.current_floor") > 0.0, "kinetic.current_floor", "must be positive");
  require(integer("diagnostics.s") >= 0, "diagnostics.s", "must be >= 0");
  require(real("diagnostics.eta0") > 0.0, "diagnostics.eta0", "must be positive");
  const long ln = integer("limit.grid_n");
  require(ln >= 8 && (ln & (ln - 1)) == 0, "limit.grid_n", "must be a power of two >= 8");
  const long rn = integer("limit.reference_n");
  require(rn >= ln && (rn & (rn - 1)) == 0, "limit.reference_n", "must be a power of two >= limit.grid_n");
  require(integer("run.threads") >= 1, "run.threads", "must be >= 1");
  limit_config(*this).validate();
}

nlohmann::json Config::to_json() const {
  nlohmann::json root = nlohmann::json::object();
  for (const auto& [key, value] : values_) {
    nlohmann::json* node = &root;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (dot == std::string::npos) {
        std::visit([&](const auto& x) { (*node)[part] = x; }, value);
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return root;
}

Config parse_config(std::string_view text) {
  Config cfg = Config::defaults();
  std::map<std::string, std::size_t> seen;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    std::string_view line = strip_comment(raw);
    const std::string_view body = trim(line);
    if (body.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t col0 = (body.data() - raw.data()) + 1;
    if (body.front() == '[') {
      if (body.back() != ']') parse_fail(line_no, col0 + body.size() - 1, "expected ']' closing the section header");
      const auto name = trim(body.substr(1, body.size() - 2));
      if (!valid_key(name)) parse_fail(line_no, col0 + 1, "invalid section name");
      section = std::string(name);
      if (end == text.size()) break;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, col0 + body.size(), "expected '='");
    const auto key_text = trim(body.substr(0, eq));
    if (!valid_key(key_text)) parse_fail(line_no, col0, "invalid key '" + std::string(key_text) + "'");
    const std::string key = section.empty() ? std::string(key_text) : section + "." + std::string(key_text);
    if (!cfg.has(key)) {
      throw Error(ErrorCode::UnknownKey, "unknown key '" + key + "' at line " + std::to_string(line_no));
    }
    if (const auto it = seen.find(key); it != seen.end()) {
      parse_fail(line_no, col0, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    }
    seen[key] = line_no;
    Cursor c{body.substr(eq + 1), 0, line_no, col0 + eq + 1};
    const Value v = parse_value(c);
    c.skip_space();
    if (!c.done()) parse_fail(line_no, c.col(), "unexpected characters after the value");
    try {
      cfg.set(key, v);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseError) throw;
      parse_fail(line_no, col0 + eq + 1, key + " expects a " + describe(cfg.at(key)) + ", got a " + describe(v));
    }
    if (end == text.size()) break;
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> process_environment() {
  std::vector<std::string> out;
  for (char** e = environ; e && *e; ++e) out.emplace_back(*e);
  std::sort(out.begin(), out.end());
  return out;
}

void apply_env_overrides(Config& cfg, const std::vector<std::string>& environment) {
  const std::string prefix = kEnvPrefix;
  for (const auto& entry : environment) {
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string name = entry.substr(prefix.size(), eq - prefix.size());
    std::string dotted;
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (name[i] == '_' && i + 1 < name.size() && name[i + 1] == '_') {
        dotted += '.';
        ++i;
      } else {
        dotted += static_cast<char>(std::tolower(static_cast<unsigned char>(name[i])));
      }
    }
    std::string match;
    for (const auto& [key, value] : cfg.values()) {
      std::string lower = key;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (lower == dotted) match = key;
    }
    if (match.empty()) throw Error(ErrorCode::UnknownKey, "environment override " + entry.substr(0, eq) + " names no key");
    cfg.set_from_text(match, entry.substr(eq + 1));
  }
  cfg.validate();
}

vmf::ModelParams model_params(const Config& cfg) {
  vmf::ModelParams p;
  p.a = cfg.real("params.a");
  p.b = cfg.real("params.b");
  p.nu = cfg.real("params.nu");
  p.d_noise = cfg.real("params.D");
  p.lambda = cfg.real("params.lambda");
  p.reynolds = cfg.real("params.Re");
  p.sensing_radius = cfg.real("params.R");
  const auto& k = cfg.text("params.kernel");
  const double scale = cfg.real("params.kernel_scale");
  if (k == "tophat") {
    p.kernel = vmf::SensingKernel::tophat(scale);
  } else if (k == "exponential") {
    p.kernel = vmf::SensingKernel::exponential(scale);
  } else {
    p.kernel = vmf::SensingKernel::gaussian(scale);
  }
  return p;
}

TorusGrid torus_grid(const Config& cfg) {
  return TorusGrid(static_cast<int>(cfg.integer("grid.dim")), static_cast<int>(cfg.integer("grid.n")),
                   cfg.real("grid.length"));
}

macro::SolverConfig solver_config(const Config& cfg) {
  macro::SolverConfig s;
  s.dt = cfg.real("time.dt");
  s.t_end = cfg.real("time.t_end");
  s.cfl_safety = cfg.real("time.cfl_safety");
  s.imex = cfg.boolean("time.imex");
  s.output_every = static_cast<int>(cfg.integer("time.output_every"));
  return s;
}

kinetic::KineticConfig kinetic_config(const Config& cfg) {
  kinetic::KineticConfig k;
  k.dt = cfg.real("time.dt");
  k.t_end = cfg.real("time.t_end");
  k.cfl_safety = cfg.real("time.cfl_safety");
  k.output_every = static_cast<int>(cfg.integer("time.output_every"));
  k.current_floor = cfg.real("kinetic.current_floor");
  return k;
}

limit::LimitConfig limit_config(const Config& cfg) {
  limit::LimitConfig l;
  l.epsilons = cfg.list("limit.epsilons");
  l.t_end = cfg.real("limit.t_end");
  l.sample_interval = cfg.real("limit.sample_interval");
  l.dim = static_cast<int>(cfg.integer("grid.dim"));
  l.grid_n = static_cast<int>(cfg.integer("limit.grid_n"));
  l.box_length = cfg.real("grid.length");
  l.sphere_degree = static_cast<int>(cfg.integer("sphere.L"));
  l.reference_n = static_cast<int>(cfg.integer("limit.reference_n"));
  l.reference_dt = cfg.real("limit.reference_dt");
  l.kinetic_dt = cfg.real("limit.kinetic_dt");
  l.cfl_safety = cfg.real("time.cfl_safety");
  l.current_floor = cfg.real("kinetic.current_floor");
  l.sobolev_index = static_cast<int>(cfg.integer("diagnostics.s"));
  l.eta0 = cfg.real("diagnostics.eta0");
  return l;
}

}  // namespace soh::config
