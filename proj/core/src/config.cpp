#include "igp/config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "igp/expr.hpp"
#include "igp/fem.hpp"

namespace igp {

namespace pt = boost::property_tree;

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Vtk: return "vtk";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Both: return "both";
  }
  return "?";
}

std::string to_string(ConfigError::Kind k) {
  switch (k) {
    case ConfigError::Kind::Io: return "io";
    case ConfigError::Kind::Syntax: return "syntax";
    case ConfigError::Kind::MissingKey: return "missing-key";
    case ConfigError::Kind::UnknownKey: return "unknown-key";
    case ConfigError::Kind::BadValue: return "bad-value";
    case ConfigError::Kind::OutOfRange: return "out-of-range";
    case ConfigError::Kind::Expression: return "expression";
  }
  return "?";
}

namespace {

using Kind = ConfigError::Kind;

// Every accepted key. Order fixes the serialized layout.
const std::vector<std::pair<std::string, std::vector<std::string>>>& schema() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> s{
      {"model", {"id"}},
      {"params", {"alpha", "a", "b", "c", "d", "gamma", "beta", "mu", "nu", "d0", "d1", "d2", "e1", "e2", "q"}},
      {"mesh", {"nx", "ny", "xmin", "xmax", "ymin", "ymax"}},
      {"time", {"T", "dt", "snapshots", "scheme", "diag_stride"}},
      {"fields", {"K", "u0", "v0", "w0"}},
      {"output", {"dir", "format"}},
      {"solver", {"tol", "max_iter", "lumped_mass"}},
  };
  return s;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) {
      defaulted_.push_back(key);
      return std::nullopt;
    }
    return *v;
  }

  double real(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? parse_real(key, *v) : fallback;
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    const std::string s = unquote(*v);
    unsigned long long out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(Kind::BadValue, fmt::format("{}: expected a non-negative integer, got '{}'", key, s));
    }
    return static_cast<std::size_t>(out);
  }

  bool flag(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    const std::string s = unquote(*v);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError(Kind::BadValue, fmt::format("{}: expected true or false, got '{}'", key, s));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    auto v = raw(key);
    return v ? unquote(*v) : fallback;
  }

  static double parse_real(const std::string& key, std::string_view value) {
    const std::string s = unquote(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out)) {
      throw ConfigError(Kind::BadValue, fmt::format("{}: expected a finite number, got '{}'", key, s));
    }
    return out;
  }

  std::vector<std::string> take_defaulted() { return std::move(defaulted_); }

 private:
  const pt::ptree& tree_;
  std::vector<std::string> defaulted_;
};

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string_view rest = text;
  if (trim(rest).empty()) return out;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(Reader::parse_real(key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void check_expression(const std::string& key, const std::string& text) {
  try {
    (void)Expr::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(Kind::Expression, fmt::format("{}: {}", key, e.what()));
  }
}

void check_keys(const pt::ptree& tree) {
  std::map<std::string, std::set<std::string>> known;
  for (const auto& [section, keys] : schema()) known[section].insert(keys.begin(), keys.end());
  for (const auto& [section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end() || !body.data().empty()) {
      std::vector<std::string> sections;
      for (const auto& kv : schema()) sections.push_back(kv.first);
      throw ConfigError(Kind::UnknownKey, fmt::format("unknown section or top-level key '{}' (valid sections: {})",
                                                      section, fmt::join(sections, ", ")));
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        throw ConfigError(Kind::UnknownKey, fmt::format("unknown key '{}.{}' (valid keys in [{}]: {})", section, key,
                                                        section, fmt::join(it->second, ", ")));
      }
    }
  }
}

void check_required(const pt::ptree& tree) {
  std::vector<std::string> missing;
  for (const auto& key : required_config_keys()) {
    if (!tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) missing.push_back(key);
  }
  if (!missing.empty()) {
    throw ConfigError(Kind::MissingKey, fmt::format("missing required key(s): {}", fmt::join(missing, ", ")));
  }
}

void range(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(Kind::OutOfRange, message);
}

}  // namespace

const std::vector<std::string>& required_config_keys() {
  static const std::vector<std::string> keys{"model.id", "time.T", "fields.K", "fields.u0", "fields.v0", "fields.w0"};
  return keys;
}

LoadedConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(Kind::Syntax, fmt::format("line {}: {}", e.line(), e.message()));
  }
  check_keys(tree);
  check_required(tree);

  Reader r(tree);
  SimConfig c;
  const std::size_t id = r.count("model.id", 1);
  range(id == 1 || id == 2, fmt::format("model.id must be 1 or 2, got {}", id));
  c.params.model = id == 1 ? Model::ActiveSearch : Model::ResourceAttraction;

  auto& p = c.params;
  const Params d;
  p.alpha = r.real("params.alpha", d.alpha);
  p.a = r.real("params.a", d.a);
  p.b = r.real("params.b", d.b);
  p.c = r.real("params.c", d.c);
  p.d = r.real("params.d", d.d);
  p.gamma = r.real("params.gamma", d.gamma);
  p.beta = r.real("params.beta", d.beta);
  p.mu = r.real("params.mu", d.mu);
  p.nu = r.real("params.nu", d.nu);
  p.d0 = r.real("params.d0", d.d0);
  p.d1 = r.real("params.d1", d.d1);
  p.d2 = r.real("params.d2", d.d2);
  p.e1 = r.real("params.e1", d.e1);
  p.e2 = r.real("params.e2", d.e2);
  p.q = r.real("params.q", d.q);
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(Kind::OutOfRange, fmt::format("params: {}", e.what()));
  }

  c.nx = r.count("mesh.nx", c.nx);
  c.ny = r.count("mesh.ny", c.ny);
  range(c.nx >= 1 && c.ny >= 1, "mesh.nx and mesh.ny must be >= 1");
  c.rect.xmin = r.real("mesh.xmin", c.rect.xmin);
  c.rect.xmax = r.real("mesh.xmax", c.rect.xmax);
  c.rect.ymin = r.real("mesh.ymin", c.rect.ymin);
  c.rect.ymax = r.real("mesh.ymax", c.rect.ymax);
  range(c.rect.xmin < c.rect.xmax, "mesh.xmin must be < mesh.xmax");
  range(c.rect.ymin < c.rect.ymax, "mesh.ymin must be < mesh.ymax");

  c.t_final = r.real("time.T", 0.0);
  range(c.t_final >= 0.0, "time.T must be >= 0");
  c.dt = r.real("time.dt", c.dt);
  range(c.dt > 0.0, "time.dt must be > 0");
  try {
    (void)step_count(c.t_final, c.dt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(Kind::OutOfRange, fmt::format("time: {}", e.what()));
  }
  if (auto snaps = r.raw("time.snapshots")) {
    c.snapshot_times = parse_list("time.snapshots", unquote(*snaps));
  } else {
    c.snapshot_times = {0.0};
    if (c.t_final > 0.0) c.snapshot_times.push_back(c.t_final);
  }
  for (double t : c.snapshot_times) {
    range(t >= 0.0 && t <= c.t_final, fmt::format("time.snapshots: {} outside [0, T = {}]", t, c.t_final));
  }
  range(std::is_sorted(c.snapshot_times.begin(), c.snapshot_times.end()), "time.snapshots must be ascending");
  const std::string scheme = r.text("time.scheme", "rk2");
  if (scheme == "rk2") {
    c.scheme = Scheme::ImexRk2;
  } else if (scheme == "euler") {
    c.scheme = Scheme::ImplicitEuler;
  } else {
    throw ConfigError(Kind::BadValue, fmt::format("time.scheme must be rk2 or euler, got '{}'", scheme));
  }
  c.diag_stride = r.count("time.diag_stride", c.diag_stride);
  range(c.diag_stride >= 1, "time.diag_stride must be >= 1");

  c.k_expr = r.text("fields.K", "");
  c.u0_expr = r.text("fields.u0", "");
  c.v0_expr = r.text("fields.v0", "");
  c.w0_expr = r.text("fields.w0", "");
  check_expression("fields.K", c.k_expr);
  check_expression("fields.u0", c.u0_expr);
  check_expression("fields.v0", c.v0_expr);
  check_expression("fields.w0", c.w0_expr);

  c.output_dir = r.text("output.dir", c.output_dir);
  range(!c.output_dir.empty(), "output.dir must not be empty");
  const std::string format = r.text("output.format", "vtk");
  if (format == "vtk") {
    c.format = OutputFormat::Vtk;
  } else if (format == "csv") {
    c.format = OutputFormat::Csv;
  } else if (format == "both") {
    c.format = OutputFormat::Both;
  } else {
    throw ConfigError(Kind::BadValue, fmt::format("output.format must be vtk, csv or both, got '{}'", format));
  }

  c.solver.tol = r.real("solver.tol", c.solver.tol);
  range(c.solver.tol > 0.0 && c.solver.tol < 1.0, "solver.tol must lie in (0, 1)");
  c.solver.max_iter = r.count("solver.max_iter", c.solver.max_iter);
  c.lumped_mass = r.flag("solver.lumped_mass", c.lumped_mass);

  return {std::move(c), r.take_defaulted()};
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(Kind::Io, fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ConfigError(Kind::Io, fmt::format("cannot read config file '{}'", path.string()));
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.kind(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string serialize_config(const SimConfig& c) {
  const Params& p = c.params;
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
  out += "[model]\n";
  line("id", static_cast<int>(p.model));
  out += "\n[params]\n";
  line("alpha", p.alpha);
  line("a", p.a);
  line("b", p.b);
  line("c", p.c);
  line("d", p.d);
  line("gamma", p.gamma);
  line("beta", p.beta);
  line("mu", p.mu);
  line("nu", p.nu);
  line("d0", p.d0);
  line("d1", p.d1);
  line("d2", p.d2);
  line("e1", p.e1);
  line("e2", p.e2);
  line("q", p.q);
  out += "\n[mesh]\n";
  line("nx", c.nx);
  line("ny", c.ny);
  line("xmin", c.rect.xmin);
  line("xmax", c.rect.xmax);
  line("ymin", c.rect.ymin);
  line("ymax", c.rect.ymax);
  out += "\n[time]\n";
  line("T", c.t_final);
  line("dt", c.dt);
  line("snapshots", fmt::format("\"{}\"", fmt::join(c.snapshot_times, ", ")));
  line("scheme", to_string(c.scheme));
  line("diag_stride", c.diag_stride);
  out += "\n[fields]\n";
  line("K", fmt::format("\"{}\"", c.k_expr));
  line("u0", fmt::format("\"{}\"", c.u0_expr));
  line("v0", fmt::format("\"{}\"", c.v0_expr));
  line("w0", fmt::format("\"{}\"", c.w0_expr));
  out += "\n[output]\n";
  line("dir", fmt::format("\"{}\"", c.output_dir));
  line("format", to_string(c.format));
  out += "\n[solver]\n";
  line("tol", c.solver.tol);
  line("max_iter", c.solver.max_iter);
  line("lumped_mass", c.lumped_mass ? "true" : "false");
  return out;
}

TriMesh build_mesh(const SimConfig& c) { return build_rect_mesh(c.nx, c.ny, c.rect); }

std::vector<double> nodal_field(const std::string& key, const std::string& expr, const TriMesh& mesh) {
  Expr e = [&] {
    try {
      return Expr::parse(expr);
    } catch (const ParseError& err) {
      throw ConfigError(Kind::Expression, fmt::format("{}: {}", key, err.what()));
    }
  }();
  try {
    return interpolate(mesh, [&](double x, double y) { return e.eval(x, y); });
  } catch (const DomainError& err) {
    throw ConfigError(Kind::Expression, fmt::format("{}: {}", key, err.what()));
  }
}

std::vector<double> carrying_capacity(const SimConfig& c, const TriMesh& mesh) {
  std::vector<double> k = nodal_field("fields.K", c.k_expr, mesh);
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(k[i] > 0.0) || !std::isfinite(k[i])) {
      throw ConfigError(Kind::OutOfRange, fmt::format("fields.K must be > 0 at every node; K({}, {}) = {}",
                                                      mesh.nodes[i].x, mesh.nodes[i].y, k[i]));
    }
  }
  return k;
}

FieldState initial_state(const SimConfig& c, const TriMesh& mesh) {
  FieldState s;
  s.u = nodal_field("fields.u0", c.u0_expr, mesh);
  s.v = nodal_field("fields.v0", c.v0_expr, mesh);
  s.w = nodal_field("fields.w0", c.w0_expr, mesh);
  return s;
}

}  // namespace igp
