#include "igp/io.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "igp/equilibria.hpp"
#include "igp/fem.hpp"

#ifndef IGP_VERSION
#define IGP_VERSION "unknown"
#endif

namespace igp {

namespace fs = std::filesystem;

std::string version() { return IGP_VERSION; }

void write_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory (" + ec.message() + ")", path.parent_path());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed", tmp);
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename temporary file into place", path);
  }
}

std::string format_real(double x) { return fmt::format("{}", x); }

namespace {

void check_aligned(const TriMesh& mesh, const FieldState& s) {
  const std::size_t n = mesh.num_nodes();
  if (s.u.size() != n || s.v.size() != n || s.w.size() != n) {
    throw DimensionError(fmt::format("snapshot: state has {} values for {} nodes", s.u.size(), n));
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string vtk_text(const TriMesh& mesh, const FieldState& s) {
  check_aligned(mesh, s);
  const std::size_t n = mesh.num_nodes();
  const std::size_t m = mesh.num_elements();
  std::string out;
  out.reserve(n * 100 + m * 24);
  out += "# vtk DataFile Version 2.0\n";
  out += fmt::format("igp snapshot t={}\n", format_real(s.t));
  out += "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += fmt::format("POINTS {} double\n", n);
  for (const Point& p : mesh.nodes) out += fmt::format("{} {} 0\n", format_real(p.x), format_real(p.y));
  out += fmt::format("CELLS {} {}\n", m, 4 * m);
  for (const Triangle& t : mesh.elements) out += fmt::format("3 {} {} {}\n", t[0], t[1], t[2]);
  out += fmt::format("CELL_TYPES {}\n", m);
  for (std::size_t e = 0; e < m; ++e) out += "5\n";
  out += fmt::format("POINT_DATA {}\n", n);
  const std::pair<const char*, const std::vector<double>*> fields[] = {{"u", &s.u}, {"v", &s.v}, {"w", &s.w}};
  for (const auto& [name, values] : fields) {
    out += fmt::format("SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
    for (double x : *values) {
      out += format_real(x);
      out += '\n';
    }
  }
  return out;
}

std::string csv_text(const TriMesh& mesh, const FieldState& s) {
  check_aligned(mesh, s);
  std::string out = "x,y,u,v,w\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    out += fmt::format("{},{},{},{},{}\n", format_real(mesh.nodes[i].x), format_real(mesh.nodes[i].y),
                       format_real(s.u[i]), format_real(s.v[i]), format_real(s.w[i]));
  }
  return out;
}

namespace {

double parse_number(std::string_view token, std::size_t line) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::runtime_error(fmt::format("line {}: '{}' is not a number", line, token));
  }
  return x;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

CsvSnapshot parse_csv(std::string_view text) {
  CsvSnapshot out;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = strip_cr(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (header) {
      if (line != "x,y,u,v,w") throw std::runtime_error("csv: expected header 'x,y,u,v,w'");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    double row[5];
    for (int c = 0; c < 5; ++c) {
      const auto comma = line.find(',');
      if ((c < 4) == (comma == std::string_view::npos)) {
        throw std::runtime_error(fmt::format("csv: line {} does not have 5 columns", line_no));
      }
      row[c] = parse_number(line.substr(0, comma), line_no);
      line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    }
    out.points.push_back({row[0], row[1]});
    out.state.u.push_back(row[2]);
    out.state.v.push_back(row[3]);
    out.state.w.push_back(row[4]);
  }
  if (header) throw std::runtime_error("csv: empty input");
  return out;
}

CsvSnapshot read_csv(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_csv(text);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what(), path);
  }
}

namespace {

class Tokens {
 public:
  explicit Tokens(std::string_view text) : text_(text) {}

  std::string_view next(const char* expecting) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= text_.size()) throw std::runtime_error(fmt::format("vtk: unexpected end of file, expected {}", expecting));
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view word) {
    const auto t = next(std::string(word).c_str());
    if (t != word) throw std::runtime_error(fmt::format("vtk: line {}: expected '{}', found '{}'", line_ + 1, word, t));
  }

  std::size_t count(const char* what) {
    const auto t = next(what);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw std::runtime_error(fmt::format("vtk: line {}: expected {} as an integer, found '{}'", line_ + 1, what, t));
    }
    return v;
  }

  double real(const char* what) {
    const auto t = next(what);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
      throw std::runtime_error(fmt::format("vtk: line {}: expected finite {}, found '{}'", line_ + 1, what, t));
    }
    return v;
  }

  bool done() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return pos_ >= text_.size();
  }

  void skip_line() {
    const auto nl = text_.find('\n', pos_);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    ++line_;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

VtkSummary validate_vtk(std::string_view text) {
  constexpr std::string_view kHeader = "# vtk DataFile Version 2.0\n";
  if (text.substr(0, kHeader.size()) != kHeader) throw std::runtime_error("vtk: missing '# vtk DataFile Version 2.0' header");
  Tokens tok(text);
  tok.skip_line();  // header
  tok.skip_line();  // title
  tok.expect("ASCII");
  tok.expect("DATASET");
  tok.expect("UNSTRUCTURED_GRID");

  VtkSummary out;
  tok.expect("POINTS");
  out.points = tok.count("point count");
  tok.expect("double");
  for (std::size_t i = 0; i < 3 * out.points; ++i) (void)tok.real("coordinate");

  tok.expect("CELLS");
  out.cells = tok.count("cell count");
  const std::size_t size = tok.count("cell list size");
  if (size != 4 * out.cells) throw std::runtime_error(fmt::format("vtk: CELLS size {} != 4 x {}", size, out.cells));
  for (std::size_t c = 0; c < out.cells; ++c) {
    if (tok.count("vertex count") != 3) throw std::runtime_error(fmt::format("vtk: cell {} is not a triangle", c));
    for (int k = 0; k < 3; ++k) {
      if (tok.count("vertex index") >= out.points) {
        throw std::runtime_error(fmt::format("vtk: cell {} references a point out of range", c));
      }
    }
  }

  tok.expect("CELL_TYPES");
  if (tok.count("cell type count") != out.cells) throw std::runtime_error("vtk: CELL_TYPES count differs from CELLS");
  for (std::size_t c = 0; c < out.cells; ++c) {
    if (tok.count("cell type") != 5) throw std::runtime_error(fmt::format("vtk: cell {} has type other than 5", c));
  }

  tok.expect("POINT_DATA");
  if (tok.count("point data count") != out.points) throw std::runtime_error("vtk: POINT_DATA count differs from POINTS");
  while (!tok.done()) {
    tok.expect("SCALARS");
    out.scalars.emplace_back(tok.next("scalar name"));
    tok.expect("double");
    tok.expect("1");
    tok.expect("LOOKUP_TABLE");
    tok.expect("default");
    auto& values = out.values.emplace_back();
    values.reserve(out.points);
    for (std::size_t i = 0; i < out.points; ++i) values.push_back(tok.real("scalar value"));
  }
  if (out.scalars != std::vector<std::string>{"u", "v", "w"}) {
    throw std::runtime_error("vtk: expected scalar fields u, v, w in that order");
  }
  return out;
}

VtkSummary validate_vtk_file(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return validate_vtk(text);
  } catch (const IoError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IoError(e.what(), path);
  }
}

std::vector<fs::path> write_snapshot(const FieldState& s, const TriMesh& mesh, const fs::path& stem,
                                     OutputFormat format) {
  std::vector<fs::path> written;
  if (format == OutputFormat::Vtk || format == OutputFormat::Both) {
    fs::path p = stem;
    p += ".vtk";
    write_atomic(p, vtk_text(mesh, s));
    written.push_back(p);
  }
  if (format == OutputFormat::Csv || format == OutputFormat::Both) {
    fs::path p = stem;
    p += ".csv";
    write_atomic(p, csv_text(mesh, s));
    written.push_back(p);
  }
  return written;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out =
      "t,step,total_biomass,min_u,min_v,min_w,linf_u,linf_v,linf_w,mean_w,k0,bound,bound_ok,nonneg_ok,"
      "taxis_imbalance,w_budget_ratio,max_iterations\n";
  for (const auto& d : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", format_real(d.t), d.step,
                       format_real(d.total_biomass), format_real(d.min_u), format_real(d.min_v), format_real(d.min_w),
                       format_real(d.linf_u), format_real(d.linf_v), format_real(d.linf_w), format_real(d.mean_w),
                       format_real(d.bound_k0), format_real(d.bound), d.bound_ok ? 1 : 0, d.nonneg_ok ? 1 : 0,
                       format_real(d.taxis_imbalance), format_real(d.w_budget_ratio), d.max_iterations);
  }
  return out;
}

std::string manifest_text(const SimConfig& c, const std::vector<std::string>& defaulted) {
  std::string out;
  out += fmt::format("; igp {}\n", version());
  out += fmt::format("; negativity_threshold = {}\n", format_real(kNegativityThreshold));
  out += fmt::format("; bound_tolerance = {} x max(1, bound)\n", format_real(kBoundTolerance));
  out += fmt::format("; marginal_band = {}\n", format_real(kMarginalBand));
  out += fmt::format("; solver_tol = {}\n", format_real(c.solver.tol));
  std::string joined;
  for (const auto& k : defaulted) joined += (joined.empty() ? "" : ", ") + k;
  out += fmt::format("; defaulted = {}\n", joined.empty() ? "(none)" : joined);
  out += serialize_config(c);
  return out;
}

SimulationOutput simulate(const LoadedConfig& cfg, const fs::path& out_dir) {
  const SimConfig& c = cfg.config;
  const TriMesh mesh = build_mesh(c);
  const AssembledOperators ops = assemble_operators(mesh);
  ImexStepper stepper(mesh, ops, c.params, carrying_capacity(c, mesh), {c.lumped_mass, c.solver});
  FieldState init = initial_state(c, mesh);

  SimulationOutput out;
  out.manifest = out_dir / "manifest.ini";
  write_atomic(out.manifest, manifest_text(c, cfg.defaulted));

  RunOptions ro;
  ro.scheme = c.scheme;
  ro.dt = c.dt;
  ro.t_final = c.t_final;
  ro.snapshot_times = c.snapshot_times;
  ro.diag_stride = c.diag_stride;

  std::string index = "index,t\n";
  auto sink = [&](const FieldState& s, std::size_t i) {
    const auto files = write_snapshot(s, mesh, out_dir / fmt::format("snapshot_{:04}", i), c.format);
    out.snapshot_files.insert(out.snapshot_files.end(), files.begin(), files.end());
    index += fmt::format("{},{}\n", i, format_real(s.t));
  };
  out.result = run(stepper, std::move(init), ro, sink, false);
  write_atomic(out_dir / "snapshots.csv", index);
  out.diagnostics = out_dir / "diagnostics.csv";
  write_atomic(out.diagnostics, diagnostics_csv(out.result.diagnostics));
  return out;
}

}  // namespace igp
