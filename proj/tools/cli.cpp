#include "cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>

#include "igp/config.hpp"
#include "igp/equilibria.hpp"
#include "igp/fem.hpp"
#include "igp/io.hpp"
#include "igp/mms.hpp"
#include "igp/stepper.hpp"

namespace igp::cli {

namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string kind;
  std::string message;
  int code = 1;
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Failure{"usage", fmt::format("{}: '{}' is not a finite number", what, text), 2};
  }
  return v;
}

void write_or_print(const std::string& csv_path, const std::string& csv) {
  if (!csv_path.empty()) write_atomic(csv_path, csv);
}

std::string row_csv(double k, const EquilibriumPoint& pt) {
  return fmt::format("{},{},{},{},{},{},{},{}\n", format_real(k), pt.label, format_real(pt.x[0]), format_real(pt.x[1]),
                     format_real(pt.x[2]), pt.exists ? 1 : 0, format_real(pt.max_re), to_string(pt.stability));
}

constexpr const char* kRowHeader = "K,label,u*,v*,w*,exists,max_re_lambda,classification\n";

void print_row(std::ostream& out, double k, const EquilibriumPoint& pt) {
  fmt::print(out, "{:>14.8g} {:<4} {:>14.8g} {:>14.8g} {:>14.8g} {:>6} {:>14.6e} {}\n", k, pt.label, pt.x[0], pt.x[1],
             pt.x[2], pt.exists ? "yes" : "no", pt.max_re, pt.exists ? to_string(pt.stability) : "-");
}

void print_row_header(std::ostream& out) {
  fmt::print(out, "{:>14} {:<4} {:>14} {:>14} {:>14} {:>6} {:>14} {}\n", "K", "pt", "u*", "v*", "w*", "exists",
             "max_re", "class");
}

int cmd_simulate(const std::string& config_path, std::ostream& out) {
  const LoadedConfig cfg = load_config(config_path);
  const fs::path dir = resolve_output_dir(cfg.config.output_dir);
  const SimulationOutput res = simulate(cfg, dir);
  const RunResult& r = res.result;
  fmt::print(out, "output: {}\n", dir.string());
  fmt::print(out, "steps: {}\n", r.steps);
  fmt::print(out, "snapshot files: {}\n", res.snapshot_files.size());
  fmt::print(out, "max total biomass: {}\n", format_real(r.max_biomass));
  if (!r.diagnostics.empty()) fmt::print(out, "biomass bound: {}\n", format_real(r.diagnostics.front().bound));
  fmt::print(out, "min nodal value: {}\n", format_real(r.min_value));
  fmt::print(out, "max taxis imbalance: {}\n", format_real(r.max_taxis_imbalance));
  fmt::print(out, "bound ok: {}\n", r.bound_ok ? "yes" : "no");
  fmt::print(out, "nonnegative ok: {}\n", r.nonneg_ok ? "yes" : "no");
  return 0;
}

int cmd_equilibria(const std::string& config_path, const std::string& k_text, const std::string& csv_path,
                   std::ostream& out) {
  const LoadedConfig cfg = load_config(config_path);
  const auto grid = parse_k_grid(k_text);
  std::string csv = kRowHeader;
  print_row_header(out);
  for (double k : grid) {
    for (const auto& pt : compute_equilibria(cfg.config.params, k)) {
      print_row(out, k, pt);
      csv += row_csv(k, pt);
    }
  }
  write_or_print(csv_path, csv);
  return 0;
}

int cmd_table1(const std::string& config_path, double kmin, double kmax, std::size_t points, bool rows,
               const std::string& csv_path, std::ostream& out) {
  const LoadedConfig cfg = load_config(config_path);
  if (!(kmin > 0.0) || !(kmax > kmin)) throw Failure{"usage", "table1 needs 0 < --kmin < --kmax", 2};
  if (points < 2) throw Failure{"usage", "table1 needs --points >= 2", 2};
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = kmin + (kmax - kmin) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  const ScanReport rep = scan_table1(cfg.config.params, grid);
  fmt::print(out, "thresholds in [{}, {}] ({} grid points):\n", kmin, kmax, points);
  for (const auto& t : rep.thresholds) fmt::print(out, "  {:<4} {:<16} K = {:.10f}\n", t.label, to_string(t.kind), t.k);
  std::string csv = kRowHeader;
  if (rows) print_row_header(out);
  for (const auto& row : rep.rows) {
    if (rows) print_row(out, row.k, row.point);
    csv += row_csv(row.k, row.point);
  }
  write_or_print(csv_path, csv);
  return 0;
}

int cmd_mms(std::size_t levels, std::size_t base, double mu, std::ostream& out) {
  if (levels < 1) throw Failure{"usage", "mms needs --levels >= 1", 2};
  const auto res = run_mms(levels, base, mu);
  fmt::print(out, "{:>6} {:>12} {:>14} {:>8}\n", "cells", "h", "l2_error", "order");
  for (const auto& l : res) {
    fmt::print(out, "{:>6} {:>12.6g} {:>14.6e} {:>8}\n", l.cells, l.h, l.l2_error,
               l.order == 0.0 ? std::string("-") : fmt::format("{:.4f}", l.order));
  }
  return 0;
}

int cmd_ode(const std::string& config_path, double k, double t_final, double dt, std::size_t stride,
            const std::string& csv_path, std::ostream& out) {
  const LoadedConfig cfg = load_config(config_path);
  const SimConfig& c = cfg.config;
  if (!(k > 0.0)) throw Failure{"usage", "ode needs --K > 0", 2};
  const TriMesh mesh = build_mesh(c);
  const FieldState init = initial_state(c, mesh);
  const State3 x0{spatial_mean(mesh, init.u), spatial_mean(mesh, init.v), spatial_mean(mesh, init.w)};
  const double t = t_final >= 0.0 ? t_final : c.t_final;
  const double h = dt > 0.0 ? dt : c.dt;
  const auto samples = integrate_ode(c.params, k, x0, h, t, stride);
  std::string csv = "t,u,v,w\n";
  fmt::print(out, "{:>12} {:>16} {:>16} {:>16}\n", "t", "u", "v", "w");
  for (const auto& s : samples) {
    fmt::print(out, "{:>12.6g} {:>16.10g} {:>16.10g} {:>16.10g}\n", s.t, s.x[0], s.x[1], s.x[2]);
    csv += fmt::format("{},{},{},{}\n", format_real(s.t), format_real(s.x[0]), format_real(s.x[1]), format_real(s.x[2]));
  }
  write_or_print(csv_path, csv);
  return 0;
}

std::string option_names(const CLI::App& app) {
  std::vector<std::string> names;
  for (const CLI::Option* opt : app.get_options()) {
    std::string n = opt->get_name(false, true);
    if (!n.empty()) names.push_back(n);
  }
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

std::vector<double> parse_k_grid(const std::string& text) {
  const auto first = text.find(':');
  if (first == std::string::npos) {
    const double k = parse_double(text, "--K");
    if (!(k > 0.0)) throw Failure{"usage", "--K must be > 0", 2};
    return {k};
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) throw Failure{"usage", "--K grid must be <lo>:<hi>:<n>", 2};
  const double lo = parse_double(text.substr(0, first), "--K lo");
  const double hi = parse_double(text.substr(first + 1, second - first - 1), "--K hi");
  const std::string n_text = text.substr(second + 1);
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), n);
  if (ec != std::errc() || ptr != n_text.data() + n_text.size() || n < 2) {
    throw Failure{"usage", "--K grid point count must be an integer >= 2", 2};
  }
  if (!(lo > 0.0) || !(hi > lo)) throw Failure{"usage", "--K grid needs 0 < lo < hi", 2};
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

std::string resolve_output_dir(const std::string& configured) {
  const char* env = std::getenv("IGP_OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : configured;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-element simulator for intraguild predation with chemotactic dispersal", "igpsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  std::string config_path, k_text, csv_path;
  double kmin = 0.0, kmax = 0.0, k_value = 0.0, t_final = -1.0, dt = 0.0, mu = 1.0;
  std::size_t points = 400, levels = 3, base = 16, stride = 1000;
  bool rows = false;

  auto* sim = app.add_subcommand("simulate", "Run a full simulation from a config file");
  sim->add_option("config", config_path, "Config file")->required();

  auto* eq = app.add_subcommand("equilibria", "Closed-form equilibria and their classification");
  eq->add_option("config", config_path, "Config file")->required();
  eq->add_option("--K", k_text, "Carrying capacity: <value> or <lo>:<hi>:<n>")->required();
  eq->add_option("--csv", csv_path, "Also write the rows as CSV to this file");

  auto* t1 = app.add_subcommand("table1", "Scan K for existence and stability switches");
  t1->add_option("config", config_path, "Config file")->required();
  t1->add_option("--kmin", kmin, "Lower end of the K range")->required();
  t1->add_option("--kmax", kmax, "Upper end of the K range")->required();
  t1->add_option("--points", points, "Grid points (default 400)");
  t1->add_flag("--rows", rows, "Print every grid row, not only thresholds");
  t1->add_option("--csv", csv_path, "Write all rows as CSV to this file");

  auto* mms = app.add_subcommand("mms", "Manufactured-solution convergence study");
  mms->add_option("--levels", levels, "Number of meshes (default 3)");
  mms->add_option("--base", base, "Cells per axis on the coarsest mesh (default 16)");
  mms->add_option("--mu", mu, "Reaction coefficient (default 1)");

  auto* ode = app.add_subcommand("ode", "Integrate the kinetics from the spatial means of the initial data");
  ode->add_option("config", config_path, "Config file")->required();
  ode->add_option("--K", k_value, "Constant carrying capacity")->required();
  ode->add_option("--T", t_final, "Final time (default: config T)");
  ode->add_option("--dt", dt, "Step (default: config dt)");
  ode->add_option("--stride", stride, "Print every stride steps (default 1000)");
  ode->add_option("--csv", csv_path, "Also write the samples as CSV to this file");

  auto fail = [&](const Failure& f) {
    err << "error: " << f.kind << ": " << one_line(f.message) << '\n';
    return f.code;
  };

  if (argc > 1 && argv[1][0] != '-') {
    const std::string first = argv[1];
    const auto subs = app.get_subcommands([&](CLI::App* a) { return a->get_name() == first; });
    if (subs.empty()) {
      return fail({"usage", fmt::format("unknown subcommand '{}' (valid subcommands: simulate, equilibria, table1, mms, ode)",
                                        first), 2});
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    const auto parsed = app.get_subcommands();
    std::string valid;
    if (parsed.empty()) {
      valid = "valid subcommands: simulate, equilibria, table1, mms, ode";
    } else {
      valid = fmt::format("valid options for {}: {}", parsed.front()->get_name(), option_names(*parsed.front()));
    }
    return fail({"usage", fmt::format("{} ({})", e.what(), valid), 2});
  }

  try {
    if (*sim) return cmd_simulate(config_path, out);
    if (*eq) return cmd_equilibria(config_path, k_text, csv_path, out);
    if (*t1) return cmd_table1(config_path, kmin, kmax, points, rows, csv_path, out);
    if (*mms) return cmd_mms(levels, base, mu, out);
    if (*ode) return cmd_ode(config_path, k_value, t_final, dt, stride, csv_path, out);
    return fail({"usage", "no subcommand", 2});
  } catch (const Failure& f) {
    return fail(f);
  } catch (const ConfigError& e) {
    return fail({"config-" + to_string(e.kind()), e.what()});
  } catch (const IoError& e) {
    return fail({"io", e.what()});
  } catch (const StepError& e) {
    return fail({"step", fmt::format("{} (t = {})", e.what(), e.time())});
  } catch (const std::invalid_argument& e) {
    return fail({"invalid-argument", e.what()});
  } catch (const std::exception& e) {
    return fail({"runtime", e.what()});
  }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);
  return cli_main(static_cast<int>(args.size()), argv.data(), out, err);
}

}  // namespace igp::cli
