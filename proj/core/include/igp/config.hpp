#pragma once

// Simulation configuration in INI form:
//
//   [model]  id                          (required, 1 or 2)
//   [params] alpha a b c d gamma beta mu nu d0 d1 d2 e1 e2 q
//   [mesh]   nx ny xmin xmax ymin ymax
//   [time]   T (required) dt snapshots scheme diag_stride
//   [fields] K u0 v0 w0                  (required, quoted expressions)
//   [output] dir format
//   [solver] tol max_iter lumped_mass
//
// Lines starting with ';' or '#' are comments. Unknown keys are errors.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "igp/dynamics.hpp"
#include "igp/mesh.hpp"
#include "igp/sparse.hpp"
#include "igp/stepper.hpp"

namespace igp {

enum class OutputFormat { Vtk, Csv, Both };
std::string to_string(OutputFormat f);

struct SimConfig {
  Params params;
  std::size_t nx = 32;
  std::size_t ny = 32;
  Rect rect;
  double dt = 1e-3;
  double t_final = 0.0;
  std::vector<double> snapshot_times;  // defaults to {0, T}
  Scheme scheme = Scheme::ImexRk2;
  std::size_t diag_stride = 100;
  std::string k_expr;
  std::string u0_expr;
  std::string v0_expr;
  std::string w0_expr;
  std::string output_dir = "output";
  OutputFormat format = OutputFormat::Vtk;
  SolverOptions solver;
  bool lumped_mass = true;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct LoadedConfig {
  SimConfig config;
  std::vector<std::string> defaulted;  // "section.key" for every key filled from defaults
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Io, Syntax, MissingKey, UnknownKey, BadValue, OutOfRange, Expression };
  ConfigError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};
std::string to_string(ConfigError::Kind k);

/// Keys that must be present, as "section.key".
const std::vector<std::string>& required_config_keys();

LoadedConfig parse_config(std::string_view text);
LoadedConfig load_config(const std::filesystem::path& path);

/// Canonical text; parse_config(serialize_config(c)).config == c.
std::string serialize_config(const SimConfig& c);

TriMesh build_mesh(const SimConfig& c);

/// Nodal values of an expression; domain errors become ConfigError naming key.
std::vector<double> nodal_field(const std::string& key, const std::string& expr, const TriMesh& mesh);

/// Throws ConfigError unless K > 0 at every node.
std::vector<double> carrying_capacity(const SimConfig& c, const TriMesh& mesh);
FieldState initial_state(const SimConfig& c, const TriMesh& mesh);

}  // namespace igp
