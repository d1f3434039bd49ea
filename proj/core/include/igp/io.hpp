#pragma once

// Snapshot, diagnostics and manifest files. Every write goes to a temporary
// sibling first and is renamed into place.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "igp/config.hpp"
#include "igp/dynamics.hpp"
#include "igp/mesh.hpp"
#include "igp/stepper.hpp"

namespace igp {

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::filesystem::path path)
      : std::runtime_error(what + ": " + path.string()), path_(std::move(path)) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Creates parent directories, writes path.tmp, renames onto path.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest text that parses back to exactly the same double.
std::string format_real(double x);

/// Legacy ASCII VTK 2.0 unstructured grid with point scalars u, v, w.
std::string vtk_text(const TriMesh& mesh, const FieldState& s);
/// CSV with header "x,y,u,v,w", one row per node in mesh order.
std::string csv_text(const TriMesh& mesh, const FieldState& s);

struct CsvSnapshot {
  std::vector<Point> points;
  FieldState state;
};
CsvSnapshot parse_csv(std::string_view text);
CsvSnapshot read_csv(const std::filesystem::path& path);

struct VtkSummary {
  std::size_t points = 0;
  std::size_t cells = 0;
  std::vector<std::string> scalars;  // in file order
  std::vector<std::vector<double>> values;
};
/// Structural check: header, dataset kind, counts, triangle connectivity in
/// range, all cell types 5, one finite value per point per scalar field.
/// Throws std::runtime_error describing the first defect.
VtkSummary validate_vtk(std::string_view text);
VtkSummary validate_vtk_file(const std::filesystem::path& path);

/// Writes <stem>.vtk and/or <stem>.csv; returns the files written.
std::vector<std::filesystem::path> write_snapshot(const FieldState& s, const TriMesh& mesh,
                                                  const std::filesystem::path& stem, OutputFormat format);

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records);

/// Resolved config in loadable form, prefixed by comment lines carrying the
/// code version and the thresholds in force.
std::string manifest_text(const SimConfig& c, const std::vector<std::string>& defaulted);

std::string version();

struct SimulationOutput {
  RunResult result;
  std::vector<std::filesystem::path> snapshot_files;
  std::filesystem::path diagnostics;
  std::filesystem::path manifest;
};

/// Full run of a loaded config into out_dir: snapshot_NNNN.{vtk,csv},
/// snapshots.csv (index, time), diagnostics.csv and manifest.ini.
/// The manifest is written before stepping starts.
SimulationOutput simulate(const LoadedConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace igp
