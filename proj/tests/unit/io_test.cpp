#include "igp/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

namespace igp {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

FieldState sample_state(const TriMesh& m) {
  FieldState s;
  s.t = 0.1;
  s.u = test::random_vector(m.num_nodes(), 1, 0.0, 3.0);
  s.v = test::random_vector(m.num_nodes(), 2, 0.0, 1e-7);
  s.w = test::random_vector(m.num_nodes(), 3, 1.0, 2.0);
  s.w[0] = 1.0 / 3.0;
  s.u[1] = 5e-324;  // smallest subnormal
  return s;
}

TEST(Vtk, SingleCellIsByteStable) {
  const TriMesh m = build_rect_mesh(1, 1);
  const FieldState s{0.0, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0.5}};
  const std::string expected =
      "# vtk DataFile Version 2.0\n"
      "igp snapshot t=0\n"
      "ASCII\n"
      "DATASET UNSTRUCTURED_GRID\n"
      "POINTS 4 double\n"
      "-1 -1 0\n1 -1 0\n-1 1 0\n1 1 0\n"
      "CELLS 2 8\n"
      "3 0 1 3\n3 0 3 2\n"
      "CELL_TYPES 2\n5\n5\n"
      "POINT_DATA 4\n"
      "SCALARS u double 1\nLOOKUP_TABLE default\n0\n0\n0\n0\n"
      "SCALARS v double 1\nLOOKUP_TABLE default\n0\n0\n0\n0\n"
      "SCALARS w double 1\nLOOKUP_TABLE default\n0\n0\n0\n0.5\n";
  EXPECT_EQ(vtk_text(m, s), expected);
  const VtkSummary v = validate_vtk(expected);
  EXPECT_EQ(v.points, 4u);
  EXPECT_EQ(v.cells, 2u);
  EXPECT_EQ(v.scalars, (std::vector<std::string>{"u", "v", "w"}));
  EXPECT_EQ(v.values[2][3], 0.5);
}

TEST(Vtk, ValidatorRejectsDefects) {
  const TriMesh m = build_rect_mesh(2, 2);
  const std::string good = vtk_text(m, sample_state(m));
  ASSERT_NO_THROW(validate_vtk(good));
  auto broken = [&](const std::string& from, const std::string& to) {
    std::string t = good;
    const auto pos = t.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    t.replace(pos, from.size(), to);
    return t;
  };
  EXPECT_THROW(validate_vtk(broken("# vtk DataFile Version 2.0", "# vtk DataFile Version 9")), std::runtime_error);
  EXPECT_THROW(validate_vtk(broken("UNSTRUCTURED_GRID", "POLYDATA")), std::runtime_error);
  EXPECT_THROW(validate_vtk(broken("3 0 1 4", "3 0 1 99")), std::runtime_error);
  EXPECT_THROW(validate_vtk(broken("CELL_TYPES 8\n5", "CELL_TYPES 8\n9")), std::runtime_error);
  EXPECT_THROW(validate_vtk(broken("SCALARS w", "SCALARS q")), std::runtime_error);
  const std::string truncated = good.substr(0, good.rfind('\n', good.size() - 2) + 1);  // drop the last value
  EXPECT_THROW(validate_vtk(truncated), std::runtime_error);
  EXPECT_THROW(validate_vtk(broken("POINT_DATA 9", "POINT_DATA 8")), std::runtime_error);
  EXPECT_THROW(validate_vtk(""), std::runtime_error);
}

TEST(Csv, RoundTripIsExact) {
  const TriMesh m = build_rect_mesh(5, 3, {0.1, 0.7, -0.3, 0.9});
  const FieldState s = sample_state(m);
  const CsvSnapshot back = parse_csv(csv_text(m, s));
  EXPECT_EQ(back.state.u, s.u);
  EXPECT_EQ(back.state.v, s.v);
  EXPECT_EQ(back.state.w, s.w);
  ASSERT_EQ(back.points.size(), m.num_nodes());
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    EXPECT_EQ(back.points[i].x, m.nodes[i].x);
    EXPECT_EQ(back.points[i].y, m.nodes[i].y);
  }
  EXPECT_EQ(csv_text(m, s).substr(0, 10), "x,y,u,v,w\n");
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv("x,y,u,v\n1,2,3,4\n"), std::runtime_error);
  EXPECT_THROW(parse_csv("x,y,u,v,w\n1,2,3,4\n"), std::runtime_error);
  EXPECT_THROW(parse_csv("x,y,u,v,w\n1,2,3,4,abc\n"), std::runtime_error);
}

TEST(Snapshot, CsvAndVtkCarryIdenticalValues) {
  const test::ScratchDir dir("io_snap");
  const TriMesh m = build_rect_mesh(4, 3);
  const FieldState s = sample_state(m);
  const auto files = write_snapshot(s, m, dir.path() / "snap", OutputFormat::Both);
  ASSERT_EQ(files.size(), 2u);
  const VtkSummary v = validate_vtk_file(dir.path() / "snap.vtk");
  const CsvSnapshot c = read_csv(dir.path() / "snap.csv");
  EXPECT_EQ(v.values[0], c.state.u);
  EXPECT_EQ(v.values[1], c.state.v);
  EXPECT_EQ(v.values[2], c.state.w);
  EXPECT_EQ(v.values[0], s.u);
  EXPECT_EQ(write_snapshot(s, m, dir.path() / "only", OutputFormat::Csv).size(), 1u);
  EXPECT_FALSE(fs::exists(dir.path() / "only.vtk"));
}

TEST(AtomicWrite, LeavesNoTemporary) {
  const test::ScratchDir dir("io_atomic");
  const fs::path p = dir.path() / "nested" / "file.txt";
  write_atomic(p, "first");
  write_atomic(p, "second");
  EXPECT_EQ(slurp(p), "second");
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
  EXPECT_THROW(write_atomic(p / "child", "x"), IoError);
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(20.0), "20");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(InitialData, ResourcePeakOfReferencePreset) {
  const SimConfig c = load_config(test::preset("model1_e1_1_e2_10")).config;
  const TriMesh m = build_mesh(c);
  const FieldState s = initial_state(c, m);
  auto u0 = [](double x, double y) {
    const double bx = 1.0 - x * x, by = 1.0 - y * y;
    return 2.0 * std::exp(-10.0 * (x * x + (y - 0.9) * (y - 0.9))) * bx * bx * by * by;
  };
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const double val = u0(m.nodes[i].x, m.nodes[i].y);
    EXPECT_NEAR(s.u[i], val, 1e-15);
    if (val > best) best = val, arg = i;
  }
  const auto it = std::max_element(s.u.begin(), s.u.end());
  EXPECT_NEAR(*it, best, 1e-15);
  EXPECT_EQ(static_cast<std::size_t>(it - s.u.begin()), arg);
  EXPECT_EQ(m.nodes[arg].x, 0.0);
  EXPECT_GE(m.nodes[arg].y, 0.6);
  EXPECT_LE(m.nodes[arg].y, 0.75);
}

TEST(Simulate, WritesManifestSnapshotsAndDiagnostics) {
  const test::ScratchDir dir("io_sim");
  LoadedConfig lc = parse_config(R"(
[model]
id = 1
[mesh]
nx = 4
ny = 4
[time]
T = 0.05
dt = 0.01
snapshots = "0, 0.02, 0.05"
diag_stride = 2
[fields]
K = "2"
u0 = "1 + 0.1*x"
v0 = "1"
w0 = "1.5"
[output]
format = both
)");
  const SimulationOutput out = simulate(lc, dir.path());
  EXPECT_EQ(out.snapshot_files.size(), 6u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(fs::exists(dir.path() / ("snapshot_000" + std::to_string(i) + ".vtk")));
    EXPECT_TRUE(fs::exists(dir.path() / ("snapshot_000" + std::to_string(i) + ".csv")));
  }
  const std::string manifest = slurp(out.manifest);
  EXPECT_NE(manifest.find("; igp " + version()), std::string::npos);
  EXPECT_NE(manifest.find("params.alpha"), std::string::npos);  // listed as defaulted
  EXPECT_EQ(parse_config(manifest).config, lc.config);
  const std::string diag = slurp(out.diagnostics);
  EXPECT_EQ(std::count(diag.begin(), diag.end(), '\n'), 1 + 4);  // header + steps 0, 2, 4, 5
  EXPECT_EQ(slurp(dir.path() / "snapshots.csv").substr(0, 8), "index,t\n");
}

}  // namespace
}  // namespace igp
