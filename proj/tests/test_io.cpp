#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "surfpart/commands.hpp"
#include "surfpart/config.hpp"
#include "surfpart/error.hpp"
#include "surfpart/io.hpp"
#include "surfpart/reference.hpp"

using namespace surfpart;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("surfpart_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig quiet(RunConfig c = {}) {
  c.out = "-";
  return c;
}

}  // namespace

TEST_CASE("doubles round-trip through their shortest text") {
  for (double x : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 4.9e-324, std::numbers::pi,
                   std::numeric_limits<double>::max()}) {
    const auto s = format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("VTK documents round-trip") {
  const auto mesh = generate_torus(1.0, 0.6, 12, 6);
  auto doc = mesh_document(mesh);
  doc.point_data.push_back({"f", std::vector<double>(mesh.num_vertices())});
  for (std::size_t z = 0; z < mesh.num_vertices(); ++z) doc.point_data.back().values[z] = std::sin(1.0 + z) / 3.0;
  doc.cell_data.push_back({"g", std::vector<double>(mesh.num_triangles(), -1.0 / 7.0)});
  std::stringstream ss;
  write_vtk(ss, doc);
  const auto back = read_vtk(ss);
  CHECK(back.title == doc.title);
  CHECK(back.points == doc.points);
  CHECK(back.triangles == doc.triangles);
  REQUIRE(back.find_point_data("f"));
  CHECK(back.find_point_data("f")->values == doc.point_data.back().values);
  REQUIRE(back.find_cell_data("g"));
  CHECK(back.find_cell_data("g")->values == doc.cell_data.back().values);
  CHECK(back.find_point_data("missing") == nullptr);

  VtkDocument lines;
  lines.dataset = VtkDataset::polydata;
  lines.points = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
  lines.lines = {{0, 1, 2}};
  lines.point_data.push_back({"kappa_g", {0.5, -0.25, 1e-3}});
  std::stringstream ls;
  write_vtk(ls, lines);
  const auto lb = read_vtk(ls);
  CHECK(lb.dataset == VtkDataset::polydata);
  CHECK(lb.lines == lines.lines);
  CHECK(lb.find_point_data("kappa_g")->values == lines.point_data[0].values);
}

TEST_CASE("mesh documents have the generated sizes") {
  auto c = quiet();
  c.level = 3;
  const auto s = mesh_document(make_mesh(c));
  CHECK(s.points.size() == 642);
  CHECK(s.triangles.size() == 1280);
  CHECK(s.find_point_data("boundary") == nullptr);
  const auto t = mesh_document(generate_torus(0.8, 0.2, 64, 32));
  CHECK(t.points.size() == 2048);
  const auto d = mesh_document(generate_disk(2, 1.0, 2.0 * kPi));
  CHECK(d.find_point_data("boundary") != nullptr);
}

TEST_CASE("malformed VTK reports the offending line") {
  const auto mesh = generate_icosphere(0);
  std::stringstream ss;
  write_vtk(ss, mesh_document(mesh));
  auto text = ss.str();
  // Corrupt the first coordinate of the third point.
  std::istringstream lines(text);
  std::string line, out;
  std::size_t n = 0, target = 0;
  while (std::getline(lines, line)) {
    ++n;
    if (line.rfind("POINTS", 0) == 0) target = n + 3;
    if (n == target && target) line = "1.0 abc 0.0";
    out += line + "\n";
  }
  REQUIRE(target > 0);
  std::istringstream bad(out);
  try {
    (void)read_vtk(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == target);
  }
  std::istringstream junk("not a vtk file\n");
  CHECK_THROWS_AS(read_vtk(junk), ParseError);
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(read_vtk(truncated), ParseError);
}

TEST_CASE("snapshots restore mesh, components and state bitwise") {
  for (const auto& mesh : {generate_icosphere(2), generate_torus(1.0, 0.6, 12, 6),
                           generate_implicit(generate_icosphere(1), dziuk_surface())}) {
    ComponentEnsemble e;
    e.mesh = mesh.id();
    e.epsilon = 0.1 / 3.0;
    e.tau = 8e-4 / std::numbers::sqrt2;
    e.step = 12345;
    e.time = e.step * e.tau;
    for (std::size_t i = 0; i < 3; ++i) {
      e.components.emplace_back(mesh.num_vertices());
      for (std::size_t z = 0; z < mesh.num_vertices(); ++z) e.components[i][z] = std::exp(-double(z % (7 + i)) / 3.0);
    }
    std::stringstream ss;
    write_snapshot(ss, mesh, e);
    const auto snap = read_snapshot(ss);
    CHECK(snap.mesh.vertices() == mesh.vertices());
    CHECK(snap.mesh.triangles() == mesh.triangles());
    CHECK(snap.mesh.geometry().index() == mesh.geometry().index());
    CHECK(geometry_tokens(snap.mesh.geometry()) == geometry_tokens(mesh.geometry()));
    CHECK(snap.ensemble.mesh == snap.mesh.id());
    CHECK(snap.ensemble.components == e.components);
    CHECK(snap.ensemble.epsilon == e.epsilon);
    CHECK(snap.ensemble.tau == e.tau);
    CHECK(snap.ensemble.step == e.step);
    CHECK(snap.ensemble.time == e.time);
  }
}

TEST_CASE("geometry tokens parse back") {
  const SurfaceGeometry torus = Torus{1.0, 0.6};
  CHECK(geometry_tokens(torus) == "surface=torus major=1 minor=0.6");
  const auto g = parse_geometry("surfpart snapshot m=3 " + geometry_tokens(torus));
  REQUIRE(std::holds_alternative<Torus>(g));
  CHECK(std::get<Torus>(g).minor_radius == 0.6);
  const auto s = parse_geometry(geometry_tokens(PlanarDisk{2.0, kPi / 3.0}));
  REQUIRE(std::holds_alternative<PlanarDisk>(s));
  CHECK(std::get<PlanarDisk>(s).sector_angle == kPi / 3.0);
  CHECK_THROWS(parse_geometry("surface=klein"));
}

TEST_CASE("trace csv layout") {
  EnergyTrace t;
  EnergyReport r;
  r.energy = 1.5;
  r.energy_half = 1.0;
  r.s_eps = 0.5;
  r.lambda = {0.25, 0.75};
  t.records.push_back({125, 0.1, r});
  std::ostringstream os;
  write_trace_header(os, 2);
  write_trace_rows(os, t, 3, 0.125);
  CHECK(os.str() == "level,epsilon,step,time,energy,energy_half,s_eps,lambda_1,lambda_2\n"
                    "3,0.125,125,0.1,1.5,1,0.5,0.25,0.75\n");
}

TEST_CASE("config text round-trips") {
  RunConfig c;
  c.surface = "torus";
  c.m = 6;
  c.eps0 = 0.3;
  c.shrink = 1.0 / 3.0;
  c.seed = 18446744073709551615ULL;
  c.out = "runs/torus six";
  const auto back = parse_config(serialize_config(c));
  CHECK(back == c);
  const auto parsed = parse_config("# comment\n\n  m = 4   # trailing\nsurface=dziuk\n");
  CHECK(parsed.m == 4);
  CHECK(parsed.surface == "dziuk");
  CHECK(parsed.eps0 == RunConfig{}.eps0);
}

TEST_CASE("config errors name the line") {
  auto line_of = [](const std::string& text) {
    try {
      (void)parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(line_of("m = 3\nwhat = 1\n").rfind("line 2:", 0) == 0);
  CHECK(line_of("# x\nm = three\n").rfind("line 2:", 0) == 0);
  CHECK(line_of("m 3\n").rfind("line 1:", 0) == 0);
  CHECK(line_of("eps0 = 0.5x\n").rfind("line 1:", 0) == 0);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(validate(c));
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(validate(c), ConfigError);
  };
  bad([](RunConfig& c) { c.m = 1; });
  bad([](RunConfig& c) { c.m = 40; });
  bad([](RunConfig& c) { c.surface = "cube"; });
  bad([](RunConfig& c) { c.shrink = 1.0; });
  bad([](RunConfig& c) { c.eps0 = 0.0; });
  bad([](RunConfig& c) { c.workers = 0; });
  bad([](RunConfig& c) { c.level = 11; });
  RunConfig t;
  t.surface = "torus";
  t.major_radius = 1.0;
  t.minor_radius = 2.0;
  CHECK_THROWS_AS(validate(t), GeometryError);
}

TEST_CASE("mesh command sizes") {
  auto c = quiet();
  c.level = 3;
  auto out = cmd_mesh(c, std::cout);
  CHECK(out.vertices == 642);
  CHECK(out.triangles == 1280);
  c.surface = "torus";
  c.major_radius = 0.8;
  c.minor_radius = 0.2;
  c.torus_major = 64;
  c.torus_minor = 32;
  c.level = 0;
  out = cmd_mesh(c, std::cout);
  CHECK(out.vertices == 2048);
  CHECK(out.triangles == 4096);

  const auto dir = scratch("mesh");
  c.out = dir.string();
  cmd_mesh(c, std::cout);
  std::ifstream in(dir / "mesh.vtk");
  CHECK(read_vtk(in).points.size() == 2048);
  fs::remove_all(dir);
}

TEST_CASE("solve output does not depend on the worker count") {
  std::vector<std::string> traces;
  for (int w : {1, 3}) {
    auto c = quiet();
    c.level = 2;
    c.levels = 2;
    c.max_vertices = 700;
    c.workers = w;
    const auto dir = scratch("workers" + std::to_string(w));
    c.out = dir.string();
    std::ostringstream log;
    const auto out = cmd_solve(c, log);
    CHECK_FALSE(out.result.failure);
    for (const char* f : {"config.txt", "trace.csv", "summary.txt", "level_00.vtk", "level_02.vtk"})
      CHECK(fs::exists(dir / f));
    traces.push_back(slurp(dir / "trace.csv"));
    auto snap_in = std::ifstream(dir / "level_02.vtk");
    const auto snap = read_snapshot(snap_in);
    CHECK(snap.ensemble.components == out.result.ensemble.components);
    fs::remove_all(dir);
  }
  CHECK(traces[0] == traces[1]);
  CHECK(traces[0].rfind("level,epsilon,step,time,energy,energy_half,s_eps,lambda_1,lambda_2,lambda_3\n", 0) == 0);
}

TEST_CASE("short sphere run lands between neighbouring reference energies") {
  auto c = quiet();
  c.level = 2;
  c.levels = 4;
  c.max_vertices = 3000;
  std::ostringstream log;
  const auto out = cmd_solve(c, log);
  REQUIRE_FALSE(out.result.failure);
  const auto& last = out.result.levels.back();
  CHECK(last.epsilon == doctest::Approx(0.125).epsilon(1e-12));
  // Reference energies at eps = 0.25 and 0.0625 bracket the eps = 0.125 value.
  CHECK(last.energy.energy > 4.876);
  CHECK(last.energy.energy < 7.883);
}

TEST_CASE("analyze reads a lune snapshot") {
  const auto mesh = generate_icosphere(4);
  const auto y = reference::y_partition(mesh, 0.05);
  const auto dir = scratch("analyze");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "y.vtk");
    write_snapshot(os, mesh, y);
  }
  auto c = quiet();
  c.out = (dir / "out").string();
  std::ostringstream log;
  const auto p = cmd_analyze((dir / "y.vtk").string(), c, log);
  CHECK(p.euler_characteristic == 2);
  CHECK(p.extraction.junctions.size() == 2);
  CHECK(p.dual.holds);
  REQUIRE(p.classes.size() == 1);
  CHECK(p.classes[0].key == 2);
  CHECK(p.classes[0].members.size() == 3);
  CHECK(p.classes[0].stddev < 0.01 * p.classes[0].mean);
  for (const char* f : {"partition.vtk", "curves.vtk", "report.txt", "partition.csv"}) CHECK(fs::exists(dir / "out" / f));
  std::ifstream in(dir / "out" / "curves.vtk");
  CHECK(read_vtk(in).find_point_data("kappa_g") != nullptr);
  fs::remove_all(dir);
  CHECK_THROWS_AS(cmd_analyze((dir / "missing.vtk").string(), c, log), Error);
}

TEST_CASE("oracle command on the disk") {
  auto c = quiet();
  c.surface = "disk";
  c.level = 2;
  c.levels = 2;
  std::ostringstream log;
  const auto out = cmd_oracle(c, log);
  REQUIRE(out.rows.size() == 3);
  CHECK(out.reference == doctest::Approx(5.783185962946784).epsilon(1e-12));
  CHECK(std::abs(out.extrapolated - out.reference) < std::abs(out.rows.back().lambda - out.reference));
  c.surface = "sphere";
  CHECK_THROWS_AS(cmd_oracle(c, log), ConfigError);
}

TEST_CASE("epsilon study requires three components on the sphere") {
  auto c = quiet();
  c.m = 4;
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_study_eps(c, log), ConfigError);
  c.m = 3;
  c.surface = "torus";
  CHECK_THROWS_AS(cmd_study_eps(c, log), ConfigError);
}
