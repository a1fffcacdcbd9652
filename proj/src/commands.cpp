#include "surfpart/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "surfpart/error.hpp"
#include "surfpart/io.hpp"
#include "surfpart/reference.hpp"
#include "surfpart/rng.hpp"
#include "surfpart/solve.hpp"

namespace surfpart {

namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed(double x, int digits) {
  if (std::isnan(x)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x, int digits) {
  if (std::isnan(x)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

bool writes_files(const RunConfig& c) { return c.out != "-"; }

fs::path output_dir(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + c.out + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f.exceptions(std::ios::badbit);
  return f;
}

std::string shape_name(int edges) {
  switch (edges) {
    case 2: return "lens";
    case 3: return "triangle";
    case 4: return "quadrilateral";
    case 5: return "pentagon";
    case 6: return "hexagon";
    default: return std::to_string(edges) + "-gon";
  }
}

void print_partition(std::ostream& os, const PartitionReport& p, const EnergyReport* energy) {
  os << "partition classes (by edge count):\n";
  for (const auto& c : p.classes)
    os << "  " << c.members.size() << " x " << shape_name(c.key) << "  eigenvalue " << fixed(c.mean, 4) << " ("
       << sci(c.stddev, 2) << ")\n";
  if (energy) {
    os << "S_eps: " << fixed(energy->s_eps, 6) << "\n";
    os << "total energy: " << fixed(energy->energy, 4) << "\n";
  }
  os << "junctions: " << p.extraction.junctions.size() << " (max degree " << p.extraction.dual.max_degree << ")\n";
  os << "dual graph (chi = " << p.euler_characteristic << "): " << p.dual.message << "\n";
  if (!p.extraction.empty_components.empty()) os << "empty components: " << p.extraction.empty_components.size() << "\n";
}

VtkDocument annotated_document(const TriangulatedSurface& mesh, const ComponentEnsemble& e,
                               const PartitionExtraction& x) {
  auto doc = mesh_document(mesh);
  doc.title = "surfpart partition " + geometry_tokens(mesh.geometry());
  VtkScalars label{"label", {}};
  for (int l : x.labels) label.values.push_back(l == kVoid ? 0.0 : l + 1.0);
  doc.point_data.push_back(std::move(label));
  for (std::size_t i = 0; i < e.m(); ++i) {
    doc.point_data.push_back({"u_" + std::to_string(i + 1), e.components[i]});
    doc.point_data.push_back({"v_" + std::to_string(i + 1), x.indicators[i].values});
  }
  VtkScalars cells{"label", {}};
  for (const auto& t : mesh.triangles()) {
    double l = 0.0;
    for (std::size_t i = 0; i < e.m(); ++i) {
      const auto& v = x.indicators[i].values;
      if (v[t[0]] + v[t[1]] + v[t[2]] > 0.0) l = static_cast<double>(i + 1);
    }
    cells.values.push_back(l);
  }
  doc.cell_data.push_back(std::move(cells));
  return doc;
}

VtkDocument curve_document(const TriangulatedSurface& mesh, const PartitionReport& p) {
  VtkDocument doc;
  doc.title = "surfpart boundary curves";
  doc.dataset = VtkDataset::polydata;
  VtkScalars kappa{"kappa_g", {}}, comp{"component", {}};
  const auto kf = [&] {
    std::vector<std::vector<double>> out;
    for (const auto& v : p.extraction.indicators) out.push_back(curvature_field(mesh, v.values));
    return out;
  }();
  for (std::size_t i = 0; i < p.extraction.boundary.size(); ++i)
    for (const auto& line : p.extraction.boundary[i]) {
      std::vector<Index> ids;
      for (const auto& pt : line.points) {
        ids.push_back(static_cast<Index>(doc.points.size()));
        doc.points.push_back(pt.position);
        kappa.values.push_back((1.0 - pt.t) * kf[i][pt.a] + pt.t * kf[i][pt.b]);
        comp.values.push_back(static_cast<double>(i + 1));
      }
      if (line.closed && !ids.empty()) ids.push_back(ids.front());
      doc.lines.push_back(std::move(ids));
    }
  doc.point_data = {std::move(kappa), std::move(comp)};
  return doc;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  auto f = open_out(path);
  body(f);
}

}  // namespace

MeshOutput cmd_mesh(const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto mesh = make_mesh(config);
  MeshOutput out{mesh.num_vertices(), mesh.num_triangles(), mesh.h()};
  log << "surface " << describe(mesh.geometry()) << "\n";
  log << "V = " << out.vertices << "  T = " << out.triangles << "  h = " << fixed(out.h, 6) << "\n";
  if (writes_files(config)) {
    const auto path = output_dir(config) / "mesh.vtk";
    write_file(path, [&](std::ostream& os) { write_vtk(os, mesh_document(mesh)); });
    log << "wrote " << path.string() << "\n";
  }
  return out;
}

PartitionReport analyze_ensemble(const TriangulatedSurface& mesh, const ComponentEnsemble& ensemble,
                                 const CsrMatrix& stiffness) {
  PartitionReport p;
  p.euler_characteristic = euler_characteristic(mesh);
  p.extraction = extract_partition(ensemble, mesh);
  p.dual = dual_graph_check(p.extraction, p.euler_characteristic);
  p.classes = eigenvalue_stats(ensemble, stiffness, p.extraction);
  for (std::size_t i = 0; i < ensemble.m(); ++i) {
    auto c = geodesic_curvature(mesh, p.extraction.indicators[i].values, p.extraction.boundary[i], p.extraction.junctions);
    p.curvature.invalid += c.invalid;
    p.curvature.samples.insert(p.curvature.samples.end(), c.samples.begin(), c.samples.end());
  }
  return p;
}

SolveOutput cmd_solve(const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto mesh0 = make_mesh(config);
  const auto schedule = make_schedule(config);
  const bool files = writes_files(config);
  fs::path dir;
  std::ofstream trace;
  if (files) {
    dir = output_dir(config);
    write_file(dir / "config.txt", [&](std::ostream& os) { os << serialize_config(config); });
    trace = open_out(dir / "trace.csv");
    write_trace_header(trace, config.m);
  }
  log << "surface " << describe(mesh0.geometry()) << ", m = " << config.m << ", seed = " << config.seed << " ("
      << Rng::kAlgorithm << ")\n";
  log << " lvl        V         h        eps       tau      energy       S_eps    steps  conv\n";

  SolveOutput out;
  auto on_level = [&](const LevelOutcome& o) {
    const auto& s = o.summary;
    log << pad(std::to_string(s.level), 4) << pad(std::to_string(s.vertices), 9) << pad(sci(s.h, 2), 10)
        << pad(sci(s.epsilon, 3), 11) << pad(sci(s.tau, 2), 10) << pad(fixed(s.energy.energy, 5), 12)
        << pad(fixed(s.energy.s_eps, 5), 12) << pad(std::to_string(s.steps), 9) << pad(s.converged ? "yes" : "no", 6)
        << "\n";
    if (!files) return;
    write_trace_rows(trace, o.trace, s.level, s.epsilon);
    trace.flush();
    const bool last = s.level == schedule.levels;
    if (last || (config.snapshot_every > 0 && s.level % config.snapshot_every == 0)) {
      char name[32];
      std::snprintf(name, sizeof name, "level_%02d.vtk", s.level);
      write_file(dir / name, [&](std::ostream& os) { write_snapshot(os, o.mesh, o.ensemble); });
    }
  };
  out.result = run_continuation(mesh0, config.m, schedule, config.seed, make_step_options(config), on_level);
  if (out.result.failure) log << "stopped: " << *out.result.failure << "\n";
  if (!out.result.mesh || out.result.levels.empty()) return out;

  const auto& mesh = *out.result.mesh;
  const auto ops = assemble_operators(mesh, Execution::parallel);
  out.partition = analyze_ensemble(mesh, out.result.ensemble, ops.stiffness);
  std::ostringstream summary;
  summary << "m = " << config.m << ", final epsilon = " << sci(out.result.levels.back().epsilon, 3)
          << ", vertices = " << mesh.num_vertices() << ", rng = " << Rng::kAlgorithm << "\n";
  print_partition(summary, out.partition, &out.result.levels.back().energy);
  log << summary.str();
  if (files) {
    write_file(dir / "summary.txt", [&](std::ostream& os) { os << summary.str(); });
    if (out.result.failure) {
      // Keep the last state for inspection or restart.
      write_file(dir / "failed.vtk", [&](std::ostream& os) { write_snapshot(os, mesh, out.result.ensemble); });
    }
  }
  return out;
}

EpsStudy cmd_study_eps(const RunConfig& config, std::ostream& log) {
  validate(config);
  if (config.surface != "sphere" || config.m != 3)
    throw ConfigError("the epsilon study compares against the Y-partition: sphere with m = 3");
  const double reference = reference::kYEnergy / (config.radius * config.radius);
  const auto mesh0 = make_mesh(config);
  EpsStudy study;
  study.result = run_continuation(mesh0, config.m, make_schedule(config), config.seed, make_step_options(config));
  for (const auto& s : study.result.levels) {
    EpsRow r;
    r.epsilon = s.epsilon;
    r.vertices = s.vertices;
    r.energy = s.energy.energy;
    r.error = std::abs(reference - r.energy);
    r.s_eps = s.energy.s_eps;
    r.lambda = s.energy.lambda;
    r.lambda_eps = s.energy.lambda_eps;
    r.eoc_energy = r.eoc_s = kNaN;
    if (!study.rows.empty()) {
      const auto& p = study.rows.back();
      const double q = std::log(r.epsilon / p.epsilon);
      r.eoc_energy = std::log(r.error / p.error) / q;
      r.eoc_s = std::log(r.s_eps / p.s_eps) / q;
    }
    study.rows.push_back(r);
  }
  std::ostringstream table;
  table << "         eps        V     Energy  Energy error     eoc       S_eps     eoc\n";
  for (const auto& r : study.rows)
    table << pad(sci(r.epsilon, 4), 12) << pad(std::to_string(r.vertices), 9) << pad(fixed(r.energy, 4), 11)
          << pad(fixed(r.error, 4), 14) << pad(fixed(r.eoc_energy, 4), 8) << pad(fixed(r.s_eps, 4), 12)
          << pad(fixed(r.eoc_s, 4), 8) << "\n";
  if (study.result.failure) table << "stopped: " << *study.result.failure << "\n";
  log << table.str();
  if (writes_files(config)) {
    const auto dir = output_dir(config);
    write_file(dir / "study_eps.txt", [&](std::ostream& os) { os << table.str(); });
    write_file(dir / "study_eps.csv", [&](std::ostream& os) {
      os << "epsilon,vertices,energy,error,eoc_energy,s_eps,eoc_s\n";
      for (const auto& r : study.rows)
        os << format_double(r.epsilon) << ',' << r.vertices << ',' << format_double(r.energy) << ','
           << format_double(r.error) << ',' << format_double(r.eoc_energy) << ',' << format_double(r.s_eps) << ','
           << format_double(r.eoc_s) << '\n';
    });
  }
  return study;
}

std::vector<HRow> cmd_study_h(const RunConfig& config, std::ostream& log) {
  validate(config);
  auto mesh = make_mesh(config);
  const auto options = make_step_options(config);
  StageParams params = make_schedule(config).stage;
  auto ensemble = random_init(mesh, assemble_mass(mesh, Execution::parallel), config.m, config.seed, config.eps0,
                              config.tau0)
                      .ensemble;
  std::vector<HRow> rows;
  log << "        V         h      Energy       S_eps  difference     eoc\n";
  for (int level = 0; level <= config.levels; ++level) {
    const auto ops = assemble_operators(mesh, Execution::parallel);
    ensemble.step = 0;
    ensemble.time = 0.0;
    auto stage = run_stage(std::move(ensemble), mesh, ops, params, options);
    ensemble = std::move(stage.ensemble);
    HRow r;
    r.vertices = mesh.num_vertices();
    r.h = mesh.h();
    r.energy = stage.trace.records.back().report.energy;
    r.s_eps = stage.trace.records.back().report.s_eps;
    r.difference = r.eoc = kNaN;
    if (!rows.empty()) {
      r.difference = std::abs(r.energy - rows.back().energy);
      if (rows.size() >= 2) r.eoc = std::log(r.difference / rows.back().difference) / std::log(r.h / rows.back().h);
    }
    rows.push_back(r);
    log << pad(std::to_string(r.vertices), 9) << pad(sci(r.h, 3), 10) << pad(fixed(r.energy, 5), 12)
        << pad(fixed(r.s_eps, 5), 12) << pad(sci(r.difference, 3), 12) << pad(fixed(r.eoc, 3), 8) << "\n";
    if (stage.failure) {
      log << "stopped: " << *stage.failure << "\n";
      break;
    }
    if (level == config.levels) break;
    auto refined = refine(mesh);
    for (auto& c : ensemble.components) c = prolong(NodalField{mesh.id(), c}, refined.map).values;
    mesh = std::move(refined.mesh);
    ensemble.mesh = mesh.id();
    ensemble.tau *= config.tau_shrink;
    normalize_step(ensemble.components, assemble_mass(mesh, Execution::parallel), options.workers);
  }
  if (writes_files(config)) {
    write_file(output_dir(config) / "study_h.csv", [&](std::ostream& os) {
      os << "vertices,h,energy,s_eps,difference,eoc\n";
      for (const auto& r : rows)
        os << r.vertices << ',' << format_double(r.h) << ',' << format_double(r.energy) << ','
           << format_double(r.s_eps) << ',' << format_double(r.difference) << ',' << format_double(r.eoc) << '\n';
    });
  }
  return rows;
}

OracleOutput cmd_oracle(const RunConfig& config, std::ostream& log) {
  validate(config);
  if (config.surface != "disk" && config.surface != "sector")
    throw ConfigError("the eigenvalue oracle runs on the disk or a sector");
  const double angle = config.surface == "disk" ? 2.0 * std::numbers::pi : config.sector_angle;
  OracleOutput out;
  out.copies = 2.0 * std::numbers::pi / angle;
  out.reference = reference::sector_eigenvalue(angle) / (config.radius * config.radius);
  EigenOptions options;
  options.exec = Execution::parallel;
  log << "disk sector, opening " << fixed(angle * 180.0 / std::numbers::pi, 2) << " degrees, exact "
      << fixed(out.reference, 6) << "\n";
  log << " lvl        V         h      lambda       error     eoc\n";
  auto mesh = generate_disk(config.level, config.radius, angle);
  for (int l = 0; l <= config.levels; ++l) {
    if (l > 0) mesh = refine(mesh).mesh;
    const auto ops = assemble_operators(mesh, Execution::parallel);
    const auto pair = smallest_eigenpair(ops.stiffness, ops.mass, mesh.boundary_flags(), options, mesh.id());
    OracleRow r;
    r.level = config.level + l;
    r.vertices = mesh.num_vertices();
    r.h = mesh.h();
    r.lambda = pair.value;
    r.error = std::abs(pair.value - out.reference);
    r.eoc = out.rows.empty() ? kNaN : std::log(r.error / out.rows.back().error) / std::log(r.h / out.rows.back().h);
    out.rows.push_back(r);
    log << pad(std::to_string(r.level), 4) << pad(std::to_string(r.vertices), 9) << pad(sci(r.h, 3), 10)
        << pad(fixed(r.lambda, 6), 12) << pad(sci(r.error, 3), 12) << pad(fixed(r.eoc, 3), 8) << "\n";
  }
  const auto& fine = out.rows.back();
  out.extrapolated = fine.lambda;
  if (out.rows.size() >= 2) {
    const auto& coarse = out.rows[out.rows.size() - 2];
    const double q = (coarse.h / fine.h) * (coarse.h / fine.h);
    out.extrapolated = (q * fine.lambda - coarse.lambda) / (q - 1.0);
  }
  log << "extrapolated " << fixed(out.extrapolated, 6) << ", scaled by sector count " << fixed(out.copies, 3) << ": "
      << fixed(out.copies * fine.lambda, 4) << " (exact " << fixed(out.copies * out.reference, 4) << ")\n";
  if (writes_files(config)) {
    write_file(output_dir(config) / "oracle.csv", [&](std::ostream& os) {
      os << "level,vertices,h,lambda,error,eoc\n";
      for (const auto& r : out.rows)
        os << r.level << ',' << r.vertices << ',' << format_double(r.h) << ',' << format_double(r.lambda) << ','
           << format_double(r.error) << ',' << format_double(r.eoc) << '\n';
    });
  }
  return out;
}

PartitionReport cmd_analyze(const std::string& snapshot, const RunConfig& config, std::ostream& log) {
  std::ifstream in(snapshot);
  if (!in) throw Error("cannot read " + snapshot);
  const auto snap = read_snapshot(in);
  const auto ops = assemble_operators(snap.mesh, Execution::parallel);
  auto p = analyze_ensemble(snap.mesh, snap.ensemble, ops.stiffness);
  ComponentEnsemble e = snap.ensemble;
  const auto energy = reported_energy(e, snap.mesh, ops);

  std::ostringstream report;
  report << "snapshot " << snapshot << ": m = " << e.m() << ", V = " << snap.mesh.num_vertices()
         << ", epsilon = " << sci(e.epsilon, 3) << "\n";
  print_partition(report, p, &energy);
  report << "geodesic curvature: " << p.curvature.samples.size() << " samples, max |kappa_g| "
         << fixed(p.curvature.max_abs(), 4) << ", away from junctions (> 0.2) " << fixed(p.curvature.max_abs(0.2), 4)
         << "\n";
  log << report.str();
  if (writes_files(config)) {
    const auto dir = output_dir(config);
    write_file(dir / "partition.vtk",
               [&](std::ostream& os) { write_vtk(os, annotated_document(snap.mesh, e, p.extraction)); });
    write_file(dir / "curves.vtk", [&](std::ostream& os) { write_vtk(os, curve_document(snap.mesh, p)); });
    write_file(dir / "report.txt", [&](std::ostream& os) { os << report.str(); });
    write_file(dir / "partition.csv", [&](std::ostream& os) {
      os << "component,edges,lambda,area\n";
      for (std::size_t i = 0; i < e.m(); ++i)
        os << i + 1 << ',' << p.extraction.dual.edges[i] << ','
           << format_double(quadratic_form(ops.stiffness, e.components[i])) << ','
           << format_double(p.extraction.areas[i]) << '\n';
    });
  }
  return p;
}

}  // namespace surfpart
