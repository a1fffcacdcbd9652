#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfpart/mesh.hpp"
#include "surfpart/segregation.hpp"

namespace surfpart {

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

struct VtkScalars {
  std::string name;
  std::vector<double> values;
};

enum class VtkDataset { unstructured_grid, polydata };

// Triangles and polylines with scalar fields, legacy VTK ASCII 3.0.
struct VtkDocument {
  std::string title = "surfpart";
  VtkDataset dataset = VtkDataset::unstructured_grid;
  std::vector<Vec3> points;
  std::vector<Triangle> triangles;
  std::vector<std::vector<Index>> lines;  // polydata only
  std::vector<VtkScalars> point_data;
  std::vector<VtkScalars> cell_data;

  const VtkScalars* find_point_data(const std::string& name) const;
  const VtkScalars* find_cell_data(const std::string& name) const;
};

void write_vtk(std::ostream& os, const VtkDocument& doc);
// Throws ParseError carrying the offending line number.
VtkDocument read_vtk(std::istream& is);

VtkDocument mesh_document(const TriangulatedSurface& mesh);

// Title-line encoding of a geometry, e.g. "surface=torus major=1 minor=0.6".
std::string geometry_tokens(const SurfaceGeometry& geometry);
SurfaceGeometry parse_geometry(const std::string& title);

// Restart snapshot: mesh, u_1..u_m as point data, epsilon/tau/step/time in
// the title line.
void write_snapshot(std::ostream& os, const TriangulatedSurface& mesh, const ComponentEnsemble& ensemble);

struct Snapshot {
  TriangulatedSurface mesh;
  ComponentEnsemble ensemble;
};
Snapshot read_snapshot(std::istream& is);

// level,epsilon,step,time,energy,energy_half,s_eps,lambda_1..lambda_m
void write_trace_header(std::ostream& os, std::size_t m);
void write_trace_rows(std::ostream& os, const EnergyTrace& trace, int level, double epsilon);

}  // namespace surfpart
