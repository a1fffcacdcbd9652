#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "surfpart/geometry.hpp"
#include "surfpart/vec3.hpp"

namespace surfpart {

using Index = std::uint32_t;
using Triangle = std::array<Index, 3>;
using MeshId = std::uint64_t;

// Triangulated approximation of a surface. Vertices lie on the exact
// geometry; triangles are consistently oriented. Immutable once built.
class TriangulatedSurface {
 public:
  TriangulatedSurface(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                      SurfaceGeometry geometry, std::vector<std::uint8_t> boundary_flags = {});

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const SurfaceGeometry& geometry() const { return geometry_; }
  const std::vector<std::uint8_t>& boundary_flags() const { return boundary_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  bool is_boundary(std::size_t v) const { return boundary_[v] != 0; }
  bool has_boundary() const;

  // Maximal triangle diameter.
  double h() const { return h_; }
  MeshId id() const { return id_; }

  double triangle_area(std::size_t t) const;
  double total_area() const;
  // Diagonal of the vertex bounding box.
  double diameter() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  SurfaceGeometry geometry_;
  std::vector<std::uint8_t> boundary_;
  double h_ = 0.0;
  MeshId id_ = 0;
};

// For each child vertex: the parent vertex it copies (a == b) or the parent
// edge (a, b) whose projected midpoint it is.
struct ProlongationMap {
  struct Source {
    Index a;
    Index b;
    bool is_copy() const { return a == b; }
  };
  MeshId parent = 0;
  MeshId child = 0;
  std::vector<Source> sources;
};

struct RefinedMesh {
  TriangulatedSurface mesh;
  ProlongationMap map;
};

inline constexpr int kMaxLevel = 10;

TriangulatedSurface generate_icosphere(int level, double radius = 1.0);
TriangulatedSurface generate_torus(double major_radius, double minor_radius, int n_major, int n_minor);
// Projects every vertex of a closed seed mesh onto the implicit surface.
TriangulatedSurface generate_implicit(const TriangulatedSurface& seed, const ImplicitSurface& surface);
TriangulatedSurface generate_disk(int level, double radius, double sector_angle);

// Red refinement (1 -> 4) with midpoints projected onto the exact geometry.
RefinedMesh refine(const TriangulatedSurface& mesh);

struct ManifoldReport {
  std::size_t interior_edges = 0;
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;     // shared by more than 2 triangles
  std::size_t inconsistent_edges = 0;    // both triangles traverse it the same way
  std::size_t unexpected_boundary = 0;   // boundary edge on a closed geometry
  bool ok() const {
    return nonmanifold_edges == 0 && inconsistent_edges == 0 && unexpected_boundary == 0;
  }
  std::size_t num_edges() const { return interior_edges + boundary_edges + nonmanifold_edges; }
};

ManifoldReport check_manifold(const TriangulatedSurface& mesh);

double min_angle_degrees(const TriangulatedSurface& mesh);
// max_v |Phi(x_v)|.
double max_level_residual(const TriangulatedSurface& mesh);
int euler_characteristic(const TriangulatedSurface& mesh);

// Sorted unique vertex neighbours for every vertex.
std::vector<std::vector<Index>> vertex_neighbors(const TriangulatedSurface& mesh);

}  // namespace surfpart
