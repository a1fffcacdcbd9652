#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfpart/fem.hpp"
#include "surfpart/mesh.hpp"
#include "surfpart/segregation.hpp"

namespace surfpart {

inline constexpr int kVoid = -1;

// v_i = u_i - sum_{j != i} u_j at every vertex.
std::vector<NodalField> signed_indicators(const ComponentEnsemble& ensemble);

// A point on mesh edge (a, b): x = (1 - t) x_a + t x_b.
struct EdgePoint {
  Index a = 0;
  Index b = 0;
  double t = 0.0;
  Vec3 position;
};

struct Polyline {
  std::vector<EdgePoint> points;
  bool closed = false;

  double length() const;
};

struct Junction {
  Vec3 position;
  std::vector<int> labels;  // sorted component indices meeting here
  int degree = 0;           // interface arcs leaving the junction
  std::size_t triangles = 0;
};

// Interfaces between the completed (argmax) labels, traced from junction
// to junction. `edges[i]` counts the arcs bounding component i.
struct DualStats {
  std::vector<int> edges;
  std::map<int, int> counts;  // k -> n_k
  int arcs = 0;
  int loops = 0;
  int max_degree = 0;
};

struct ExtractOptions {
  // Junction triangles joined by an interface arc shorter than this are
  // merged into one junction. Zero selects three times the mesh size.
  double merge_length = 0.0;
};

struct PartitionExtraction {
  std::vector<int> labels;  // component index with v_i > 0, or kVoid
  std::vector<NodalField> indicators;
  std::vector<std::vector<Polyline>> boundary;  // zero set of v_i, per component
  std::vector<Junction> junctions;
  DualStats dual;
  std::vector<double> areas;  // measure of {v_i > 0}
  std::vector<std::size_t> empty_components;
};

PartitionExtraction extract_partition(const ComponentEnsemble& ensemble, const TriangulatedSurface& mesh,
                                      const ExtractOptions& options = {});

// Marching triangles on the zero level set of a nodal field; the polylines
// separate {v > 0} from {v <= 0}.
std::vector<Polyline> zero_level_set(const TriangulatedSurface& mesh, std::span<const double> v);

// Area of {v > 0} for the piecewise-linear interpolant.
double positive_area(const TriangulatedSurface& mesh, std::span<const double> v);

struct CurvatureSample {
  Vec3 position;
  double kappa = 0.0;
  double arc_length = 0.0;
  double junction_distance = 0.0;  // +inf without junctions
  bool valid = true;
};

struct CurvatureSamples {
  std::vector<CurvatureSample> samples;
  std::size_t invalid = 0;

  double max_abs(double min_junction_distance = 0.0) const;
};

// div(grad v / |grad v|) per vertex: gradients recovered by area-weighted
// averaging, divergence per triangle, then averaged back to vertices.
std::vector<double> curvature_field(const TriangulatedSurface& mesh, std::span<const double> v,
                                    std::vector<std::uint8_t>* valid = nullptr);

CurvatureSamples geodesic_curvature(const TriangulatedSurface& mesh, std::span<const double> v,
                                    std::span<const Polyline> curves, std::span<const Junction> junctions = {});

struct DualGraphReport {
  bool assumption_violated = false;
  int lhs = 0;  // sum_{k<6} (6 - k) n_k
  int rhs = 0;  // 6 chi + sum_{k>6} (k - 6) n_k
  bool holds = false;
  std::string message;
};

DualGraphReport dual_graph_check(const PartitionExtraction& extraction, int euler_characteristic);

struct ClassStats {
  int key = 0;
  std::vector<std::size_t> members;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

// lambda_i = u_i^T A u_i grouped by class key; one class when none given.
std::vector<ClassStats> eigenvalue_stats(const ComponentEnsemble& ensemble, const CsrMatrix& stiffness,
                                         std::optional<std::vector<int>> classes = std::nullopt);
// Classes keyed by the edge count of each partition.
std::vector<ClassStats> eigenvalue_stats(const ComponentEnsemble& ensemble, const CsrMatrix& stiffness,
                                         const PartitionExtraction& extraction);

}  // namespace surfpart
