#include "surfpart/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "surfpart/error.hpp"

namespace surfpart {

namespace {

std::atomic<MeshId> g_next_mesh_id{1};

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Number of triangles incident to each undirected edge.
std::unordered_map<std::uint64_t, int> edge_counts(const std::vector<Triangle>& triangles) {
  std::unordered_map<std::uint64_t, int> counts;
  counts.reserve(triangles.size() * 2);
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) ++counts[edge_key(t[k], t[(k + 1) % 3])];
  return counts;
}

void check_level(int level) {
  if (level < 0 || level > kMaxLevel)
    throw SizeError("refinement level " + std::to_string(level) + " outside [0, " +
                    std::to_string(kMaxLevel) + "]");
}

}  // namespace

TriangulatedSurface::TriangulatedSurface(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                                         SurfaceGeometry geometry,
                                         std::vector<std::uint8_t> boundary_flags)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      geometry_(std::move(geometry)),
      boundary_(std::move(boundary_flags)),
      id_(g_next_mesh_id.fetch_add(1)) {
  if (boundary_.empty()) boundary_.assign(vertices_.size(), 0);
  if (boundary_.size() != vertices_.size())
    throw DimensionError("boundary flag count does not match vertex count");
  for (const auto& t : triangles_)
    for (Index v : t)
      if (v >= vertices_.size()) throw SizeError("triangle references a missing vertex");
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k)
      h_ = std::max(h_, norm(vertices_[t[k]] - vertices_[t[(k + 1) % 3]]));
  }
}

bool TriangulatedSurface::has_boundary() const {
  return std::any_of(boundary_.begin(), boundary_.end(), [](std::uint8_t b) { return b != 0; });
}

double TriangulatedSurface::triangle_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Vec3 e1 = vertices_[tri[1]] - vertices_[tri[0]];
  const Vec3 e2 = vertices_[tri[2]] - vertices_[tri[0]];
  return 0.5 * norm(cross(e1, e2));
}

double TriangulatedSurface::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) a += triangle_area(t);
  return a;
}

double TriangulatedSurface::diameter() const {
  if (vertices_.empty()) return 0.0;
  Vec3 lo = vertices_.front();
  Vec3 hi = lo;
  for (const auto& v : vertices_) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
  return norm(hi - lo);
}

TriangulatedSurface generate_icosphere(int level, double radius) {
  check_level(level);
  validate(Sphere{radius});
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p = p * (radius / norm(p));
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  TriangulatedSurface mesh(std::move(v), std::move(f), Sphere{radius});
  for (int l = 0; l < level; ++l) mesh = refine(mesh).mesh;
  return mesh;
}

TriangulatedSurface generate_torus(double major_radius, double minor_radius, int n_major, int n_minor) {
  const Torus torus{major_radius, minor_radius};
  validate(torus);
  if (n_major < 3 || n_minor < 3) throw SizeError("torus grid needs at least 3 x 3 cells");
  if (static_cast<long long>(n_major) * n_minor > (1LL << 26)) throw SizeError("torus grid too large");
  const auto nmaj = static_cast<Index>(n_major);
  const auto nmin = static_cast<Index>(n_minor);
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(nmaj) * nmin);
  for (Index i = 0; i < nmaj; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n_major;
    for (Index j = 0; j < nmin; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n_minor;
      const double rho = major_radius + minor_radius * std::cos(phi);
      v.push_back({rho * std::cos(theta), rho * std::sin(theta), minor_radius * std::sin(phi)});
    }
  }
  auto id = [&](Index i, Index j) { return (i % nmaj) * nmin + (j % nmin); };
  std::vector<Triangle> f;
  f.reserve(2 * v.size());
  for (Index i = 0; i < nmaj; ++i) {
    for (Index j = 0; j < nmin; ++j) {
      const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      f.push_back({a, b, c});
      f.push_back({a, c, d});
    }
  }
  return TriangulatedSurface(std::move(v), std::move(f), torus);
}

TriangulatedSurface generate_implicit(const TriangulatedSurface& seed, const ImplicitSurface& surface) {
  validate(surface);
  if (seed.has_boundary()) throw GeometryError("implicit surfaces need a closed seed mesh");
  std::vector<Vec3> v = seed.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = project(surface, v[i], i);
  return TriangulatedSurface(std::move(v), seed.triangles(), surface);
}

TriangulatedSurface generate_disk(int level, double radius, double sector_angle) {
  check_level(level);
  const PlanarDisk disk{radius, sector_angle};
  validate(disk);
  const bool full = is_full_disk(disk);
  const int fan = std::max(1, static_cast<int>(std::ceil(sector_angle / (std::numbers::pi / 3.0) - 1e-9)));
  const int arc_points = full ? fan : fan + 1;
  std::vector<Vec3> v;
  std::vector<std::uint8_t> boundary;
  v.push_back({0.0, 0.0, 0.0});
  boundary.push_back(full ? 0 : 1);
  for (int k = 0; k < arc_points; ++k) {
    const double a = sector_angle * k / fan;
    v.push_back({radius * std::cos(a), radius * std::sin(a), 0.0});
    boundary.push_back(1);
  }
  std::vector<Triangle> f;
  for (int k = 0; k < fan; ++k) {
    const auto a = static_cast<Index>(1 + k);
    const auto b = static_cast<Index>(1 + (full ? (k + 1) % fan : k + 1));
    f.push_back({0, a, b});
  }
  TriangulatedSurface mesh(std::move(v), std::move(f), disk, std::move(boundary));
  for (int l = 0; l < level; ++l) mesh = refine(mesh).mesh;
  return mesh;
}

RefinedMesh refine(const TriangulatedSurface& mesh) {
  const auto& pv = mesh.vertices();
  const auto& pt = mesh.triangles();
  const auto counts = edge_counts(pt);
  const auto* disk = std::get_if<PlanarDisk>(&mesh.geometry());

  std::vector<Vec3> v = pv;
  std::vector<std::uint8_t> boundary = mesh.boundary_flags();
  ProlongationMap map;
  map.parent = mesh.id();
  map.sources.reserve(pv.size() + counts.size());
  for (Index i = 0; i < pv.size(); ++i) map.sources.push_back({i, i});

  std::unordered_map<std::uint64_t, Index> midpoint;
  midpoint.reserve(counts.size());
  auto mid = [&](Index a, Index b) -> Index {
    const auto key = edge_key(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const auto idx = static_cast<Index>(v.size());
    Vec3 x = 0.5 * (pv[a] + pv[b]);
    const bool on_boundary = counts.at(key) == 1;
    if (disk != nullptr) {
      const double tol = 1e-9 * disk->radius;
      if (on_boundary && std::abs(norm(pv[a]) - disk->radius) < tol &&
          std::abs(norm(pv[b]) - disk->radius) < tol)
        x = x * (disk->radius / norm(x));
      x.z = 0.0;
    } else {
      x = project(mesh.geometry(), x, idx);
    }
    v.push_back(x);
    boundary.push_back(on_boundary ? 1 : 0);
    map.sources.push_back({std::min(a, b), std::max(a, b)});
    midpoint.emplace(key, idx);
    return idx;
  };

  std::vector<Triangle> f;
  f.reserve(4 * pt.size());
  for (const auto& t : pt) {
    const Index a = t[0], b = t[1], c = t[2];
    const Index ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    f.push_back({a, ab, ca});
    f.push_back({ab, b, bc});
    f.push_back({ca, bc, c});
    f.push_back({ab, bc, ca});
  }
  TriangulatedSurface child(std::move(v), std::move(f), mesh.geometry(), std::move(boundary));
  map.child = child.id();
  return {std::move(child), std::move(map)};
}

ManifoldReport check_manifold(const TriangulatedSurface& mesh) {
  ManifoldReport r;
  std::unordered_map<std::uint64_t, int> counts;
  std::unordered_map<std::uint64_t, int> directed;  // +1 for a<b traversal, -1 otherwise
  for (const auto& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const Index a = t[k], b = t[(k + 1) % 3];
      const auto key = edge_key(a, b);
      ++counts[key];
      directed[key] += a < b ? 1 : -1;
    }
  }
  const bool closed = is_closed(mesh.geometry());
  for (const auto& [key, n] : counts) {
    if (n == 2) {
      ++r.interior_edges;
      if (directed[key] != 0) ++r.inconsistent_edges;
    } else if (n == 1) {
      ++r.boundary_edges;
      if (closed) ++r.unexpected_boundary;
    } else {
      ++r.nonmanifold_edges;
    }
  }
  return r;
}

double min_angle_degrees(const TriangulatedSurface& mesh) {
  double best = 180.0;
  const auto& v = mesh.vertices();
  for (const auto& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 e1 = v[t[(k + 1) % 3]] - v[t[k]];
      const Vec3 e2 = v[t[(k + 2) % 3]] - v[t[k]];
      const double c = dot(e1, e2) / (norm(e1) * norm(e2));
      best = std::min(best, std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi);
    }
  }
  return best;
}

double max_level_residual(const TriangulatedSurface& mesh) {
  double r = 0.0;
  for (const auto& x : mesh.vertices()) r = std::max(r, std::abs(level_value(mesh.geometry(), x)));
  return r;
}

int euler_characteristic(const TriangulatedSurface& mesh) {
  const auto counts = edge_counts(mesh.triangles());
  return static_cast<int>(mesh.num_vertices()) - static_cast<int>(counts.size()) +
         static_cast<int>(mesh.num_triangles());
}

std::vector<std::vector<Index>> vertex_neighbors(const TriangulatedSurface& mesh) {
  std::vector<std::vector<Index>> nb(mesh.num_vertices());
  for (const auto& t : mesh.triangles())
    for (int k = 0; k < 3; ++k) {
      nb[t[k]].push_back(t[(k + 1) % 3]);
      nb[t[k]].push_back(t[(k + 2) % 3]);
    }
  for (auto& n : nb) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return nb;
}

}  // namespace surfpart
