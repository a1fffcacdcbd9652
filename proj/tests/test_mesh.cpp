#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "surfpart/error.hpp"
#include "surfpart/geometry.hpp"
#include "surfpart/mesh.hpp"

using namespace surfpart;
constexpr double kPi = std::numbers::pi;

TEST_CASE("icosphere vertex and triangle counts follow 10*4^l+2 and 20*4^l") {
  for (int l = 0; l <= 4; ++l) {
    const auto mesh = generate_icosphere(l);
    const std::size_t p = std::size_t{1} << (2 * l);
    CHECK(mesh.num_vertices() == 10 * p + 2);
    CHECK(mesh.num_triangles() == 20 * p);
    CHECK(check_manifold(mesh).ok());
    CHECK(euler_characteristic(mesh) == 2);
  }
  CHECK_THROWS_AS(generate_icosphere(kMaxLevel + 1), SizeError);
  CHECK_THROWS_AS(generate_icosphere(-1), SizeError);
}

TEST_CASE("icosphere area approaches 4 pi monotonically from below") {
  double previous = 0.0;
  for (int l = 0; l <= 5; ++l) {
    const double area = generate_icosphere(l).total_area();
    CHECK(area > previous);
    CHECK(area < 4.0 * kPi);
    previous = area;
  }
  CHECK(std::abs(generate_icosphere(3).total_area() - 4.0 * kPi) / (4.0 * kPi) < 5e-3);
}

TEST_CASE("sphere vertices lie on the sphere of the requested radius") {
  const auto mesh = generate_icosphere(3, 2.5);
  for (const auto& x : mesh.vertices()) CHECK(std::abs(norm(x) - 2.5) <= 1e-12 * mesh.diameter());
}

TEST_CASE("minimum angle stays above 15 degrees under refinement") {
  for (int l = 0; l <= 6; ++l) CHECK(min_angle_degrees(generate_icosphere(l)) >= 15.0);
  auto torus = generate_torus(1.0, 0.6, 32, 16);
  for (int l = 0; l <= 2; ++l, torus = refine(torus).mesh) CHECK(min_angle_degrees(torus) >= 15.0);
  for (int l = 0; l <= 4; ++l) CHECK(min_angle_degrees(generate_disk(l, 1.0, 2.0 * kPi)) >= 15.0);
  for (int l = 0; l <= 4; ++l) CHECK(min_angle_degrees(generate_disk(l, 1.0, 2.0 * kPi / 3.0)) >= 15.0);
}

TEST_CASE("torus grid sizes and area") {
  const auto small = generate_torus(0.8, 0.2, 16, 8);
  CHECK(small.num_vertices() == 128);
  CHECK(small.num_triangles() == 256);
  CHECK(check_manifold(small).ok());
  CHECK(euler_characteristic(small) == 0);

  const auto fine = generate_torus(0.8, 0.2, 64, 32);
  const double exact = 4.0 * kPi * kPi * 0.8 * 0.2;
  CHECK(std::abs(fine.total_area() - exact) / exact < 0.01);
  for (const auto& x : fine.vertices()) {
    const double rho = std::hypot(x.x, x.y) - 0.8;
    CHECK(std::abs(std::hypot(rho, x.z) - 0.2) < 1e-12);
  }
}

TEST_CASE("torus with minor radius not below major radius is rejected") {
  CHECK_THROWS_AS(generate_torus(1.0, 2.0, 16, 8), GeometryError);
  CHECK_THROWS_AS(generate_torus(1.0, 1.0, 16, 8), GeometryError);
  CHECK_THROWS_AS(generate_torus(-1.0, 0.5, 16, 8), GeometryError);
}

TEST_CASE("implicit surface vertices satisfy the level function") {
  const auto surface = dziuk_surface();
  const auto mesh = generate_implicit(generate_icosphere(2), surface);
  CHECK(max_level_residual(mesh) <= 1e-12);
  CHECK(check_manifold(mesh).ok());
  CHECK(euler_characteristic(mesh) == 2);
  auto refined = refine(mesh).mesh;
  CHECK(max_level_residual(refined) <= 1e-12);
}

TEST_CASE("newton projection leaves surface points fixed and matches a bisection root") {
  const auto surface = dziuk_surface();
  Vec3 on{1.0, 0.0, 0.0};
  REQUIRE(newton_project(surface, on));
  CHECK(on == Vec3{1.0, 0.0, 0.0});

  // From (2,0,0) the gradient stays on the x1 axis, where Phi(t,0,0) = t^2 - 1.
  double lo = 0.5, hi = 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (surface.level({mid, 0.0, 0.0}) > 0.0 ? hi : lo) = mid;
  }
  Vec3 x{2.0, 0.0, 0.0};
  REQUIRE(newton_project(surface, x));
  CHECK(std::abs(x.x - 0.5 * (lo + hi)) < 1e-12);
  CHECK(std::abs(x.y) < 1e-15);
  CHECK(std::abs(x.z) < 1e-15);
}

TEST_CASE("disk boundary flags mark exactly the rim vertices") {
  for (int l = 0; l <= 3; ++l) {
    const auto mesh = generate_disk(l, 1.5, 2.0 * kPi);
    CHECK(check_manifold(mesh).ok());
    CHECK(euler_characteristic(mesh) == 1);
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      const auto& x = mesh.vertices()[v];
      CHECK(x.z == 0.0);
      const bool rim = std::abs(std::hypot(x.x, x.y) - 1.5) < 1e-12;
      CHECK(mesh.is_boundary(v) == rim);
    }
  }
}

TEST_CASE("sector boundary consists of the arc and two straight edges") {
  const double angle = 2.0 * kPi / 3.0;
  const auto mesh = generate_disk(3, 1.0, angle);
  const Vec3 edge2{std::cos(angle), std::sin(angle), 0.0};
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const auto& x = mesh.vertices()[v];
    const double r = std::hypot(x.x, x.y);
    const bool on_arc = std::abs(r - 1.0) < 1e-12;
    const bool on_first = std::abs(x.y) < 1e-12 && x.x >= -1e-12;
    const bool on_second = std::abs(norm(cross(x, edge2))) < 1e-12 && dot(x, edge2) >= -1e-12;
    CHECK(mesh.is_boundary(v) == (on_arc || on_first || on_second));
    CHECK(std::atan2(x.y, x.x) >= -1e-12);
    CHECK(std::atan2(x.y, x.x) <= angle + 1e-12);
  }
  const double exact = 0.5 * angle;
  CHECK(std::abs(generate_disk(5, 1.0, angle).total_area() - exact) / exact < 5e-3);
}

TEST_CASE("disk area error decays at second order") {
  std::vector<double> err;
  for (int l = 2; l <= 5; ++l) err.push_back(std::abs(generate_disk(l, 1.0, 2.0 * kPi).total_area() - kPi));
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double rate = std::log2(err[i - 1] / err[i]);
    CHECK(rate > 1.7);
    CHECK(rate < 2.3);
  }
}

TEST_CASE("refinement quadruples triangles and records a prolongation map") {
  const auto parent = generate_icosphere(1);
  const auto [child, map] = refine(parent);
  CHECK(child.num_triangles() == 4 * parent.num_triangles());
  CHECK(child.num_vertices() == parent.num_vertices() + check_manifold(parent).num_edges());
  CHECK(child.num_vertices() == generate_icosphere(2).num_vertices());
  CHECK(map.parent == parent.id());
  CHECK(map.child == child.id());
  REQUIRE(map.sources.size() == child.num_vertices());

  std::set<std::pair<Index, Index>> parent_edges;
  for (const auto& t : parent.triangles())
    for (int k = 0; k < 3; ++k) parent_edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
  std::size_t copies = 0;
  for (std::size_t v = 0; v < map.sources.size(); ++v) {
    const auto s = map.sources[v];
    if (s.is_copy()) {
      ++copies;
      CHECK(child.vertices()[v] == parent.vertices()[s.a]);
    } else {
      CHECK(parent_edges.count(std::minmax(s.a, s.b)) == 1);
      const Vec3 mid = normalized(0.5 * (parent.vertices()[s.a] + parent.vertices()[s.b]));
      CHECK(norm(child.vertices()[v] - mid) < 1e-14);
    }
  }
  CHECK(copies == parent.num_vertices());
  CHECK(check_manifold(child).ok());
  CHECK(check_manifold(child).inconsistent_edges == 0);
}

TEST_CASE("refinement roughly halves the mesh size") {
  auto mesh = generate_icosphere(1);
  for (int l = 0; l < 4; ++l) {
    auto next = refine(mesh).mesh;
    const double ratio = next.h() / mesh.h();
    CHECK(ratio > 0.45);
    CHECK(ratio < 0.75);
    mesh = std::move(next);
  }
  auto torus = generate_torus(1.0, 0.6, 16, 8);
  auto finer = refine(torus).mesh;
  CHECK(finer.h() / torus.h() == doctest::Approx(0.5).epsilon(0.05));
  for (const auto& x : finer.vertices())
    CHECK(std::abs(std::hypot(std::hypot(x.x, x.y) - 1.0, x.z) - 0.6) < 1e-12);
}

TEST_CASE("distinct meshes carry distinct ids") {
  const auto a = generate_icosphere(2), b = generate_icosphere(2);
  CHECK(a.id() != b.id());
}

TEST_CASE("vertex neighbours are symmetric") {
  const auto mesh = generate_torus(1.0, 0.6, 12, 6);
  const auto nb = vertex_neighbors(mesh);
  for (std::size_t v = 0; v < nb.size(); ++v) {
    CHECK(std::is_sorted(nb[v].begin(), nb[v].end()));
    CHECK(nb[v].size() == 6);
    for (auto w : nb[v]) CHECK(std::binary_search(nb[w].begin(), nb[w].end(), static_cast<Index>(v)));
  }
}
