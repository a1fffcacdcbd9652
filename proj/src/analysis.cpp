#include "surfpart/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "surfpart/error.hpp"

namespace surfpart {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Edges in first-appearance order with up to two incident triangles.
struct EdgeTable {
  std::vector<std::array<Index, 2>> ends;
  std::vector<std::array<std::int64_t, 2>> tris;
  std::vector<std::array<std::size_t, 3>> of_triangle;  // local edge k is opposite vertex k

  explicit EdgeTable(const TriangulatedSurface& mesh) {
    std::unordered_map<std::uint64_t, std::size_t> id;
    id.reserve(mesh.num_triangles() * 2);
    of_triangle.resize(mesh.num_triangles());
    const auto& tri = mesh.triangles();
    for (std::size_t t = 0; t < tri.size(); ++t)
      for (int k = 0; k < 3; ++k) {
        const Index a = tri[t][(k + 1) % 3], b = tri[t][(k + 2) % 3];
        auto [it, fresh] = id.try_emplace(edge_key(a, b), ends.size());
        if (fresh) {
          ends.push_back({std::min(a, b), std::max(a, b)});
          tris.push_back({static_cast<std::int64_t>(t), -1});
        } else {
          tris[it->second][1] = static_cast<std::int64_t>(t);
        }
        of_triangle[t][k] = it->second;
      }
  }
  std::size_t size() const { return ends.size(); }
};

Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a * (1.0 - t) + b * t; }

Vec3 centroid(const TriangulatedSurface& mesh, std::size_t t) {
  const auto& x = mesh.vertices();
  const auto& tr = mesh.triangles()[t];
  return (x[tr[0]] + x[tr[1]] + x[tr[2]]) * (1.0 / 3.0);
}

// Area of the part of a triangle where the linear interpolant is positive.
double clipped_area(double area, std::array<double, 3> v) {
  int pos = 0;
  for (double s : v) pos += s > 0.0;
  if (pos == 0) return 0.0;
  if (pos == 3) return area;
  if (pos == 1) {
    const int k = v[0] > 0.0 ? 0 : (v[1] > 0.0 ? 1 : 2);
    const double a = v[k], b = v[(k + 1) % 3], c = v[(k + 2) % 3];
    return area * (a / (a - b)) * (a / (a - c));
  }
  const int k = v[0] <= 0.0 ? 0 : (v[1] <= 0.0 ? 1 : 2);
  const double a = v[k], b = v[(k + 1) % 3], c = v[(k + 2) % 3];
  if (a == 0.0) return area;
  return area * (1.0 - (a / (a - b)) * (a / (a - c)));
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Arc {
  std::size_t from = kNone;  // junction triangle slot, kNone for loops
  std::size_t to = kNone;
  int a = 0, b = 0;
  double length = 0.0;
};

// Interface network of a complete labelling: junction triangles carry
// three labels, arcs run through two-label triangles.
struct InterfaceGraph {
  std::vector<std::size_t> junction_triangles;
  std::vector<Arc> arcs;
};

InterfaceGraph trace_interfaces(const TriangulatedSurface& mesh, const EdgeTable& edges,
                                const std::vector<int>& label) {
  const auto& x = mesh.vertices();
  const auto& tri = mesh.triangles();
  const std::size_t nt = tri.size();

  auto mixed = [&](std::size_t e) { return label[edges.ends[e][0]] != label[edges.ends[e][1]]; };
  auto distinct = [&](std::size_t t) {
    const int a = label[tri[t][0]], b = label[tri[t][1]], c = label[tri[t][2]];
    return 1 + (b != a) + (c != a && c != b);
  };
  auto midpoint = [&](std::size_t e) { return (x[edges.ends[e][0]] + x[edges.ends[e][1]]) * 0.5; };

  InterfaceGraph g;
  std::vector<std::size_t> slot(nt, kNone);
  for (std::size_t t = 0; t < nt; ++t)
    if (distinct(t) == 3) {
      slot[t] = g.junction_triangles.size();
      g.junction_triangles.push_back(t);
    }

  std::vector<std::uint8_t> seen(edges.size(), 0);

  // From mixed edge e entered from triangle `from`, walk until a junction
  // triangle or the mesh boundary.
  auto walk = [&](std::size_t e, std::int64_t from, Arc& arc, Vec3 last) {
    for (;;) {
      seen[e] = 1;
      const Vec3 here = midpoint(e);
      arc.length += norm(here - last);
      last = here;
      const auto& ts = edges.tris[e];
      const std::int64_t next = ts[0] == from ? ts[1] : ts[0];
      if (next < 0) return;  // boundary of an open mesh
      const auto t = static_cast<std::size_t>(next);
      if (slot[t] != kNone) {
        arc.to = slot[t];
        arc.length += norm(centroid(mesh, t) - last);
        return;
      }
      std::size_t e2 = kNone;
      for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t f = edges.of_triangle[t][k];
        if (f != e && mixed(f)) e2 = f;
      }
      if (e2 == kNone || seen[e2]) return;  // closed back on itself
      e = e2;
      from = next;
    }
  };

  for (std::size_t j = 0; j < g.junction_triangles.size(); ++j) {
    const std::size_t t = g.junction_triangles[j];
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t e = edges.of_triangle[t][k];
      if (seen[e]) continue;
      Arc arc;
      arc.from = j;
      arc.a = std::min(label[edges.ends[e][0]], label[edges.ends[e][1]]);
      arc.b = std::max(label[edges.ends[e][0]], label[edges.ends[e][1]]);
      walk(e, static_cast<std::int64_t>(t), arc, centroid(mesh, t));
      g.arcs.push_back(arc);
    }
  }
  // Whatever remains forms closed loops free of junctions.
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (seen[e] || !mixed(e)) continue;
    Arc arc;
    arc.a = std::min(label[edges.ends[e][0]], label[edges.ends[e][1]]);
    arc.b = std::max(label[edges.ends[e][0]], label[edges.ends[e][1]]);
    walk(e, edges.tris[e][1], arc, midpoint(e));
    g.arcs.push_back(arc);
  }
  return g;
}

struct DualResult {
  DualStats stats;
  std::vector<Junction> junctions;
};

DualResult build_dual(const TriangulatedSurface& mesh, const InterfaceGraph& g, const std::vector<int>& label,
                      std::size_t m, double merge_length) {
  const std::size_t nj = g.junction_triangles.size();
  UnionFind uf(nj);
  std::vector<std::uint8_t> internal(g.arcs.size(), 0);
  for (std::size_t i = 0; i < g.arcs.size(); ++i) {
    const Arc& a = g.arcs[i];
    if (a.from != kNone && a.to != kNone && a.length < merge_length) {
      uf.join(a.from, a.to);
      internal[i] = 1;
    }
  }

  // Cluster-level multigraph; arc endpoints are cluster roots (kNone for
  // loops and boundary ends).
  struct Edge {
    std::size_t u, v;
    int a, b;
    bool alive;
  };
  std::vector<Edge> es;
  for (std::size_t i = 0; i < g.arcs.size(); ++i) {
    if (internal[i]) continue;
    const Arc& a = g.arcs[i];
    es.push_back({a.from == kNone ? kNone : uf.find(a.from), a.to == kNone ? kNone : uf.find(a.to), a.a, a.b, true});
  }
  auto incidences = [&](std::size_t c) {
    std::vector<std::pair<std::size_t, int>> out;  // edge, end (0 = u, 1 = v)
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (!es[i].alive) continue;
      if (es[i].u == c) out.push_back({i, 0});
      if (es[i].v == c) out.push_back({i, 1});
    }
    return out;
  };

  std::vector<std::size_t> roots;
  for (std::size_t j = 0; j < nj; ++j)
    if (uf.find(j) == j) roots.push_back(j);

  // A cluster touched by only two arc ends is a kink in one interface,
  // not a junction: splice the two arcs.
  std::vector<std::uint8_t> removed(nj, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t r : roots) {
      if (removed[r]) continue;
      const auto inc = incidences(r);
      if (inc.size() > 2 || inc.size() == 1) continue;
      removed[r] = 1;
      changed = true;
      if (inc.empty()) continue;
      auto [e1, end1] = inc[0];
      auto [e2, end2] = inc[1];
      if (e1 == e2) {  // the arc closes on itself
        es[e1].u = es[e1].v = kNone;
        continue;
      }
      const std::size_t other = end2 == 0 ? es[e2].v : es[e2].u;
      (end1 == 0 ? es[e1].u : es[e1].v) = other;
      es[e2].alive = false;
    }
  }

  DualResult out;
  auto& st = out.stats;
  st.edges.assign(m, 0);
  for (const auto& e : es) {
    if (!e.alive) continue;
    ++st.arcs;
    if (e.u == kNone && e.v == kNone) ++st.loops;
    if (e.a >= 0 && static_cast<std::size_t>(e.a) < m) ++st.edges[static_cast<std::size_t>(e.a)];
    if (e.b >= 0 && static_cast<std::size_t>(e.b) < m) ++st.edges[static_cast<std::size_t>(e.b)];
  }

  std::vector<std::vector<std::size_t>> members(nj);
  for (std::size_t j = 0; j < nj; ++j) members[uf.find(j)].push_back(j);
  const auto& tri = mesh.triangles();
  for (std::size_t r : roots) {
    if (removed[r]) continue;
    Junction jn;
    std::set<int> labels;
    Vec3 p{0, 0, 0};
    for (std::size_t j : members[r]) {
      const std::size_t t = g.junction_triangles[j];
      p = p + centroid(mesh, t);
      for (Index v : tri[t]) labels.insert(label[v]);
    }
    jn.position = p * (1.0 / static_cast<double>(members[r].size()));
    jn.labels.assign(labels.begin(), labels.end());
    jn.degree = static_cast<int>(incidences(r).size());
    jn.triangles = members[r].size();
    st.max_degree = std::max(st.max_degree, jn.degree);
    out.junctions.push_back(std::move(jn));
  }
  return out;
}

}  // namespace

std::vector<NodalField> signed_indicators(const ComponentEnsemble& ensemble) {
  const std::size_t m = ensemble.m(), n = ensemble.n();
  std::vector<double> total(n, 0.0);
  for (const auto& c : ensemble.components)
    for (std::size_t z = 0; z < n; ++z) total[z] += c[z];
  std::vector<NodalField> v(m);
  for (std::size_t i = 0; i < m; ++i) {
    v[i].mesh = ensemble.mesh;
    v[i].values.resize(n);
    const auto& u = ensemble.components[i];
    for (std::size_t z = 0; z < n; ++z) v[i].values[z] = u[z] - (total[z] - u[z]);
  }
  return v;
}

double Polyline::length() const {
  double s = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) s += norm(points[k].position - points[k - 1].position);
  if (closed && points.size() > 1) s += norm(points.front().position - points.back().position);
  return s;
}

std::vector<Polyline> zero_level_set(const TriangulatedSurface& mesh, std::span<const double> v) {
  if (v.size() != mesh.num_vertices()) throw DimensionError("field length differs from vertex count");
  const auto& x = mesh.vertices();
  const EdgeTable edges(mesh);
  const auto& tri = mesh.triangles();

  // Crossed edges become nodes, each crossed triangle a link between two.
  std::vector<std::size_t> node(edges.size(), kNone);
  std::vector<std::size_t> node_edge;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> links;  // (node, segment)
  std::size_t segments = 0;
  auto crossed = [&](std::size_t e) { return (v[edges.ends[e][0]] > 0.0) != (v[edges.ends[e][1]] > 0.0); };
  auto node_of = [&](std::size_t e) {
    if (node[e] == kNone) {
      node[e] = node_edge.size();
      node_edge.push_back(e);
      links.emplace_back();
    }
    return node[e];
  };
  for (std::size_t t = 0; t < tri.size(); ++t) {
    std::array<std::size_t, 2> ends{};
    int c = 0;
    for (int k = 0; k < 3; ++k)
      if (crossed(edges.of_triangle[t][k])) ends[c++] = edges.of_triangle[t][k];
    if (c != 2) continue;
    const std::size_t p = node_of(ends[0]), q = node_of(ends[1]);
    links[p].push_back({q, segments});
    links[q].push_back({p, segments});
    ++segments;
  }

  auto point = [&](std::size_t n) {
    const auto [a, b] = edges.ends[node_edge[n]];
    EdgePoint pt;
    pt.a = a;
    pt.b = b;
    pt.t = v[a] / (v[a] - v[b]);
    pt.position = lerp(x[a], x[b], pt.t);
    return pt;
  };

  std::vector<std::uint8_t> used(segments, 0), visited(node_edge.size(), 0);
  std::vector<Polyline> out;
  auto trace = [&](std::size_t start) {
    Polyline line;
    std::size_t cur = start;
    for (;;) {
      visited[cur] = 1;
      line.points.push_back(point(cur));
      std::size_t next = kNone;
      for (auto [nb, seg] : links[cur])
        if (!used[seg]) {
          used[seg] = 1;
          next = nb;
          break;
        }
      if (next == kNone) break;
      if (next == start) {
        line.closed = true;
        break;
      }
      cur = next;
    }
    out.push_back(std::move(line));
  };
  for (std::size_t n = 0; n < node_edge.size(); ++n)
    if (!visited[n] && links[n].size() == 1) trace(n);
  for (std::size_t n = 0; n < node_edge.size(); ++n)
    if (!visited[n]) trace(n);
  return out;
}

double positive_area(const TriangulatedSurface& mesh, std::span<const double> v) {
  if (v.size() != mesh.num_vertices()) throw DimensionError("field length differs from vertex count");
  double s = 0.0;
  const auto& tri = mesh.triangles();
  for (std::size_t t = 0; t < tri.size(); ++t)
    s += clipped_area(mesh.triangle_area(t), {v[tri[t][0]], v[tri[t][1]], v[tri[t][2]]});
  return s;
}

PartitionExtraction extract_partition(const ComponentEnsemble& ensemble, const TriangulatedSurface& mesh,
                                      const ExtractOptions& options) {
  if (ensemble.mesh != mesh.id()) throw MeshMismatchError("ensemble does not live on this mesh");
  const std::size_t m = ensemble.m(), n = mesh.num_vertices();
  if (ensemble.n() != n) throw DimensionError("component length differs from vertex count");

  PartitionExtraction out;
  out.indicators = signed_indicators(ensemble);
  out.labels.assign(n, kVoid);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& v = out.indicators[i].values;
    for (std::size_t z = 0; z < n; ++z)
      if (v[z] > 0.0) out.labels[z] = static_cast<int>(i);
  }
  out.boundary.resize(m);
  out.areas.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& v = out.indicators[i].values;
    out.boundary[i] = zero_level_set(mesh, v);
    out.areas[i] = positive_area(mesh, v);
    if (std::none_of(v.begin(), v.end(), [](double s) { return s > 0.0; })) out.empty_components.push_back(i);
  }

  // Topology is read from the argmax completion, which agrees with the
  // labels wherever they are defined and closes the void band.
  std::vector<int> complete(n, 0);
  for (std::size_t z = 0; z < n; ++z) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (ensemble.components[i][z] > ensemble.components[best][z]) best = i;
    complete[z] = static_cast<int>(best);
  }
  const EdgeTable edges(mesh);
  const auto graph = trace_interfaces(mesh, edges, complete);
  const double merge = options.merge_length > 0.0 ? options.merge_length : 3.0 * mesh.h();
  auto dual = build_dual(mesh, graph, complete, m, merge);
  out.dual = std::move(dual.stats);
  out.junctions = std::move(dual.junctions);
  for (std::size_t i = 0; i < m; ++i)
    if (std::find(out.empty_components.begin(), out.empty_components.end(), i) == out.empty_components.end())
      ++out.dual.counts[out.dual.edges[i]];
  return out;
}

std::vector<double> curvature_field(const TriangulatedSurface& mesh, std::span<const double> v,
                                    std::vector<std::uint8_t>* valid_out) {
  const std::size_t n = mesh.num_vertices();
  if (v.size() != n) throw DimensionError("field length differs from vertex count");
  const auto& x = mesh.vertices();
  const auto& tri = mesh.triangles();
  const std::size_t nt = tri.size();

  std::vector<std::array<Vec3, 3>> basis(nt);
  std::vector<double> area(nt);
  std::vector<Vec3> grad(n, Vec3{0, 0, 0}), normal(n, Vec3{0, 0, 0});
  std::vector<double> weight(n, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tr = tri[t];
    const Vec3 nrm = cross(x[tr[1]] - x[tr[0]], x[tr[2]] - x[tr[0]]);
    const double twice = norm(nrm);
    area[t] = 0.5 * twice;
    if (!(twice > 0.0)) throw AssemblyError(t, "degenerate triangle");
    const Vec3 unit = nrm * (1.0 / twice);
    Vec3 g{0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      basis[t][k] = cross(unit, x[tr[(k + 2) % 3]] - x[tr[(k + 1) % 3]]) * (1.0 / twice);
      g = g + basis[t][k] * v[tr[k]];
    }
    for (Index z : tr) {
      grad[z] = grad[z] + g * area[t];
      normal[z] = normal[z] + nrm;
      weight[z] += area[t];
    }
  }

  std::vector<std::uint8_t> ok(n, 0);
  for (std::size_t z = 0; z < n; ++z) {
    Vec3 g = grad[z] * (1.0 / weight[z]);
    const double nn = norm(normal[z]);
    if (nn > 0.0) {
      const Vec3 u = normal[z] * (1.0 / nn);
      g = g - u * dot(g, u);
    }
    const double len = norm(g);
    if (len >= 1e-10) {
      grad[z] = g * (1.0 / len);
      ok[z] = 1;
    }
  }

  std::vector<double> kappa(n, 0.0), wsum(n, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tr = tri[t];
    if (!ok[tr[0]] || !ok[tr[1]] || !ok[tr[2]]) continue;
    double div = 0.0;
    for (int k = 0; k < 3; ++k) div += dot(grad[tr[k]], basis[t][k]);
    for (Index z : tr) {
      kappa[z] += area[t] * div;
      wsum[z] += area[t];
    }
  }
  std::vector<std::uint8_t> valid(n, 0);
  for (std::size_t z = 0; z < n; ++z)
    if (wsum[z] > 0.0) {
      kappa[z] /= wsum[z];
      valid[z] = 1;
    }
  if (valid_out) *valid_out = std::move(valid);
  return kappa;
}

CurvatureSamples geodesic_curvature(const TriangulatedSurface& mesh, std::span<const double> v,
                                    std::span<const Polyline> curves, std::span<const Junction> junctions) {
  std::vector<std::uint8_t> valid;
  const auto kappa = curvature_field(mesh, v, &valid);
  CurvatureSamples out;
  for (const auto& line : curves) {
    double s = 0.0;
    for (std::size_t k = 0; k < line.points.size(); ++k) {
      const auto& p = line.points[k];
      if (k > 0) s += norm(p.position - line.points[k - 1].position);
      CurvatureSample c;
      c.position = p.position;
      c.arc_length = s;
      c.valid = valid[p.a] && valid[p.b];
      c.kappa = c.valid ? (1.0 - p.t) * kappa[p.a] + p.t * kappa[p.b] : 0.0;
      c.junction_distance = std::numeric_limits<double>::infinity();
      for (const auto& j : junctions) c.junction_distance = std::min(c.junction_distance, norm(p.position - j.position));
      if (!c.valid) ++out.invalid;
      out.samples.push_back(c);
    }
  }
  return out;
}

double CurvatureSamples::max_abs(double min_junction_distance) const {
  double r = 0.0;
  for (const auto& c : samples)
    if (c.valid && c.junction_distance >= min_junction_distance) r = std::max(r, std::abs(c.kappa));
  return r;
}

DualGraphReport dual_graph_check(const PartitionExtraction& extraction, int chi) {
  DualGraphReport r;
  std::ostringstream msg;
  if (extraction.dual.max_degree >= 4) {
    r.assumption_violated = true;
    msg << "assumption violated: junction of degree " << extraction.dual.max_degree;
    r.message = msg.str();
    return r;
  }
  r.rhs = 6 * chi;
  for (auto [k, count] : extraction.dual.counts) {
    if (k < 6) r.lhs += (6 - k) * count;
    if (k > 6) r.rhs += (k - 6) * count;
  }
  r.holds = r.lhs == r.rhs;
  msg << r.lhs << (r.holds ? " = " : " != ") << r.rhs;
  r.message = msg.str();
  return r;
}

std::vector<ClassStats> eigenvalue_stats(const ComponentEnsemble& ensemble, const CsrMatrix& stiffness,
                                         std::optional<std::vector<int>> classes) {
  const std::size_t m = ensemble.m();
  std::vector<int> keys = classes ? *classes : std::vector<int>(m, 0);
  if (keys.size() != m) throw DimensionError("one class key per component is required");
  std::map<int, ClassStats> groups;
  std::vector<double> lambda(m);
  for (std::size_t i = 0; i < m; ++i) {
    lambda[i] = quadratic_form(stiffness, ensemble.components[i]);
    auto& g = groups[keys[i]];
    g.key = keys[i];
    g.members.push_back(i);
  }
  std::vector<ClassStats> out;
  for (auto& [key, g] : groups) {
    double mean = 0.0;
    for (std::size_t i : g.members) mean += lambda[i];
    mean /= static_cast<double>(g.members.size());
    double var = 0.0;
    for (std::size_t i : g.members) var += (lambda[i] - mean) * (lambda[i] - mean);
    g.mean = mean;
    g.stddev = std::sqrt(var / static_cast<double>(g.members.size()));
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ClassStats> eigenvalue_stats(const ComponentEnsemble& ensemble, const CsrMatrix& stiffness,
                                         const PartitionExtraction& extraction) {
  return eigenvalue_stats(ensemble, stiffness, extraction.dual.edges);
}

}  // namespace surfpart
