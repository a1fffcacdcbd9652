#include "surfpart/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <variant>

#include "surfpart/error.hpp"

namespace surfpart {

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

const VtkScalars* VtkDocument::find_point_data(const std::string& name) const {
  for (const auto& s : point_data)
    if (s.name == name) return &s;
  return nullptr;
}

const VtkScalars* VtkDocument::find_cell_data(const std::string& name) const {
  for (const auto& s : cell_data)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

void write_scalars(std::ostream& os, const std::vector<VtkScalars>& data) {
  for (const auto& s : data) {
    os << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : s.values) os << format_double(v) << '\n';
  }
}

// Whitespace-separated tokens tagged with their line number.
class Lexer {
 public:
  explicit Lexer(std::istream& is) : is_(is) {}

  std::size_t line() const { return line_; }

  bool read_line(std::string& out) {
    if (!std::getline(is_, out)) return false;
    ++line_;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    pending_.clear();
    pos_ = 0;
    return true;
  }

  bool next(std::string& tok) {
    for (;;) {
      while (pos_ < pending_.size() && std::isspace(static_cast<unsigned char>(pending_[pos_]))) ++pos_;
      if (pos_ < pending_.size()) {
        const std::size_t start = pos_;
        while (pos_ < pending_.size() && !std::isspace(static_cast<unsigned char>(pending_[pos_]))) ++pos_;
        tok = pending_.substr(start, pos_ - start);
        return true;
      }
      if (!std::getline(is_, pending_)) return false;
      ++line_;
      pos_ = 0;
    }
  }

  std::string expect(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(line_, std::string("unexpected end of file, expected ") + what);
    return tok;
  }

  void keyword(const std::string& word) {
    const auto tok = expect(word.c_str());
    if (tok != word) throw ParseError(line_, "expected " + word + ", found '" + tok + "'");
  }

  double real() {
    const auto tok = expect("a number");
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
      // from_chars rejects "inf"/"nan" spellings written by other tools.
      if (tok == "nan" || tok == "NaN") return std::nan("");
      if (tok == "inf" || tok == "Infinity") return INFINITY;
      if (tok == "-inf" || tok == "-Infinity") return -INFINITY;
      throw ParseError(line_, "malformed number '" + tok + "'");
    }
    return v;
  }

  std::size_t count() {
    const auto tok = expect("a count");
    std::size_t v = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
      throw ParseError(line_, "malformed integer '" + tok + "'");
    return v;
  }

 private:
  std::istream& is_;
  std::string pending_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

std::vector<VtkScalars> read_attributes(Lexer& lx, std::size_t n, std::string& tok, bool& more) {
  std::vector<VtkScalars> out;
  more = false;
  while (lx.next(tok)) {
    if (tok == "POINT_DATA" || tok == "CELL_DATA") {
      more = true;
      return out;
    }
    if (tok != "SCALARS") throw ParseError(lx.line(), "unsupported attribute '" + tok + "'");
    VtkScalars s;
    s.name = lx.expect("a name");
    lx.expect("a type");
    // Optional component count before LOOKUP_TABLE.
    std::string t = lx.expect("LOOKUP_TABLE");
    if (t != "LOOKUP_TABLE") {
      if (t != "1") throw ParseError(lx.line(), "only single-component scalars are supported");
      t = lx.expect("LOOKUP_TABLE");
      if (t != "LOOKUP_TABLE") throw ParseError(lx.line(), "expected LOOKUP_TABLE");
    }
    lx.expect("a table name");
    s.values.resize(n);
    for (auto& v : s.values) v = lx.real();
    out.push_back(std::move(s));
  }
  return out;
}

Triangle read_cell(Lexer& lx, std::size_t npoints) {
  if (lx.count() != 3) throw ParseError(lx.line(), "only triangle cells are supported");
  Triangle t{};
  for (auto& i : t) {
    const std::size_t v = lx.count();
    if (v >= npoints) throw ParseError(lx.line(), "point index out of range");
    i = static_cast<Index>(v);
  }
  return t;
}

std::map<std::string, std::string> title_fields(const std::string& title) {
  std::map<std::string, std::string> out;
  std::istringstream is(title);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

double field_number(const std::map<std::string, std::string>& f, const std::string& key) {
  const auto it = f.find(key);
  if (it == f.end()) throw ParseError(2, "title line lacks " + key);
  double v = 0.0;
  const auto& s = it->second;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParseError(2, "malformed value for " + key);
  return v;
}

}  // namespace

void write_vtk(std::ostream& os, const VtkDocument& doc) {
  os << "# vtk DataFile Version 3.0\n" << doc.title << "\nASCII\n";
  const bool poly = doc.dataset == VtkDataset::polydata;
  os << "DATASET " << (poly ? "POLYDATA" : "UNSTRUCTURED_GRID") << '\n';
  os << "POINTS " << doc.points.size() << " double\n";
  for (const auto& p : doc.points) os << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
  const std::size_t nt = doc.triangles.size();
  if (poly) {
    if (nt > 0) {
      os << "POLYGONS " << nt << ' ' << 4 * nt << '\n';
      for (const auto& t : doc.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    if (!doc.lines.empty()) {
      std::size_t size = 0;
      for (const auto& l : doc.lines) size += l.size() + 1;
      os << "LINES " << doc.lines.size() << ' ' << size << '\n';
      for (const auto& l : doc.lines) {
        os << l.size();
        for (Index i : l) os << ' ' << i;
        os << '\n';
      }
    }
  } else {
    os << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (const auto& t : doc.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << nt << '\n';
    for (std::size_t i = 0; i < nt; ++i) os << "5\n";
  }
  if (!doc.point_data.empty()) {
    os << "POINT_DATA " << doc.points.size() << '\n';
    write_scalars(os, doc.point_data);
  }
  if (!doc.cell_data.empty()) {
    os << "CELL_DATA " << nt + doc.lines.size() << '\n';
    write_scalars(os, doc.cell_data);
  }
}

VtkDocument read_vtk(std::istream& is) {
  Lexer lx(is);
  VtkDocument doc;
  std::string line;
  if (!lx.read_line(line) || line.rfind("# vtk DataFile Version", 0) != 0)
    throw ParseError(lx.line(), "missing '# vtk DataFile Version' header");
  if (!lx.read_line(doc.title)) throw ParseError(lx.line(), "missing title line");
  if (!lx.read_line(line) || line.find("ASCII") == std::string::npos)
    throw ParseError(lx.line(), "only ASCII files are supported");

  lx.keyword("DATASET");
  const auto kind = lx.expect("a dataset type");
  if (kind == "POLYDATA")
    doc.dataset = VtkDataset::polydata;
  else if (kind != "UNSTRUCTURED_GRID")
    throw ParseError(lx.line(), "unsupported dataset '" + kind + "'");

  lx.keyword("POINTS");
  const std::size_t np = lx.count();
  lx.expect("a point type");
  doc.points.resize(np);
  for (auto& p : doc.points) {
    p.x = lx.real();
    p.y = lx.real();
    p.z = lx.real();
  }

  std::string tok;
  bool have = lx.next(tok);
  while (have && tok != "POINT_DATA" && tok != "CELL_DATA") {
    if (tok == "CELLS" || tok == "POLYGONS") {
      const std::size_t nc = lx.count();
      lx.count();
      doc.triangles.reserve(nc);
      for (std::size_t i = 0; i < nc; ++i) doc.triangles.push_back(read_cell(lx, np));
    } else if (tok == "CELL_TYPES") {
      const std::size_t nc = lx.count();
      for (std::size_t i = 0; i < nc; ++i)
        if (lx.count() != 5) throw ParseError(lx.line(), "only VTK_TRIANGLE cells are supported");
    } else if (tok == "LINES") {
      const std::size_t nl = lx.count();
      lx.count();
      for (std::size_t i = 0; i < nl; ++i) {
        std::vector<Index> l(lx.count());
        for (auto& v : l) {
          const std::size_t k = lx.count();
          if (k >= np) throw ParseError(lx.line(), "point index out of range");
          v = static_cast<Index>(k);
        }
        doc.lines.push_back(std::move(l));
      }
    } else {
      throw ParseError(lx.line(), "unexpected token '" + tok + "'");
    }
    have = lx.next(tok);
  }
  while (have) {
    const bool point = tok == "POINT_DATA";
    const std::size_t n = lx.count();
    const std::size_t expected = point ? np : doc.triangles.size() + doc.lines.size();
    if (n != expected) throw ParseError(lx.line(), "attribute count does not match the dataset");
    bool more = false;
    auto data = read_attributes(lx, n, tok, more);
    auto& dst = point ? doc.point_data : doc.cell_data;
    for (auto& s : data) dst.push_back(std::move(s));
    have = more;
  }
  return doc;
}

VtkDocument mesh_document(const TriangulatedSurface& mesh) {
  VtkDocument doc;
  doc.title = "surfpart mesh " + geometry_tokens(mesh.geometry());
  doc.points = mesh.vertices();
  doc.triangles = mesh.triangles();
  if (mesh.has_boundary()) {
    VtkScalars b{"boundary", {}};
    for (auto f : mesh.boundary_flags()) b.values.push_back(f);
    doc.point_data.push_back(std::move(b));
  }
  return doc;
}

std::string geometry_tokens(const SurfaceGeometry& geometry) {
  struct Visitor {
    std::string operator()(const Sphere& s) const { return "surface=sphere radius=" + format_double(s.radius); }
    std::string operator()(const Torus& t) const {
      return "surface=torus major=" + format_double(t.major_radius) + " minor=" + format_double(t.minor_radius);
    }
    std::string operator()(const ImplicitSurface& s) const { return "surface=implicit name=" + s.name; }
    std::string operator()(const PlanarDisk& d) const {
      return "surface=disk radius=" + format_double(d.radius) + " angle=" + format_double(d.sector_angle);
    }
  };
  return std::visit(Visitor{}, geometry);
}

SurfaceGeometry parse_geometry(const std::string& title) {
  const auto f = title_fields(title);
  const auto it = f.find("surface");
  if (it == f.end()) throw ParseError(2, "title line lacks surface=");
  const auto& kind = it->second;
  if (kind == "sphere") return Sphere{field_number(f, "radius")};
  if (kind == "torus") return Torus{field_number(f, "major"), field_number(f, "minor")};
  if (kind == "disk") return PlanarDisk{field_number(f, "radius"), field_number(f, "angle")};
  if (kind == "implicit") {
    const auto n = f.find("name");
    if (n != f.end() && n->second == "dziuk") return dziuk_surface();
    throw ParseError(2, "unknown implicit surface");
  }
  throw ParseError(2, "unknown surface '" + kind + "'");
}

void write_snapshot(std::ostream& os, const TriangulatedSurface& mesh, const ComponentEnsemble& ensemble) {
  if (ensemble.mesh != mesh.id()) throw MeshMismatchError("ensemble does not live on this mesh");
  auto doc = mesh_document(mesh);
  doc.title = "surfpart snapshot m=" + std::to_string(ensemble.m()) + " epsilon=" + format_double(ensemble.epsilon) +
              " tau=" + format_double(ensemble.tau) + " step=" + std::to_string(ensemble.step) +
              " time=" + format_double(ensemble.time) + " " + geometry_tokens(mesh.geometry());
  for (std::size_t i = 0; i < ensemble.m(); ++i)
    doc.point_data.push_back({"u_" + std::to_string(i + 1), ensemble.components[i]});
  write_vtk(os, doc);
}

Snapshot read_snapshot(std::istream& is) {
  auto doc = read_vtk(is);
  const auto f = title_fields(doc.title);
  if (doc.title.rfind("surfpart snapshot", 0) != 0) throw ParseError(2, "not a surfpart snapshot");
  const auto geometry = parse_geometry(doc.title);
  const auto m = static_cast<std::size_t>(field_number(f, "m"));
  std::vector<std::uint8_t> boundary;
  if (const auto* b = doc.find_point_data("boundary"))
    for (double v : b->values) boundary.push_back(v != 0.0);
  Snapshot snap{TriangulatedSurface(std::move(doc.points), std::move(doc.triangles), geometry, std::move(boundary)), {}};
  auto& e = snap.ensemble;
  e.mesh = snap.mesh.id();
  e.epsilon = field_number(f, "epsilon");
  e.tau = field_number(f, "tau");
  e.step = static_cast<std::int64_t>(field_number(f, "step"));
  e.time = field_number(f, "time");
  for (std::size_t i = 0; i < m; ++i) {
    const auto* s = doc.find_point_data("u_" + std::to_string(i + 1));
    if (!s) throw ParseError(2, "snapshot lacks field u_" + std::to_string(i + 1));
    e.components.push_back(s->values);
  }
  return snap;
}

void write_trace_header(std::ostream& os, std::size_t m) {
  os << "level,epsilon,step,time,energy,energy_half,s_eps";
  for (std::size_t i = 1; i <= m; ++i) os << ",lambda_" << i;
  os << '\n';
}

void write_trace_rows(std::ostream& os, const EnergyTrace& trace, int level, double epsilon) {
  for (const auto& r : trace.records) {
    os << level << ',' << format_double(epsilon) << ',' << r.step << ',' << format_double(r.time) << ','
       << format_double(r.report.energy) << ',' << format_double(r.report.energy_half) << ','
       << format_double(r.report.s_eps);
    for (double l : r.report.lambda) os << ',' << format_double(l);
    os << '\n';
  }
}

}  // namespace surfpart
