#include "viewplan/geom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace viewplan::geom {

namespace {

double segment_distance(const Point2& q, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (q - a).norm();
  const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
  return (q - (a + t * ab)).norm();
}

double heading_of(const Point2& from, const Point2& to) {
  return wrap_2pi(std::atan2(to.y() - from.y(), to.x() - from.x()));
}

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Polygon2 reversed(const Polygon2& p) { return Polygon2(p.rbegin(), p.rend()); }

bool point_in_polygon(const Point2& q, const Polygon2& poly) {
  bool inside = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (q.x() < x) inside = !inside;
    }
  }
  return inside;
}

double distance_to_boundary(const Point2& q, const Polygon2& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i)
    best = std::min(best, segment_distance(q, poly[i], poly[(i + 1) % n]));
  return best;
}

bool strictly_inside(const Point2& q, const Polygon2& poly, double tol) {
  return point_in_polygon(q, poly) && distance_to_boundary(q, poly) > tol;
}

std::vector<PerimeterSample> perimeter_samples(std::span<const Polygon2> loops, std::size_t n) {
  if (n == 0) throw GeometryError("uniform_perimeter_points: n must be at least 1");
  if (loops.empty()) throw GeometryError("uniform_perimeter_points: no polygon given");

  struct Edge {
    std::size_t loop, index;
    Point2 a, b;
    double start;  // cumulative arc length at a
    double length;
  };
  std::vector<Edge> edges;
  double total = 0.0;
  for (std::size_t l = 0; l < loops.size(); ++l) {
    const Polygon2& p = loops[l];
    if (p.size() < 3) throw GeometryError("uniform_perimeter_points: polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Point2& a = p[i];
      const Point2& b = p[(i + 1) % p.size()];
      const double len = (b - a).norm();
      edges.push_back({l, i, a, b, total, len});
      total += len;
    }
  }
  if (!(total > 0.0)) throw GeometryError("uniform_perimeter_points: zero perimeter");

  const double spacing = total / static_cast<double>(n);
  const double snap = 1e-12 * total;
  std::vector<PerimeterSample> out;
  out.reserve(n);
  std::size_t e = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = spacing * static_cast<double>(k);
    // advance to the edge with start <= s < start + length; landing on a vertex picks the
    // outgoing edge
    while (e + 1 < edges.size() &&
           (edges[e].length == 0.0 || s >= edges[e].start + edges[e].length - snap))
      ++e;
    const Edge& edge = edges[e];
    const double t = edge.length > 0.0 ? std::clamp((s - edge.start) / edge.length, 0.0, 1.0) : 0.0;
    PerimeterSample sample;
    sample.point = t == 0.0 ? edge.a : Point2(edge.a + t * (edge.b - edge.a));
    sample.tangent = heading_of(edge.a, edge.b);
    sample.loop = edge.loop;
    sample.edge = edge.index;
    out.push_back(sample);
  }
  return out;
}

std::vector<Point2> uniform_perimeter_points(std::span<const Polygon2> loops, std::size_t n) {
  std::vector<Point2> pts;
  for (const auto& s : perimeter_samples(loops, n)) pts.push_back(s.point);
  return pts;
}

std::vector<Point2> uniform_perimeter_points(const Polygon2& poly, std::size_t n) {
  return uniform_perimeter_points(std::span<const Polygon2>(&poly, 1), n);
}

double tangent_angle(const Point2& lambda, std::span<const Polygon2> loops, double tol) {
  // vertex hits take priority so the outgoing edge wins the tie
  for (const Polygon2& p : loops)
    for (std::size_t i = 0; i < p.size(); ++i)
      if ((p[i] - lambda).norm() <= tol) return heading_of(p[i], p[(i + 1) % p.size()]);

  double best = std::numeric_limits<double>::infinity();
  double heading = 0.0;
  for (const Polygon2& p : loops) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Point2& a = p[i];
      const Point2& b = p[(i + 1) % p.size()];
      const double d = segment_distance(lambda, a, b);
      if (d < best) {
        best = d;
        heading = heading_of(a, b);
      }
    }
  }
  if (best > tol) {
    std::ostringstream msg;
    msg << "tangent_angle: point is " << best << " m from the polygon boundary";
    throw GeometryError(msg.str());
  }
  return heading;
}

double tangent_angle(const Point2& lambda, const Polygon2& poly, double tol) {
  return tangent_angle(lambda, std::span<const Polygon2>(&poly, 1), tol);
}

// ---------------------------------------------------------------------------

TriMesh make_mesh(const std::vector<Point3>& vertices, const std::vector<std::array<int, 3>>& faces) {
  TriMesh m;
  m.vertices.resize(static_cast<Eigen::Index>(vertices.size()), 3);
  for (std::size_t i = 0; i < vertices.size(); ++i) m.vertices.row(static_cast<Eigen::Index>(i)) = vertices[i];
  m.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int v = faces[f][k];
      if (v < 0 || v >= static_cast<int>(vertices.size()))
        throw GeometryError("make_mesh: face references a missing vertex");
      m.faces(static_cast<Eigen::Index>(f), k) = v;
    }
  }
  compute_normals(m);
  return m;
}

void compute_normals(TriMesh& mesh) {
  mesh.normals.resize(mesh.faces.rows(), 3);
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    const Point3 a = mesh.corner(f, 0), b = mesh.corner(f, 1), c = mesh.corner(f, 2);
    const Point3 n = (b - a).cross(c - a);
    const double len = n.norm();
    mesh.normals.row(f) = len > 0.0 ? Point3(n / len) : Point3::Zero();
  }
}

double element_area(const TriMesh& mesh, Eigen::Index face) {
  return element_area(mesh.corner(face, 0), mesh.corner(face, 1), mesh.corner(face, 2));
}

Eigen::VectorXd element_areas(const TriMesh& mesh) {
  Eigen::VectorXd a(mesh.faces.rows());
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) a(f) = element_area(mesh, f);
  return a;
}

double surface_area(const TriMesh& mesh) { return element_areas(mesh).sum(); }

double mesh_volume(const TriMesh& mesh) {
  double six = 0.0;
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f)
    six += mesh.corner(f, 0).dot(mesh.corner(f, 1).cross(mesh.corner(f, 2)));
  return six / 6.0;
}

std::pair<double, double> mesh_z_extent(const TriMesh& mesh) {
  if (mesh.vertices.rows() == 0) throw GeometryError("mesh_z_extent: empty mesh");
  return {mesh.vertices.col(2).minCoeff(), mesh.vertices.col(2).maxCoeff()};
}

std::pair<Point3, Point3> mesh_bounds(const TriMesh& mesh) {
  if (mesh.vertices.rows() == 0) throw GeometryError("mesh_bounds: empty mesh");
  return {mesh.vertices.colwise().minCoeff().transpose(), mesh.vertices.colwise().maxCoeff().transpose()};
}

std::vector<Polygon2> slice_mesh(const TriMesh& mesh, double z) {
  if (mesh.faces.rows() == 0) return {};
  const auto [zlo, zhi] = mesh_z_extent(mesh);
  const double range = std::max(zhi - zlo, 1e-12);
  if (z < zlo || z > zhi) return {};

  const auto zcol = mesh.vertices.col(2);
  const double coincide = 1e-9 * range;
  // planes through vertices are nudged towards the middle of the mesh
  const double nudge = (z > 0.5 * (zlo + zhi) ? -1e-7 : 1e-7) * range;
  for (int guard = 0; guard < 100; ++guard) {
    if (((zcol.array() - z).abs() <= coincide).any())
      z += nudge;
    else
      break;
  }

  struct Segment {
    std::uint64_t from_key, to_key;
    Point2 from;
  };
  auto crossing = [&](int a, int b) {
    const Point3 pa = mesh.vertices.row(a).transpose();
    const Point3 pb = mesh.vertices.row(b).transpose();
    const double t = (z - pa.z()) / (pb.z() - pa.z());
    return Point2(pa.x() + t * (pb.x() - pa.x()), pa.y() + t * (pb.y() - pa.y()));
  };

  std::unordered_map<std::uint64_t, Segment> by_start;
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    const int v[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    const bool up[3] = {zcol(v[0]) > z, zcol(v[1]) > z, zcol(v[2]) > z};
    const int count = up[0] + up[1] + up[2];
    if (count == 0 || count == 3) continue;
    // lone vertex: the one on its own side of the plane
    int i = 0;
    for (int k = 0; k < 3; ++k)
      if ((count == 1 && up[k]) || (count == 2 && !up[k])) i = k;
    const int vi = v[i], vn = v[(i + 1) % 3], vp = v[(i + 2) % 3];
    // with outward winding, the cut runs from edge (vi,vn) to edge (vp,vi) when the lone
    // vertex is above, and the other way round when it is below
    std::uint64_t k1 = edge_key(vi, vn), k2 = edge_key(vp, vi);
    Point2 p1 = crossing(vi, vn), p2 = crossing(vp, vi);
    if (count == 2) {
      std::swap(k1, k2);
      std::swap(p1, p2);
    }
    if (!by_start.emplace(k1, Segment{k1, k2, p1}).second)
      throw GeometryError("slice_mesh: mesh is not a closed manifold (edge crossed twice)");
  }

  std::vector<Polygon2> loops;
  while (!by_start.empty()) {
    // start every loop at its smallest edge key so the output does not depend on hash order
    std::uint64_t first = by_start.begin()->first;
    for (const auto& [k, seg] : by_start) first = std::min(first, k);
    Polygon2 loop;
    std::uint64_t key = first;
    for (;;) {
      auto cur = by_start.find(key);
      if (cur == by_start.end()) throw GeometryError("slice_mesh: open cross-section loop (non-manifold mesh)");
      loop.push_back(cur->second.from);
      key = cur->second.to_key;
      by_start.erase(cur);
      if (key == first) break;
    }
    // drop coincident consecutive points left by faces that touch the plane at a vertex
    Polygon2 clean;
    const double merge = 1e-9 * range;
    for (const Point2& p : loop)
      if (clean.empty() || (p - clean.back()).norm() > merge) clean.push_back(p);
    while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= merge) clean.pop_back();
    if (clean.size() >= 3) loops.push_back(std::move(clean));
  }
  return loops;
}

double slice_area(const TriMesh& mesh, double z) {
  double a = 0.0;
  for (const auto& p : slice_mesh(mesh, z)) a += polygon_area(p);
  return a;
}

double slice_perimeter(const TriMesh& mesh, double z) {
  double s = 0.0;
  for (const auto& p : slice_mesh(mesh, z)) s += polygon_perimeter(p);
  return s;
}

MeshTopology analyze_topology(const TriMesh& mesh) {
  MeshTopology topo;
  const auto nf = mesh.faces.rows();
  // directed half-edge counts: a closed, consistently wound manifold uses each directed edge
  // once and its reverse once
  std::unordered_map<std::uint64_t, std::pair<int, int>> edges;  // key -> (forward, backward)
  for (Eigen::Index f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.faces(f, k), b = mesh.faces(f, (k + 1) % 3);
      auto& e = edges[edge_key(a, b)];
      (a < b ? e.first : e.second)++;
    }
  }
  topo.closed_manifold = nf > 0;
  for (const auto& [key, use] : edges)
    if (use.first != 1 || use.second != 1) topo.closed_manifold = false;

  UnionFind uf(static_cast<std::size_t>(mesh.vertices.rows()));
  std::vector<char> used(static_cast<std::size_t>(mesh.vertices.rows()), 0);
  for (Eigen::Index f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) used[mesh.faces(f, k)] = 1;
    uf.unite(mesh.faces(f, 0), mesh.faces(f, 1));
    uf.unite(mesh.faces(f, 0), mesh.faces(f, 2));
  }
  std::unordered_map<int, std::size_t> comp_index;
  std::vector<long> v_count, e_count, f_count;
  auto comp_of = [&](int v) {
    const int root = uf.find(v);
    auto [it, inserted] = comp_index.emplace(root, comp_index.size());
    if (inserted) {
      v_count.push_back(0);
      e_count.push_back(0);
      f_count.push_back(0);
    }
    return it->second;
  };
  for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v)
    if (used[v]) v_count[comp_of(static_cast<int>(v))]++;
  for (const auto& [key, use] : edges) e_count[comp_of(static_cast<int>(key & 0xffffffffu))]++;
  for (Eigen::Index f = 0; f < nf; ++f) f_count[comp_of(mesh.faces(f, 0))]++;
  topo.components = comp_index.size();
  for (std::size_t c = 0; c < topo.components; ++c)
    topo.euler_characteristic.push_back(v_count[c] - e_count[c] + f_count[c]);
  return topo;
}

// ---------------------------------------------------------------------------

InsideTester::InsideTester(const TriMesh& mesh, int grid) : mesh_(&mesh) {
  if (mesh.empty()) throw GeometryError("InsideTester: empty mesh");
  const auto [lo, hi] = mesh_bounds(mesh);
  lo_ = lo.head<2>();
  nx_ = ny_ = std::max(1, grid);
  cell_ = ((hi.head<2>() - lo_).array().max(1e-9) / double(grid)).matrix();
  buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    Eigen::Vector2d fmin = mesh.corner(f, 0).head<2>(), fmax = fmin;
    for (int k = 1; k < 3; ++k) {
      fmin = fmin.cwiseMin(mesh.corner(f, k).head<2>());
      fmax = fmax.cwiseMax(mesh.corner(f, k).head<2>());
    }
    const int i0 = std::clamp(int((fmin.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
    const int i1 = std::clamp(int((fmax.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
    const int j0 = std::clamp(int((fmin.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
    const int j1 = std::clamp(int((fmax.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(i * ny_ + j)].push_back(static_cast<int>(f));
  }
}

bool InsideTester::contains(const Point3& p) const {
  const double fx = (p.x() - lo_.x()) / cell_.x();
  const double fy = (p.y() - lo_.y()) / cell_.y();
  if (fx < 0 || fy < 0 || fx > nx_ || fy > ny_) return false;
  const int i = std::min(int(fx), nx_ - 1), j = std::min(int(fy), ny_ - 1);
  const Point2 q = p.head<2>();
  // Side of q relative to the directed edge u->v, evaluated in a vertex-order independent
  // way so that two faces sharing an edge see exactly opposite values. Points on an edge
  // belong to the face on one fixed side, so a ray through a shared edge is counted once.
  auto side = [&](int u, int v) {
    const bool flip = u > v;
    const int lo = flip ? v : u, hi = flip ? u : v;
    const Point2 a = mesh_->vertices.row(lo).head<2>().transpose(), b = mesh_->vertices.row(hi).head<2>().transpose();
    const Point2 d = b - a;
    double e = d.x() * (q.y() - a.y()) - d.y() * (q.x() - a.x());
    bool owned = d.y() < 0.0 || (d.y() == 0.0 && d.x() < 0.0);
    if (flip) e = -e, owned = !owned;
    return e > 0.0 || (e == 0.0 && owned);
  };
  int hits = 0;
  for (int f : buckets_[static_cast<std::size_t>(i * ny_ + j)]) {
    int v0 = mesh_->faces(f, 0), v1 = mesh_->faces(f, 1), v2 = mesh_->faces(f, 2);
    const Point3 a = mesh_->vertices.row(v0).transpose(), b = mesh_->vertices.row(v1).transpose(),
                 c = mesh_->vertices.row(v2).transpose();
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    if (det == 0.0) continue;
    if (det < 0.0) std::swap(v1, v2);
    if (!side(v0, v1) || !side(v1, v2) || !side(v2, v0)) continue;
    // vertical ray towards +z
    const double u = ((q.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (q.y() - a.y())) / det;
    const double w = ((b.x() - a.x()) * (q.y() - a.y()) - (q.x() - a.x()) * (b.y() - a.y())) / det;
    const double zhit = a.z() + u * (b.z() - a.z()) + w * (c.z() - a.z());
    if (zhit > p.z()) ++hits;
  }
  return hits % 2 == 1;
}

// ---------------------------------------------------------------------------

void write_obj(std::ostream& os, const TriMesh& mesh) {
  os << std::setprecision(10);
  for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v)
    os << "v " << mesh.vertices(v, 0) << ' ' << mesh.vertices(v, 1) << ' ' << mesh.vertices(v, 2) << '\n';
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f)
    os << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' ' << mesh.faces(f, 2) + 1 << '\n';
}

void write_obj(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_obj(out, mesh);
  if (!out) throw IoError("failed writing " + path);
}

TriMesh read_obj(std::istream& is) {
  std::vector<Point3> verts;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Point3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw IoError("OBJ line " + std::to_string(lineno) + ": bad vertex");
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        int i = 0;
        try {
          i = std::stoi(tok.substr(0, tok.find('/')));
        } catch (const std::exception&) {
          throw IoError("OBJ line " + std::to_string(lineno) + ": bad face index '" + tok + "'");
        }
        const int k = i > 0 ? i - 1 : static_cast<int>(verts.size()) + i;
        if (k < 0 || k >= static_cast<int>(verts.size()))
          throw IoError("OBJ line " + std::to_string(lineno) + ": face index out of range");
        idx.push_back(k);
      }
      if (idx.size() != 3) throw IoError("OBJ line " + std::to_string(lineno) + ": only triangles are supported");
      faces.push_back({idx[0], idx[1], idx[2]});
    }
  }
  return make_mesh(verts, faces);
}

TriMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_obj(in);
}

TriMesh box_mesh(const Point3& lo, const Point3& hi) {
  std::vector<Point3> v;
  for (int k = 0; k < 8; ++k)
    v.emplace_back(k & 1 ? hi.x() : lo.x(), k & 2 ? hi.y() : lo.y(), k & 4 ? hi.z() : lo.z());
  const std::vector<std::array<int, 3>> f = {
      {0, 2, 1}, {1, 2, 3},  // z = lo
      {4, 5, 6}, {5, 7, 6},  // z = hi
      {0, 1, 4}, {1, 5, 4},  // y = lo
      {2, 6, 3}, {3, 6, 7},  // y = hi
      {0, 4, 2}, {2, 4, 6},  // x = lo
      {1, 3, 5}, {3, 7, 5},  // x = hi
  };
  return make_mesh(v, f);
}

}  // namespace viewplan::geom
