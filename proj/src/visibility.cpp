#include "viewplan/visibility.hpp"

#include "viewplan/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <unordered_map>

namespace viewplan::visibility {

namespace {

double cross2(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::AlignedBox2d polygon_bounds(const Polygon2& poly) {
  Eigen::AlignedBox2d box;
  for (const auto& v : poly) box.extend(v);
  return box;
}

bool proper_crossing(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

Point2 area_centroid(const Polygon2& poly) {
  double a = 0;
  Point2 c = Point2::Zero();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    const double w = cross2(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

bool interiors_overlap(const Polygon2& a, const Polygon2& b) {
  constexpr double tol = 1e-9;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (proper_crossing(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return true;
  auto probes_inside = [&](const Polygon2& p, const Polygon2& q) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (geom::strictly_inside(p[i], q, tol)) return true;
      if (geom::strictly_inside(0.5 * (p[i] + p[(i + 1) % p.size()]), q, tol)) return true;
    }
    const Point2 c = area_centroid(p);
    return geom::strictly_inside(c, p, tol) && geom::strictly_inside(c, q, tol);
  };
  return probes_inside(a, b) || probes_inside(b, a);
}

/// Whether the open segment a->b passes through the interior of the prism.
bool segment_hits(const Point3& a, const Point3& b, const ExtrudedObject& obj, const Eigen::AlignedBox2d& box) {
  double t0 = kSegmentEndTolerance, t1 = 1.0 - kSegmentEndTolerance;
  const double dz = b.z() - a.z();
  if (std::abs(dz) < 1e-15) {
    if (!(a.z() > 0.0 && a.z() < obj.height)) return false;
  } else {
    double ta = -a.z() / dz, tb = (obj.height - a.z()) / dz;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 >= t1) return false;

  const Point3 d3 = b - a;
  const Point2 s0 = (a + t0 * d3).head<2>();
  const Point2 s1 = (a + t1 * d3).head<2>();
  const Eigen::AlignedBox2d seg(s0.cwiseMin(s1), s0.cwiseMax(s1));
  if (!seg.intersects(box)) return false;

  const Point2 d = s1 - s0;
  if (d.squaredNorm() < 1e-24) return geom::strictly_inside(s0, obj.footprint);

  // Split the planar shadow of the segment at every boundary crossing; each piece is then
  // entirely inside or outside and its midpoint decides.
  thread_local std::vector<double> cuts;
  cuts.assign({0.0, 1.0});
  const Polygon2& poly = obj.footprint;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2& q0 = poly[i];
    const Point2 e = poly[(i + 1) % n] - q0;
    const double denom = cross2(d, e);
    if (std::abs(denom) < 1e-18) continue;
    const Point2 w = q0 - s0;
    const double u = cross2(w, e) / denom;
    const double v = cross2(w, d) / denom;
    if (u > 0.0 && u < 1.0 && v >= -1e-12 && v <= 1.0 + 1e-12) cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] < 1e-12) continue;
    if (geom::strictly_inside(s0 + 0.5 * (cuts[k] + cuts[k + 1]) * d, poly)) return true;
  }
  return false;
}

bool blocked_by_any(const Point3& g, const Point3& p, std::span<const ExtrudedObject> objects) {
  for (const auto& obj : objects)
    if (segment_hits(g, p, obj, obj.bounds())) return true;
  return false;
}

}  // namespace

Eigen::AlignedBox2d ExtrudedObject::bounds() const { return polygon_bounds(footprint); }

double Environment::h_max() const {
  double h = 0.0;
  for (const auto& o : objects) h = std::max(h, o.height);
  return h;
}

void Environment::validate() const {
  if (region.size() < 3 || geom::polygon_area(region) <= 0.0)
    throw ValidationError("region", "region must be a counter-clockwise polygon with positive area");
  if (!(z_min < z_max))
    throw ValidationError("altitude band", "z_min must be below z_max");
  if (airspace_margin < 0.0 || 2.0 * airspace_margin >= z_max - z_min)
    throw ValidationError("airspace margin", "airspace margin must be non-negative and thinner than the altitude band");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string tag = "object " + std::to_string(i);
    if (o.footprint.size() < 3 || geom::polygon_area(o.footprint) <= 0.0)
      throw ValidationError("object footprint", tag + ": footprint must be counter-clockwise with positive area");
    if (!(o.height > 0.0)) throw ValidationError("object height", tag + ": height must be positive");
    for (const auto& v : o.footprint)
      if (!geom::point_in_polygon(v, region) && geom::distance_to_boundary(v, region) > 1e-9)
        throw ValidationError("object inside region", tag + ": footprint leaves the region");
  }
  for (std::size_t i = 0; i < objects.size(); ++i)
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      if (!objects[i].bounds().intersects(objects[j].bounds())) continue;
      if (interiors_overlap(objects[i].footprint, objects[j].footprint))
        throw ValidationError("disjoint footprints",
                              "objects " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }
}

bool Environment::in_airspace(const Point3& g) const {
  const double m = airspace_margin;
  if (g.z() < z_min + m || g.z() > z_max - m) return false;
  const Point2 xy = g.head<2>();
  if (!geom::point_in_polygon(xy, region)) return false;
  if (m > 0.0 && geom::distance_to_boundary(xy, region) < m) return false;
  for (const auto& o : objects) {
    if (g.z() >= o.height + m) continue;
    if (geom::point_in_polygon(xy, o.footprint)) return false;
    if (m > 0.0 && geom::distance_to_boundary(xy, o.footprint) < m) return false;
  }
  return true;
}

std::string_view to_string(Placement p) {
  switch (p) {
    case Placement::Ground: return "ground";
    case Placement::Wall: return "wall";
    case Placement::Roof: return "roof";
  }
  return "ground";
}

Placement parse_placement(std::string_view s) {
  if (s == "ground") return Placement::Ground;
  if (s == "wall") return Placement::Wall;
  if (s == "roof") return Placement::Roof;
  throw ValidationError("target placement", "unknown target class '" + std::string(s) + "'");
}

void validate_target(const Target& target, const Environment& env, double tol) {
  const Point2 xy = target.position.head<2>();
  const double z = target.position.z();
  if (!geom::point_in_polygon(xy, env.region) && geom::distance_to_boundary(xy, env.region) > tol)
    throw ValidationError("target placement", "target lies outside the region");
  switch (target.placement) {
    case Placement::Ground:
      if (std::abs(z) > tol) throw ValidationError("target placement", "ground target must have z = 0");
      for (const auto& o : env.objects)
        if (geom::strictly_inside(xy, o.footprint, tol))
          throw ValidationError("target placement", "ground target lies inside a building footprint");
      return;
    case Placement::Wall:
      for (const auto& o : env.objects)
        if (geom::distance_to_boundary(xy, o.footprint) <= tol && z >= -tol && z <= o.height + tol) {
          for (const auto& other : env.objects)
            if (geom::strictly_inside(xy, other.footprint, tol) && z < other.height)
              throw ValidationError("target placement", "wall target is buried inside another building");
          return;
        }
      throw ValidationError("target placement", "wall target is not on any building wall");
    case Placement::Roof:
      for (const auto& o : env.objects)
        if (geom::strictly_inside(xy, o.footprint, tol) && std::abs(z - o.height) <= tol) return;
      throw ValidationError("target placement", "roof target is not on any roof");
  }
}

void SensorParams::validate() const {
  if (!(h_view > 0.0 && h_view < d_max))
    throw ValidationError("sensor range", "sensor parameters need 0 < h_view < d_max");
}

bool line_of_sight(const Point3& g, const Point3& p, std::span<const ExtrudedObject> objects) {
  return !blocked_by_any(g, p, objects);
}

bool visibility_predicate(const Point3& g, const Target& target, const Environment& env,
                          const SensorParams& sensor) {
  const Point3& p = target.position;
  if ((g - p).norm() > sensor.d_max) return false;
  if (g.z() < p.z() + sensor.h_view) return false;
  if (!env.in_airspace(g)) return false;
  return line_of_sight(g, p, env.objects);
}

VisibilityField::VisibilityField(const Target& target, const Environment& env, const SensorParams& sensor)
    : target_(target), env_(&env), range_(sensor.d_max) {
  const Point3& p = target.position;
  floor_ = std::max(env.z_min + env.airspace_margin, p.z() + sensor.h_view);
  ceiling_ = std::min(env.z_max - env.airspace_margin, p.z() + sensor.d_max);
  const Eigen::AlignedBox2d reach(p.head<2>().array() - range_, p.head<2>().array() + range_);
  for (const auto& o : env.objects)
    if (o.height > p.z() && o.bounds().intersects(reach)) occluders_.push_back(o);
}

bool VisibilityField::within_range_and_band(const Point3& g) const {
  return g.z() >= floor_ && g.z() <= ceiling_ && (g - target_.position).squaredNorm() <= range_ * range_;
}

bool VisibilityField::clear(const Point3& g) const {
  const Point2 xy = g.head<2>();
  const double m = env_->airspace_margin;
  if (!geom::point_in_polygon(xy, env_->region)) return false;
  if (m > 0.0 && geom::distance_to_boundary(xy, env_->region) < m) return false;
  for (const auto& o : env_->objects) {
    if (g.z() >= o.height + m) continue;
    if (geom::point_in_polygon(xy, o.footprint)) return false;
    if (m > 0.0 && geom::distance_to_boundary(xy, o.footprint) < m) return false;
  }
  return !blocked_by_any(g, target_.position, occluders_);
}

bool VisibilityField::operator()(const Point3& g) const { return within_range_and_band(g) && clear(g); }

Eigen::AlignedBox3d VisibilityField::bounding_box() const {
  const Point3& p = target_.position;
  Eigen::AlignedBox2d xy(p.head<2>().array() - range_, p.head<2>().array() + range_);
  Eigen::AlignedBox2d reg = polygon_bounds(env_->region);
  const double m = env_->airspace_margin;
  reg = Eigen::AlignedBox2d(reg.min().array() + m, reg.max().array() - m);
  xy = xy.intersection(reg);
  if (xy.isEmpty() || floor_ > ceiling_) return Eigen::AlignedBox3d();
  return Eigen::AlignedBox3d(Point3(xy.min().x(), xy.min().y(), floor_), Point3(xy.max().x(), xy.max().y(), ceiling_));
}

namespace {

/// Lattice with one padding layer on each side of the box. Horizontally the points sit at
/// cell centres; vertically the first and last layers lie just inside the floor and ceiling
/// so that those flat faces and their rims are reproduced without a chamfer.
struct Lattice {
  Point3 first;  // point (1, 1, 1)
  Point3 step;
  std::array<long, 3> n{};  // points per axis

  long index(long i, long j, long k) const { return (k * n[1] + j) * n[0] + i; }
  Point3 point(long i, long j, long k) const {
    return first + Point3((i - 1) * step.x(), (j - 1) * step.y(), (k - 1) * step.z());
  }
  Point3 point(long id) const {
    const long i = id % n[0];
    const long j = (id / n[0]) % n[1];
    return point(i, j, id / (n[0] * n[1]));
  }
};

class CrossingFinder {
 public:
  CrossingFinder(const VisibilityField& field, int steps) : field_(field), steps_(steps) {}

  /// Surface point on the lattice edge from `a` (inside) to `b` (outside).
  Point3 operator()(const Point3& a, const Point3& b) const {
    const Point3 d = b - a;
    const Point3& p = field_.target().position;
    double t = 1.0;
    const double r = field_.range();
    if ((b - p).squaredNorm() > r * r) {
      const Point3 f = a - p;
      const double qa = d.squaredNorm(), qb = 2.0 * f.dot(d), qc = f.squaredNorm() - r * r;
      const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
      t = std::min(t, std::clamp((-qb + std::sqrt(disc)) / (2.0 * qa), 0.0, 1.0));
    }
    if (b.z() < field_.floor()) t = std::min(t, std::clamp((field_.floor() - a.z()) / d.z(), 0.0, 1.0));
    if (b.z() > field_.ceiling()) t = std::min(t, std::clamp((field_.ceiling() - a.z()) / d.z(), 0.0, 1.0));

    const Point3 q = a + t * d;
    if (t < 1.0 && field_.clear(q)) return q;

    double lo = 0.0, hi = t;
    for (int s = 0; s < steps_; ++s) {
      const double mid = 0.5 * (lo + hi);
      if (field_(a + mid * d))
        lo = mid;
      else
        hi = mid;
    }
    return a + lo * d;
  }

 private:
  const VisibilityField& field_;
  int steps_;
};

}  // namespace

geom::TriMesh build_visibility_mesh(const Target& target, const Environment& env, const SensorParams& sensor,
                                    const MeshingOptions& options) {
  const VisibilityField field(target, env, sensor);
  const Eigen::AlignedBox3d box = field.bounding_box();
  if (box.isEmpty() || (box.max() - box.min()).minCoeff() < 1e-9)
    throw GeometryError("visibility volume is empty for the given constraints");
  const double cell = options.resolution > 0.0 ? options.resolution : sensor.d_max / 48.0;
  if (sensor.d_max / cell < 4.0)
    throw GeometryError("meshing resolution too coarse: fewer than 4 cells across the viewing range");

  Lattice lat;
  for (int a = 0; a < 2; ++a) {
    const double extent = box.max()[a] - box.min()[a];
    const long cells = std::max(1L, static_cast<long>(std::ceil(extent / cell - 1e-9)));
    lat.step[a] = extent / static_cast<double>(cells);
    lat.first[a] = box.min()[a] + 0.5 * lat.step[a];
    lat.n[static_cast<std::size_t>(a)] = cells + 2;
  }
  {
    const double extent = box.max().z() - box.min().z();
    const long cells = std::max(1L, static_cast<long>(std::ceil(extent / cell - 1e-9)));
    const double inset = 1e-6 * extent / static_cast<double>(cells);
    lat.step.z() = (extent - 2.0 * inset) / static_cast<double>(cells);
    lat.first.z() = box.min().z() + inset;
    lat.n[2] = cells + 3;
  }

  const long total = lat.n[0] * lat.n[1] * lat.n[2];
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(total), 0);
  for (long k = 1; k + 1 < lat.n[2]; ++k)
    for (long j = 1; j + 1 < lat.n[1]; ++j)
      for (long i = 1; i + 1 < lat.n[0]; ++i)
        inside[static_cast<std::size_t>(lat.index(i, j, k))] = field(lat.point(i, j, k)) ? 1 : 0;

  const CrossingFinder crossing(field, options.bisection_steps);
  std::unordered_map<long, int> edge_vertex;
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Point3> fallback_normals;

  auto vertex_on = [&](long in_id, long out_id) {
    const long key = std::min(in_id, out_id) * total + std::max(in_id, out_id);
    auto [it, fresh] = edge_vertex.try_emplace(key, static_cast<int>(vertices.size()));
    if (fresh) vertices.push_back(crossing(lat.point(in_id), lat.point(out_id)));
    return it->second;
  };
  // Orientation comes from lattice edge midpoints, which never degenerate, so windings stay
  // consistent even when crossing points nearly coincide.
  auto emit = [&](std::array<std::pair<long, long>, 3> edges, const Point3& outward) {
    std::array<Point3, 3> mid;
    for (int e = 0; e < 3; ++e) mid[e] = 0.5 * (lat.point(edges[e].first) + lat.point(edges[e].second));
    Point3 n = (mid[1] - mid[0]).cross(mid[2] - mid[0]);
    if (n.dot(outward) < 0.0) {
      std::swap(edges[1], edges[2]);
      n = -n;
    }
    faces.push_back({vertex_on(edges[0].first, edges[0].second), vertex_on(edges[1].first, edges[1].second),
                     vertex_on(edges[2].first, edges[2].second)});
    fallback_normals.push_back(n.normalized());
  };

  // Kuhn subdivision: six tetrahedra sharing the cube diagonal from corner 0 to corner 7.
  static constexpr std::array<std::array<int, 4>, 6> kTets = {{
      {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}}};

  for (long k = 0; k + 1 < lat.n[2]; ++k)
    for (long j = 0; j + 1 < lat.n[1]; ++j)
      for (long i = 0; i + 1 < lat.n[0]; ++i) {
        std::array<long, 8> id{};
        int count = 0;
        for (int c = 0; c < 8; ++c) {
          id[c] = lat.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          count += inside[static_cast<std::size_t>(id[c])];
        }
        if (count == 0 || count == 8) continue;
        for (const auto& tet : kTets) {
          std::array<long, 4> in_ids{}, out_ids{};
          int n_in = 0, n_out = 0;
          for (int c : tet) {
            if (inside[static_cast<std::size_t>(id[c])])
              in_ids[n_in++] = id[c];
            else
              out_ids[n_out++] = id[c];
          }
          if (n_in == 0 || n_out == 0) continue;
          Point3 in_c = Point3::Zero(), out_c = Point3::Zero();
          for (int a = 0; a < n_in; ++a) in_c += lat.point(in_ids[a]);
          for (int a = 0; a < n_out; ++a) out_c += lat.point(out_ids[a]);
          const Point3 outward = out_c / n_out - in_c / n_in;
          if (n_in == 1) {
            emit({{{in_ids[0], out_ids[0]}, {in_ids[0], out_ids[1]}, {in_ids[0], out_ids[2]}}}, outward);
          } else if (n_in == 3) {
            emit({{{in_ids[0], out_ids[0]}, {in_ids[1], out_ids[0]}, {in_ids[2], out_ids[0]}}}, outward);
          } else {
            const long a = in_ids[0], b = in_ids[1], c = out_ids[0], d = out_ids[1];
            emit({{{a, c}, {a, d}, {b, d}}}, outward);
            emit({{{a, c}, {b, d}, {b, c}}}, outward);
          }
        }
      }

  if (faces.empty()) throw GeometryError("visibility volume is empty at this meshing resolution");

  geom::TriMesh mesh = geom::make_mesh(vertices, faces);
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f)
    if (mesh.normals.row(f).squaredNorm() < 0.5)
      mesh.normals.row(f) = fallback_normals[static_cast<std::size_t>(f)].transpose();
  if (options.target_faces > 0 && mesh.num_faces() > options.target_faces)
    mesh = simplify_mesh(mesh, options.target_faces);
  return mesh;
}

std::vector<geom::TriMesh> build_visibility_meshes(std::span<const Target> targets, const Environment& env,
                                                   const SensorParams& sensor, const MeshingOptions& options) {
  std::vector<geom::TriMesh> meshes(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) { meshes[i] = build_visibility_mesh(targets[i], env, sensor, options); });
  return meshes;
}

// ---------------------------------------------------------------------------
// Edge-collapse simplification
// ---------------------------------------------------------------------------

geom::TriMesh simplify_mesh(const geom::TriMesh& mesh, long target_faces) {
  const int nv = static_cast<int>(mesh.num_vertices());
  const int nf = static_cast<int>(mesh.num_faces());
  std::vector<Point3> pos(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) pos[v] = mesh.vertices.row(v).transpose();
  std::vector<std::array<int, 3>> tri(static_cast<std::size_t>(nf));
  for (int f = 0; f < nf; ++f) tri[f] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};

  std::vector<char> face_alive(static_cast<std::size_t>(nf), 1), vert_alive(static_cast<std::size_t>(nv), 1);
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(nv));
  std::vector<Eigen::Matrix4d> quadric(static_cast<std::size_t>(nv), Eigen::Matrix4d::Zero());
  for (int f = 0; f < nf; ++f) {
    const Point3 c0 = pos[tri[f][0]], c1 = pos[tri[f][1]], c2 = pos[tri[f][2]];
    const Point3 cr = (c1 - c0).cross(c2 - c0);
    const double twice_area = cr.norm();
    for (int k = 0; k < 3; ++k) incident[tri[f][k]].push_back(f);
    if (twice_area < 1e-18) continue;
    Eigen::Vector4d plane;
    plane << cr / twice_area, -(cr / twice_area).dot(c0);
    const Eigen::Matrix4d kp = 0.5 * twice_area * plane * plane.transpose();
    for (int k = 0; k < 3; ++k) quadric[tri[f][k]] += kp;
  }

  auto neighbours = [&](int v) {
    std::vector<int> out;
    for (int f : incident[v])
      if (face_alive[f])
        for (int k = 0; k < 3; ++k)
          if (tri[f][k] != v) out.push_back(tri[f][k]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  struct Candidate {
    double cost;
    int u, v;
    long stamp_u, stamp_v;
    Point3 target;
    bool operator>(const Candidate& o) const { return cost > o.cost; }
  };
  std::vector<long> stamp(static_cast<std::size_t>(nv), 0);
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue;

  auto evaluate = [&](int u, int v) {
    const Eigen::Matrix4d q = quadric[u] + quadric[v];
    auto cost_at = [&](const Point3& x) {
      Eigen::Vector4d h;
      h << x, 1.0;
      return std::max(0.0, h.dot(q * h));
    };
    const Point3 mid = 0.5 * (pos[u] + pos[v]);
    Point3 best = mid;
    double best_cost = cost_at(mid);
    for (const Point3& x : {pos[u], pos[v]})
      if (const double c = cost_at(x); c < best_cost) best_cost = c, best = x;
    const Eigen::Matrix3d a = q.topLeftCorner<3, 3>();
    Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
    if (lu.isInvertible()) {
      const Point3 x = lu.solve(Point3(-q.topRightCorner<3, 1>()));
      if ((x - mid).norm() <= (pos[u] - pos[v]).norm())
        if (const double c = cost_at(x); c < best_cost) best_cost = c, best = x;
    }
    queue.push({best_cost, u, v, stamp[u], stamp[v], best});
  };

  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 3; ++k) {
      const int u = tri[f][k], v = tri[f][(k + 1) % 3];
      if (u < v) evaluate(u, v);
    }

  long alive_faces = nf;
  while (alive_faces > target_faces && alive_faces > 4 && !queue.empty()) {
    const Candidate c = queue.top();
    queue.pop();
    const int u = c.u, v = c.v;
    if (!vert_alive[u] || !vert_alive[v] || stamp[u] != c.stamp_u || stamp[v] != c.stamp_v) continue;

    const auto nu = neighbours(u), nv_ = neighbours(v);
    if (!std::binary_search(nu.begin(), nu.end(), v)) continue;
    std::vector<int> common;
    std::set_intersection(nu.begin(), nu.end(), nv_.begin(), nv_.end(), std::back_inserter(common));
    if (common.size() != 2) continue;
    if (nu.size() + nv_.size() < 4 + 3) continue;
    if (neighbours(common[0]).size() <= 3 || neighbours(common[1]).size() <= 3) continue;

    bool flips = false;
    for (int w : {u, v}) {
      for (int f : incident[w]) {
        if (!face_alive[f]) continue;
        const auto& t = tri[f];
        const bool has_u = t[0] == u || t[1] == u || t[2] == u;
        const bool has_v = t[0] == v || t[1] == v || t[2] == v;
        if (has_u && has_v) continue;
        std::array<Point3, 3> before, after;
        for (int k = 0; k < 3; ++k) {
          before[k] = pos[t[k]];
          after[k] = (t[k] == u || t[k] == v) ? c.target : pos[t[k]];
        }
        const Point3 n0 = (before[1] - before[0]).cross(before[2] - before[0]);
        const Point3 n1 = (after[1] - after[0]).cross(after[2] - after[0]);
        if (n1.norm() < 1e-12 || n0.dot(n1) < 0.2 * n0.norm() * n1.norm()) {
          flips = true;
          break;
        }
      }
      if (flips) break;
    }
    if (flips) continue;

    pos[u] = c.target;
    quadric[u] += quadric[v];
    for (int f : incident[v]) {
      if (!face_alive[f]) continue;
      auto& t = tri[f];
      if (t[0] == u || t[1] == u || t[2] == u) {
        face_alive[f] = 0;
        --alive_faces;
      } else {
        for (int k = 0; k < 3; ++k)
          if (t[k] == v) t[k] = u;
        incident[u].push_back(f);
      }
    }
    vert_alive[v] = 0;
    incident[v].clear();
    std::erase_if(incident[u], [&](int f) { return !face_alive[f]; });
    ++stamp[u];
    for (int w : neighbours(u)) evaluate(std::min(u, w), std::max(u, w));
  }

  std::vector<int> remap(static_cast<std::size_t>(nv), -1);
  std::vector<Point3> out_v;
  std::vector<std::array<int, 3>> out_f;
  for (int f = 0; f < nf; ++f) {
    if (!face_alive[f]) continue;
    std::array<int, 3> t{};
    for (int k = 0; k < 3; ++k) {
      int& r = remap[tri[f][k]];
      if (r < 0) {
        r = static_cast<int>(out_v.size());
        out_v.push_back(pos[tri[f][k]]);
      }
      t[k] = r;
    }
    out_f.push_back(t);
  }
  return geom::make_mesh(out_v, out_f);
}

}  // namespace viewplan::visibility
