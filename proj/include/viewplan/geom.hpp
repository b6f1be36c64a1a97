#pragma once

#include "viewplan/error.hpp"
#include "viewplan/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace viewplan::geom {

// ---------------------------------------------------------------------------
// Planar polygons
// ---------------------------------------------------------------------------

/// Shoelace signed area; positive for counter-clockwise vertex order.
template <typename Scalar>
Scalar polygon_area(std::span<const Vec2<Scalar>> poly) {
  if (poly.size() < 3) throw GeometryError("polygon_area: polygon needs at least 3 vertices");
  Scalar twice = 0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return twice / Scalar(2);
}

/// Sum of edge lengths including the closing edge.
template <typename Scalar>
Scalar polygon_perimeter(std::span<const Vec2<Scalar>> poly) {
  if (poly.size() < 3) throw GeometryError("polygon_perimeter: polygon needs at least 3 vertices");
  Scalar sum = 0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) sum += (poly[(i + 1) % n] - poly[i]).norm();
  return sum;
}

inline double polygon_area(const Polygon2& p) { return polygon_area<double>(std::span<const Point2>(p)); }
inline double polygon_perimeter(const Polygon2& p) {
  return polygon_perimeter<double>(std::span<const Point2>(p));
}

/// Reversed vertex order (flips the sign of the area).
Polygon2 reversed(const Polygon2& p);

/// Point-in-polygon by crossing number. Points on the boundary have unspecified result;
/// use `strictly_inside` when the boundary must be excluded.
bool point_in_polygon(const Point2& q, const Polygon2& poly);

/// True when `q` is inside `poly` and farther than `tol` from every edge.
bool strictly_inside(const Point2& q, const Polygon2& poly, double tol = 1e-9);

/// Distance from `q` to the closest polygon edge.
double distance_to_boundary(const Point2& q, const Polygon2& poly);

/// A point on a polygon boundary together with the heading of the edge that carries it.
struct PerimeterSample {
  Point2 point;
  double tangent = 0.0;    ///< heading (rad, [0, 2pi)) of the containing edge, positive-area order
  std::size_t loop = 0;    ///< which polygon of the set
  std::size_t edge = 0;    ///< edge index, edge k runs from vertex k to vertex k+1
};

/// `n` points at equal arc-length spacing along the concatenated boundary of `loops`,
/// starting at vertex 0 of the first loop with zero offset. At a vertex the outgoing edge
/// supplies the tangent.
std::vector<PerimeterSample> perimeter_samples(std::span<const Polygon2> loops, std::size_t n);

std::vector<Point2> uniform_perimeter_points(const Polygon2& poly, std::size_t n);
std::vector<Point2> uniform_perimeter_points(std::span<const Polygon2> loops, std::size_t n);

/// Boundary membership tolerance for `tangent_angle` (m).
inline constexpr double kBoundaryTolerance = 1e-6;

/// Heading of the edge containing `lambda`; at a vertex, the outgoing edge.
/// Throws GeometryError when `lambda` is farther than `tol` from the boundary.
double tangent_angle(const Point2& lambda, const Polygon2& poly, double tol = kBoundaryTolerance);
double tangent_angle(const Point2& lambda, std::span<const Polygon2> loops,
                     double tol = kBoundaryTolerance);

// ---------------------------------------------------------------------------
// Triangle meshes
// ---------------------------------------------------------------------------

/// Indexed triangle mesh. Rows of `faces` index rows of `vertices`; `normals` holds one
/// outward unit normal per face (counter-clockwise winding seen from outside).
struct TriMesh {
  Eigen::MatrixX3d vertices;
  Eigen::MatrixX3i faces;
  Eigen::MatrixX3d normals;

  Eigen::Index num_vertices() const { return vertices.rows(); }
  Eigen::Index num_faces() const { return faces.rows(); }
  bool empty() const { return faces.rows() == 0; }

  Point3 corner(Eigen::Index face, int k) const { return vertices.row(faces(face, k)).transpose(); }
};

/// Builds a mesh from vertex/face lists and computes face normals from the winding.
TriMesh make_mesh(const std::vector<Point3>& vertices, const std::vector<std::array<int, 3>>& faces);

/// Recomputes unit normals from winding; degenerate faces get a zero normal.
void compute_normals(TriMesh& mesh);

/// Half the norm of the cross product of two triangle edges.
template <typename Derived0, typename Derived1, typename Derived2>
typename Derived0::Scalar element_area(const Eigen::MatrixBase<Derived0>& c0,
                                       const Eigen::MatrixBase<Derived1>& c1,
                                       const Eigen::MatrixBase<Derived2>& c2) {
  using Scalar = typename Derived0::Scalar;
  const Vec3<Scalar> e1 = c0 - c1;
  const Vec3<Scalar> e2 = c0 - c2;
  return e1.cross(e2).norm() / Scalar(2);
}

double element_area(const TriMesh& mesh, Eigen::Index face);

/// Per-face areas as a column vector.
Eigen::VectorXd element_areas(const TriMesh& mesh);

double surface_area(const TriMesh& mesh);

/// Enclosed volume by the divergence theorem (positive for outward normals).
double mesh_volume(const TriMesh& mesh);

/// (min z, max z) over all vertices. Throws GeometryError for an empty mesh.
std::pair<double, double> mesh_z_extent(const TriMesh& mesh);

/// Axis-aligned bounding box (min corner, max corner).
std::pair<Point3, Point3> mesh_bounds(const TriMesh& mesh);

/// Intersection of a closed mesh with the horizontal plane at `z`, stitched into loops.
/// Outer boundaries come back counter-clockwise (positive area); a cavity in the cross
/// section comes back clockwise. Returns an empty list when the plane misses the mesh.
/// A plane that passes through a vertex is nudged up by 1e-7 of the mesh height.
/// Throws GeometryError when the crossing segments do not close into loops.
std::vector<Polygon2> slice_mesh(const TriMesh& mesh, double z);

/// Sum of signed areas of `slice_mesh(mesh, z)`.
double slice_area(const TriMesh& mesh, double z);
double slice_perimeter(const TriMesh& mesh, double z);

struct MeshTopology {
  bool closed_manifold = false;     ///< every edge shared by exactly two consistently wound faces
  std::size_t components = 0;
  std::vector<long> euler_characteristic;  ///< V - E + F per connected component
};

MeshTopology analyze_topology(const TriMesh& mesh);

/// Ray-parity inside test accelerated with a uniform grid over the xy footprint.
class InsideTester {
 public:
  explicit InsideTester(const TriMesh& mesh, int grid = 64);

  bool contains(const Point3& p) const;

 private:
  const TriMesh* mesh_;
  Eigen::Vector2d lo_, cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

void write_obj(std::ostream& os, const TriMesh& mesh);
void write_obj(const std::string& path, const TriMesh& mesh);
TriMesh read_obj(std::istream& is);
TriMesh read_obj(const std::string& path);

/// Axis-aligned box [lo, hi] as a closed outward-wound mesh (12 triangles).
TriMesh box_mesh(const Point3& lo, const Point3& hi);

}  // namespace viewplan::geom
