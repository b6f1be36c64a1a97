#pragma once

#include "viewplan/geom.hpp"

#include <Eigen/Geometry>

#include <span>
#include <string_view>
#include <vector>

namespace viewplan::visibility {

/// Building modelled as a footprint swept from the ground to `height`.
struct ExtrudedObject {
  Polygon2 footprint;  ///< counter-clockwise
  double height = 0.0;

  Eigen::AlignedBox2d bounds() const;
};

/// Planar region, buildings and the flyable altitude band.
struct Environment {
  Polygon2 region;  ///< counter-clockwise
  std::vector<ExtrudedObject> objects;
  double z_min = 0.0;
  double z_max = 0.0;
  /// Uniform shrink of the airspace (region, altitude band) and growth of the buildings.
  double airspace_margin = 0.0;

  /// Tallest building, 0 for an empty scene.
  double h_max() const;

  /// Footprints simple-ish (>= 3 vertices, positive area), heights positive, interiors
  /// pairwise disjoint, footprints inside the region, z_min < z_max. Throws ValidationError.
  void validate() const;

  /// Membership in the flyable airspace: inside the region, inside the altitude band and
  /// outside every building (all with the margin applied).
  bool in_airspace(const Point3& g) const;
};

enum class Placement { Ground, Wall, Roof };

std::string_view to_string(Placement p);
/// Parses "ground" / "wall" / "roof"; throws ValidationError otherwise.
Placement parse_placement(std::string_view s);

struct Target {
  Point3 position = Point3::Zero();
  Placement placement = Placement::Ground;
};

/// Checks that the target satisfies its placement class: on the ground off every footprint,
/// on a wall within the building's height, or on a roof at the building's height.
/// Throws ValidationError naming the violated case.
void validate_target(const Target& target, const Environment& env, double tol = 1e-6);

struct SensorParams {
  double d_max = 400.0;   ///< maximum viewing range (m)
  double h_view = 100.0;  ///< minimum height of the viewer above the target (m)

  /// Requires 0 < h_view < d_max.
  void validate() const;
};

/// Parameter of the sight segment excluded at both ends.
inline constexpr double kSegmentEndTolerance = 1e-6;

/// True when the open segment from `g` to `p` misses the interior of every building.
/// Touching a face or running along it counts as clear.
bool line_of_sight(const Point3& g, const Point3& p, std::span<const ExtrudedObject> objects);

/// Inside the target's visibility volume: flyable, within range, high enough above the
/// target and with a clear line of sight.
bool visibility_predicate(const Point3& g, const Target& target, const Environment& env,
                          const SensorParams& sensor);

/// Visibility test bound to one target, with the buildings that can never occlude it culled.
class VisibilityField {
 public:
  VisibilityField(const Target& target, const Environment& env, const SensorParams& sensor);

  bool operator()(const Point3& g) const;

  /// Range and altitude tests only.
  bool within_range_and_band(const Point3& g) const;
  /// Airspace (except the altitude band) and line of sight only.
  bool clear(const Point3& g) const;

  /// Box that contains the whole volume; empty when the constraints cannot be met.
  Eigen::AlignedBox3d bounding_box() const;

  const Target& target() const { return target_; }
  double floor() const { return floor_; }      ///< lowest admissible altitude
  double ceiling() const { return ceiling_; }  ///< highest admissible altitude
  double range() const { return range_; }

 private:
  Target target_;
  const Environment* env_;
  double range_ = 0.0;
  double floor_ = 0.0;
  double ceiling_ = 0.0;
  std::vector<ExtrudedObject> occluders_;
};

struct MeshingOptions {
  double resolution = 0.0;  ///< lattice cell size (m); 0 selects d_max / 48
  int bisection_steps = 45;  ///< refinement of surface crossings found by bisection
  long target_faces = 0;    ///< > 0 enables edge-collapse simplification down to this count
};

/// Closed, outward-oriented triangle mesh of the target's visibility volume, extracted from
/// the predicate on a regular lattice with six tetrahedra per cube. Sphere and altitude
/// crossings are placed analytically; occlusion and region crossings by bisection.
/// Throws GeometryError when the volume is empty or the resolution gives fewer than 4 cells
/// across d_max.
geom::TriMesh build_visibility_mesh(const Target& target, const Environment& env, const SensorParams& sensor,
                                    const MeshingOptions& options = {});

/// One mesh per target, built in parallel.
std::vector<geom::TriMesh> build_visibility_meshes(std::span<const Target> targets, const Environment& env,
                                                   const SensorParams& sensor, const MeshingOptions& options = {});

/// Quadric-error edge collapse that keeps the mesh a closed manifold. Stops at `target_faces`
/// or when no collapse passes the topology and flip checks.
geom::TriMesh simplify_mesh(const geom::TriMesh& mesh, long target_faces);

}  // namespace viewplan::visibility
