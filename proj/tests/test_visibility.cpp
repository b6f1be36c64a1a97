#include "viewplan/visibility.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace viewplan;
using namespace viewplan::visibility;

namespace {

Polygon2 rect(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

Environment open_field(double z_min = 100.0, double z_max = 600.0) {
  Environment env;
  env.region = rect(-2000, -2000, 2000, 2000);
  env.z_min = z_min;
  env.z_max = z_max;
  return env;
}

SensorParams sensor(double d_max = 400.0, double h_view = 50.0) { return {d_max, h_view}; }

}  // namespace

TEST_CASE("line of sight") {
  const std::vector<ExtrudedObject> none;
  CHECK(line_of_sight({0, 0, 100}, {500, 30, 0}, none));

  const std::vector<ExtrudedObject> tower{{rect(-10, -10, 10, 10), 200.0}};
  CHECK_FALSE(line_of_sight({-100, 0, 50}, {100, 0, 50}, tower));
  CHECK(line_of_sight({-100, 0, 250}, {100, 0, 250}, tower));
  // the sight line passes above the roof edge
  CHECK(line_of_sight({-100, 0, 400}, {20, 0, 0}, tower) == false);
  CHECK(line_of_sight({-40, 0, 400}, {-20, 0, 0}, tower));

  // wall target seen straight out from its face: contact at the endpoint only
  CHECK(line_of_sight({100, 0, 50}, {10, 0, 50}, tower));
  CHECK_FALSE(line_of_sight({-100, 0, 50}, {10, 0, 50}, tower));
  // roof target seen from above
  CHECK(line_of_sight({0, 0, 400}, {0, 0, 200}, tower));
  // grazing along a face counts as clear
  CHECK(line_of_sight({10, -100, 50}, {10, 100, 50}, tower));
}

TEST_CASE("visibility predicate") {
  const Environment env = open_field();
  const Target ground{{0, 0, 0}, Placement::Ground};
  CHECK(visibility_predicate({0, 0, env.z_min}, ground, env, sensor()));
  CHECK_FALSE(visibility_predicate({0, 401, 150}, ground, env, sensor()));
  CHECK_FALSE(visibility_predicate({0, 0, env.z_min - 1}, ground, env, sensor()));

  Environment high = open_field(10.0, 600.0);
  const Target roof{{0, 0, 40}, Placement::Roof};
  high.objects.push_back({rect(-10, -10, 10, 10), 40.0});
  CHECK_FALSE(visibility_predicate({0, 0, 40 + 50 - 0.1}, roof, high, sensor()));
  CHECK(visibility_predicate({0, 0, 40 + 50 + 0.1}, roof, high, sensor()));
  CHECK_FALSE(visibility_predicate({3000, 0, 200}, ground, env, sensor(5000, 50)));  // outside the region
}

TEST_CASE("environment and target validation") {
  Environment env = open_field();
  env.objects.push_back({rect(0, 0, 100, 100), 50});
  CHECK_NOTHROW(env.validate());
  CHECK(env.h_max() == 50.0);

  Environment overlap = env;
  overlap.objects.push_back({rect(50, 50, 150, 150), 60});
  try {
    overlap.validate();
    FAIL("overlapping footprints accepted");
  } catch (const ValidationError& e) {
    CHECK(e.constraint() == "disjoint footprints");
  }
  Environment touching = env;
  touching.objects.push_back({rect(100, 0, 200, 100), 60});
  CHECK_NOTHROW(touching.validate());

  Environment outside = env;
  outside.objects.push_back({rect(1900, 0, 2100, 100), 60});
  CHECK_THROWS_AS(outside.validate(), ValidationError);
  Environment cw = env;
  cw.objects[0].footprint = geom::reversed(cw.objects[0].footprint);
  CHECK_THROWS_AS(cw.validate(), ValidationError);
  Environment band = env;
  band.z_max = band.z_min;
  CHECK_THROWS_AS(band.validate(), ValidationError);

  CHECK_NOTHROW(validate_target({{-50, -50, 0}, Placement::Ground}, env));
  CHECK_THROWS_AS(validate_target({{50, 50, 0}, Placement::Ground}, env), ValidationError);
  CHECK_NOTHROW(validate_target({{100, 50, 20}, Placement::Wall}, env));
  CHECK_THROWS_AS(validate_target({{100, 50, 70}, Placement::Wall}, env), ValidationError);
  CHECK_THROWS_AS(validate_target({{120, 50, 20}, Placement::Wall}, env), ValidationError);
  CHECK_NOTHROW(validate_target({{50, 50, 50}, Placement::Roof}, env));
  CHECK_THROWS_AS(validate_target({{50, 50, 40}, Placement::Roof}, env), ValidationError);

  CHECK(parse_placement("wall") == Placement::Wall);
  CHECK(to_string(Placement::Roof) == "roof");
  CHECK_THROWS_AS(parse_placement("tree"), ValidationError);

  CHECK_THROWS_AS((SensorParams{100, 100}.validate()), ValidationError);
  CHECK_THROWS_AS((SensorParams{100, 0}.validate()), ValidationError);
}

TEST_CASE("unobstructed volume matches the spherical cap band") {
  const Environment env = open_field(100.0, 600.0);
  const Target ground{{0, 0, 0}, Placement::Ground};
  const auto mesh = build_visibility_mesh(ground, env, sensor(400, 50));
  const double expected = oracle::cap_band_volume(400, 100, 600);
  CHECK(geom::mesh_volume(mesh) == doctest::Approx(expected).epsilon(0.05));
  const auto topo = geom::analyze_topology(mesh);
  CHECK(topo.closed_manifold);
  CHECK(topo.euler_characteristic == std::vector<long>{2});
  const double cell = 400.0 / 48;
  const auto [lo, hi] = geom::mesh_z_extent(mesh);
  CHECK(std::abs(lo - 100.0) <= cell);
  CHECK(std::abs(hi - 400.0) <= cell);
  const auto loops = geom::slice_mesh(mesh, lo + 1e-6 * (hi - lo));
  REQUIRE_FALSE(loops.empty());
  CHECK(geom::polygon_area(loops[0]) > 0.0);

  // every vertex lies within one cell of a point satisfying the predicate
  const VisibilityField field(ground, env, sensor(400, 50));
  int far = 0;
  for (Eigen::Index v = 0; v < mesh.num_vertices(); ++v) {
    const Point3 p = mesh.vertices.row(v).transpose();
    bool near = field(p);
    for (int k = 0; k < 6 && !near; ++k) {
      Point3 q = p;
      q(k / 2) += (k % 2 ? cell : -cell);
      near = field(q);
    }
    far += !near;
  }
  CHECK(far == 0);
}

TEST_CASE("volume grows with the sensor range") {
  const Environment env = open_field(100.0, 600.0);
  const Target ground{{0, 0, 0}, Placement::Ground};
  MeshingOptions opts;
  opts.resolution = 12.0;
  double prev = 0.0;
  for (double d : {300.0, 350.0, 400.0}) {
    const double v = geom::mesh_volume(build_visibility_mesh(ground, env, sensor(d, 50), opts));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("occluders shrink the volume and keep the mesh manifold") {
  Environment env = open_field(100.0, 600.0);
  const Target ground{{0, 0, 0}, Placement::Ground};
  const auto open = build_visibility_mesh(ground, env, sensor());
  // four walls around the target, open only straight up
  env.objects = {{rect(-80, -80, 80, -60), 90},
                 {rect(-80, 60, 80, 80), 90},
                 {rect(-80, -59, -60, 59), 90},
                 {rect(60, -59, 80, 59), 90}};
  REQUIRE_NOTHROW(env.validate());
  const auto ringed = build_visibility_mesh(ground, env, sensor());
  CHECK(geom::mesh_volume(ringed) < geom::mesh_volume(open));
  const auto topo = geom::analyze_topology(ringed);
  CHECK(topo.closed_manifold);
  for (long chi : topo.euler_characteristic) CHECK(chi == 2);

  // containment: points inside the mesh see the target, points outside mostly do not
  const VisibilityField field(ground, env, sensor());
  const geom::InsideTester inside(ringed);
  const auto [lo, hi] = geom::mesh_bounds(ringed);
  const double cell = 400.0 / 48;
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0, 1);
  int in = 0, in_ok = 0, out = 0, out_ok = 0;
  for (int k = 0; k < 10000; ++k) {
    const Point3 p = lo + (hi - lo).cwiseProduct(Point3(u(g), u(g), u(g)));
    if (inside.contains(p)) {
      ++in;
      in_ok += field(p);
    } else {
      ++out;
      bool ok = !field(p);
      for (int a = 0; a < 6 && !ok; ++a) {
        Point3 q = p;
        q(a / 2) += (a % 2 ? cell : -cell);
        ok = inside.contains(q);
      }
      out_ok += ok;
    }
  }
  REQUIRE(in > 100);
  CHECK(in_ok >= 0.99 * in);
  CHECK(out_ok >= 0.99 * out);

  // the narrow shaft above the ring is empty up to where sight lines clear the walls
  CHECK_FALSE(field(Point3(300, 0, 150)));
  CHECK(field(Point3(0, 0, 150)));
}

TEST_CASE("separated targets have disjoint volumes") {
  const Environment env = open_field(100.0, 600.0);
  const std::vector<Target> targets{{{-401, 0, 0}, Placement::Ground}, {{401, 0, 0}, Placement::Ground}};
  MeshingOptions opts;
  opts.resolution = 16.0;
  const auto meshes = build_visibility_meshes(targets, env, sensor(), opts);
  const auto [a0, a1] = geom::mesh_bounds(meshes[0]);
  const auto [b0, b1] = geom::mesh_bounds(meshes[1]);
  CHECK(a1.x() < b0.x());
}

TEST_CASE("meshing errors") {
  const Environment env = open_field(100.0, 600.0);
  const Target ground{{0, 0, 0}, Placement::Ground};
  MeshingOptions coarse;
  coarse.resolution = 150.0;
  CHECK_THROWS_AS(build_visibility_mesh(ground, env, sensor(), coarse), GeometryError);
  // the altitude band starts beyond the sensor range
  CHECK_THROWS_AS(build_visibility_mesh(ground, open_field(450.0, 600.0), sensor()), GeometryError);
}

TEST_CASE("simplification keeps a closed genus-0 mesh") {
  const Environment env = open_field(100.0, 600.0);
  const Target ground{{0, 0, 0}, Placement::Ground};
  MeshingOptions opts;
  opts.resolution = 16.0;
  const auto mesh = build_visibility_mesh(ground, env, sensor(), opts);
  const auto small = simplify_mesh(mesh, 2000);
  CHECK(small.num_faces() <= 2000);
  const auto topo = geom::analyze_topology(small);
  CHECK(topo.closed_manifold);
  CHECK(topo.euler_characteristic == std::vector<long>{2});
  CHECK(geom::mesh_volume(small) == doctest::Approx(geom::mesh_volume(mesh)).epsilon(0.03));
}
