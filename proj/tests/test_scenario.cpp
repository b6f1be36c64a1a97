#include "viewplan/scenario.hpp"

#include "viewplan/geom.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

using namespace viewplan;
using namespace viewplan::scenario;

namespace {

std::string constraint_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.constraint();
  }
  return "";
}

bool interiors_overlap(const visibility::ExtrudedObject& a, const visibility::ExtrudedObject& b) {
  const auto p = a.bounds(), q = b.bounds();
  return p.min().x() < q.max().x() && q.min().x() < p.max().x() && p.min().y() < q.max().y() && q.min().y() < p.max().y();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("viewplan_test_" + name);
}

/// Small and quick sweep.
ExperimentConfig small_sweep() {
  ExperimentConfig c;
  c.target_counts = {3};
  c.seeds = {1, 2};
  c.algorithms = {"3D-DTSPN-RFAC", "3D-METSPN-RFAC", "2D-DTSP"};
  c.n_pts = {2};
  c.n_psi = {2, 4};
  c.resolution = 25.0;
  return c;
}

}  // namespace

TEST_CASE("city generation") {
  ScenarioParams p;
  p.seed = 3;
  const auto a = generate_city(p), b = generate_city(p);
  REQUIRE(a.objects.size() == static_cast<std::size_t>(p.num_objects));
  CHECK_NOTHROW(a.validate());
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    CHECK(a.objects[i].footprint == b.objects[i].footprint);
    CHECK(a.objects[i].height == b.objects[i].height);
    CHECK(geom::polygon_area(a.objects[i].footprint) > 0.0);
    for (std::size_t j = i + 1; j < a.objects.size(); ++j) CHECK_FALSE(interiors_overlap(a.objects[i], a.objects[j]));
  }
  CHECK(a.z_min == doctest::Approx(a.h_max() + 2 * p.vehicle.rho_min + 1));
  CHECK(a.z_max == doctest::Approx(a.h_max() + p.sensor.d_max));

  p.seed = 4;
  const auto c = generate_city(p);
  CHECK(c.objects.front().footprint != a.objects.front().footprint);
}

TEST_CASE("height cap of 300 m") {
  ScenarioParams p;
  p.height_max = 400;
  p.height_cap = 300;
  p.sensor.d_max = 500;
  p.sensor.h_view = 100;
  p.num_objects = 20;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    p.seed = seed;
    for (const auto& o : generate_city(p).objects) CHECK(o.height <= 300.0);
  }
}

TEST_CASE("target placement") {
  ScenarioParams p;
  p.sensor.d_max = 300;
  p.sensor.h_view = 100;
  p.height_max = p.height_cap = 150;
  p.num_targets = 5;
  std::set<visibility::Placement> classes;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    p.seed = seed;
    const auto scene = generate_scene(p);
    REQUIRE(scene.targets.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& t = scene.targets[i];
      classes.insert(t.placement);
      for (std::size_t j = i + 1; j < 5; ++j) CHECK((t.position - scene.targets[j].position).norm() > 600.0);
      const Point2 xy = t.position.head<2>();
      switch (t.placement) {
        case visibility::Placement::Ground:
          CHECK(t.position.z() == 0.0);
          for (const auto& o : scene.env.objects) CHECK_FALSE(geom::point_in_polygon(xy, o.footprint));
          break;
        case visibility::Placement::Roof: {
          const auto it = std::find_if(scene.env.objects.begin(), scene.env.objects.end(),
                                       [&](const auto& o) { return geom::point_in_polygon(xy, o.footprint); });
          REQUIRE(it != scene.env.objects.end());
          CHECK(t.position.z() == it->height);
          break;
        }
        case visibility::Placement::Wall: CHECK_NOTHROW(visibility::validate_target(t, scene.env)); break;
      }
    }
    const auto again = generate_scene(p);
    for (std::size_t i = 0; i < 5; ++i) CHECK(again.targets[i].position == scene.targets[i].position);
  }
  CHECK(classes.size() == 3);
}

TEST_CASE("generated scenes pass the validators") {
  ScenarioParams p;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    p.seed = seed;
    CHECK_NOTHROW(validate_scene(generate_scene(p, true), true));
  }
}

TEST_CASE("parameter validation names the constraint") {
  ScenarioParams p;
  CHECK(constraint_of([&] { p.validate(); }).empty());

  auto bad = p;
  bad.sensor.d_max = 200;  // z_min = 150 + 81 > 200
  bad.sensor.h_view = 100;
  CHECK(constraint_of([&] { bad.validate(); }) == "viewing range");

  bad = p;
  bad.sensor.h_view = 50;  // 150 + 50 < z_min = 231
  CHECK(constraint_of([&] { bad.validate(); }) == "viewing altitude band");

  bad = p;
  bad.sensor.d_max = 260;
  bad.sensor.h_view = 120;  // 150 + 120 > 260
  CHECK(constraint_of([&] { bad.validate(true); }) == "common altitude");
  CHECK(constraint_of([&] { bad.validate(false); }).empty());

  bad = p;
  bad.num_targets = 12;
  bad.region_width = bad.region_depth = 1000;
  CHECK(constraint_of([&] { generate_scene(bad); }) == "target separation");

  bad = p;
  bad.num_objects = 400;
  bad.region_width = bad.region_depth = 500;
  CHECK(constraint_of([&] { generate_city(bad); }) == "object density");

  bad = p;
  bad.placement = {0, 0, 0};
  CHECK(constraint_of([&] { bad.validate(); }) == "placement weights");
}

TEST_CASE("scene validation names the constraint") {
  ScenarioParams p;
  const auto scene = generate_scene(p);

  auto s = scene;
  s.env.z_min = s.env.h_max() + 2 * s.vehicle.rho_min - 1;
  CHECK(constraint_of([&] { validate_scene(s); }) == "airspace clearance");

  s = scene;
  s.env.z_max = s.env.h_max() + s.sensor.h_view - 1;
  CHECK(constraint_of([&] { validate_scene(s); }) == "viewing altitude band");

  s = scene;
  s.targets[1].position = s.targets[0].position;
  s.targets[1].placement = s.targets[0].placement;
  CHECK(constraint_of([&] { validate_scene(s); }) == "target separation");

  s = scene;
  s.targets.clear();
  CHECK(constraint_of([&] { validate_scene(s); }) == "target count");
}

TEST_CASE("algorithm ids") {
  for (const std::string id : {"2D-DTSP-8", "2D-DTSPN-ETRY-4-16", "3D-DTSPN-RFAC-8-32", "3D-DTSPN-E3D-2-4",
                               "3D-METSPN-GWF-8-32", "3D-METSPN-RFAC-1-1"})
    CHECK(parse_algorithm(id).to_string() == id);
  const auto a = parse_algorithm("3D-METSPN-GWF-8-32");
  CHECK(a.method == Method::Metspn3D);
  CHECK(a.strategy == Strategy::GlobalWeightedFace);
  CHECK(a.n_psi == 8);
  CHECK(a.n_pts == 32);
  CHECK(a.family() == "3D-METSPN-GWF");
  CHECK(make_algorithm("2D-DTSP", 4, 9).to_string() == "2D-DTSP-4");
  for (const std::string id : {"", "3D-DTSPN-RFAC-8", "3D-DTSPN-XYZ-8-32", "2D-DTSP-0", "3D-METSPN-RFAC-8-x",
                               "4D-DTSPN-RFAC-8-32", "2D-DTSPN-RFAC-8-32"})
    CHECK(constraint_of([&] { parse_algorithm(id); }) == "algorithm id");
}

TEST_CASE("CSV rows round trip") {
  TrialRecord r;
  r.seed = 7;
  r.num_targets = 5;
  r.algorithm = "3D-DTSPN-RFAC-8-32";
  r.n_pts = 32;
  r.n_psi = 8;
  r.length = 4567.123456789;
  r.normalized_cost = r.length / 40;
  r.wall_clock = 1.25;
  const auto back = parse_csv_row(to_csv_row(r));
  CHECK(back.key() == r.key());
  CHECK(back.length == doctest::Approx(r.length).epsilon(1e-9));
  CHECK(back.status == "ok");
  CHECK_THROWS_AS(parse_csv_row("1,2,3"), IoError);
  CHECK_THROWS_AS(parse_csv_row("a,5,x,1,1,1,1,1,1,ok"), IoError);
  CHECK(std::string(kCsvHeader) == "seed,M,algorithm,n_pts,n_psi,n_gamma,length_m,normalized_cost,wall_clock_s,status");
}

TEST_CASE("experiment sweep, resume and determinism") {
  auto config = small_sweep();
  const auto path = temp_file("sweep.csv");
  config.output = path.string();
  std::size_t tours = 0;
  const auto first = run_experiment(config, [&](const TrialRecord& r, const tour::Tour* t) {
    if (t) {
      ++tours;
      CHECK(r.normalized_cost == doctest::Approx(r.length / config.scenario.vehicle.rho_min));
      CHECK_NOTHROW(tour::check_tour(*t, static_cast<std::size_t>(r.num_targets)));
    }
  });
  // 2 seeds x (2 families x 2 headings + 2 headings)
  REQUIRE(first.size() == 12);
  CHECK(tours == 12);
  for (const auto& r : first) CHECK(r.status == "ok");
  CHECK(read_csv(config.output).size() == 12);

  // interrupted run: keep the first half of the file
  {
    std::ifstream in(path);
    std::string all, line;
    for (int k = 0; k < 7 && std::getline(in, line); ++k) all += line + "\n";
    in.close();
    std::ofstream(path, std::ios::trunc) << all;
  }
  config.resume = true;
  std::size_t rerun = 0;
  const auto resumed = run_experiment(config, [&](const TrialRecord&, const tour::Tour*) { ++rerun; });
  CHECK(rerun == 6);
  const auto rows = read_csv(config.output);
  REQUIRE(rows.size() == 12);
  std::set<std::string> keys;
  for (const auto& r : rows) keys.insert(r.key());
  CHECK(keys.size() == 12);
  for (const auto& r : rows) {
    const auto it = std::find_if(first.begin(), first.end(), [&](const TrialRecord& f) { return f.key() == r.key(); });
    REQUIRE(it != first.end());
    CHECK(r.length == doctest::Approx(it->length).epsilon(1e-8));
  }
  std::filesystem::remove(path);
}

TEST_CASE("paired trials draw identical samples") {
  CHECK(trial_seed(1, "5|3D-RFAC|8|4|1") == trial_seed(1, "5|3D-RFAC|8|4|1"));
  CHECK(trial_seed(1, "5|3D-RFAC|8|4|1") != trial_seed(2, "5|3D-RFAC|8|4|1"));
  CHECK(trial_seed(1, "5|3D-RFAC|8|4|1") != trial_seed(1, "5|3D-RFAC|2|4|1"));
}

TEST_CASE("failed trials are recorded and the sweep continues") {
  auto config = small_sweep();
  config.seeds = {1};
  config.algorithms = {"3D-METSPN-RFAC"};
  config.n_psi = {2};
  config.scenario.num_targets = 40;  // cannot be separated in the region
  config.target_counts = {40, 3};
  const auto records = run_experiment(config);
  REQUIRE(records.size() == 2);
  CHECK(records[0].status == "error:target separation");
  CHECK(records[1].status == "ok");
}

TEST_CASE("more samples do not raise the median cost") {
  ExperimentConfig config;
  config.target_counts = {3};
  config.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) config.seeds.push_back(s);
  config.algorithms = {"3D-DTSPN-RFAC"};
  config.n_pts = {2, 16};
  config.n_psi = {4};
  std::vector<double> few, many;
  for (const auto& r : run_experiment(config)) {
    REQUIRE(r.status == "ok");
    (r.n_pts == 2 ? few : many).push_back(r.normalized_cost);
  }
  REQUIRE(few.size() == 20);
  CHECK(median(many) <= median(few));
}
