#include "viewplan/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace viewplan;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("viewplan_io_" + name);
}

}  // namespace

TEST_CASE("nine significant digits") {
  CHECK(io::round9(1.0 / 3.0) == 0.333333333);
  CHECK(io::round9(123456.7891234) == 123456.789);
  CHECK(io::round9(0.0) == 0.0);
  CHECK(io::round9(-2.5e-7) == -2.5e-7);
}

TEST_CASE("scene JSON round trip") {
  scenario::ScenarioParams p;
  p.seed = 5;
  const auto scene = scenario::generate_scene(p);
  const auto doc = io::scene_to_json(scene);
  for (const char* key : {"region", "z_min", "z_max", "objects", "targets", "sensor", "vehicle"}) CHECK(doc.contains(key));
  CHECK(doc["targets"][0].contains("class"));
  CHECK(doc["vehicle"].contains("rho_min"));

  const auto back = io::scene_from_json(doc);
  CHECK_NOTHROW(scenario::validate_scene(back));
  REQUIRE(back.targets.size() == scene.targets.size());
  for (std::size_t i = 0; i < scene.targets.size(); ++i) {
    CHECK((back.targets[i].position - scene.targets[i].position).norm() < 1e-5);
    CHECK(back.targets[i].placement == scene.targets[i].placement);
  }
  REQUIRE(back.env.objects.size() == scene.env.objects.size());
  CHECK(back.env.objects[0].height == doctest::Approx(scene.env.objects[0].height));
  CHECK(back.sensor.d_max == scene.sensor.d_max);
  CHECK(back.vehicle.gamma_max == doctest::Approx(scene.vehicle.gamma_max));

  // a second trip is byte-identical
  CHECK(io::dump(io::scene_to_json(back)) == io::dump(doc));

  const auto path = temp_file("scene.json");
  io::write_scene(path.string(), scene);
  CHECK(slurp(path) == io::dump(doc));
  CHECK(io::dump(io::scene_to_json(io::read_scene(path.string()))) == io::dump(doc));
  std::filesystem::remove(path);
}

TEST_CASE("malformed scenes") {
  CHECK_THROWS_AS(io::read_scene("/nonexistent/scene.json"), IoError);
  CHECK_THROWS_AS(io::scene_from_json(io::json::parse(R"({"region": []})")), IoError);
  scenario::ScenarioParams p;
  auto doc = io::scene_to_json(scenario::generate_scene(p));
  doc["targets"][0]["class"] = "balcony";
  CHECK_THROWS_AS(io::scene_from_json(doc), Error);
  doc = io::scene_to_json(scenario::generate_scene(p));
  doc["sensor"]["d_max"] = "far";
  CHECK_THROWS_AS(io::scene_from_json(doc), IoError);

  const auto path = temp_file("broken.json");
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(io::read_json(path.string()), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("tour JSON") {
  sampling::ClusterSamples s(3);
  for (int i = 0; i < 3; ++i) {
    s[i].target = static_cast<std::size_t>(i);
    s[i].configs.emplace_back(900.0 * std::cos(2.1 * i), 900.0 * std::sin(2.1 * i), 300.0 + 30 * i, 0.5 * i, 0.0);
  }
  const dubins::VehicleParams v;
  const auto t3 = tour::plan_dtspn(s, tour::CostMode::Exact3D, v);
  io::TourInfo info{"3D-DTSPN-RFAC-1-1", 9, std::nullopt, 0.5, v.rho_min / 10};
  const auto doc = io::tour_to_json(t3, v, info);
  CHECK(doc["mode"] == "3d");
  CHECK(doc["seed"] == 9);
  CHECK(doc["algorithm"] == "3D-DTSPN-RFAC-1-1");
  CHECK(doc["configurations"].size() == 3);
  CHECK(doc["legs"].size() == 3);
  CHECK_FALSE(doc.contains("altitude"));
  double sum = 0.0;
  for (const auto& leg : doc["legs"]) {
    sum += leg["length"].get<double>();
    CHECK(leg.contains("vertical_word"));
    CHECK(leg["polyline"].size() >= 2);
  }
  CHECK(sum == doctest::Approx(doc["length"].get<double>()).epsilon(1e-8));
  CHECK(doc["normalized_cost"].get<double>() == doctest::Approx(doc["length"].get<double>() / v.rho_min).epsilon(1e-8));

  const auto t2 = tour::plan_dtspn(s, tour::CostMode::Planar2D, v);
  info.altitude = 300.0;
  info.polyline_step = 0.0;
  const auto d2 = io::tour_to_json(t2, v, info);
  CHECK(d2["mode"] == "planar");
  CHECK(d2["altitude"] == 300.0);
  CHECK(d2["legs"][0].contains("altitude"));
  CHECK_FALSE(d2["legs"][0].contains("polyline"));
}

TEST_CASE("samples JSON round trip") {
  sampling::ClusterSamples s(2);
  s[0].target = 0;
  s[0].configs = {{1.5, 2.25, 300, 0.1, 0.0}, {3, 4, 310, 1.2, -0.1}};
  s[1].target = 4;
  s[1].configs = {{-5, 6, 320, 3.0, 0.2}};
  const auto back = io::samples_from_json(io::samples_to_json(s));
  REQUIRE(back.size() == 2);
  CHECK(back[1].target == 4);
  REQUIRE(back[0].configs.size() == 2);
  CHECK(back[0].configs[1].gamma == doctest::Approx(-0.1));
  CHECK(back[0].configs[0].position() == Point3(1.5, 2.25, 300));
}

TEST_CASE("experiment config") {
  const auto defaults = io::experiment_from_json(io::json::object());
  CHECK(defaults.target_counts == std::vector<int>{3, 5});
  CHECK(defaults.n_pts == std::vector<int>{2, 8, 32});

  const auto c = io::experiment_from_json(io::json::parse(R"({
    "target_counts": [4], "seeds": [3, 4], "algorithms": ["3D-METSPN-GWF", "2D-DTSP"],
    "n_pts": [16], "n_psi": [2], "output": "out.csv",
    "scenario": {"num_objects": 6, "placement": {"ground": 1, "wall": 0, "roof": 0}, "sensor": {"d_max": 450}}
  })"));
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(c.algorithms.size() == 2);
  CHECK(c.output == "out.csv");
  CHECK(c.scenario.num_objects == 6);
  CHECK(c.scenario.placement.wall == 0.0);
  CHECK(c.scenario.sensor.d_max == 450.0);
  CHECK(c.scenario.sensor.h_view == scenario::ScenarioParams{}.sensor.h_view);

  const auto again = io::experiment_from_json(io::experiment_to_json(c));
  CHECK(io::dump(io::experiment_to_json(again)) == io::dump(io::experiment_to_json(c)));

  CHECK_THROWS_AS(io::experiment_from_json(io::json::parse(R"({"algorithms": ["3D-TSP-RFAC"]})")), ValidationError);
  CHECK_THROWS_AS(io::experiment_from_json(io::json::parse(R"({"seeds": "many"})")), IoError);
}
