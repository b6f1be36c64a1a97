#include "viewplan/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace viewplan;
namespace fs = std::filesystem;

namespace {

/// Scratch directory removed at scope exit.
struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("viewplan_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Exit status of the CLI with stdout and stderr captured to `log`.
int run(const std::string& args, const std::string& log) {
  const std::string cmd = std::string(VIEWPLAN_CLI) + " " + args + " >" + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST_CASE("gen writes a valid, reproducible scene") {
  Workdir w;
  const auto log = w / "log.txt";
  REQUIRE(run("gen --targets 5 --seed 7 --out " + (w / "a.json"), log) == 0);
  REQUIRE(run("gen --targets 5 --seed 7 --out " + (w / "b.json"), log) == 0);
  CHECK(slurp(w / "a.json") == slurp(w / "b.json"));
  const auto scene = io::read_scene(w / "a.json");
  CHECK(scene.targets.size() == 5);
  CHECK_NOTHROW(scenario::validate_scene(scene));

  REQUIRE(run("gen --targets 5 --seed 8 --out " + (w / "c.json"), log) == 0);
  CHECK(slurp(w / "a.json") != slurp(w / "c.json"));
}

TEST_CASE("exit codes") {
  Workdir w;
  const auto log = w / "log.txt";
  CHECK(run("gen --targets 30 --width 1000 --depth 1000 --out " + (w / "x.json"), log) == 2);
  CHECK(slurp(log).find("target separation") != std::string::npos);
  CHECK_FALSE(fs::exists(w / "x.json"));

  CHECK(run("gen --targets 3 --height-cap 330 --height-max 330 --out " + (w / "x.json"), log) == 2);
  CHECK(slurp(log).find("viewing range") != std::string::npos);

  CHECK(run("gen --targets 3 --bogus-flag --out " + (w / "x.json"), log) == 2);
  CHECK(run("", log) == 2);
  CHECK(run("plan " + (w / "missing.json") + " --alg 3D-DTSPN-RFAC-2-2", log) == 4);

  REQUIRE(run("gen --targets 3 --seed 2 --out " + (w / "s.json"), log) == 0);
  CHECK(run("plan " + (w / "s.json") + " --alg 3D-DTSPN-FOO-2-2", log) == 2);
  CHECK(slurp(log).find("algorithm id") != std::string::npos);
  CHECK(run("plan " + (w / "s.json") + " --alg 3D-DTSPN-RFAC-2-2 --out " + (w / "no/such/dir/t.json"), log) == 4);

  // constant-altitude tours need a common altitude
  REQUIRE(run("gen --targets 3 --seed 2 --d-max 260 --h-view 120 --out " + (w / "tall.json"), log) == 0);
  CHECK(run("plan " + (w / "tall.json") + " --alg 2D-DTSP-4 --out " + (w / "t.json"), log) == 2);
  CHECK(slurp(log).find("common altitude") != std::string::npos);
  CHECK(run("gen --targets 3 --seed 2 --d-max 260 --h-view 120 --planar --out " + (w / "tall.json"), log) == 2);
}

TEST_CASE("plan writes tours, meshes and polylines") {
  Workdir w;
  const auto log = w / "log.txt";
  REQUIRE(run("gen --targets 3 --seed 1 --out " + (w / "s.json"), log) == 0);
  const auto scene = io::read_scene(w / "s.json");

  REQUIRE(run("plan " + (w / "s.json") + " --alg 3D-DTSPN-RFAC-8-32 --seed 1 --export-meshes " + (w / "meshes") +
                  " --export-polyline --export-samples " + (w / "samples.json") + " --out " + (w / "dtspn.json"),
              log) == 0);
  const auto dtspn = io::read_json(w / "dtspn.json");
  REQUIRE(dtspn["configurations"].size() == 3);
  std::set<std::size_t> seen;
  for (const auto& c : dtspn["configurations"]) seen.insert(c["target"].get<std::size_t>());
  CHECK(seen.size() == 3);
  CHECK(dtspn["legs"][0]["polyline"].size() > 2);
  for (int i = 0; i < 3; ++i) {
    const auto mesh = geom::read_obj(w / ("meshes/volume_" + std::to_string(i) + ".obj"));
    CHECK(mesh.num_faces() > 0);
  }
  const auto samples = io::samples_from_json(io::read_json(w / "samples.json"));
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].configs.size() == 256);

  REQUIRE(run("plan " + (w / "s.json") + " --alg 3D-METSPN-RFAC-8-32 --seed 1 --out " + (w / "metspn.json"), log) == 0);
  const auto metspn = io::read_json(w / "metspn.json");
  CHECK(metspn["configurations"].size() == 3);
  CHECK(metspn["wall_clock_s"].get<double>() < dtspn["wall_clock_s"].get<double>());

  // determinism apart from the clock
  REQUIRE(run("plan " + (w / "s.json") + " --alg 3D-METSPN-RFAC-8-32 --seed 1 --out " + (w / "again.json"), log) == 0);
  auto a = metspn, b = io::read_json(w / "again.json");
  a.erase("wall_clock_s");
  b.erase("wall_clock_s");
  CHECK(a == b);

  REQUIRE(run("plan " + (w / "s.json") + " --alg 2D-DTSP-8 --out " + (w / "overhead.json"), log) == 0);
  const auto overhead = io::read_json(w / "overhead.json");
  CHECK(overhead["mode"] == "planar");
  const double z = overhead["altitude"].get<double>();
  CHECK(z >= scene.env.z_min);
  for (const auto& c : overhead["configurations"]) {
    const auto& t = scene.targets[c["target"].get<std::size_t>()];
    CHECK(c["x"].get<double>() == doctest::Approx(t.position.x()));
    CHECK(c["y"].get<double>() == doctest::Approx(t.position.y()));
    CHECK(c["z"].get<double>() == doctest::Approx(z));
  }
  CHECK(slurp(log).find("z* =") != std::string::npos);
}

TEST_CASE("experiment with resume") {
  Workdir w;
  const auto log = w / "log.txt";
  std::ofstream(w / "config.json") << R"({"target_counts": [3], "seeds": [1, 2],
    "algorithms": ["3D-DTSPN-RFAC", "3D-METSPN-RFAC"], "n_pts": [2], "n_psi": [2, 4], "resolution": 25})";
  REQUIRE(run("experiment " + (w / "config.json") + " --quiet --output " + (w / "out.csv"), log) == 0);
  const auto full = slurp(w / "out.csv");
  CHECK(count_lines(w / "out.csv") == 9);
  CHECK(full.rfind(scenario::kCsvHeader, 0) == 0);

  // drop the last three rows, as if interrupted
  {
    std::istringstream in(full);
    std::string line, head;
    for (int k = 0; k < 6 && std::getline(in, line); ++k) head += line + "\n";
    std::ofstream(w / "out.csv", std::ios::trunc) << head;
  }
  REQUIRE(run("experiment " + (w / "config.json") + " --quiet --resume --output " + (w / "out.csv"), log) == 0);
  const auto rows = scenario::read_csv(w / "out.csv");
  CHECK(rows.size() == 8);
  std::set<std::string> keys;
  for (const auto& r : rows) keys.insert(r.key());
  CHECK(keys.size() == 8);

  std::ofstream(w / "bad.json") << R"({"algorithms": ["3D-XYZ-RFAC"]})";
  CHECK(run("experiment " + (w / "bad.json") + " --output " + (w / "bad.csv"), log) == 2);
}
