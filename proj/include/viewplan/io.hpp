#pragma once

#include "viewplan/scenario.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace viewplan::io {

using nlohmann::json;

/// Value rounded to 9 significant digits, the precision of every number written to disk.
double round9(double v);

/// Pretty-printed document with a trailing newline.
std::string dump(const json& doc);

json read_json(const std::string& path);
/// Throws IoError when the file cannot be written.
void write_text(const std::string& path, const std::string& text);

json scene_to_json(const scenario::Scene& scene);
/// Structural parse only; call validate_scene for the joint constraints.
/// Throws IoError for missing or mistyped fields.
scenario::Scene scene_from_json(const json& doc);

scenario::Scene read_scene(const std::string& path);
void write_scene(const std::string& path, const scenario::Scene& scene);

/// Extra fields stored alongside a tour.
struct TourInfo {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::optional<double> altitude;
  double wall_clock = 0.0;
  double polyline_step = 0.0;  ///< > 0 adds a sampled polyline to every leg
};

json tour_to_json(const tour::Tour& tour, const dubins::VehicleParams& vehicle, const TourInfo& info);

json samples_to_json(const sampling::ClusterSamples& samples);
sampling::ClusterSamples samples_from_json(const json& doc);

/// Every field is optional and defaults to the desk sweep.
scenario::ExperimentConfig experiment_from_json(const json& doc);
json experiment_to_json(const scenario::ExperimentConfig& config);

}  // namespace viewplan::io
