#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rmc/controller.hpp"
#include "rmc/plants.hpp"
#include "rmc/simulator.hpp"

namespace rmc {

/// Parse failure in a configuration file; carries the 1-based line when known.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Scenario description as read from a `[section]` / `key = value` file.
/// Angles are held in radians; `units` records what the file declared.
struct ScenarioConfig {
  // [plant]
  std::string plant = "two_link";
  TwoLinkParams two_link;

  // [reference]
  std::string reference = "benchmark";
  Vec ref_amplitude;  // sine, smooth_start_sine
  Vec ref_offset;     // sine
  Vec ref_value;      // constant
  double ref_omega = 1.0;
  double ref_rate = 0.3;

  // [gains]
  Vec alpha;
  double kp = 0.0;
  Vec kd;
  Vec C;

  // [initial]
  std::string units = "rad";
  Vec initial_state;

  // [simulation]
  double T = 20.0;
  double dt = 1e-3;
  std::size_t decimation = 1;

  // [analysis]
  bool analysis_enabled = false;
  double safety = 0.1;
  std::optional<double> gamma1;
  std::optional<double> gamma2;

  /// Field-level checks; throws ValidationError naming the field.
  void validate() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Writes every field in radians with 17 significant digits.
std::string serialize_config(const ScenarioConfig& cfg);

PlantModel make_plant(const ScenarioConfig& cfg);
ReferenceTrajectory make_reference(const ScenarioConfig& cfg);
GainSet make_gains(const ScenarioConfig& cfg, const Vec& D);
Scenario make_scenario(const ScenarioConfig& cfg);

/// `[bounds]` section: zeta_nbar (m values), zeta_omega (strictly upper entries,
/// row-major, m (m - 1) / 2 values), gamma1, gamma2.
BoundEstimates parse_bounds(const std::string& text, std::size_t m);
BoundEstimates load_bounds(const std::filesystem::path& path, std::size_t m);

/// Comma separated decimals.
Vec parse_vector(const std::string& text, const std::string& field);
std::string format_double(double v);
std::string format_vector(const Vec& v);

}  // namespace rmc
