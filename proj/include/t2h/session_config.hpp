#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "t2h/command_mapper.hpp"
#include "t2h/grasp_sim.hpp"
#include "t2h/haptic_feedback.hpp"
#include "t2h/slip_guard.hpp"

namespace t2h::session {

/// Every tunable of a session.
struct SessionConfig {
  // tactile-to-haptic
  double alpha = 1000.0;
  int reference_frames = 10;     ///< N
  int calibration_frames = 100;  ///< K
  double touch_threshold = 0.01;
  int window_length = 2;         ///< c

  // controller-to-robot
  double linear_max = 0.1;
  double angular_max = 1.0;
  double linear_deadband = 0.005;
  double angular_deadband = 0.05;
  int smoothing_window = 5;
  double gripper_speed = 0.005;

  // partial autonomy
  bool partial_autonomy = true;
  double tighten_step = 0.001;
  std::optional<double> threshold_cap;

  // session / world
  double tick_rate_hz = 60.0;
  std::uint64_t seed = 42;
  std::string object = "plum";
  int frame_width = 64;
  int frame_height = 64;
  double noise_amplitude = 0.02;
  bool auto_calibrate = true;     ///< collect the background at start without a B press
  int tactile_stream_every = 6;   ///< ticks between tactile frames on the wire; 0 disables

  sim::PhysicsConfig physics;     ///< gripper_speed mirrors the top-level key
  sim::RenderConfig imprint;      ///< width, height and noise mirror the top-level keys
  std::vector<sim::ObjectModel> objects;  ///< added to (or overriding) the built-in presets

  /// Throws ConfigError describing the first invalid value.
  void validate() const;

  double dt() const noexcept { return 1.0 / tick_rate_hz; }
  haptic::HapticConfig haptic_config() const;
  command::VelocityLimits velocity_limits() const;
  slip::SlipConfig slip_config() const;
  sim::PhysicsConfig physics_config() const;
  sim::RenderConfig render_config() const;
  /// Looks `name` (default: `object`) up in `objects`, then in the presets.
  sim::ObjectModel resolve_object(std::optional<std::string_view> name = std::nullopt) const;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

/// Rejects unknown keys and wrongly typed values with ConfigError.
SessionConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const SessionConfig& config);

/// `base` with a JSON merge patch applied, then validated.
SessionConfig apply_overrides(const SessionConfig& base, const nlohmann::json& patch);

/// Key-value document (YAML); JSON text is accepted as well.
SessionConfig parse_config(std::string_view text);
SessionConfig load_config(const std::filesystem::path& path);
std::string config_to_yaml(const SessionConfig& config);

}  // namespace t2h::session
