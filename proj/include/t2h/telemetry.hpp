#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "t2h/command_mapper.hpp"
#include "t2h/grasp_sim.hpp"
#include "t2h/haptic_feedback.hpp"
#include "t2h/slip_guard.hpp"

namespace t2h::session {

enum class CalibrationState { None, Collecting, Ready };

std::string_view to_string(CalibrationState state) noexcept;

struct WorldSummary {
  command::Vec3 gripper_position{};
  command::Vec3 gripper_orientation{};
  double opening = 0.0;
  double opening_setpoint = 0.0;
  command::Vec3 object_position{};
  sim::ObjectStatus object_status = sim::ObjectStatus::Free;
  std::string object;
  double normal_force = 0.0;
  bool damaged = false;
  bool delivered = false;
  int drop_count = 0;
  bool in_keepout = false;
  int keepout_incursions = 0;

  friend bool operator==(const WorldSummary&, const WorldSummary&) = default;
};

struct GuardSummary {
  bool enabled = false;
  slip::GuardPhase phase = slip::GuardPhase::Inactive;
  int slip_count = 0;
  std::optional<double> threshold;
  std::optional<double> ratio_s1;  ///< against the slippage references, Armed ticks only
  std::optional<double> ratio_s2;
  std::optional<slip::SlipEvent> slip_event;
  double tighten_applied = 0.0;  ///< displacement applied this tick from last tick's detection

  friend bool operator==(const GuardSummary&, const GuardSummary&) = default;
};

struct TelemetryRecord {
  std::uint64_t tick = 0;
  bool input_fresh = false;
  std::optional<haptic::FeedbackSample> feedback;  ///< empty until the first calibration completes
  command::RobotCommand command;
  WorldSummary world;
  GuardSummary guard;
  CalibrationState calibration = CalibrationState::None;
  std::optional<double> eta_s1;
  std::optional<double> eta_s2;
  std::string frame_sha256_s1;
  std::string frame_sha256_s2;

  /// Haptic intensity, 0 before calibration.
  double intensity() const noexcept { return feedback ? feedback->intensity : 0.0; }

  friend bool operator==(const TelemetryRecord&, const TelemetryRecord&) = default;
};

nlohmann::json telemetry_to_json(const TelemetryRecord& record);
/// Throws ReplayError(line 0) on malformed documents; callers add the line.
TelemetryRecord telemetry_from_json(const nlohmann::json& doc);

/// The canonical text a record contributes to a stream hash.
std::string telemetry_line(const TelemetryRecord& record);

}  // namespace t2h::session
