#pragma once

// The fixed-rate control loop. Per tick: controls, operator input (zero when
// the operator is silent), command mapping, last tick's tighten, physics,
// rendering, calibration collection, haptic feedback, slip guard, telemetry.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "t2h/command_mapper.hpp"
#include "t2h/grasp_sim.hpp"
#include "t2h/haptic_feedback.hpp"
#include "t2h/metrics.hpp"
#include "t2h/script.hpp"
#include "t2h/session_config.hpp"
#include "t2h/slip_guard.hpp"
#include "t2h/telemetry.hpp"

namespace t2h::session {

class Session {
 public:
  explicit Session(SessionConfig config);

  /// Advances one tick and returns its telemetry.
  TelemetryRecord step(const OperatorTick& op);

  std::uint64_t next_tick() const noexcept { return tick_; }
  const SessionConfig& config() const noexcept { return config_; }
  bool partial_autonomy() const noexcept { return partial_autonomy_; }
  const sim::Simulator& simulator() const noexcept { return simulator_; }
  const sim::WorldState& world() const noexcept { return world_; }
  const haptic::TactileToHaptic& haptic() const noexcept { return haptic_; }
  const slip::SlipGuard& guard() const noexcept { return guard_; }
  /// 8-bit RGB frames rendered during the last step, sensor 1 then 2.
  const std::array<std::vector<std::uint8_t>, 2>& last_frames() const noexcept { return frames_; }
  /// Control messages ignored because their object name was unknown.
  int rejected_controls() const noexcept { return rejected_controls_; }

 private:
  void apply_control(const ControlMessage& control);
  void reset_world();
  void start_calibration();

  SessionConfig config_;
  bool partial_autonomy_;
  sim::Simulator simulator_;
  sim::WorldState world_;
  command::CommandMapper mapper_;
  haptic::TactileToHaptic haptic_;
  slip::SlipGuard guard_;

  std::uint64_t tick_ = 0;
  double pending_tighten_ = 0.0;
  bool previous_b_ = false;
  CalibrationState calibration_ = CalibrationState::None;
  std::vector<TactileFrame> collected_s1_;
  std::vector<TactileFrame> collected_s2_;
  std::array<std::vector<std::uint8_t>, 2> frames_;
  int rejected_controls_ = 0;
};

/// Called after every tick with what the operator supplied and what came out.
using TickObserver = std::function<void(const OperatorTick&, const TelemetryRecord&, const Session&)>;

struct RunResult {
  std::vector<TelemetryRecord> telemetry;
  std::string telemetry_sha256;
  std::optional<SessionMetrics> metrics;  ///< empty for a zero-tick run
};

/// Runs until the source reports it is finished.
RunResult run_session(const SessionConfig& config, OperatorSource& source, const TickObserver& observer = {});

/// SHA-256 over the canonical telemetry lines.
std::string telemetry_sha256(std::span<const TelemetryRecord> records);

}  // namespace t2h::session
