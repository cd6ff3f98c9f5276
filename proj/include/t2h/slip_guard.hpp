#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "t2h/command_mapper.hpp"
#include "t2h/tactile_pipeline.hpp"

namespace t2h::slip {

struct SlipConfig {
  double touch_threshold = 0.01;  ///< epsilon_t, activation and base slip threshold
  double tighten_step = 0.001;    ///< opening decrement per detection, m
  int reference_frames = 10;      ///< frames averaged into a slippage reference
  int window_length = 2;
  std::optional<double> threshold_cap;  ///< unset: thresholds double without bound

  void validate() const;
};

enum class GuardPhase { Inactive, Acquiring, Armed };

std::string_view to_string(GuardPhase phase) noexcept;
std::optional<GuardPhase> guard_phase_from_string(std::string_view text) noexcept;

enum class TriggeringSensor { Sensor1, Sensor2, Both };

std::string_view to_string(TriggeringSensor sensor) noexcept;
std::optional<TriggeringSensor> triggering_sensor_from_string(std::string_view text) noexcept;

struct SlipEvent {
  std::uint64_t tick = 0;
  TriggeringSensor sensor = TriggeringSensor::Sensor1;
  double ratio_s1 = 0.0;
  double ratio_s2 = 0.0;
  double previous_threshold = 0.0;
  int new_slip_count = 0;
  double new_threshold = 0.0;

  friend bool operator==(const SlipEvent&, const SlipEvent&) = default;
};

struct TightenCommand {
  std::uint64_t tick = 0;
  double displacement = 0.0;  ///< reduction of the gripper opening, m

  friend bool operator==(const TightenCommand&, const TightenCommand&) = default;
};

struct Detection {
  SlipEvent event;
  TightenCommand tighten;
};

struct GuardTick {
  GuardPhase phase_before = GuardPhase::Inactive;
  GuardPhase phase_after = GuardPhase::Inactive;
  std::optional<double> ratio_s1;  ///< against the slippage reference, Armed ticks only
  std::optional<double> ratio_s2;
  std::optional<Detection> detection;
};

/// Partial-autonomy slip prevention. Inactive until both sensors report touch
/// against the background, then averages `reference_frames` frames per sensor
/// into slippage references, then watches for variation against those.
/// Every detection tightens the grasp, doubles the threshold and re-acquires.
class SlipGuard {
 public:
  explicit SlipGuard(SlipConfig config);

  /// Inactive -> Acquiring when both background ratios strictly exceed the
  /// touch threshold. No-op in any other phase. Returns true on transition.
  bool maybe_activate(double ratio_s1, double ratio_s2);

  /// Buffers one frame per sensor while Acquiring; after `reference_frames`
  /// pairs installs the references, clears the windows and arms. Returns true
  /// on the tick it arms.
  bool acquire_references(const TactileFrame& frame1, const TactileFrame& frame2);

  /// Armed only. Compares against the slippage references using the
  /// background noise thresholds.
  std::optional<Detection> guard_step(const TactileFrame& frame1, const TactileFrame& frame2,
                                      double noise_threshold_s1, double noise_threshold_s2);

  /// Side trigger (gripper opening) drops the guard to Inactive and discards
  /// every piece of state. Returns true if the phase changed.
  bool deactivate_on_open(const command::ControllerInput& input);

  /// One control tick: deactivation first, then the phase's own action. A
  /// held side trigger keeps the guard Inactive for the whole tick.
  GuardTick tick(const command::ControllerInput& input, double background_ratio_s1,
                 double background_ratio_s2, const TactileFrame& frame1, const TactileFrame& frame2,
                 double noise_threshold_s1, double noise_threshold_s2);

  void reset();

  GuardPhase phase() const noexcept { return phase_; }
  int slip_count() const noexcept { return slip_count_; }
  /// Undefined (nullopt) while Inactive.
  std::optional<double> threshold(int sensor_id) const noexcept;
  const std::optional<RgbImage>& slippage_reference(int sensor_id) const noexcept;
  std::size_t acquired_frames() const noexcept { return acquire1_.size(); }
  const tactile::FrameWindow& window(int sensor_id) const noexcept;
  const SlipConfig& config() const noexcept { return config_; }

 private:
  struct ArmedResult {
    std::optional<double> ratio_s1;
    std::optional<double> ratio_s2;
    std::optional<Detection> detection;
  };
  ArmedResult evaluate_armed(const TactileFrame& frame1, const TactileFrame& frame2,
                             double noise_threshold_s1, double noise_threshold_s2);
  double scheduled_threshold(int slip_count) const noexcept;
  void begin_acquisition();

  SlipConfig config_;
  GuardPhase phase_ = GuardPhase::Inactive;
  int slip_count_ = 0;
  std::array<double, 2> thresholds_{};
  std::array<std::optional<RgbImage>, 2> references_;
  std::array<tactile::FrameWindow, 2> windows_;
  std::vector<RgbImage> acquire1_;
  std::vector<RgbImage> acquire2_;
};

}  // namespace t2h::slip
