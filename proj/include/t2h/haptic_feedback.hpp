#pragma once

#include <cstdint>
#include <optional>

#include "t2h/tactile_pipeline.hpp"

namespace t2h::haptic {

struct HapticConfig {
  double alpha = 1000.0;   ///< curve gain
  int window_length = 2;   ///< consecutive frames ANDed per pixel
};

struct FeedbackSample {
  std::uint64_t tick = 0;
  double ratio_s1 = 0.0;
  double ratio_s2 = 0.0;
  double ratio_mean = 0.0;
  double intensity = 0.0;
  bool stale = false;  ///< re-emitted from the previous tick because a frame was missing

  friend bool operator==(const FeedbackSample&, const FeedbackSample&) = default;
};

/// log10(1 + alpha p) / log10(1 + alpha). Requires p in [0,1], alpha > 0.
double feedback_curve(double p, double alpha);

/// Dual-sensor tactile-to-haptic mapping. One instance per session.
class TactileToHaptic {
 public:
  explicit TactileToHaptic(HapticConfig config);

  /// Installs new background calibrations and clears both windows.
  void set_calibration(tactile::SensorCalibration s1, tactile::SensorCalibration s2);
  bool calibrated() const noexcept { return sensor1_.has_value() && sensor2_.has_value(); }

  /// Throws NotCalibratedError before set_calibration.
  FeedbackSample step(const TactileFrame& frame1, const TactileFrame& frame2);

  /// A tick where at least one sensor produced no frame: windows untouched,
  /// the previous intensity is re-emitted and flagged stale.
  FeedbackSample stall(std::uint64_t tick);

  void reset_windows() noexcept;

  const HapticConfig& config() const noexcept { return config_; }
  const tactile::VariationTracker* sensor(int id) const noexcept;
  double noise_threshold(int id) const;

 private:
  HapticConfig config_;
  std::optional<tactile::VariationTracker> sensor1_;
  std::optional<tactile::VariationTracker> sensor2_;
  FeedbackSample last_{};
};

}  // namespace t2h::haptic
