#include "t2h/haptic_feedback.hpp"

#include <cmath>

#include "t2h/errors.hpp"

namespace t2h::haptic {

double feedback_curve(double p, double alpha) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("variation ratio outside [0,1]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be a positive finite gain");
  if (p == 1.0) return 1.0;
  const double f = std::log10(1.0 + alpha * p) / std::log10(1.0 + alpha);
  return f > 1.0 ? 1.0 : f;
}

TactileToHaptic::TactileToHaptic(HapticConfig config) : config_(config) {
  if (!(config_.alpha > 0.0)) throw ArgumentError("alpha must be > 0");
  if (config_.window_length < 1) throw ArgumentError("window length must be >= 1");
}

void TactileToHaptic::set_calibration(tactile::SensorCalibration s1, tactile::SensorCalibration s2) {
  sensor1_.emplace(std::move(s1), config_.window_length);
  sensor2_.emplace(std::move(s2), config_.window_length);
}

FeedbackSample TactileToHaptic::step(const TactileFrame& frame1, const TactileFrame& frame2) {
  if (!calibrated()) throw NotCalibratedError("haptic step before background calibration");
  if (frame1.tick != frame2.tick) throw ArgumentError("sensor frames from different ticks");
  const auto r1 = sensor1_->observe(frame1.image);
  const auto r2 = sensor2_->observe(frame2.image);

  FeedbackSample s;
  s.tick = frame1.tick;
  s.ratio_s1 = r1.ratio;
  s.ratio_s2 = r2.ratio;
  s.ratio_mean = (r1.ratio + r2.ratio) / 2.0;
  s.intensity = feedback_curve(s.ratio_mean, config_.alpha);
  last_ = s;
  return s;
}

FeedbackSample TactileToHaptic::stall(std::uint64_t tick) {
  FeedbackSample s = last_;
  s.tick = tick;
  s.stale = true;
  return s;
}

void TactileToHaptic::reset_windows() noexcept {
  if (sensor1_) sensor1_->reset();
  if (sensor2_) sensor2_->reset();
}

const tactile::VariationTracker* TactileToHaptic::sensor(int id) const noexcept {
  const auto& s = id == 1 ? sensor1_ : sensor2_;
  return s ? &*s : nullptr;
}

double TactileToHaptic::noise_threshold(int id) const {
  const auto* s = sensor(id);
  if (s == nullptr) throw NotCalibratedError("sensor not calibrated");
  return s->calibration().noise_threshold;
}

}  // namespace t2h::haptic
