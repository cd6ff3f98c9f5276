#include "t2h/slip_guard.hpp"

#include <algorithm>
#include <cmath>

#include "t2h/errors.hpp"

namespace t2h::slip {

void SlipConfig::validate() const {
  if (!(touch_threshold > 0.0)) throw ArgumentError("touch threshold must be > 0");
  if (!(tighten_step > 0.0)) throw ArgumentError("tighten step must be > 0");
  if (reference_frames < 1) throw ArgumentError("reference frame count must be >= 1");
  if (window_length < 1) throw ArgumentError("window length must be >= 1");
  if (threshold_cap && !(*threshold_cap >= touch_threshold)) {
    throw ArgumentError("threshold cap must be >= touch threshold");
  }
}

std::string_view to_string(GuardPhase phase) noexcept {
  switch (phase) {
    case GuardPhase::Inactive: return "inactive";
    case GuardPhase::Acquiring: return "acquiring";
    case GuardPhase::Armed: return "armed";
  }
  return "inactive";
}

std::optional<GuardPhase> guard_phase_from_string(std::string_view text) noexcept {
  for (auto p : {GuardPhase::Inactive, GuardPhase::Acquiring, GuardPhase::Armed}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::string_view to_string(TriggeringSensor sensor) noexcept {
  switch (sensor) {
    case TriggeringSensor::Sensor1: return "1";
    case TriggeringSensor::Sensor2: return "2";
    case TriggeringSensor::Both: return "both";
  }
  return "both";
}

std::optional<TriggeringSensor> triggering_sensor_from_string(std::string_view text) noexcept {
  for (auto s : {TriggeringSensor::Sensor1, TriggeringSensor::Sensor2, TriggeringSensor::Both}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

SlipGuard::SlipGuard(SlipConfig config)
    : config_(config),
      windows_{tactile::FrameWindow(std::max(config.window_length, 1)),
               tactile::FrameWindow(std::max(config.window_length, 1))} {
  config_.validate();
}

double SlipGuard::scheduled_threshold(int slip_count) const noexcept {
  const double zeta = std::ldexp(config_.touch_threshold, slip_count);
  return config_.threshold_cap ? std::min(zeta, *config_.threshold_cap) : zeta;
}

void SlipGuard::begin_acquisition() {
  phase_ = GuardPhase::Acquiring;
  acquire1_.clear();
  acquire2_.clear();
  for (auto& w : windows_) w.clear();
}

bool SlipGuard::maybe_activate(double ratio_s1, double ratio_s2) {
  if (phase_ != GuardPhase::Inactive) return false;
  if (!(ratio_s1 > config_.touch_threshold && ratio_s2 > config_.touch_threshold)) return false;
  slip_count_ = 0;
  thresholds_.fill(scheduled_threshold(0));
  references_ = {};
  begin_acquisition();
  return true;
}

bool SlipGuard::acquire_references(const TactileFrame& frame1, const TactileFrame& frame2) {
  if (phase_ != GuardPhase::Acquiring) return false;
  acquire1_.push_back(frame1.image);
  acquire2_.push_back(frame2.image);
  if (acquire1_.size() < static_cast<std::size_t>(config_.reference_frames)) return false;

  references_[0] = tactile::mean_image(acquire1_);
  references_[1] = tactile::mean_image(acquire2_);
  acquire1_.clear();
  acquire2_.clear();
  for (auto& w : windows_) w.clear();
  phase_ = GuardPhase::Armed;
  return true;
}

SlipGuard::ArmedResult SlipGuard::evaluate_armed(const TactileFrame& frame1, const TactileFrame& frame2,
                                                 double noise_threshold_s1, double noise_threshold_s2) {
  ArmedResult out;
  if (phase_ != GuardPhase::Armed) return out;
  const auto r1 = tactile::detect_variation(frame1.image, windows_[0], *references_[0], noise_threshold_s1);
  const auto r2 = tactile::detect_variation(frame2.image, windows_[1], *references_[1], noise_threshold_s2);
  windows_[0].push(r1.binary);
  windows_[1].push(r2.binary);
  out.ratio_s1 = r1.ratio;
  out.ratio_s2 = r2.ratio;

  const bool hit1 = r1.ratio > thresholds_[0];
  const bool hit2 = r2.ratio > thresholds_[1];
  if (!hit1 && !hit2) return out;

  Detection d;
  d.event.tick = frame1.tick;
  d.event.sensor = hit1 && hit2 ? TriggeringSensor::Both
                                : (hit1 ? TriggeringSensor::Sensor1 : TriggeringSensor::Sensor2);
  d.event.ratio_s1 = r1.ratio;
  d.event.ratio_s2 = r2.ratio;
  d.event.previous_threshold = hit1 ? thresholds_[0] : thresholds_[1];
  d.tighten = TightenCommand{frame1.tick, config_.tighten_step};

  begin_acquisition();
  ++slip_count_;
  thresholds_.fill(scheduled_threshold(slip_count_));
  d.event.new_slip_count = slip_count_;
  d.event.new_threshold = thresholds_[0];
  out.detection = d;
  return out;
}

std::optional<Detection> SlipGuard::guard_step(const TactileFrame& frame1, const TactileFrame& frame2,
                                               double noise_threshold_s1, double noise_threshold_s2) {
  return evaluate_armed(frame1, frame2, noise_threshold_s1, noise_threshold_s2).detection;
}

bool SlipGuard::deactivate_on_open(const command::ControllerInput& input) {
  if (!input.side_trigger) return false;
  const bool changed = phase_ != GuardPhase::Inactive;
  reset();
  return changed;
}

GuardTick SlipGuard::tick(const command::ControllerInput& input, double background_ratio_s1,
                          double background_ratio_s2, const TactileFrame& frame1,
                          const TactileFrame& frame2, double noise_threshold_s1,
                          double noise_threshold_s2) {
  GuardTick out;
  out.phase_before = phase_;
  if (input.side_trigger) {
    deactivate_on_open(input);
    out.phase_after = phase_;
    return out;
  }
  switch (phase_) {
    case GuardPhase::Inactive:
      maybe_activate(background_ratio_s1, background_ratio_s2);
      break;
    case GuardPhase::Acquiring:
      acquire_references(frame1, frame2);
      break;
    case GuardPhase::Armed: {
      auto armed = evaluate_armed(frame1, frame2, noise_threshold_s1, noise_threshold_s2);
      out.ratio_s1 = armed.ratio_s1;
      out.ratio_s2 = armed.ratio_s2;
      out.detection = armed.detection;
      break;
    }
  }
  out.phase_after = phase_;
  return out;
}

void SlipGuard::reset() {
  phase_ = GuardPhase::Inactive;
  slip_count_ = 0;
  thresholds_.fill(0.0);
  references_ = {};
  acquire1_.clear();
  acquire2_.clear();
  for (auto& w : windows_) w.clear();
}

std::optional<double> SlipGuard::threshold(int sensor_id) const noexcept {
  if (phase_ == GuardPhase::Inactive) return std::nullopt;
  return thresholds_[sensor_id == 1 ? 0 : 1];
}

const std::optional<RgbImage>& SlipGuard::slippage_reference(int sensor_id) const noexcept {
  return references_[sensor_id == 1 ? 0 : 1];
}

const tactile::FrameWindow& SlipGuard::window(int sensor_id) const noexcept {
  return windows_[sensor_id == 1 ? 0 : 1];
}

}  // namespace t2h::slip
