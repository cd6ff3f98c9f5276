#include "t2h/command_mapper.hpp"

#include <algorithm>
#include <cmath>

#include "t2h/errors.hpp"

namespace t2h::command {

void VelocityLimits::validate() const {
  if (!(linear_deadband > 0.0 && linear_deadband < linear_max)) {
    throw ArgumentError("linear limits need 0 < deadband < max");
  }
  if (!(angular_deadband > 0.0 && angular_deadband < angular_max)) {
    throw ArgumentError("angular limits need 0 < deadband < max");
  }
  if (smoothing_window < 1) throw ArgumentError("smoothing window must be >= 1");
  if (!(gripper_speed > 0.0)) throw ArgumentError("gripper speed must be > 0");
}

double clamp_component(double value, double max) { return std::clamp(value, -max, max); }

double deadband_component(double value, double deadband) {
  return std::fabs(value) < deadband ? 0.0 : value;
}

double gripper_command(const ControllerInput& input, double speed) {
  if (input.back_trigger) return -speed;
  if (input.side_trigger) return speed;
  return 0.0;
}

CommandMapper::CommandMapper(VelocityLimits limits) : limits_(limits) {
  limits_.validate();
  reset();
}

void CommandMapper::reset() {
  for (auto& h : history_) h.assign(static_cast<std::size_t>(limits_.smoothing_window), 0.0);
}

RobotCommand CommandMapper::map(const ControllerInput& input) {
  RobotCommand cmd;
  cmd.tick = input.tick;

  Twist raw{};
  std::copy(input.linear_velocity.begin(), input.linear_velocity.end(), raw.begin());
  std::copy(input.angular_velocity.begin(), input.angular_velocity.end(), raw.begin() + 3);
  if (!std::all_of(raw.begin(), raw.end(), [](double v) { return std::isfinite(v); })) {
    reset();
    cmd.fault = true;
    return cmd;
  }

  cmd.gripper_velocity = gripper_command(input, limits_.gripper_speed);

  if (!input.button_a) {
    reset();
    return cmd;
  }

  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto& h = history_[i];
    h.push_back(raw[i]);
    h.pop_front();
    double sum = 0.0;
    for (double v : h) sum += v;
    const double smoothed = sum / static_cast<double>(h.size());
    const bool linear = i < 3;
    const double max = linear ? limits_.linear_max : limits_.angular_max;
    const double deadband = linear ? limits_.linear_deadband : limits_.angular_deadband;
    cmd.twist[i] = deadband_component(clamp_component(smoothed, max), deadband);
  }
  return cmd;
}

}  // namespace t2h::command
