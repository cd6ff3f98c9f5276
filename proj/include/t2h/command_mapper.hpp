#pragma once

#include <array>
#include <cstdint>
#include <deque>

namespace t2h::command {

using Vec3 = std::array<double, 3>;
/// linear (m/s) followed by angular (rad/s)
using Twist = std::array<double, 6>;

struct ControllerInput {
  std::uint64_t tick = 0;
  Vec3 linear_velocity{};
  Vec3 angular_velocity{};
  bool button_a = false;  ///< hold-to-move
  bool button_b = false;  ///< background calibration request
  bool back_trigger = false;  ///< close
  bool side_trigger = false;  ///< open

  friend bool operator==(const ControllerInput&, const ControllerInput&) = default;
};

struct VelocityLimits {
  double linear_max = 0.1;
  double angular_max = 1.0;
  double linear_deadband = 0.005;
  double angular_deadband = 0.05;
  int smoothing_window = 5;
  double gripper_speed = 0.005;

  /// Throws ArgumentError unless 0 < deadband < max, window >= 1, speed > 0.
  void validate() const;
};

struct RobotCommand {
  std::uint64_t tick = 0;
  Twist twist{};
  double gripper_velocity = 0.0;  ///< negative closes
  bool fault = false;             ///< input rejected (non-finite component)

  friend bool operator==(const RobotCommand&, const RobotCommand&) = default;
};

double clamp_component(double value, double max);
/// Zero when |value| < deadband.
double deadband_component(double value, double deadband);

/// Back trigger closes at -speed, side trigger opens at +speed, closing wins.
double gripper_command(const ControllerInput& input, double speed);

/// Gated, smoothed, clamped and deadbanded controller-to-robot mapping.
class CommandMapper {
 public:
  explicit CommandMapper(VelocityLimits limits);

  RobotCommand map(const ControllerInput& input);
  void reset();

  const VelocityLimits& limits() const noexcept { return limits_; }

 private:
  VelocityLimits limits_;
  // Last w samples per twist component; refilled with zeros on reset since
  // the arm is at rest whenever the A button is up.
  std::array<std::deque<double>, 6> history_;
};

}  // namespace t2h::command
