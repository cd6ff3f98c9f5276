#pragma once

// Deterministic desk-scale stand-in for the arm, the parallel gripper, the
// grasped object and the two gel sensors on the fingers.
//
// Frames: world z is up, the table top is z = 0. The fingers close along the
// gripper's y axis; each gel pad spans gripper-frame x (image columns) and z
// (image rows, row 0 at the top). Orientation is integrated and reported but
// does not change the contact geometry.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2h/command_mapper.hpp"
#include "t2h/image.hpp"

namespace t2h::sim {

using command::Vec3;

enum class ObjectStatus { Free, Grasped, Attached, Slipping, Dropped, Damaged, Delivered };

std::string_view to_string(ObjectStatus status) noexcept;
std::optional<ObjectStatus> object_status_from_string(std::string_view text) noexcept;

struct ObjectModel {
  std::string name;
  double rest_width = 0.04;          ///< m, uncompressed width between the pads
  double stiffness = 200.0;          ///< N/m
  double friction_coefficient = 0.6;
  double mass = 0.05;                ///< kg
  double damage_compression = 0.01;  ///< m of squeeze beyond which the object is ruined
  double stem_force = 0.0;           ///< N of stem tension needed to detach; 0 = not attached
  Vec3 initial_position{0.0, 0.0, 0.0};  ///< object centre; z below rest_width/2 is lifted to it

  void validate() const;
  double rest_height() const noexcept { return rest_width / 2.0; }
  friend bool operator==(const ObjectModel&, const ObjectModel&) = default;
};

/// The nine built-in object presets.
const std::vector<ObjectModel>& builtin_objects();
std::optional<ObjectModel> find_builtin_object(std::string_view name);

struct PhysicsConfig {
  double gravity = 9.81;
  double opening_max = 0.08;
  double initial_opening = 0.08;
  double gripper_speed = 0.005;  ///< opening rate limit, m/s
  Vec3 gripper_start{0.0, 0.0, 0.10};
  double pad_half_width = 0.012;   ///< gel half extent along gripper x, m
  double pad_half_height = 0.012;  ///< gel half extent along z, m
  double slip_gain = 0.15;         ///< relative slip speed per newton of missing grip, (m/s)/N
  double max_slip_speed = 0.1;
  double max_fall_speed = 2.0;
  double stem_stiffness = 50.0;    ///< N/m of stem stretch
  Vec3 goal_center{0.25, 0.0, 0.0};
  double goal_radius = 0.06;
  Vec3 keepout_center{0.12, 0.15, 0.0};
  double keepout_radius = 0.04;
  double keepout_height = 0.19;

  void validate() const;
  friend bool operator==(const PhysicsConfig&, const PhysicsConfig&) = default;
};

struct RenderConfig {
  int width = 64;
  int height = 64;
  double noise_amplitude = 0.02;       ///< half-width of the uniform per-channel noise
  double imprint_radius_x = 0.00375;   ///< fully developed contact patch semi-axes, m
  double imprint_radius_z = 0.003;
  double imprint_saturation_force = 0.04;  ///< N at which the patch stops growing
  double imprint_contrast = 1.0;       ///< scales the imprint colour shift

  void validate() const;
  friend bool operator==(const RenderConfig&, const RenderConfig&) = default;
};

struct GripperState {
  Vec3 position{};
  Vec3 orientation{};  ///< roll, pitch, yaw, rad
  Vec3 velocity{};     ///< realised linear velocity over the last step
  double opening = 0.0;
  double opening_setpoint = 0.0;

  friend bool operator==(const GripperState&, const GripperState&) = default;
};

struct ObjectState {
  Vec3 position{};
  double fall_speed = 0.0;
  ObjectStatus status = ObjectStatus::Free;
  bool attached = false;
  double stem_anchor_z = 0.0;
  bool damaged = false;
  bool delivered = false;
  bool dropped = false;  ///< lost out of the grasp above the table, cleared on re-grasp
  bool slipping = false;
  int drop_count = 0;

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct WorldState {
  std::uint64_t tick = 0;
  GripperState gripper;
  ObjectState object;
  std::uint64_t seed = 0;
  double noise_amplitude = 0.0;
  bool in_keepout = false;
  int keepout_incursions = 0;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct Contact {
  bool between_fingers = false;
  double penetration = 0.0;    ///< m
  double normal_force = 0.0;   ///< N
  double hold_capacity = 0.0;  ///< 2 mu F, N
  Vec3 offset{};               ///< object centre relative to the gripper
};

/// Contact of one object model with the gripper in a given world.
Contact evaluate_contact(const WorldState& world, const ObjectModel& object, const PhysicsConfig& physics);

class Simulator {
 public:
  Simulator(PhysicsConfig physics, RenderConfig render, ObjectModel object);

  WorldState initial_state(std::uint64_t seed) const;

  /// One explicit first-order step of length dt.
  WorldState step(const WorldState& world, const command::RobotCommand& command, double dt) const;

  /// Lowers the opening setpoint; the fingers follow at gripper_speed.
  WorldState apply_tighten(const WorldState& world, double displacement) const;

  Contact contact(const WorldState& world) const { return evaluate_contact(world, object_, physics_); }

  /// Pure function of the world: noise is seeded from (seed, tick, sensor).
  /// Quantised to 8 bits like a camera frame.
  std::vector<std::uint8_t> render_rgb8(const WorldState& world, int sensor_id) const;
  TactileFrame render(const WorldState& world, int sensor_id) const;

  /// Gel pixels covered by the imprint, before noise.
  std::size_t imprint_pixel_count(const WorldState& world, int sensor_id) const;

  const PhysicsConfig& physics() const noexcept { return physics_; }
  const RenderConfig& render_config() const noexcept { return render_; }
  const ObjectModel& object() const noexcept { return object_; }
  ImageShape frame_shape() const noexcept { return {render_.width, render_.height}; }

 private:
  struct Imprint {
    bool present = false;
    double center_col = 0.0;
    double center_row = 0.0;
    double radius_cols = 0.0;
    double radius_rows = 0.0;
    double depth = 0.0;  ///< 0..1
  };
  Imprint imprint(const WorldState& world, int sensor_id) const;

  PhysicsConfig physics_;
  RenderConfig render_;
  ObjectModel object_;
};

}  // namespace t2h::sim
