#include "t2h/grasp_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "t2h/errors.hpp"

namespace t2h::sim {
namespace {

constexpr double kSupportTolerance = 1e-9;

// Imprint colour shift per unit depth; channel mean of |shift| is 0.3.
constexpr std::array<double, 3> kImprintShift{-0.30, 0.15, -0.45};

double horizontal_distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

std::string_view to_string(ObjectStatus status) noexcept {
  switch (status) {
    case ObjectStatus::Free: return "free";
    case ObjectStatus::Grasped: return "grasped";
    case ObjectStatus::Attached: return "attached";
    case ObjectStatus::Slipping: return "slipping";
    case ObjectStatus::Dropped: return "dropped";
    case ObjectStatus::Damaged: return "damaged";
    case ObjectStatus::Delivered: return "delivered";
  }
  return "free";
}

std::optional<ObjectStatus> object_status_from_string(std::string_view text) noexcept {
  for (auto s : {ObjectStatus::Free, ObjectStatus::Grasped, ObjectStatus::Attached, ObjectStatus::Slipping,
                 ObjectStatus::Dropped, ObjectStatus::Damaged, ObjectStatus::Delivered}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

void ObjectModel::validate() const {
  require(!name.empty(), "object needs a name");
  require(rest_width > 0.0, "object '" + name + "': rest_width must be > 0");
  require(stiffness > 0.0, "object '" + name + "': stiffness must be > 0");
  require(friction_coefficient > 0.0, "object '" + name + "': friction_coefficient must be > 0");
  require(mass > 0.0, "object '" + name + "': mass must be > 0");
  require(damage_compression > 0.0 && damage_compression <= rest_width,
          "object '" + name + "': damage_compression must be in (0, rest_width]");
  require(stem_force >= 0.0, "object '" + name + "': stem_force must be >= 0");
}

const std::vector<ObjectModel>& builtin_objects() {
  //                         name        width   k      mu    mass    damage  stem
  static const std::vector<ObjectModel> objects = {
      {"lime",            0.050,  600.0, 0.60, 0.070,  0.006,  0.0, {}},
      {"plum",            0.045,  200.0, 0.60, 0.080,  0.008,  0.0, {}},
      {"grape",           0.022,  150.0, 0.50, 0.008,  0.004,  0.15, {}},
      {"tomato",          0.035,  250.0, 0.55, 0.030,  0.005,  0.40, {}},
      {"aux_connector",   0.012, 3000.0, 0.40, 0.015,  0.005,  2.0, {}},
      {"tetra_pak",       0.040,  800.0, 0.50, 0.030,  0.010,  0.0, {}},
      {"gel_bottle",      0.035, 1500.0, 0.40, 0.060,  0.008,  0.0, {}},
      {"plastic_cup",     0.070,  300.0, 0.50, 0.010,  0.015,  0.0, {}},
      {"pistachio",       0.012, 4000.0, 0.45, 0.002,  0.002,  0.0, {}},
  };
  return objects;
}

std::optional<ObjectModel> find_builtin_object(std::string_view name) {
  for (const auto& o : builtin_objects()) {
    if (o.name == name) return o;
  }
  return std::nullopt;
}

void PhysicsConfig::validate() const {
  require(gravity > 0.0, "gravity must be > 0");
  require(opening_max > 0.0, "opening_max must be > 0");
  require(initial_opening >= 0.0 && initial_opening <= opening_max, "initial_opening must be in [0, opening_max]");
  require(gripper_speed > 0.0, "gripper_speed must be > 0");
  require(pad_half_width > 0.0 && pad_half_height > 0.0, "pad extents must be > 0");
  require(gripper_start[2] >= pad_half_height, "gripper must start with the pads above the table");
  require(slip_gain > 0.0 && max_slip_speed > 0.0, "slip parameters must be > 0");
  require(max_fall_speed > 0.0, "max_fall_speed must be > 0");
  require(stem_stiffness > 0.0, "stem_stiffness must be > 0");
  require(goal_radius > 0.0, "goal_radius must be > 0");
  require(keepout_radius >= 0.0 && keepout_height >= 0.0, "keep-out extents must be >= 0");
}

void RenderConfig::validate() const {
  require(width > 0 && height > 0, "frame size must be positive");
  require(noise_amplitude >= 0.0 && noise_amplitude <= 0.5, "noise_amplitude must be in [0, 0.5]");
  require(imprint_radius_x > 0.0 && imprint_radius_z > 0.0, "imprint radii must be > 0");
  require(imprint_saturation_force > 0.0, "imprint_saturation_force must be > 0");
  require(imprint_contrast > 0.0 && imprint_contrast <= 1.0, "imprint_contrast must be in (0, 1]");
}

Contact evaluate_contact(const WorldState& world, const ObjectModel& object, const PhysicsConfig& physics) {
  Contact c;
  const auto& g = world.gripper.position;
  const auto& o = world.object.position;
  c.offset = {o[0] - g[0], o[1] - g[1], o[2] - g[2]};
  c.between_fingers = std::fabs(c.offset[0]) <= physics.pad_half_width &&
                      std::fabs(c.offset[2]) <= physics.pad_half_height &&
                      std::fabs(c.offset[1]) <= object.rest_width / 2.0;
  if (c.between_fingers) {
    c.penetration = std::max(0.0, object.rest_width - world.gripper.opening);
    c.normal_force = object.stiffness * c.penetration;
    c.hold_capacity = 2.0 * object.friction_coefficient * c.normal_force;
  }
  return c;
}

Simulator::Simulator(PhysicsConfig physics, RenderConfig render, ObjectModel object)
    : physics_(physics), render_(render), object_(std::move(object)) {
  physics_.validate();
  render_.validate();
  object_.validate();
}

WorldState Simulator::initial_state(std::uint64_t seed) const {
  WorldState w;
  w.seed = seed;
  w.noise_amplitude = render_.noise_amplitude;
  w.gripper.position = physics_.gripper_start;
  w.gripper.opening = physics_.initial_opening;
  w.gripper.opening_setpoint = physics_.initial_opening;
  w.object.position = object_.initial_position;
  w.object.position[2] = std::max(w.object.position[2], object_.rest_height());
  w.object.attached = object_.stem_force > 0.0;
  w.object.stem_anchor_z = w.object.position[2];
  w.object.status = w.object.attached ? ObjectStatus::Attached : ObjectStatus::Free;
  return w;
}

WorldState Simulator::apply_tighten(const WorldState& world, double displacement) const {
  WorldState next = world;
  next.gripper.opening_setpoint = std::max(0.0, world.gripper.opening_setpoint - displacement);
  return next;
}

WorldState Simulator::step(const WorldState& world, const command::RobotCommand& command, double dt) const {
  if (!(dt > 0.0)) throw ArgumentError("step length must be > 0");
  WorldState next = world;
  next.tick = world.tick + 1;
  auto& gripper = next.gripper;
  auto& obj = next.object;

  // Gripper pose: explicit first-order integration of the twist. The pads
  // cannot go through the table top.
  Vec3 moved{};
  for (int i = 0; i < 3; ++i) {
    const auto k = static_cast<std::size_t>(i);
    double target = world.gripper.position[k] + command.twist[k] * dt;
    if (i == 2) target = std::max(target, physics_.pad_half_height);
    moved[k] = target - world.gripper.position[k];
    gripper.position[k] = target;
    gripper.orientation[k] = world.gripper.orientation[k] + command.twist[k + 3] * dt;
    gripper.velocity[k] = moved[k] / dt;
  }
  const double accel_z = (gripper.velocity[2] - world.gripper.velocity[2]) / dt;

  // Fingers: the operator drives the setpoint, the opening follows at a
  // bounded rate.
  gripper.opening_setpoint =
      std::clamp(world.gripper.opening_setpoint + command.gripper_velocity * dt, 0.0, physics_.opening_max);
  const double max_travel = physics_.gripper_speed * dt;
  gripper.opening = world.gripper.opening +
                    std::clamp(gripper.opening_setpoint - world.gripper.opening, -max_travel, max_travel);

  // Contact uses the object's pre-step offset from the fingers together with
  // the new opening: whatever was pinched at the start of the step is carried
  // along with the fingers, subject to the friction budget.
  WorldState probe = world;
  probe.gripper.opening = gripper.opening;
  const Contact grip = evaluate_contact(probe, object_, physics_);
  const bool held = grip.between_fingers && grip.penetration > 0.0;
  const double rest_z = object_.rest_height();
  const bool on_support = world.object.position[2] <= rest_z + kSupportTolerance;

  obj.slipping = false;
  if (held) {
    obj.fall_speed = 0.0;
    if (obj.dropped) obj.dropped = false;

    const double stem_tension =
        obj.attached ? physics_.stem_stiffness * std::max(0.0, obj.position[2] - obj.stem_anchor_z) : 0.0;
    const bool table_carries_weight = on_support && moved[2] <= 0.0;
    double dz = moved[2];
    if (!table_carries_weight) {
      const double load = object_.mass * (physics_.gravity + accel_z) + stem_tension;
      if (load > grip.hold_capacity) {
        obj.slipping = true;
        const double slip_speed =
            std::min(physics_.slip_gain * (load - grip.hold_capacity), physics_.max_slip_speed);
        dz = moved[2] - slip_speed * dt;
      }
    }
    if (!obj.attached) {
      obj.position[0] += moved[0];
      obj.position[1] += moved[1];
    }
    obj.position[2] = std::max(rest_z, obj.position[2] + dz);
    if (obj.attached && physics_.stem_stiffness * (obj.position[2] - obj.stem_anchor_z) >= object_.stem_force) {
      obj.attached = false;
    }
  } else {
    const bool airborne = obj.position[2] > rest_z + kSupportTolerance;
    const bool over_goal = horizontal_distance(obj.position, physics_.goal_center) <= physics_.goal_radius;
    if (airborne) {
      obj.fall_speed = std::min(obj.fall_speed + physics_.gravity * dt, physics_.max_fall_speed);
      obj.position[2] = std::max(rest_z, obj.position[2] - obj.fall_speed * dt);
      if (obj.position[2] <= rest_z + kSupportTolerance) obj.fall_speed = 0.0;
    }
    if (obj.position[2] <= rest_z + kSupportTolerance && over_goal && !obj.attached) obj.delivered = true;
  }

  const Contact after = evaluate_contact(next, object_, physics_);
  if (after.penetration > object_.damage_compression) obj.damaged = true;

  const bool in_contact = after.between_fingers && after.penetration > 0.0;
  const Contact before = evaluate_contact(world, object_, physics_);
  const bool had_contact = held || (before.between_fingers && before.penetration > 0.0);
  const bool airborne_after = obj.position[2] > rest_z + kSupportTolerance;
  const bool over_goal_now = horizontal_distance(obj.position, physics_.goal_center) <= physics_.goal_radius;
  if (had_contact && !in_contact && airborne_after && !over_goal_now) {
    obj.dropped = true;
    ++obj.drop_count;
  }
  if (obj.damaged) {
    obj.status = ObjectStatus::Damaged;
  } else if (obj.delivered) {
    obj.status = ObjectStatus::Delivered;
  } else if (in_contact) {
    obj.status = obj.slipping ? ObjectStatus::Slipping : ObjectStatus::Grasped;
  } else if (obj.dropped) {
    obj.status = ObjectStatus::Dropped;
  } else if (obj.attached) {
    obj.status = ObjectStatus::Attached;
  } else {
    obj.status = ObjectStatus::Free;
  }

  const auto& g = gripper.position;
  const bool inside = horizontal_distance(g, physics_.keepout_center) <= physics_.keepout_radius &&
                      g[2] - physics_.pad_half_height <= physics_.keepout_center[2] + physics_.keepout_height;
  if (inside && !world.in_keepout) ++next.keepout_incursions;
  next.in_keepout = inside;
  return next;
}

Simulator::Imprint Simulator::imprint(const WorldState& world, int sensor_id) const {
  Imprint im;
  const Contact c = contact(world);
  if (!c.between_fingers || c.normal_force <= 0.0) return im;
  const double rel = c.normal_force / render_.imprint_saturation_force;
  const double growth = std::sqrt(std::min(1.0, rel));
  const double x = sensor_id == 1 ? c.offset[0] : -c.offset[0];

  im.present = true;
  im.center_col = (x + physics_.pad_half_width) / (2.0 * physics_.pad_half_width) * render_.width;
  im.center_row = (physics_.pad_half_height - c.offset[2]) / (2.0 * physics_.pad_half_height) * render_.height;
  im.radius_cols = growth * render_.imprint_radius_x / (2.0 * physics_.pad_half_width) * render_.width;
  im.radius_rows = growth * render_.imprint_radius_z / (2.0 * physics_.pad_half_height) * render_.height;
  im.depth = render_.imprint_contrast * (1.0 - std::exp(-4.0 * rel));
  return im;
}

std::size_t Simulator::imprint_pixel_count(const WorldState& world, int sensor_id) const {
  const Imprint im = imprint(world, sensor_id);
  if (!im.present) return 0;
  std::size_t n = 0;
  for (int r = 0; r < render_.height; ++r) {
    for (int col = 0; col < render_.width; ++col) {
      const double u = (col + 0.5 - im.center_col) / im.radius_cols;
      const double v = (r + 0.5 - im.center_row) / im.radius_rows;
      if (u * u + v * v <= 1.0) ++n;
    }
  }
  return n;
}

std::vector<std::uint8_t> Simulator::render_rgb8(const WorldState& world, int sensor_id) const {
  if (sensor_id != 1 && sensor_id != 2) throw ArgumentError("sensor id must be 1 or 2");
  const Imprint im = imprint(world, sensor_id);

  std::seed_seq seq{static_cast<std::uint32_t>(world.seed), static_cast<std::uint32_t>(world.seed >> 32),
                    static_cast<std::uint32_t>(world.tick), static_cast<std::uint32_t>(world.tick >> 32),
                    static_cast<std::uint32_t>(sensor_id)};
  std::mt19937_64 rng(seq);
  // Explicit 53-bit conversion; std::uniform_real_distribution is not
  // bit-reproducible across standard libraries.
  auto noise = [&] { return (static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0) * world.noise_amplitude; };

  const double tint = sensor_id == 1 ? 0.0 : 0.02;
  std::vector<std::uint8_t> out(3 * static_cast<std::size_t>(render_.width) * static_cast<std::size_t>(render_.height));
  std::size_t i = 0;
  for (int r = 0; r < render_.height; ++r) {
    const double v = (r + 0.5) / render_.height;
    for (int col = 0; col < render_.width; ++col) {
      const double u = (col + 0.5) / render_.width;
      // Static gel background: LED colour gradient across the pad.
      std::array<double, 3> px{0.42 + tint + 0.10 * u + 0.03 * std::sin(2.0 * std::numbers::pi * 3.0 * v),
                               0.50 + 0.05 * std::cos(2.0 * std::numbers::pi * u),
                               0.58 - 0.10 * v};
      if (im.present) {
        const double du = (col + 0.5 - im.center_col) / im.radius_cols;
        const double dv = (r + 0.5 - im.center_row) / im.radius_rows;
        if (du * du + dv * dv <= 1.0) {
          for (std::size_t c = 0; c < 3; ++c) px[c] += im.depth * kImprintShift[c];
        }
      }
      for (std::size_t c = 0; c < 3; ++c) {
        const double value = std::clamp(px[c] + noise(), 0.0, 1.0);
        out[i++] = static_cast<std::uint8_t>(std::lround(value * 255.0));
      }
    }
  }
  return out;
}

TactileFrame Simulator::render(const WorldState& world, int sensor_id) const {
  const auto bytes = render_rgb8(world, sensor_id);
  return TactileFrame{sensor_id, world.tick, RgbImage::from_rgb8(bytes, frame_shape())};
}

}  // namespace t2h::sim
