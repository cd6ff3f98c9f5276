#include <gtest/gtest.h>

#include <cmath>

#include "t2h/errors.hpp"
#include "t2h/grasp_sim.hpp"
#include "t2h/session_config.hpp"
#include "t2h/tactile_pipeline.hpp"

namespace t2h::sim {
namespace {

constexpr double kDt = 1.0 / 60.0;

ObjectModel test_object() {
  ObjectModel o;
  o.name = "test";
  o.rest_width = 0.04;
  o.stiffness = 200.0;
  o.friction_coefficient = 0.6;
  o.mass = 0.1;
  o.damage_compression = 0.01;
  return o;
}

/// Fingers around the object at `opening`, nothing moving.
WorldState pinched(const Simulator& sim, double opening, std::uint64_t seed = 7) {
  auto w = sim.initial_state(seed);
  w.gripper.position = w.object.position;
  w.gripper.opening = opening;
  w.gripper.opening_setpoint = opening;
  return w;
}

command::RobotCommand lift(double vz) {
  command::RobotCommand c;
  c.twist[2] = vz;
  return c;
}

TEST(Contact, NoPenetrationWhenOpenEnough) {
  Simulator sim({}, {}, test_object());
  const auto c = sim.contact(pinched(sim, 0.045));
  EXPECT_TRUE(c.between_fingers);
  EXPECT_EQ(c.penetration, 0.0);
  EXPECT_EQ(c.normal_force, 0.0);
  auto w = sim.step(pinched(sim, 0.045), {}, kDt);
  EXPECT_NE(w.object.status, ObjectStatus::Grasped);
}

TEST(Contact, ForceAndHoldArithmetic) {
  Simulator sim({}, {}, test_object());
  const auto c = sim.contact(pinched(sim, 0.038));
  EXPECT_NEAR(c.penetration, 0.002, 1e-15);
  EXPECT_NEAR(c.normal_force, 0.4, 1e-12);
  EXPECT_NEAR(c.hold_capacity, 0.48, 1e-12);
}

TEST(Contact, UnderGrippedObjectSlipsDuringLift) {
  Simulator sim({}, {}, test_object());
  auto w = pinched(sim, 0.038);
  w = sim.step(w, {}, kDt);
  EXPECT_EQ(w.object.status, ObjectStatus::Grasped);
  const double object_z = w.object.position[2];
  const double gripper_z = w.gripper.position[2];
  w = sim.step(w, lift(0.05), kDt);
  EXPECT_EQ(w.object.status, ObjectStatus::Slipping);
  EXPECT_LT(w.object.position[2] - object_z, w.gripper.position[2] - gripper_z);
}

TEST(Contact, FirmGripCarriesTheObject) {
  Simulator sim({}, {}, test_object());
  auto w = pinched(sim, 0.032);  // hold 1.92 N vs 0.98 N weight
  const double offset = w.object.position[2] - w.gripper.position[2];
  for (int i = 0; i < 60; ++i) w = sim.step(w, lift(0.05), kDt);
  EXPECT_EQ(w.object.status, ObjectStatus::Grasped);
  EXPECT_NEAR(w.object.position[2] - w.gripper.position[2], offset, 1e-12);
}

TEST(Gripper, OpeningRateLimitedAndBounded) {
  PhysicsConfig p;
  Simulator sim(p, {}, test_object());
  auto w = sim.initial_state(1);
  command::RobotCommand close;
  close.gripper_velocity = -p.gripper_speed;
  for (int i = 0; i < 2000; ++i) {
    const auto next = sim.step(w, close, kDt);
    EXPECT_LE(std::fabs(next.gripper.opening - w.gripper.opening), p.gripper_speed * kDt + 1e-15);
    EXPECT_GE(next.gripper.opening, 0.0);
    EXPECT_LE(next.gripper.opening, p.opening_max);
    w = next;
  }
  // A tighten lowers the setpoint and the fingers follow at the same rate.
  w = pinched(sim, 0.038);
  w = sim.apply_tighten(w, 0.001);
  EXPECT_NEAR(w.gripper.opening_setpoint, 0.037, 1e-15);
  EXPECT_EQ(w.gripper.opening, 0.038);
  w = sim.step(w, {}, kDt);
  EXPECT_NEAR(w.gripper.opening, 0.038 - p.gripper_speed * kDt, 1e-15);
}

TEST(Gripper, PadsStayAboveTheTable) {
  Simulator sim({}, {}, test_object());
  auto w = sim.initial_state(1);
  for (int i = 0; i < 300; ++i) w = sim.step(w, lift(-0.1), kDt);
  EXPECT_EQ(w.gripper.position[2], PhysicsConfig{}.pad_half_height);
}

TEST(Object, NeverTeleports) {
  PhysicsConfig p;
  Simulator sim(p, {}, test_object());
  auto w = pinched(sim, 0.039);
  for (int i = 0; i < 200; ++i) {
    const auto next = sim.step(w, lift(i < 100 ? 0.1 : -0.1), kDt);
    const double dz = std::fabs(next.object.position[2] - w.object.position[2]);
    EXPECT_LE(dz, (0.1 + std::max(p.max_slip_speed, p.max_fall_speed)) * kDt + 1e-12);
    w = next;
  }
}

TEST(Object, DamageLatches) {
  Simulator sim({}, {}, test_object());
  auto w = pinched(sim, 0.029);  // 11 mm squeeze
  w = sim.step(w, {}, kDt);
  EXPECT_EQ(w.object.status, ObjectStatus::Damaged);
  command::RobotCommand open;
  open.gripper_velocity = 0.005;
  for (int i = 0; i < 600; ++i) {
    w = sim.step(w, open, kDt);
    EXPECT_EQ(w.object.status, ObjectStatus::Damaged);
  }
}

TEST(Object, DroppedAwayFromGoalDeliveredOverIt) {
  Simulator sim({}, {}, test_object());
  auto w = pinched(sim, 0.032);
  for (int i = 0; i < 30; ++i) w = sim.step(w, lift(0.05), kDt);
  command::RobotCommand open;
  open.gripper_velocity = 0.005;
  auto dropped = w;
  for (int i = 0; i < 120; ++i) dropped = sim.step(dropped, open, kDt);
  EXPECT_EQ(dropped.object.status, ObjectStatus::Dropped);
  EXPECT_EQ(dropped.object.drop_count, 1);
  EXPECT_NEAR(dropped.object.position[2], 0.02, 1e-12);

  auto carried = w;
  command::RobotCommand move;
  move.twist[0] = 0.1;
  for (int i = 0; i < 150; ++i) carried = sim.step(carried, move, kDt);
  for (int i = 0; i < 120; ++i) carried = sim.step(carried, open, kDt);
  EXPECT_EQ(carried.object.status, ObjectStatus::Delivered);
  EXPECT_EQ(carried.object.drop_count, 0);
}

TEST(Object, StemHoldsUntilPulledHardEnough) {
  auto grape = *find_builtin_object("grape");
  Simulator sim({}, {}, grape);
  auto w = sim.initial_state(3);
  EXPECT_EQ(w.object.status, ObjectStatus::Attached);
  w.gripper.position = w.object.position;
  w.gripper.opening = w.gripper.opening_setpoint = grape.rest_width - 0.003;
  bool detached = false;
  for (int i = 0; i < 120 && !detached; ++i) {
    w = sim.step(w, lift(0.02), kDt);
    detached = !w.object.attached;
    if (!detached) {
      const double stretch = w.object.position[2] - w.object.stem_anchor_z;
      EXPECT_LT(PhysicsConfig{}.stem_stiffness * stretch, grape.stem_force);
    }
  }
  EXPECT_TRUE(detached);
}

TEST(World, KeepoutIncursionsCountedOncePerEntry) {
  PhysicsConfig p;
  Simulator sim(p, {}, test_object());
  auto w = sim.initial_state(1);
  w.gripper.position = {p.keepout_center[0] - 0.1, p.keepout_center[1], 0.05};
  command::RobotCommand move;
  move.twist[0] = 0.1;
  for (int i = 0; i < 120; ++i) w = sim.step(w, move, kDt);
  move.twist[0] = -0.1;
  for (int i = 0; i < 120; ++i) w = sim.step(w, move, kDt);
  EXPECT_EQ(w.keepout_incursions, 2);
}

TEST(World, DeterministicForEqualSeedAndCommands) {
  Simulator sim({}, {}, test_object());
  auto a = pinched(sim, 0.039, 99);
  auto b = pinched(sim, 0.039, 99);
  for (int i = 0; i < 120; ++i) {
    const auto cmd = lift(0.03 * std::sin(i * 0.1));
    a = sim.step(a, cmd, kDt);
    b = sim.step(b, cmd, kDt);
    ASSERT_EQ(a, b);
    ASSERT_EQ(sim.render_rgb8(a, 1), sim.render_rgb8(b, 1));
    ASSERT_EQ(sim.render_rgb8(a, 2), sim.render_rgb8(b, 2));
  }
  auto c = pinched(sim, 0.039, 100);
  EXPECT_NE(sim.render_rgb8(c, 1), sim.render_rgb8(pinched(sim, 0.039, 99), 1));
  EXPECT_THROW(sim.step(a, {}, 0.0), ArgumentError);
}

TEST(Render, ImprintAreaGrowsWithForce) {
  RenderConfig r;
  r.imprint_saturation_force = 1.0;
  Simulator sim({}, r, test_object());
  std::size_t previous = 0;
  for (double opening = 0.04; opening >= 0.031; opening -= 0.0002) {
    const auto n = sim.imprint_pixel_count(pinched(sim, opening), 1);
    EXPECT_GE(n, previous);
    previous = n;
  }
  EXPECT_GT(previous, 0u);
  EXPECT_EQ(sim.imprint_pixel_count(pinched(sim, 0.05), 1), 0u);
}

tactile::SensorCalibration calibrate_background(const Simulator& sim, int sensor) {
  auto w = sim.initial_state(5);
  std::vector<TactileFrame> frames;
  for (std::uint64_t k = 0; k < 100; ++k) {
    w.tick = k;
    frames.push_back(sim.render(w, sensor));
  }
  return tactile::calibrate(frames, 10);
}

TEST(Render, NoContactFramesLookLikeTheBackground) {
  Simulator sim({}, {}, test_object());
  for (int sensor : {1, 2}) {
    tactile::VariationTracker tracker(calibrate_background(sim, sensor), 2);
    auto w = sim.initial_state(5);
    int nonzero = 0;
    for (std::uint64_t k = 100; k < 300; ++k) {
      w.tick = k;
      if (tracker.observe(sim.render(w, sensor).image).ratio > 0.0 && k > 100) ++nonzero;
    }
    EXPECT_EQ(nonzero, 0) << "sensor " << sensor;
  }
}

TEST(Render, ImprintShiftOfThreePixelsExceedsTouchThreshold) {
  const PhysicsConfig p;
  const RenderConfig r;
  Simulator sim(p, r, test_object());
  const double pixel = 2.0 * p.pad_half_height / r.height;
  for (int sensor : {1, 2}) {
    const auto cal = calibrate_background(sim, sensor);
    auto w = pinched(sim, 0.038);
    std::vector<RgbImage> held;
    for (std::uint64_t k = 0; k < 10; ++k) {
      w.tick = k;
      held.push_back(sim.render(w, sensor).image);
    }
    const auto reference = tactile::mean_image(held);
    tactile::FrameWindow window(2);
    auto shifted = w;
    shifted.object.position[2] -= 3.0 * pixel;
    for (std::uint64_t k = 10; k < 12; ++k) {
      shifted.tick = k;
      const auto res = tactile::detect_variation(sim.render(shifted, sensor).image, window, reference, cal.noise_threshold);
      window.push(res.binary);
      EXPECT_GT(res.ratio, 0.01) << "sensor " << sensor;
    }
    // Same contact without the shift stays quiet.
    tactile::FrameWindow quiet(2);
    w.tick = 20;
    const auto still = tactile::detect_variation(sim.render(w, sensor).image, quiet, reference, cal.noise_threshold);
    quiet.push(still.binary);
    w.tick = 21;
    EXPECT_LT(tactile::detect_variation(sim.render(w, sensor).image, quiet, reference, cal.noise_threshold).ratio, 0.01);
  }
}

TEST(Render, SensorsAreMirrored) {
  Simulator sim({}, {}, test_object());
  auto w = pinched(sim, 0.038);
  w.object.position[0] += 0.004;
  const auto f1 = sim.render(w, 1);
  const auto f2 = sim.render(w, 2);
  EXPECT_EQ(f1.sensor_id, 1);
  EXPECT_EQ(f2.sensor_id, 2);
  EXPECT_NE(f1.image, f2.image);
  EXPECT_THROW(sim.render(w, 3), ArgumentError);
}

TEST(Presets, NineValidObjectsMatchingTheShippedFile) {
  const auto& objects = builtin_objects();
  ASSERT_EQ(objects.size(), 9u);
  for (const auto& o : objects) EXPECT_NO_THROW(o.validate());
  const auto cfg = session::load_config(std::string(T2H_SOURCE_DIR) + "/config/objects.yaml");
  ASSERT_EQ(cfg.objects.size(), objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) EXPECT_EQ(cfg.objects[i], objects[i]) << objects[i].name;
  EXPECT_FALSE(find_builtin_object("mustard_bottle").has_value());
}

TEST(Presets, Validation) {
  auto o = test_object();
  o.damage_compression = 0.05;
  EXPECT_THROW(o.validate(), ConfigError);
  o = test_object();
  o.mass = 0.0;
  EXPECT_THROW(Simulator({}, {}, o), ConfigError);
  RenderConfig r;
  r.noise_amplitude = 0.6;
  EXPECT_THROW(Simulator({}, r, test_object()), ConfigError);
}

TEST(Status, StringRoundTrip) {
  for (auto s : {ObjectStatus::Free, ObjectStatus::Grasped, ObjectStatus::Attached, ObjectStatus::Slipping,
                 ObjectStatus::Dropped, ObjectStatus::Damaged, ObjectStatus::Delivered}) {
    EXPECT_EQ(object_status_from_string(to_string(s)), s);
  }
  EXPECT_FALSE(object_status_from_string("lost").has_value());
}

}  // namespace
}  // namespace t2h::sim
