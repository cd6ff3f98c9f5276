#include <gtest/gtest.h>

#include "scenario.hpp"
#include "t2h/errors.hpp"
#include "t2h/session.hpp"

namespace t2h::session {
namespace {

command::ControllerInput moving() {
  command::ControllerInput in;
  in.button_a = true;
  in.linear_velocity = {0.05, 0.0, 0.0};
  return in;
}

bool zero_twist(const command::RobotCommand& c) {
  for (double v : c.twist) {
    if (v != 0.0) return false;
  }
  return c.gripper_velocity == 0.0;
}

TEST(Session, SilentOperatorGivesZeroCommands) {
  IdleOperator idle(100);
  const auto run = run_session(SessionConfig{}, idle);
  ASSERT_EQ(run.telemetry.size(), 100u);
  for (std::size_t i = 0; i < run.telemetry.size(); ++i) {
    const auto& r = run.telemetry[i];
    EXPECT_EQ(r.tick, i);
    EXPECT_FALSE(r.input_fresh);
    EXPECT_TRUE(zero_twist(r.command));
    EXPECT_EQ(r.world.gripper_position, sim::PhysicsConfig{}.gripper_start);
  }
  ASSERT_TRUE(run.metrics.has_value());
  EXPECT_EQ(run.metrics->ticks, 100u);
}

TEST(Session, DroppedInputNeverExtrapolatesMotion) {
  Session s(SessionConfig{});
  for (int i = 0; i < 30; ++i) s.step({moving(), {}});
  EXPECT_FALSE(zero_twist(s.step({moving(), {}}).command));
  const auto before = s.world().gripper.position;
  const auto r = s.step({});
  EXPECT_TRUE(zero_twist(r.command));
  EXPECT_FALSE(r.input_fresh);
  EXPECT_EQ(s.world().gripper.position, before);
}

TEST(Session, AutoCalibrationCompletesAfterKFrames) {
  SessionConfig c;
  c.calibration_frames = 20;
  c.reference_frames = 5;
  Session s(c);
  for (int k = 0; k < 19; ++k) {
    const auto r = s.step({});
    EXPECT_EQ(r.calibration, CalibrationState::Collecting);
    EXPECT_FALSE(r.feedback.has_value());
    EXPECT_EQ(r.intensity(), 0.0);
  }
  const auto r = s.step({});
  EXPECT_EQ(r.calibration, CalibrationState::Ready);
  ASSERT_TRUE(r.feedback.has_value());
  ASSERT_TRUE(r.eta_s1.has_value());
  EXPECT_GT(*r.eta_s1, 0.0);
  EXPECT_LT(*r.eta_s1, 0.1);
}

TEST(Session, ButtonBRisingEdgeStartsCalibration) {
  SessionConfig c;
  c.auto_calibrate = false;
  c.calibration_frames = 10;
  c.reference_frames = 3;
  Session s(c);
  EXPECT_EQ(s.step({}).calibration, CalibrationState::None);
  command::ControllerInput b;
  b.button_b = true;
  EXPECT_EQ(s.step({b, {}}).calibration, CalibrationState::Collecting);
  // Holding B does not restart the collection.
  for (int i = 0; i < 8; ++i) EXPECT_EQ(s.step({b, {}}).calibration, CalibrationState::Collecting);
  EXPECT_EQ(s.step({b, {}}).calibration, CalibrationState::Ready);
  EXPECT_EQ(s.step({}).calibration, CalibrationState::Ready);
  EXPECT_EQ(s.step({b, {}}).calibration, CalibrationState::Collecting);
}

TEST(Session, Controls) {
  Session s(SessionConfig{});
  for (int i = 0; i < 10; ++i) s.step({moving(), {}});
  EXPECT_NE(s.world().gripper.position, sim::PhysicsConfig{}.gripper_start);

  auto r = s.step({std::nullopt, {ControlMessage{ControlAction::Reset, nullptr}}});
  EXPECT_EQ(r.world.gripper_position, sim::PhysicsConfig{}.gripper_start);

  r = s.step({std::nullopt, {ControlMessage{ControlAction::SetPartialAutonomy, false}}});
  EXPECT_FALSE(r.guard.enabled);
  EXPECT_FALSE(s.partial_autonomy());

  r = s.step({std::nullopt, {ControlMessage{ControlAction::SelectObject, "lime"}}});
  EXPECT_EQ(r.world.object, "lime");
  r = s.step({std::nullopt, {ControlMessage{ControlAction::SelectObject, "anvil"}}});
  EXPECT_EQ(r.world.object, "lime");
  EXPECT_EQ(s.rejected_controls(), 1);
}

TEST(Session, TelemetryTicksIncreaseByOne) {
  const auto run = testing::run_scenario(true);
  for (std::size_t i = 0; i < run.telemetry.size(); ++i) ASSERT_EQ(run.telemetry[i].tick, i);
}

TEST(Session, ScenarioIsDeterministic) {
  const auto a = testing::run_scenario(true);
  const auto b = testing::run_scenario(true);
  EXPECT_EQ(a.telemetry_sha256, b.telemetry_sha256);
  EXPECT_EQ(a.telemetry, b.telemetry);
  EXPECT_NE(a.telemetry_sha256, testing::run_scenario(false).telemetry_sha256);
}

TEST(Session, EachDetectionTightensExactlyOnceOnTheNextTick) {
  const auto run = testing::run_scenario(true);
  const double step = testing::scenario_config(true).tighten_step;
  int detections = 0;
  double applied = 0.0;
  for (std::size_t i = 0; i < run.telemetry.size(); ++i) {
    const auto& g = run.telemetry[i].guard;
    applied += g.tighten_applied;
    if (g.tighten_applied > 0.0) {
      ASSERT_GT(i, 0u);
      EXPECT_TRUE(run.telemetry[i - 1].guard.slip_event.has_value()) << i;
      EXPECT_EQ(g.tighten_applied, step);
    }
    if (g.slip_event) ++detections;
  }
  EXPECT_GE(detections, 1);
  EXPECT_DOUBLE_EQ(applied, detections * step);
}

TEST(Session, SlippingEpisodesAreAnsweredWithinNPlusFiveTicks) {
  const auto script = testing::scenario_script();
  const auto config = testing::scenario_config(true);
  const auto run = testing::run_scenario(true);
  const std::size_t horizon = static_cast<std::size_t>(config.reference_frames) + 5;
  int checked = 0;
  for (std::size_t i = 0; i < run.telemetry.size(); ++i) {
    const bool slipping = run.telemetry[i].world.object_status == sim::ObjectStatus::Slipping;
    const bool started = slipping && (i == 0 || run.telemetry[i - 1].world.object_status != sim::ObjectStatus::Slipping);
    // The operator opening the fingers disarms the guard on purpose.
    if (!started || script.input_at(i).side_trigger) continue;
    ++checked;
    bool answered = false;
    for (std::size_t j = i; j <= i + horizon && j < run.telemetry.size(); ++j) {
      answered = answered || run.telemetry[j].guard.tighten_applied > 0.0;
    }
    EXPECT_TRUE(answered) << "slipping from tick " << i;
  }
  EXPECT_GE(checked, 1);
}

TEST(Session, PartialAutonomyOffNeverArms) {
  const auto run = testing::run_scenario(false);
  for (const auto& r : run.telemetry) {
    EXPECT_FALSE(r.guard.enabled);
    EXPECT_EQ(r.guard.phase, slip::GuardPhase::Inactive);
    EXPECT_EQ(r.guard.tighten_applied, 0.0);
  }
  EXPECT_FALSE(run.metrics->slip_count.has_value());
}

TEST(Session, InvalidConfigRejected) {
  SessionConfig c;
  c.window_length = 0;
  EXPECT_THROW(Session{c}, ConfigError);
}

}  // namespace
}  // namespace t2h::session
