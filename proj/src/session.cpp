#include "t2h/session.hpp"

#include "t2h/digest.hpp"
#include "t2h/errors.hpp"
#include "t2h/tactile_pipeline.hpp"

namespace t2h::session {

Session::Session(SessionConfig config)
    : config_((config.validate(), std::move(config))),
      partial_autonomy_(config_.partial_autonomy),
      simulator_(config_.physics_config(), config_.render_config(), config_.resolve_object()),
      world_(simulator_.initial_state(config_.seed)),
      mapper_(config_.velocity_limits()),
      haptic_(config_.haptic_config()),
      guard_(config_.slip_config()) {
  if (config_.auto_calibrate) start_calibration();
}

void Session::start_calibration() {
  calibration_ = CalibrationState::Collecting;
  collected_s1_.clear();
  collected_s2_.clear();
}

void Session::reset_world() {
  world_ = simulator_.initial_state(config_.seed);
  mapper_.reset();
  guard_.reset();
  haptic_.reset_windows();
  pending_tighten_ = 0.0;
}

void Session::apply_control(const ControlMessage& control) {
  switch (control.action) {
    case ControlAction::SetPartialAutonomy:
      partial_autonomy_ = control.value.get<bool>();
      if (!partial_autonomy_) guard_.reset();
      break;
    case ControlAction::Reset:
      reset_world();
      break;
    case ControlAction::SelectObject: {
      sim::ObjectModel object;
      try {
        object = config_.resolve_object(control.value.get<std::string>());
      } catch (const ConfigError&) {
        ++rejected_controls_;
        return;
      }
      simulator_ = sim::Simulator(config_.physics_config(), config_.render_config(), object);
      reset_world();
      break;
    }
  }
}

TelemetryRecord Session::step(const OperatorTick& op) {
  const std::uint64_t k = tick_;
  for (const auto& c : op.controls) apply_control(c);

  command::ControllerInput input = op.input.value_or(command::ControllerInput{});
  input.tick = k;
  const command::RobotCommand cmd = mapper_.map(input);

  const double tighten = pending_tighten_;
  if (tighten > 0.0) world_ = simulator_.apply_tighten(world_, tighten);
  pending_tighten_ = 0.0;
  world_ = simulator_.step(world_, cmd, config_.dt());

  const ImageShape shape = simulator_.frame_shape();
  frames_[0] = simulator_.render_rgb8(world_, 1);
  frames_[1] = simulator_.render_rgb8(world_, 2);
  const TactileFrame f1{1, k, RgbImage::from_rgb8(frames_[0], shape)};
  const TactileFrame f2{2, k, RgbImage::from_rgb8(frames_[1], shape)};

  if (input.button_b && !previous_b_) start_calibration();
  previous_b_ = input.button_b;
  if (calibration_ == CalibrationState::Collecting) {
    collected_s1_.push_back(f1);
    collected_s2_.push_back(f2);
    if (collected_s1_.size() >= static_cast<std::size_t>(config_.calibration_frames)) {
      haptic_.set_calibration(tactile::calibrate(collected_s1_, config_.reference_frames),
                              tactile::calibrate(collected_s2_, config_.reference_frames));
      collected_s1_.clear();
      collected_s2_.clear();
      calibration_ = CalibrationState::Ready;
    }
  }

  TelemetryRecord rec;
  rec.tick = k;
  rec.input_fresh = op.input.has_value();
  rec.command = cmd;

  if (haptic_.calibrated()) {
    rec.feedback = haptic_.step(f1, f2);
    rec.eta_s1 = haptic_.noise_threshold(1);
    rec.eta_s2 = haptic_.noise_threshold(2);
    if (partial_autonomy_) {
      const auto gt = guard_.tick(input, rec.feedback->ratio_s1, rec.feedback->ratio_s2, f1, f2, *rec.eta_s1,
                                  *rec.eta_s2);
      rec.guard.ratio_s1 = gt.ratio_s1;
      rec.guard.ratio_s2 = gt.ratio_s2;
      if (gt.detection) {
        rec.guard.slip_event = gt.detection->event;
        pending_tighten_ = gt.detection->tighten.displacement;
      }
    }
  }
  rec.calibration = calibration_;
  rec.guard.enabled = partial_autonomy_;
  rec.guard.phase = guard_.phase();
  rec.guard.slip_count = guard_.slip_count();
  rec.guard.threshold = guard_.threshold(1);
  rec.guard.tighten_applied = tighten;

  const auto contact = simulator_.contact(world_);
  auto& w = rec.world;
  w.gripper_position = world_.gripper.position;
  w.gripper_orientation = world_.gripper.orientation;
  w.opening = world_.gripper.opening;
  w.opening_setpoint = world_.gripper.opening_setpoint;
  w.object_position = world_.object.position;
  w.object_status = world_.object.status;
  w.object = simulator_.object().name;
  w.normal_force = contact.normal_force;
  w.damaged = world_.object.damaged;
  w.delivered = world_.object.delivered;
  w.drop_count = world_.object.drop_count;
  w.in_keepout = world_.in_keepout;
  w.keepout_incursions = world_.keepout_incursions;

  rec.frame_sha256_s1 = sha256_hex(frames_[0]);
  rec.frame_sha256_s2 = sha256_hex(frames_[1]);
  ++tick_;
  return rec;
}

std::string telemetry_sha256(std::span<const TelemetryRecord> records) {
  StreamDigest digest;
  for (const auto& r : records) digest.update(telemetry_line(r));
  return digest.hex();
}

RunResult run_session(const SessionConfig& config, OperatorSource& source, const TickObserver& observer) {
  Session session(config);
  RunResult out;
  while (!source.finished(session.next_tick())) {
    const OperatorTick op = source.poll(session.next_tick());
    out.telemetry.push_back(session.step(op));
    if (observer) observer(op, out.telemetry.back(), session);
  }
  out.telemetry_sha256 = telemetry_sha256(out.telemetry);
  if (!out.telemetry.empty()) out.metrics = compute_metrics(out.telemetry, config.tick_rate_hz);
  return out;
}

}  // namespace t2h::session
