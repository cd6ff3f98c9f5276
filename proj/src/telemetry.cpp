#include "t2h/telemetry.hpp"

#include "t2h/errors.hpp"

namespace t2h::session {
namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_number(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json feedback_to_json(const haptic::FeedbackSample& f) {
  return json{{"tick", f.tick},
              {"p1", f.ratio_s1},
              {"p2", f.ratio_s2},
              {"p", f.ratio_mean},
              {"f", f.intensity},
              {"stale", f.stale}};
}

haptic::FeedbackSample feedback_from_json(const json& j) {
  haptic::FeedbackSample f;
  f.tick = j.at("tick").get<std::uint64_t>();
  f.ratio_s1 = j.at("p1").get<double>();
  f.ratio_s2 = j.at("p2").get<double>();
  f.ratio_mean = j.at("p").get<double>();
  f.intensity = j.at("f").get<double>();
  f.stale = j.at("stale").get<bool>();
  return f;
}

json slip_event_to_json(const slip::SlipEvent& e) {
  return json{{"tick", e.tick},
              {"sensor", slip::to_string(e.sensor)},
              {"ratio_s1", e.ratio_s1},
              {"ratio_s2", e.ratio_s2},
              {"previous_threshold", e.previous_threshold},
              {"slip_count", e.new_slip_count},
              {"threshold", e.new_threshold}};
}

slip::SlipEvent slip_event_from_json(const json& j) {
  slip::SlipEvent e;
  e.tick = j.at("tick").get<std::uint64_t>();
  auto sensor = slip::triggering_sensor_from_string(j.at("sensor").get<std::string>());
  if (!sensor) throw ReplayError("bad slip event sensor", 0);
  e.sensor = *sensor;
  e.ratio_s1 = j.at("ratio_s1").get<double>();
  e.ratio_s2 = j.at("ratio_s2").get<double>();
  e.previous_threshold = j.at("previous_threshold").get<double>();
  e.new_slip_count = j.at("slip_count").get<int>();
  e.new_threshold = j.at("threshold").get<double>();
  return e;
}

}  // namespace

std::string_view to_string(CalibrationState state) noexcept {
  switch (state) {
    case CalibrationState::None: return "none";
    case CalibrationState::Collecting: return "collecting";
    case CalibrationState::Ready: return "ready";
  }
  return "none";
}

json telemetry_to_json(const TelemetryRecord& r) {
  const auto& w = r.world;
  const auto& g = r.guard;
  return json{
      {"tick", r.tick},
      {"input_fresh", r.input_fresh},
      {"feedback", r.feedback ? feedback_to_json(*r.feedback) : json(nullptr)},
      {"command",
       {{"tick", r.command.tick},
        {"twist", r.command.twist},
        {"gripper_velocity", r.command.gripper_velocity},
        {"fault", r.command.fault}}},
      {"world",
       {{"gripper_position", w.gripper_position},
        {"gripper_orientation", w.gripper_orientation},
        {"opening", w.opening},
        {"opening_setpoint", w.opening_setpoint},
        {"object_position", w.object_position},
        {"object_status", sim::to_string(w.object_status)},
        {"object", w.object},
        {"normal_force", w.normal_force},
        {"damaged", w.damaged},
        {"delivered", w.delivered},
        {"drop_count", w.drop_count},
        {"in_keepout", w.in_keepout},
        {"keepout_incursions", w.keepout_incursions}}},
      {"guard",
       {{"enabled", g.enabled},
        {"phase", slip::to_string(g.phase)},
        {"slip_count", g.slip_count},
        {"threshold", optional_number(g.threshold)},
        {"ratio_s1", optional_number(g.ratio_s1)},
        {"ratio_s2", optional_number(g.ratio_s2)},
        {"slip_event", g.slip_event ? slip_event_to_json(*g.slip_event) : json(nullptr)},
        {"tighten_applied", g.tighten_applied}}},
      {"calibration",
       {{"state", to_string(r.calibration)}, {"eta_s1", optional_number(r.eta_s1)},
        {"eta_s2", optional_number(r.eta_s2)}}},
      {"frames", {{"s1", r.frame_sha256_s1}, {"s2", r.frame_sha256_s2}}}};
}

TelemetryRecord telemetry_from_json(const json& j) {
  try {
    TelemetryRecord r;
    r.tick = j.at("tick").get<std::uint64_t>();
    r.input_fresh = j.at("input_fresh").get<bool>();
    if (!j.at("feedback").is_null()) r.feedback = feedback_from_json(j.at("feedback"));

    const auto& c = j.at("command");
    r.command.tick = c.at("tick").get<std::uint64_t>();
    r.command.twist = c.at("twist").get<command::Twist>();
    r.command.gripper_velocity = c.at("gripper_velocity").get<double>();
    r.command.fault = c.at("fault").get<bool>();

    const auto& w = j.at("world");
    r.world.gripper_position = w.at("gripper_position").get<command::Vec3>();
    r.world.gripper_orientation = w.at("gripper_orientation").get<command::Vec3>();
    r.world.opening = w.at("opening").get<double>();
    r.world.opening_setpoint = w.at("opening_setpoint").get<double>();
    r.world.object_position = w.at("object_position").get<command::Vec3>();
    auto status = sim::object_status_from_string(w.at("object_status").get<std::string>());
    if (!status) throw ReplayError("bad object status", 0);
    r.world.object_status = *status;
    r.world.object = w.at("object").get<std::string>();
    r.world.normal_force = w.at("normal_force").get<double>();
    r.world.damaged = w.at("damaged").get<bool>();
    r.world.delivered = w.at("delivered").get<bool>();
    r.world.drop_count = w.at("drop_count").get<int>();
    r.world.in_keepout = w.at("in_keepout").get<bool>();
    r.world.keepout_incursions = w.at("keepout_incursions").get<int>();

    const auto& g = j.at("guard");
    r.guard.enabled = g.at("enabled").get<bool>();
    auto phase = slip::guard_phase_from_string(g.at("phase").get<std::string>());
    if (!phase) throw ReplayError("bad guard phase", 0);
    r.guard.phase = *phase;
    r.guard.slip_count = g.at("slip_count").get<int>();
    r.guard.threshold = read_optional_number(g.at("threshold"));
    r.guard.ratio_s1 = read_optional_number(g.at("ratio_s1"));
    r.guard.ratio_s2 = read_optional_number(g.at("ratio_s2"));
    if (!g.at("slip_event").is_null()) r.guard.slip_event = slip_event_from_json(g.at("slip_event"));
    r.guard.tighten_applied = g.at("tighten_applied").get<double>();

    const auto& cal = j.at("calibration");
    const auto state = cal.at("state").get<std::string>();
    if (state == "none") {
      r.calibration = CalibrationState::None;
    } else if (state == "collecting") {
      r.calibration = CalibrationState::Collecting;
    } else if (state == "ready") {
      r.calibration = CalibrationState::Ready;
    } else {
      throw ReplayError("bad calibration state", 0);
    }
    r.eta_s1 = read_optional_number(cal.at("eta_s1"));
    r.eta_s2 = read_optional_number(cal.at("eta_s2"));

    r.frame_sha256_s1 = j.at("frames").at("s1").get<std::string>();
    r.frame_sha256_s2 = j.at("frames").at("s2").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ReplayError(std::string("malformed telemetry: ") + e.what(), 0);
  }
}

std::string telemetry_line(const TelemetryRecord& record) { return telemetry_to_json(record).dump() + "\n"; }

}  // namespace t2h::session
