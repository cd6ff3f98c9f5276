#include "t2h/session_config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "t2h/errors.hpp"
#include "yaml_json.hpp"

namespace t2h::session {
namespace {

using nlohmann::json;

/// Typed access to one JSON object, remembering which keys were consumed so
/// leftovers can be reported as unknown.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where("") + "expected a mapping");
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(where(key) + "must be finite");
    }
  }

  void optional_number(const char* key, std::optional<double>& out) {
    if (const json* v = take(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) throw ConfigError(where(key) + "expected a number or null");
      out = v->get<double>();
    }
  }

  void integer(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + "expected an integer");
      const auto wide = v->get<long long>();
      if (v->is_number_unsigned() ? v->get<std::uint64_t>() > std::numeric_limits<int>::max()
                                  : (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max())) {
        throw ConfigError(where(key) + "integer out of range");
      }
      out = static_cast<int>(wide);
    }
  }

  void unsigned_integer(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(where(key) + "expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + "expected a string");
      out = v->get<std::string>();
    }
  }

  void vec3(const char* key, command::Vec3& out) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 3 ||
          !std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_number(); })) {
        throw ConfigError(where(key) + "expected [x, y, z]");
      }
      for (std::size_t i = 0; i < 3; ++i) out[i] = (*v)[i].get<double>();
    }
  }

  const json* raw(const char* key) { return take(key); }

  std::string where(const std::string& key) const {
    std::string p = path_;
    if (!key.empty()) p += p.empty() ? key : "." + key;
    return p.empty() ? "config: " : p + ": ";
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!used_.count(k)) throw ConfigError(where(k) + "unknown key");
    }
  }

 private:
  const json* take(const char* key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

sim::ObjectModel object_from_json(const json& doc, const std::string& path) {
  sim::ObjectModel o;
  Fields f(doc, path);
  f.string("name", o.name);
  if (o.name.empty()) throw ConfigError(f.where("name") + "required");
  if (auto base = sim::find_builtin_object(o.name)) o = *base;
  f.number("rest_width", o.rest_width);
  f.number("stiffness", o.stiffness);
  f.number("friction_coefficient", o.friction_coefficient);
  f.number("mass", o.mass);
  f.number("damage_compression", o.damage_compression);
  f.number("stem_force", o.stem_force);
  f.vec3("initial_position", o.initial_position);
  f.finish();
  return o;
}

json object_to_json(const sim::ObjectModel& o) {
  return json{{"name", o.name},
              {"rest_width", o.rest_width},
              {"stiffness", o.stiffness},
              {"friction_coefficient", o.friction_coefficient},
              {"mass", o.mass},
              {"damage_compression", o.damage_compression},
              {"stem_force", o.stem_force},
              {"initial_position", o.initial_position}};
}

void validate_or_rethrow(auto&& fn) {
  try {
    fn();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

haptic::HapticConfig SessionConfig::haptic_config() const { return {alpha, window_length}; }

command::VelocityLimits SessionConfig::velocity_limits() const {
  return {linear_max, angular_max, linear_deadband, angular_deadband, smoothing_window, gripper_speed};
}

slip::SlipConfig SessionConfig::slip_config() const {
  return {touch_threshold, tighten_step, reference_frames, window_length, threshold_cap};
}

sim::PhysicsConfig SessionConfig::physics_config() const {
  auto p = physics;
  p.gripper_speed = gripper_speed;
  return p;
}

sim::RenderConfig SessionConfig::render_config() const {
  auto r = imprint;
  r.width = frame_width;
  r.height = frame_height;
  r.noise_amplitude = noise_amplitude;
  return r;
}

sim::ObjectModel SessionConfig::resolve_object(std::optional<std::string_view> name) const {
  const std::string_view wanted = name.value_or(object);
  for (const auto& o : objects) {
    if (o.name == wanted) return o;
  }
  if (auto o = sim::find_builtin_object(wanted)) return *o;
  throw ConfigError("unknown object preset '" + std::string(wanted) + "'");
}

void SessionConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (reference_frames < 1) throw ConfigError("reference_frames must be >= 1");
  if (calibration_frames < reference_frames) throw ConfigError("calibration_frames must be >= reference_frames");
  if (window_length < 1) throw ConfigError("window_length must be >= 1");
  if (!(tick_rate_hz > 0.0)) throw ConfigError("tick_rate_hz must be > 0");
  if (tactile_stream_every < 0) throw ConfigError("tactile_stream_every must be >= 0");
  validate_or_rethrow([&] { velocity_limits().validate(); });
  validate_or_rethrow([&] { slip_config().validate(); });
  physics_config().validate();
  render_config().validate();
  for (const auto& o : objects) o.validate();
  resolve_object().validate();
}

SessionConfig config_from_json(const json& doc) {
  SessionConfig c;
  Fields f(doc, "");
  f.number("alpha", c.alpha);
  f.integer("reference_frames", c.reference_frames);
  f.integer("calibration_frames", c.calibration_frames);
  f.number("touch_threshold", c.touch_threshold);
  f.integer("window_length", c.window_length);
  f.number("linear_max", c.linear_max);
  f.number("angular_max", c.angular_max);
  f.number("linear_deadband", c.linear_deadband);
  f.number("angular_deadband", c.angular_deadband);
  f.integer("smoothing_window", c.smoothing_window);
  f.number("gripper_speed", c.gripper_speed);
  f.boolean("partial_autonomy", c.partial_autonomy);
  f.number("tighten_step", c.tighten_step);
  f.optional_number("threshold_cap", c.threshold_cap);
  f.number("tick_rate_hz", c.tick_rate_hz);
  f.unsigned_integer("seed", c.seed);
  f.string("object", c.object);
  f.integer("frame_width", c.frame_width);
  f.integer("frame_height", c.frame_height);
  f.number("noise_amplitude", c.noise_amplitude);
  f.boolean("auto_calibrate", c.auto_calibrate);
  f.integer("tactile_stream_every", c.tactile_stream_every);

  if (const json* p = f.raw("physics")) {
    Fields pf(*p, "physics");
    auto& ph = c.physics;
    pf.number("gravity", ph.gravity);
    pf.number("opening_max", ph.opening_max);
    pf.number("initial_opening", ph.initial_opening);
    pf.vec3("gripper_start", ph.gripper_start);
    pf.number("pad_half_width", ph.pad_half_width);
    pf.number("pad_half_height", ph.pad_half_height);
    pf.number("slip_gain", ph.slip_gain);
    pf.number("max_slip_speed", ph.max_slip_speed);
    pf.number("max_fall_speed", ph.max_fall_speed);
    pf.number("stem_stiffness", ph.stem_stiffness);
    pf.vec3("goal_center", ph.goal_center);
    pf.number("goal_radius", ph.goal_radius);
    pf.vec3("keepout_center", ph.keepout_center);
    pf.number("keepout_radius", ph.keepout_radius);
    pf.number("keepout_height", ph.keepout_height);
    pf.finish();
  }
  if (const json* r = f.raw("imprint")) {
    Fields rf(*r, "imprint");
    rf.number("radius_x", c.imprint.imprint_radius_x);
    rf.number("radius_z", c.imprint.imprint_radius_z);
    rf.number("saturation_force", c.imprint.imprint_saturation_force);
    rf.number("contrast", c.imprint.imprint_contrast);
    rf.finish();
  }
  if (const json* objs = f.raw("objects")) {
    if (!objs->is_array()) throw ConfigError("objects: expected a list");
    for (std::size_t i = 0; i < objs->size(); ++i) {
      c.objects.push_back(object_from_json((*objs)[i], "objects[" + std::to_string(i) + "]"));
    }
  }
  f.finish();

  c.physics.gripper_speed = c.gripper_speed;
  c.imprint.width = c.frame_width;
  c.imprint.height = c.frame_height;
  c.imprint.noise_amplitude = c.noise_amplitude;
  c.validate();
  return c;
}

json config_to_json(const SessionConfig& c) {
  json doc{{"alpha", c.alpha},
           {"reference_frames", c.reference_frames},
           {"calibration_frames", c.calibration_frames},
           {"touch_threshold", c.touch_threshold},
           {"window_length", c.window_length},
           {"linear_max", c.linear_max},
           {"angular_max", c.angular_max},
           {"linear_deadband", c.linear_deadband},
           {"angular_deadband", c.angular_deadband},
           {"smoothing_window", c.smoothing_window},
           {"gripper_speed", c.gripper_speed},
           {"partial_autonomy", c.partial_autonomy},
           {"tighten_step", c.tighten_step},
           {"threshold_cap", c.threshold_cap ? json(*c.threshold_cap) : json(nullptr)},
           {"tick_rate_hz", c.tick_rate_hz},
           {"seed", c.seed},
           {"object", c.object},
           {"frame_width", c.frame_width},
           {"frame_height", c.frame_height},
           {"noise_amplitude", c.noise_amplitude},
           {"auto_calibrate", c.auto_calibrate},
           {"tactile_stream_every", c.tactile_stream_every}};
  const auto& ph = c.physics;
  doc["physics"] = json{{"gravity", ph.gravity},
                        {"opening_max", ph.opening_max},
                        {"initial_opening", ph.initial_opening},
                        {"gripper_start", ph.gripper_start},
                        {"pad_half_width", ph.pad_half_width},
                        {"pad_half_height", ph.pad_half_height},
                        {"slip_gain", ph.slip_gain},
                        {"max_slip_speed", ph.max_slip_speed},
                        {"max_fall_speed", ph.max_fall_speed},
                        {"stem_stiffness", ph.stem_stiffness},
                        {"goal_center", ph.goal_center},
                        {"goal_radius", ph.goal_radius},
                        {"keepout_center", ph.keepout_center},
                        {"keepout_radius", ph.keepout_radius},
                        {"keepout_height", ph.keepout_height}};
  doc["imprint"] = json{{"radius_x", c.imprint.imprint_radius_x},
                        {"radius_z", c.imprint.imprint_radius_z},
                        {"saturation_force", c.imprint.imprint_saturation_force},
                        {"contrast", c.imprint.imprint_contrast}};
  auto objs = json::array();
  for (const auto& o : c.objects) objs.push_back(object_to_json(o));
  doc["objects"] = objs;
  return doc;
}

SessionConfig apply_overrides(const SessionConfig& base, const nlohmann::json& patch) {
  if (!patch.is_object()) throw ConfigError("config overrides must be a mapping");
  nlohmann::json merged = config_to_json(base);
  merged.merge_patch(patch);
  return config_from_json(merged);
}

SessionConfig parse_config(std::string_view text) {
  const auto doc = detail::parse_yaml_or_json(text);
  if (doc.is_null()) return config_from_json(json::object());
  return config_from_json(doc);
}

SessionConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(detail::read_text_file(path.string()));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_yaml(const SessionConfig& config) { return detail::emit_yaml(config_to_json(config)); }

}  // namespace t2h::session
