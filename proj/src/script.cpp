#include "t2h/script.hpp"

#include <cmath>
#include <set>

#include "t2h/errors.hpp"
#include "yaml_json.hpp"

namespace t2h::session {
namespace {

using nlohmann::json;

void reject_unknown(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : doc.items()) {
    if (!allowed.count(k)) throw ProtocolError(where + ": unknown field '" + k + "'");
  }
}

command::Vec3 vec3_field(const json& doc, const char* key) {
  command::Vec3 out{};
  auto it = doc.find(key);
  if (it == doc.end()) return out;
  if (!it->is_array() || it->size() != 3) throw ProtocolError(std::string(key) + ": expected [x, y, z]");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(*it)[i].is_number()) throw ProtocolError(std::string(key) + ": expected numbers");
    out[i] = (*it)[i].get<double>();
  }
  return out;
}

bool bool_field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) return false;
  if (!it->is_boolean()) throw ProtocolError(std::string(key) + ": expected true or false");
  return it->get<bool>();
}

std::uint64_t tick_field(const json& doc, const char* key, bool required) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    if (required) throw ProtocolError(std::string("missing '") + key + "'");
    return 0;
  }
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ProtocolError(std::string(key) + ": expected a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

}  // namespace

std::string_view to_string(ControlAction action) noexcept {
  switch (action) {
    case ControlAction::SetPartialAutonomy: return "set_pa";
    case ControlAction::Reset: return "reset";
    case ControlAction::SelectObject: return "select_object";
  }
  return "reset";
}

std::optional<ControlAction> control_action_from_string(std::string_view text) noexcept {
  for (auto a : {ControlAction::SetPartialAutonomy, ControlAction::Reset, ControlAction::SelectObject}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

void ControlMessage::validate() const {
  switch (action) {
    case ControlAction::SetPartialAutonomy:
      if (!value.is_boolean()) throw ProtocolError("set_pa: value must be true or false");
      break;
    case ControlAction::SelectObject:
      if (!value.is_string() || value.get<std::string>().empty()) {
        throw ProtocolError("select_object: value must be an object name");
      }
      break;
    case ControlAction::Reset:
      break;
  }
}

json control_to_json(const ControlMessage& control) {
  return json{{"action", to_string(control.action)}, {"value", control.value}};
}

ControlMessage control_from_json(const json& doc) {
  if (!doc.is_object()) throw ProtocolError("control: expected an object");
  reject_unknown(doc, {"type", "action", "value"}, "control");
  auto it = doc.find("action");
  if (it == doc.end() || !it->is_string()) throw ProtocolError("control: missing 'action'");
  auto action = control_action_from_string(it->get<std::string>());
  if (!action) throw ProtocolError("control: unknown action '" + it->get<std::string>() + "'");
  ControlMessage c{*action, doc.value("value", json(nullptr))};
  c.validate();
  return c;
}

json input_to_json(const command::ControllerInput& in) {
  return json{{"tick", in.tick},       {"lin", in.linear_velocity}, {"ang", in.angular_velocity},
              {"a", in.button_a},      {"b", in.button_b},          {"back", in.back_trigger},
              {"side", in.side_trigger}};
}

command::ControllerInput input_from_json(const json& doc) {
  if (!doc.is_object()) throw ProtocolError("input: expected an object");
  reject_unknown(doc, {"type", "tick", "lin", "ang", "a", "b", "back", "side"}, "input");
  command::ControllerInput in;
  in.tick = tick_field(doc, "tick", false);
  in.linear_velocity = vec3_field(doc, "lin");
  in.angular_velocity = vec3_field(doc, "ang");
  in.button_a = bool_field(doc, "a");
  in.button_b = bool_field(doc, "b");
  in.back_trigger = bool_field(doc, "back");
  in.side_trigger = bool_field(doc, "side");
  return in;
}

command::ControllerInput Script::input_at(std::uint64_t tick) const {
  command::ControllerInput in;
  for (const auto& s : segments) {
    if (tick >= s.from && tick < s.to) in = s.input;
  }
  in.tick = tick;
  return in;
}

std::vector<ControlMessage> Script::controls_at(std::uint64_t tick) const {
  std::vector<ControlMessage> out;
  for (const auto& c : controls) {
    if (c.at == tick) out.push_back(c.control);
  }
  return out;
}

Script parse_script(std::string_view text) {
  const json doc = detail::parse_yaml_or_json(text);
  if (!doc.is_object()) throw ConfigError("script: expected a mapping");
  try {
    reject_unknown(doc, {"name", "ticks", "config", "segments", "controls"}, "script");
    Script s;
    s.name = doc.value("name", std::string("script"));
    s.ticks = tick_field(doc, "ticks", true);
    if (auto it = doc.find("config"); it != doc.end()) {
      if (!it->is_object()) throw ProtocolError("config: expected a mapping");
      s.config = *it;
    }
    for (const auto& seg : doc.value("segments", json::array())) {
      if (!seg.is_object()) throw ProtocolError("segment: expected a mapping");
      ScriptSegment out;
      out.from = tick_field(seg, "from", true);
      out.to = tick_field(seg, "to", true);
      if (out.to < out.from) throw ProtocolError("segment: 'to' before 'from'");
      json fields = seg;
      fields.erase("from");
      fields.erase("to");
      out.input = input_from_json(fields);
      s.segments.push_back(out);
    }
    for (const auto& c : doc.value("controls", json::array())) {
      if (!c.is_object()) throw ProtocolError("control: expected a mapping");
      json fields = c;
      const auto at = tick_field(c, "at", true);
      fields.erase("at");
      s.controls.push_back({at, control_from_json(fields)});
    }
    return s;
  } catch (const ProtocolError& e) {
    throw ConfigError(std::string("script: ") + e.what());
  }
}

Script load_script(const std::filesystem::path& path) {
  try {
    return parse_script(detail::read_text_file(path.string()));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ScriptedOperator::ScriptedOperator(Script script) : script_(std::move(script)) {}

OperatorTick ScriptedOperator::poll(std::uint64_t tick) {
  return OperatorTick{script_.input_at(tick), script_.controls_at(tick)};
}

}  // namespace t2h::session
