#include "t2h/protocol.hpp"

#include <cmath>

#include "t2h/digest.hpp"
#include "t2h/errors.hpp"

namespace t2h::net {

using nlohmann::json;

std::string encode_frame(std::string_view payload) {
  if (payload.size() > kMaxPayloadBytes) throw ProtocolError("payload too large");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

std::string encode_message(const json& message) { return encode_frame(message.dump()); }

void FrameDecoder::feed(std::string_view bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.append(bytes);
}

std::optional<std::string> FrameDecoder::next() {
  if (buffered() < 4) return std::nullopt;
  const auto* p = reinterpret_cast<const unsigned char*>(buffer_.data() + offset_);
  const std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
                          (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  if (n > kMaxPayloadBytes) throw ProtocolError("declared frame length " + std::to_string(n) + " too large");
  if (buffered() < 4 + std::size_t{n}) return std::nullopt;
  std::string payload = buffer_.substr(offset_ + 4, n);
  offset_ += 4 + n;
  if (offset_ > 65536) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  return payload;
}

ClientMessage parse_client_message(std::string_view payload) {
  json doc;
  try {
    doc = json::parse(payload);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ProtocolError("message must be a JSON object");
  auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) throw ProtocolError("message without a type");
  if (*type == "input") return session::input_from_json(doc);
  if (*type == "control") return session::control_from_json(doc);
  throw ProtocolError("unknown message type '" + type->get<std::string>() + "'");
}

json input_message(const command::ControllerInput& input) {
  json doc = session::input_to_json(input);
  doc["type"] = "input";
  return doc;
}

json control_message(const session::ControlMessage& control) {
  json doc = session::control_to_json(control);
  doc["type"] = "control";
  return doc;
}

double quantize_intensity(double f) { return std::round(f * 1e4) / 1e4; }

json telemetry_message(const session::TelemetryRecord& r) {
  const auto& w = r.world;
  const auto& g = w.gripper_position;
  const auto& o = w.gripper_orientation;
  const auto& p = w.object_position;
  return json{{"type", "telemetry"},
              {"tick", r.tick},
              {"f", quantize_intensity(r.intensity())},
              {"p1", r.feedback ? r.feedback->ratio_s1 : 0.0},
              {"p2", r.feedback ? r.feedback->ratio_s2 : 0.0},
              {"opening", w.opening},
              {"guard_phase", slip::to_string(r.guard.phase)},
              {"slip_count", r.guard.slip_count},
              {"object_status", sim::to_string(w.object_status)},
              {"gripper_pose", {g[0], g[1], g[2], o[0], o[1], o[2]}},
              {"object_pose", {p[0], p[1], p[2], 0.0, 0.0, 0.0}}};
}

json tactile_message(const TactileMessage& m) {
  return json{{"type", "tactile"},        {"tick", m.tick},       {"sensor", m.sensor},
              {"width", m.width},         {"height", m.height},   {"encoding", "base64-rgb8"},
              {"data", base64_encode(m.rgb8)}};
}

TactileMessage parse_tactile_message(const json& doc) {
  try {
    if (doc.at("type") != "tactile") throw ProtocolError("not a tactile message");
    if (doc.at("encoding") != "base64-rgb8") throw ProtocolError("unsupported tactile encoding");
    TactileMessage m;
    m.tick = doc.at("tick").get<std::uint64_t>();
    m.sensor = doc.at("sensor").get<int>();
    m.width = doc.at("width").get<int>();
    m.height = doc.at("height").get<int>();
    if (m.sensor != 1 && m.sensor != 2) throw ProtocolError("tactile sensor must be 1 or 2");
    if (m.width <= 0 || m.height <= 0) throw ProtocolError("tactile size must be positive");
    m.rgb8 = base64_decode(doc.at("data").get<std::string>());
    const auto expected = 3 * static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height);
    if (m.rgb8.size() != expected) {
      throw ProtocolError("tactile payload has " + std::to_string(m.rgb8.size()) + " bytes, expected " +
                          std::to_string(expected));
    }
    return m;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed tactile message: ") + e.what());
  }
}

}  // namespace t2h::net
