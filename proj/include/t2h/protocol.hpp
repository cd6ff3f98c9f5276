#pragma once

// Wire format: each message is a 4-byte big-endian payload length followed
// by one UTF-8 JSON object with a "type" field.
//   client -> server: input, control
//   server -> client: telemetry, tactile

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "t2h/command_mapper.hpp"
#include "t2h/script.hpp"
#include "t2h/telemetry.hpp"

namespace t2h::net {

inline constexpr std::size_t kMaxPayloadBytes = 1u << 20;

std::string encode_frame(std::string_view payload);
std::string encode_message(const nlohmann::json& message);

/// Incremental splitter for a byte stream of length-prefixed frames.
class FrameDecoder {
 public:
  /// Throws ProtocolError when a declared length exceeds kMaxPayloadBytes.
  void feed(std::string_view bytes);
  std::optional<std::string> next();
  std::size_t buffered() const noexcept { return buffer_.size() - offset_; }

 private:
  std::string buffer_;
  std::size_t offset_ = 0;
};

using ClientMessage = std::variant<command::ControllerInput, session::ControlMessage>;

/// Throws ProtocolError on malformed JSON, unknown types or bad fields.
ClientMessage parse_client_message(std::string_view payload);

nlohmann::json input_message(const command::ControllerInput& input);
nlohmann::json control_message(const session::ControlMessage& control);

/// f is rounded to 4 decimals; everything else is sent at full precision.
nlohmann::json telemetry_message(const session::TelemetryRecord& record);
double quantize_intensity(double f);

struct TactileMessage {
  std::uint64_t tick = 0;
  int sensor = 1;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb8;
};

nlohmann::json tactile_message(const TactileMessage& message);
/// Decodes and checks that the payload holds width*height*3 bytes.
TactileMessage parse_tactile_message(const nlohmann::json& doc);

}  // namespace t2h::net
