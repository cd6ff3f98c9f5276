#include <gtest/gtest.h>

#include <random>

#include "t2h/digest.hpp"
#include "t2h/errors.hpp"
#include "t2h/protocol.hpp"

namespace t2h::net {
namespace {

using nlohmann::json;

TEST(Framing, BigEndianLengthPrefix) {
  const auto f = encode_frame("abc");
  ASSERT_EQ(f.size(), 7u);
  EXPECT_EQ(f.substr(0, 4), std::string("\0\0\0\3", 4));
  EXPECT_EQ(f.substr(4), "abc");
  const auto big = encode_frame(std::string(0x010203, 'x'));
  EXPECT_EQ(static_cast<unsigned char>(big[1]), 0x01);
  EXPECT_EQ(static_cast<unsigned char>(big[2]), 0x02);
  EXPECT_EQ(static_cast<unsigned char>(big[3]), 0x03);
  EXPECT_THROW(encode_frame(std::string(kMaxPayloadBytes + 1, 'x')), ProtocolError);
}

TEST(Framing, DecoderReassemblesArbitrarySplits) {
  std::vector<std::string> payloads;
  std::string stream;
  for (int i = 0; i < 50; ++i) {
    payloads.push_back(json{{"type", "input"}, {"tick", i}, {"pad", std::string(static_cast<std::size_t>(i * 7), 'p')}}.dump());
    stream += encode_frame(payloads.back());
  }
  stream += encode_frame("");
  payloads.emplace_back();
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    FrameDecoder d;
    std::vector<std::string> got;
    std::size_t pos = 0;
    while (pos < stream.size()) {
      const std::size_t n = std::min<std::size_t>(1 + rng() % 40, stream.size() - pos);
      d.feed(std::string_view(stream).substr(pos, n));
      pos += n;
      while (auto p = d.next()) got.push_back(*p);
    }
    EXPECT_EQ(got, payloads);
    EXPECT_EQ(d.buffered(), 0u);
  }
}

TEST(Framing, OversizedDeclarationRejected) {
  FrameDecoder d;
  d.feed(std::string("\x00\x20\x00\x01", 4));
  EXPECT_THROW(d.next(), ProtocolError);
}

TEST(ClientMessages, ParseInputAndControl) {
  command::ControllerInput in;
  in.tick = 4;
  in.linear_velocity = {0.02, 0, 0};
  in.button_a = true;
  const auto parsed = parse_client_message(input_message(in).dump());
  ASSERT_TRUE(std::holds_alternative<command::ControllerInput>(parsed));
  EXPECT_EQ(std::get<command::ControllerInput>(parsed), in);

  session::ControlMessage c{session::ControlAction::SelectObject, "egg"};
  const auto pc = parse_client_message(control_message(c).dump());
  ASSERT_TRUE(std::holds_alternative<session::ControlMessage>(pc));
  EXPECT_EQ(std::get<session::ControlMessage>(pc), c);
}

TEST(ClientMessages, Rejections) {
  EXPECT_THROW(parse_client_message("{not json"), ProtocolError);
  EXPECT_THROW(parse_client_message("[1,2]"), ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"tick":1})"), ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"telemetry","tick":1})"), ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"input","lin":[0,0]})"), ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"input","warp":1})"), ProtocolError);
  EXPECT_THROW(parse_client_message(R"({"type":"control","action":"set_pa","value":"on"})"), ProtocolError);
}

TEST(Telemetry, IntensityQuantisedToFourDecimals) {
  session::TelemetryRecord r;
  r.tick = 12;
  r.feedback = haptic::FeedbackSample{12, 0.01, 0.03, 0.02, 0.4334563, false};
  r.world.opening = 0.0391;
  r.world.gripper_position = {0.1, 0.2, 0.3};
  r.world.gripper_orientation = {0.0, 0.1, 0.2};
  r.world.object_status = sim::ObjectStatus::Slipping;
  r.guard.phase = slip::GuardPhase::Armed;
  r.guard.slip_count = 2;
  const auto m = telemetry_message(r);
  EXPECT_EQ(m.at("type"), "telemetry");
  EXPECT_EQ(m.at("f").get<double>(), 0.4335);
  EXPECT_EQ(m.at("p1").get<double>(), 0.01);
  EXPECT_EQ(m.at("p2").get<double>(), 0.03);
  EXPECT_EQ(m.at("guard_phase"), "armed");
  EXPECT_EQ(m.at("object_status"), "slipping");
  EXPECT_EQ(m.at("slip_count"), 2);
  EXPECT_EQ(m.at("gripper_pose"), json({0.1, 0.2, 0.3, 0.0, 0.1, 0.2}));
  EXPECT_EQ(quantize_intensity(0.0), 0.0);
  EXPECT_EQ(quantize_intensity(1.0), 1.0);
  EXPECT_EQ(telemetry_message(session::TelemetryRecord{}).at("f").get<double>(), 0.0);
}

TEST(Tactile, PayloadRoundTripsHashEqual) {
  std::mt19937 rng(8);
  TactileMessage m{30, 2, 64, 64, std::vector<std::uint8_t>(64 * 64 * 3)};
  for (auto& b : m.rgb8) b = static_cast<std::uint8_t>(rng());
  const auto doc = json::parse(tactile_message(m).dump());
  EXPECT_EQ(doc.at("encoding"), "base64-rgb8");
  const auto back = parse_tactile_message(doc);
  EXPECT_EQ(sha256_hex(back.rgb8), sha256_hex(m.rgb8));
  EXPECT_EQ(back.tick, 30u);
  EXPECT_EQ(back.sensor, 2);
  EXPECT_EQ(back.width, 64);
}

TEST(Tactile, MalformedPayloadsRejected) {
  TactileMessage m{1, 1, 2, 2, std::vector<std::uint8_t>(12, 7)};
  auto doc = tactile_message(m);
  doc["width"] = 3;
  EXPECT_THROW(parse_tactile_message(doc), ProtocolError);
  doc = tactile_message(m);
  doc["data"] = "***";
  EXPECT_THROW(parse_tactile_message(doc), ProtocolError);
  doc = tactile_message(m);
  doc["sensor"] = 3;
  EXPECT_THROW(parse_tactile_message(doc), ProtocolError);
  doc = tactile_message(m);
  doc.erase("height");
  EXPECT_THROW(parse_tactile_message(doc), ProtocolError);
  doc = tactile_message(m);
  doc["encoding"] = "png";
  EXPECT_THROW(parse_tactile_message(doc), ProtocolError);
}

}  // namespace
}  // namespace t2h::net
