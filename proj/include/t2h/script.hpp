#pragma once

// Operator sources feed the session one tick at a time. A scripted operator
// is a declarative list of tick ranges, each holding a controller input
// template; later segments override earlier ones where they overlap.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "t2h/command_mapper.hpp"

namespace t2h::session {

enum class ControlAction { SetPartialAutonomy, Reset, SelectObject };

std::string_view to_string(ControlAction action) noexcept;
std::optional<ControlAction> control_action_from_string(std::string_view text) noexcept;

struct ControlMessage {
  ControlAction action = ControlAction::Reset;
  nlohmann::json value;  ///< bool for set_pa, object name for select_object, null for reset

  /// Throws ProtocolError if `value` has the wrong type for `action`.
  void validate() const;
  friend bool operator==(const ControlMessage&, const ControlMessage&) = default;
};

nlohmann::json control_to_json(const ControlMessage& control);
/// Accepts {"action": ..., "value": ...}; extra keys are rejected.
ControlMessage control_from_json(const nlohmann::json& doc);

nlohmann::json input_to_json(const command::ControllerInput& input);
/// Wire field names: tick, lin, ang, a, b, back, side. Missing fields are
/// zero/false; unknown fields are rejected.
command::ControllerInput input_from_json(const nlohmann::json& doc);

/// What the operator produced for one tick. No input means the operator was
/// silent, which the session treats as a zero command.
struct OperatorTick {
  std::optional<command::ControllerInput> input;
  std::vector<ControlMessage> controls;
};

class OperatorSource {
 public:
  virtual ~OperatorSource() = default;
  virtual OperatorTick poll(std::uint64_t tick) = 0;
  /// True once the source has nothing left for `tick` and beyond.
  virtual bool finished(std::uint64_t tick) const = 0;
};

struct ScriptSegment {
  std::uint64_t from = 0;  ///< first tick
  std::uint64_t to = 0;    ///< one past the last tick
  command::ControllerInput input;
};

struct ScriptControl {
  std::uint64_t at = 0;
  ControlMessage control;
};

struct Script {
  std::string name;
  std::uint64_t ticks = 0;
  nlohmann::json config = nlohmann::json::object();  ///< session config overrides
  std::vector<ScriptSegment> segments;
  std::vector<ScriptControl> controls;

  command::ControllerInput input_at(std::uint64_t tick) const;
  std::vector<ControlMessage> controls_at(std::uint64_t tick) const;
};

Script parse_script(std::string_view text);
Script load_script(const std::filesystem::path& path);

class ScriptedOperator : public OperatorSource {
 public:
  explicit ScriptedOperator(Script script);
  OperatorTick poll(std::uint64_t tick) override;
  bool finished(std::uint64_t tick) const override { return tick >= script_.ticks; }
  const Script& script() const noexcept { return script_; }

 private:
  Script script_;
};

/// Produces no input for a fixed number of ticks.
class IdleOperator : public OperatorSource {
 public:
  explicit IdleOperator(std::uint64_t ticks) : ticks_(ticks) {}
  OperatorTick poll(std::uint64_t) override { return {}; }
  bool finished(std::uint64_t tick) const override { return tick >= ticks_; }

 private:
  std::uint64_t ticks_;
};

}  // namespace t2h::session
