#pragma once

// Session logs are newline-delimited JSON:
//   {"schema":"t2h-session-log","version":1,"config":{...},"source":"..."}
//   {"tick":0,"input":{...}|null,"controls":[...],"telemetry":{...}}
//   ...
//   {"end":true,"ticks":n,"telemetry_sha256":"..."}
// Frames appear in telemetry by content hash only. When frame recording is
// on, each distinct frame is stored once in "<log>.frames".

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "t2h/digest.hpp"
#include "t2h/script.hpp"
#include "t2h/session.hpp"
#include "t2h/session_config.hpp"
#include "t2h/telemetry.hpp"

namespace t2h::session {

inline constexpr const char* kLogSchema = "t2h-session-log";
inline constexpr int kLogVersion = 1;

std::filesystem::path frames_path_for(const std::filesystem::path& log_path);

class LogWriter {
 public:
  LogWriter(const std::filesystem::path& path, const SessionConfig& config, const std::string& source,
            bool record_frames = false);
  ~LogWriter();
  LogWriter(const LogWriter&) = delete;
  LogWriter& operator=(const LogWriter&) = delete;

  void write(const OperatorTick& op, const TelemetryRecord& record, const Session& session);
  /// Writes the footer. Called by the destructor if not called explicitly.
  void close();

  std::uint64_t ticks() const noexcept { return ticks_; }

 private:
  std::ofstream out_;
  std::optional<std::ofstream> frames_;
  std::set<std::string> stored_frames_;
  StreamDigest digest_;
  std::uint64_t ticks_ = 0;
  bool closed_ = false;
};

struct LogEntry {
  OperatorTick op;
  TelemetryRecord telemetry;
  std::string telemetry_line;  ///< canonical text as recorded
};

struct SessionLog {
  SessionConfig config;
  std::string source;
  std::vector<LogEntry> entries;
  std::string telemetry_sha256;  ///< from the footer

  std::vector<TelemetryRecord> telemetry() const;
};

/// Throws ReplayError with the offending line; a log cut short reports the
/// first tick it is missing.
SessionLog read_log(const std::filesystem::path& path);
SessionLog parse_log(std::istream& in);

class ReplayOperator : public OperatorSource {
 public:
  explicit ReplayOperator(const SessionLog& log) : log_(log) {}
  OperatorTick poll(std::uint64_t tick) override { return log_.entries.at(tick).op; }
  bool finished(std::uint64_t tick) const override { return tick >= log_.entries.size(); }

 private:
  const SessionLog& log_;
};

struct ReplayResult {
  RunResult run;
  bool hash_matches = false;
  std::optional<std::uint64_t> first_divergent_tick;
};

/// Re-runs the recorded operator stream, by default under the recorded config.
ReplayResult replay(const SessionLog& log, const std::optional<SessionConfig>& config = std::nullopt);

/// Reads the stored frames side file into (sha256 -> rgb8 bytes).
std::vector<std::pair<std::string, std::vector<std::uint8_t>>> read_frames(const std::filesystem::path& path);

}  // namespace t2h::session
