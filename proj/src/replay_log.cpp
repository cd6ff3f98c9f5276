#include "t2h/replay_log.hpp"

#include <istream>

#include "t2h/errors.hpp"

namespace t2h::session {
namespace {

using nlohmann::json;

json operator_to_json(const OperatorTick& op) {
  auto controls = json::array();
  for (const auto& c : op.controls) controls.push_back(control_to_json(c));
  return json{{"input", op.input ? input_to_json(*op.input) : json(nullptr)}, {"controls", controls}};
}

}  // namespace

std::filesystem::path frames_path_for(const std::filesystem::path& log_path) {
  auto p = log_path;
  p += ".frames";
  return p;
}

LogWriter::LogWriter(const std::filesystem::path& path, const SessionConfig& config, const std::string& source,
                     bool record_frames)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot write log " + path.string());
  if (record_frames) {
    frames_.emplace(frames_path_for(path), std::ios::binary | std::ios::trunc);
    if (!*frames_) throw std::runtime_error("cannot write frames " + frames_path_for(path).string());
  }
  json header{{"schema", kLogSchema}, {"version", kLogVersion}, {"config", config_to_json(config)},
              {"source", source}, {"frames", record_frames}};
  out_ << header.dump() << '\n';
}

LogWriter::~LogWriter() {
  try {
    close();
  } catch (...) {
  }
}

void LogWriter::write(const OperatorTick& op, const TelemetryRecord& record, const Session& session) {
  json line = operator_to_json(op);
  line["tick"] = record.tick;
  line["telemetry"] = telemetry_to_json(record);
  out_ << line.dump() << '\n';
  digest_.update(telemetry_line(record));
  ++ticks_;

  if (frames_) {
    const auto shape = session.simulator().frame_shape();
    const std::array<const std::string*, 2> hashes{&record.frame_sha256_s1, &record.frame_sha256_s2};
    for (int s = 0; s < 2; ++s) {
      const auto& h = *hashes[static_cast<std::size_t>(s)];
      if (!stored_frames_.insert(h).second) continue;
      json f{{"sha256", h},
             {"tick", record.tick},
             {"sensor", s + 1},
             {"width", shape.width},
             {"height", shape.height},
             {"encoding", "base64-rgb8"},
             {"data", base64_encode(session.last_frames()[static_cast<std::size_t>(s)])}};
      *frames_ << f.dump() << '\n';
    }
  }
}

void LogWriter::close() {
  if (closed_) return;
  closed_ = true;
  json footer{{"end", true}, {"ticks", ticks_}, {"telemetry_sha256", digest_.hex()}};
  out_ << footer.dump() << '\n';
  out_.flush();
  if (frames_) frames_->flush();
}

std::vector<TelemetryRecord> SessionLog::telemetry() const {
  std::vector<TelemetryRecord> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.telemetry);
  return out;
}

SessionLog parse_log(std::istream& in) {
  SessionLog log;
  std::string text;
  std::size_t line_no = 0;
  bool have_header = false;
  bool have_footer = false;

  while (std::getline(in, text)) {
    ++line_no;
    const bool complete = !in.eof();
    if (text.empty() && !complete) break;
    if (have_footer) throw ReplayError("content after the end marker", line_no);

    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      if (!complete && have_header) {
        throw ReplayError("log truncated inside tick " + std::to_string(log.entries.size()), line_no,
                          static_cast<long long>(log.entries.size()));
      }
      throw ReplayError(std::string("corrupt line: ") + e.what(), line_no);
    }
    if (!doc.is_object()) throw ReplayError("expected a JSON object", line_no);

    if (!have_header) {
      if (doc.value("schema", std::string()) != kLogSchema) throw ReplayError("not a session log", line_no);
      if (doc.value("version", 0) != kLogVersion) throw ReplayError("unsupported log version", line_no);
      try {
        log.config = config_from_json(doc.at("config"));
        log.source = doc.value("source", std::string());
      } catch (const std::exception& e) {
        throw ReplayError(std::string("bad header: ") + e.what(), line_no);
      }
      have_header = true;
      continue;
    }

    if (doc.contains("end")) {
      try {
        const auto ticks = doc.at("ticks").get<std::uint64_t>();
        log.telemetry_sha256 = doc.at("telemetry_sha256").get<std::string>();
        if (ticks != log.entries.size()) {
          throw ReplayError("end marker counts " + std::to_string(ticks) + " ticks, log has " +
                                std::to_string(log.entries.size()),
                            line_no, static_cast<long long>(log.entries.size()));
        }
      } catch (const json::exception& e) {
        throw ReplayError(std::string("bad end marker: ") + e.what(), line_no);
      }
      have_footer = true;
      continue;
    }

    const auto expected = static_cast<std::uint64_t>(log.entries.size());
    LogEntry entry;
    try {
      const auto tick = doc.at("tick").get<std::uint64_t>();
      if (tick != expected) {
        throw ReplayError("expected tick " + std::to_string(expected) + ", found " + std::to_string(tick), line_no,
                          static_cast<long long>(expected));
      }
      if (!doc.at("input").is_null()) entry.op.input = input_from_json(doc.at("input"));
      for (const auto& c : doc.at("controls")) entry.op.controls.push_back(control_from_json(c));
      entry.telemetry = telemetry_from_json(doc.at("telemetry"));
      entry.telemetry_line = doc.at("telemetry").dump() + "\n";
      if (entry.telemetry.tick != expected) throw ReplayError("telemetry tick mismatch", line_no);
    } catch (const ReplayError& e) {
      throw ReplayError(e.detail(), line_no, e.missing_tick());
    } catch (const std::exception& e) {
      throw ReplayError(std::string("corrupt tick record: ") + e.what(), line_no);
    }
    log.entries.push_back(std::move(entry));
  }

  if (!have_header) throw ReplayError("empty log", line_no);
  if (!have_footer) {
    throw ReplayError("log ends before tick " + std::to_string(log.entries.size()), line_no + 1,
                      static_cast<long long>(log.entries.size()));
  }
  return log;
}

SessionLog read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReplayError("cannot open " + path.string(), 0);
  return parse_log(in);
}

ReplayResult replay(const SessionLog& log, const std::optional<SessionConfig>& config) {
  ReplayOperator source(log);
  ReplayResult out;
  out.run = run_session(config.value_or(log.config), source);
  for (std::size_t i = 0; i < out.run.telemetry.size(); ++i) {
    if (telemetry_line(out.run.telemetry[i]) != log.entries[i].telemetry_line) {
      out.first_divergent_tick = i;
      break;
    }
  }
  out.hash_matches = out.run.telemetry_sha256 == log.telemetry_sha256 && !out.first_divergent_tick;
  return out;
}

std::vector<std::pair<std::string, std::vector<std::uint8_t>>> read_frames(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReplayError("cannot open " + path.string(), 0);
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> out;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    try {
      const auto doc = json::parse(text);
      out.emplace_back(doc.at("sha256").get<std::string>(), base64_decode(doc.at("data").get<std::string>()));
    } catch (const std::exception& e) {
      throw ReplayError(std::string("corrupt frame record: ") + e.what(), line_no);
    }
  }
  return out;
}

}  // namespace t2h::session
