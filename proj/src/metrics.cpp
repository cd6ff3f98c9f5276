#include "t2h/metrics.hpp"

#include <algorithm>

#include "t2h/errors.hpp"

namespace t2h::session {

SessionMetrics compute_metrics(std::span<const TelemetryRecord> records, double tick_rate_hz) {
  if (records.empty()) throw ArgumentError("metrics need at least one telemetry record");
  if (!(tick_rate_hz > 0.0)) throw ArgumentError("tick rate must be > 0");

  SessionMetrics m;
  m.ticks = records.size();
  m.duration = static_cast<double>(records.size()) / tick_rate_hz;
  m.min_opening = records.front().world.opening;
  bool guard_seen = false;
  int slips = 0;
  for (const auto& r : records) {
    m.min_opening = std::min(m.min_opening, r.world.opening);
    guard_seen = guard_seen || r.guard.enabled;
    if (r.guard.slip_event) ++slips;
    m.damaged = m.damaged || r.world.damaged;
  }
  if (guard_seen) m.slip_count = slips;
  const auto& last = records.back().world;
  m.delivered = last.delivered;
  m.drop_count = last.drop_count;
  m.keepout_incursions = last.keepout_incursions;
  m.final_status = last.object_status;
  return m;
}

nlohmann::json metrics_to_json(const SessionMetrics& m) {
  return nlohmann::json{{"ticks", m.ticks},
                        {"duration", m.duration},
                        {"min_opening", m.min_opening},
                        {"slip_count", m.slip_count ? nlohmann::json(*m.slip_count) : nlohmann::json(nullptr)},
                        {"damaged", m.damaged},
                        {"delivered", m.delivered},
                        {"drop_count", m.drop_count},
                        {"keepout_incursions", m.keepout_incursions},
                        {"final_status", sim::to_string(m.final_status)}};
}

}  // namespace t2h::session
