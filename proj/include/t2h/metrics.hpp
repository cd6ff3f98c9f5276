#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "json.hpp"
#include "t2h/telemetry.hpp"

namespace t2h::session {

struct SessionMetrics {
  std::uint64_t ticks = 0;
  double duration = 0.0;     ///< s
  double min_opening = 0.0;  ///< m
  std::optional<int> slip_count;  ///< only when partial autonomy was enabled at some tick
  bool damaged = false;
  bool delivered = false;
  int drop_count = 0;
  int keepout_incursions = 0;
  sim::ObjectStatus final_status = sim::ObjectStatus::Free;

  friend bool operator==(const SessionMetrics&, const SessionMetrics&) = default;
};

/// Throws ArgumentError on an empty stream or a non-positive tick rate.
SessionMetrics compute_metrics(std::span<const TelemetryRecord> records, double tick_rate_hz);

nlohmann::json metrics_to_json(const SessionMetrics& metrics);

}  // namespace t2h::session
