#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdr/detector/channel.hpp"
#include "fdr/harness/telemetry.hpp"

namespace fdr {

struct ChannelTrace {
  std::string channel;
  std::vector<double> time, y, y_hat, residual, z;
  std::vector<bool> alarmed;
};

struct OfflineResult {
  std::vector<DetectionEvent> events;  // ordered by (time, channel)
  std::vector<ChannelTrace> traces;    // one per configured channel
  int skipped_cells = 0;               // rows dropped for non-finite samples
};

// Deterministic replay of the detector over a recorded log. The time column
// must be monotone non-decreasing; rows with non-finite samples are skipped
// per channel and counted.
inline OfflineResult run_offline(const TelemetryTable& log,
                                 const std::vector<ChannelConfig>& channels) {
  OfflineResult result;
  if (log.empty()) {
    for (const auto& cfg : channels) {
      ChannelTrace trace;
      trace.channel = cfg.name;
      result.traces.push_back(std::move(trace));
    }
    return result;
  }

  const int time_col = log.require_col("time");
  for (size_t r = 1; r < log.rows.size(); ++r) {
    if (log.rows[r][static_cast<size_t>(time_col)] <
        log.rows[r - 1][static_cast<size_t>(time_col)])
      throw std::invalid_argument("run_offline: time column is not monotone");
  }

  for (const auto& cfg : channels) {
    const int in_col = log.require_col(cfg.input);
    const int out_col = log.require_col(cfg.output);
    DetectorChannel channel(cfg);
    ChannelTrace trace;
    trace.channel = cfg.name;
    trace.time.reserve(log.size());
    for (const auto& row : log.rows) {
      const double t = row[static_cast<size_t>(time_col)];
      const double u = row[static_cast<size_t>(in_col)];
      const double y = row[static_cast<size_t>(out_col)];
      auto event = channel.step(u, y, t);
      if (event) result.events.push_back(*event);
      const auto& last = channel.last();
      trace.time.push_back(t);
      trace.y.push_back(y);
      trace.y_hat.push_back(last.y_hat);
      trace.residual.push_back(last.residual);
      trace.z.push_back(last.z);
      trace.alarmed.push_back(last.alarmed);
    }
    result.skipped_cells += channel.skipped_samples();
    result.traces.push_back(std::move(trace));
  }

  std::sort(result.events.begin(), result.events.end(),
            [](const DetectionEvent& a, const DetectionEvent& b) {
              return a.time != b.time ? a.time < b.time : a.channel < b.channel;
            });
  return result;
}

inline TelemetryTable trace_to_table(const ChannelTrace& trace) {
  TelemetryTable t;
  t.columns = {"time", "y", "y_hat", "residual", "z", "alarmed"};
  for (size_t i = 0; i < trace.time.size(); ++i)
    t.rows.push_back({trace.time[i], trace.y[i], trace.y_hat[i], trace.residual[i],
                      trace.z[i], trace.alarmed[i] ? 1.0 : 0.0});
  return t;
}

struct FaultWindow {
  double start = 0.0;
  std::string channel;  // empty matches any channel
};

struct DetectionMetrics {
  int tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0;
  std::optional<double> mean_latency, max_latency;
};

// Scores events against labeled fault windows [start, start + tolerance].
// The first event inside a window is its true positive (latency = event time
// minus start); later events in the same window are ignored; events outside
// every window are false positives. Fault-free sequences enter as counts.
inline DetectionMetrics evaluate_detections(const std::vector<DetectionEvent>& events,
                                            const std::vector<FaultWindow>& windows,
                                            double tolerance,
                                            int negative_sequences = 0,
                                            int negative_alarmed = 0) {
  if (tolerance <= 0.0)
    throw std::invalid_argument("evaluate_detections: tolerance must be positive");
  for (size_t i = 0; i + 1 < windows.size(); ++i) {
    if (windows[i].start > windows[i + 1].start)
      throw std::invalid_argument("evaluate_detections: windows must be sorted");
    if (windows[i].start + tolerance > windows[i + 1].start)
      throw std::invalid_argument("evaluate_detections: windows overlap");
  }
  if (negative_alarmed > negative_sequences)
    throw std::invalid_argument("evaluate_detections: negative counts inconsistent");

  DetectionMetrics m;
  std::vector<bool> hit(windows.size(), false);
  double latency_sum = 0.0;
  for (const auto& ev : events) {
    bool inside = false;
    for (size_t w = 0; w < windows.size(); ++w) {
      if (ev.time < windows[w].start || ev.time > windows[w].start + tolerance) continue;
      if (!windows[w].channel.empty() && windows[w].channel != ev.channel) continue;
      inside = true;
      if (!hit[w]) {
        hit[w] = true;
        ++m.tp;
        const double latency = ev.time - windows[w].start;
        latency_sum += latency;
        m.max_latency = std::max(m.max_latency.value_or(0.0), latency);
      }
      break;
    }
    if (!inside) ++m.fp;
  }
  for (const bool h : hit)
    if (!h) ++m.fn;
  m.tn = negative_sequences - negative_alarmed;

  if (m.tp > 0) m.mean_latency = latency_sum / m.tp;
  const int sequences = static_cast<int>(windows.size()) + negative_sequences;
  if (sequences > 0) m.accuracy = static_cast<double>(m.tp + m.tn) / sequences;
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / (m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / (m.tp + m.fn);
  return m;
}

}  // namespace fdr
