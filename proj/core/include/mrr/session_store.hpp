#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrr/difficulty_agent.hpp"
#include "mrr/game_core.hpp"
#include "mrr/input_capture.hpp"

namespace mrr {

inline constexpr std::string_view kSessionFormat = "mrr-session/1";

struct SessionHeader {
  std::string session_id;
  std::string patient;  // opaque alias
  std::uint64_t seed = 0;
  double started_at = 0.0;  // session clock, seconds
  std::optional<std::string> started_utc;
  GameConfig config;

  friend bool operator==(const SessionHeader&, const SessionHeader&) = default;
};

// Raw input consumed by tick `tick`.
struct InputRecord {
  std::uint64_t tick = 0;
  RawSample sample;
  friend bool operator==(const InputRecord&, const InputRecord&) = default;
};

// Difficulty patch applied immediately before tick `tick`.
struct OverrideRecord {
  std::uint64_t tick = 0;
  DifficultyPatch patch;
  friend bool operator==(const OverrideRecord&, const OverrideRecord&) = default;
};

// Calibration installed immediately before tick `tick`.
struct CalibrationRecord {
  std::uint64_t tick = 0;
  CalibrationMap map;
  friend bool operator==(const CalibrationRecord&, const CalibrationRecord&) = default;
};

// Downsampled hand state plus the rolling state digest after `tick`.
struct TraceSample {
  std::uint64_t tick = 0;
  double t = 0.0;
  Vec3 pos;
  Vec3 vel;
  double speed = 0.0;
  bool tracking_lost = false;
  std::uint64_t digest = 0;
  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct SessionFooter {
  double ended_at = 0.0;
  std::uint64_t ticks = 0;
  std::uint64_t digest = 0;
  friend bool operator==(const SessionFooter&, const SessionFooter&) = default;
};

struct SessionRecord {
  SessionHeader header;
  std::vector<InputRecord> inputs;
  std::vector<OverrideRecord> overrides;
  std::vector<CalibrationRecord> calibrations;
  std::vector<GameEvent> events;
  std::vector<TraceSample> trace;
  std::optional<SessionFooter> footer;

  // Agent transitions, in event order.
  std::vector<TransitionEvent> transitions() const;
  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

// Append-only JSONL writer. Line 1 is the header; every append writes one
// complete line and flushes it, so a crash loses at most the line in flight.
// The in-memory record mirrors what was written.
class SessionWriter {
 public:
  // Throws StorageFailure when the file cannot be created.
  SessionWriter(std::filesystem::path path, SessionHeader header);
  ~SessionWriter();
  SessionWriter(const SessionWriter&) = delete;
  SessionWriter& operator=(const SessionWriter&) = delete;

  void append(const InputRecord& r);
  void append(const OverrideRecord& r);
  void append(const CalibrationRecord& r);
  void append(const GameEvent& e);
  void append(const TraceSample& s);
  // Writes the footer and syncs the file. Later appends throw SessionClosed.
  void close(const SessionFooter& footer);

  bool is_open() const { return open_; }
  const SessionRecord& record() const { return record_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  void write_line(const std::string& line);

  std::filesystem::path path_;
  std::ofstream out_;
  bool open_ = false;
  SessionRecord record_;
};

struct LoadResult {
  SessionRecord record;
  bool has_header = false;
  std::size_t complete_lines = 0;
  // The file ends in a partial line (crash during write).
  bool truncated = false;
  // 1-based number of the first complete line that failed to parse; loading
  // stops there.
  std::optional<std::size_t> corrupt_line;
  std::string corrupt_reason;

  bool clean() const { return has_header && !truncated && !corrupt_line; }
};

// Recovers every complete line; events are re-sorted by time (stable).
LoadResult parse_session(std::string_view contents);
// Throws StorageFailure if the file cannot be read.
LoadResult load_session(const std::filesystem::path& path);

// Serializes a record exactly as SessionWriter would have written it.
std::string serialize_session(const SessionRecord& record);

struct TaskTiming {
  std::size_t index = 0;
  Zone zone = Zone::BottomRight;
  std::optional<double> activated_at;
  std::optional<double> completed_at;
  std::optional<double> duration() const {
    if (activated_at && completed_at) return *completed_at - *activated_at;
    return std::nullopt;
  }
  friend bool operator==(const TaskTiming&, const TaskTiming&) = default;
};

struct SessionMetrics {
  double duration = 0.0;         // s
  double movement_volume = 0.0;  // m, hand path length
  double mean_speed = 0.0;       // m/s, path length over tracked time
  double peak_speed = 0.0;       // m/s, fastest trace segment
  std::vector<TaskTiming> tasks;
  std::uint64_t endorsed_touches = 0;
  std::map<AgentMode, double> occupancy;  // fraction of session time per mode
  double tracking_loss_duration = 0.0;    // s

  friend bool operator==(const SessionMetrics&, const SessionMetrics&) = default;
};

// Pure function of the record. Path length sums trace segments between
// consecutive tracked samples. Occupancy integrates the transition log over
// [started_at, end]. Throws InsufficientData with fewer than 2 tracked samples.
SessionMetrics compute_metrics(const SessionRecord& record);

std::string metrics_to_json(const SessionMetrics& m);
// One row per task plus a summary row.
std::string metrics_to_csv(const SessionMetrics& m);
std::string metrics_to_text(const SessionMetrics& m);

std::string format_digest(std::uint64_t d);
std::uint64_t parse_digest(std::string_view s);

}  // namespace mrr
