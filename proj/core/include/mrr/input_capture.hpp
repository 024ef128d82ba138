#pragma once

#include <array>
#include <deque>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrr/vec3.hpp"

namespace mrr {

// One tracker reading in normalized camera coordinates.
struct RawSample {
  double t = 0.0;  // seconds, monotonic
  double u = 0.0;  // [0, 1] when valid
  double v = 0.0;  // [0, 1] when valid
  bool valid = false;

  friend bool operator==(const RawSample&, const RawSample&) = default;
};

struct CameraPoint {
  double u = 0.0;
  double v = 0.0;
  friend bool operator==(const CameraPoint&, const CameraPoint&) = default;
};

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

struct Correspondence {
  CameraPoint camera;
  PlanePoint game;
  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

// Affine camera-plane to table-plane map:
//   x = a*u + b*v + c
//   y = d*u + e*v + f
struct CalibrationMap {
  double a = 1.0, b = 0.0, c = 0.0;
  double d = 0.0, e = 1.0, f = 0.0;

  static CalibrationMap identity() { return {}; }

  double determinant() const { return a * e - b * d; }
  PlanePoint apply(CameraPoint p) const {
    return {a * p.u + b * p.v + c, d * p.u + e * p.v + f};
  }
  // Inverse map; throws DegenerateCorrespondences when not invertible.
  CalibrationMap inverse() const;
  std::array<double, 6> coefficients() const { return {a, b, c, d, e, f}; }

  friend bool operator==(const CalibrationMap&, const CalibrationMap&) = default;
};

// Calibrated hand estimate. The hand lies on the table plane (z = 0).
struct HandState {
  Vec3 pos;
  Vec3 vel;
  double speed = 0.0;
  double t = 0.0;

  friend bool operator==(const HandState&, const HandState&) = default;
};

struct FilterConfig {
  double alpha = 0.5;            // exponential smoothing factor, (0, 1]
  double velocity_window = 0.25; // seconds
  double dropout_timeout = 0.5;  // seconds

  void validate() const;
  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

// Least-squares affine fit. Exact for affine-consistent correspondences.
// Throws DegenerateCorrespondences for n < 3 or collinear camera points.
CalibrationMap solve_calibration(std::span<const Correspondence> pairs);

// Image of (u, v) on the table plane with z = 0. Throws InvalidSample when
// the sample carries no tracking lock.
Vec3 apply_calibration(const CalibrationMap& map, const RawSample& s);

// Inverse of apply_calibration for a table-plane point.
CameraPoint to_camera(const CalibrationMap& map, const Vec3& p);

// Estimates the hand state at time `now` from an ordered sample history.
//
// Valid samples inside [t_last - velocity_window, t_last] are calibrated and
// exponentially smoothed, seeded at the first sample of that window, so the
// smoothed position stays inside the convex hull of the window. Velocity is
// the least-squares slope of the smoothed positions against time. Samples
// that are invalid or not strictly later than the previous accepted sample
// are ignored.
//
// Throws TrackingLost when the latest valid sample is older than
// dropout_timeout relative to `now`.
HandState estimate_state(std::span<const RawSample> history, const CalibrationMap& map,
                         const FilterConfig& cfg, double now);

// Overload that evaluates at the time of the newest sample.
HandState estimate_state(std::span<const RawSample> history, const CalibrationMap& map,
                         const FilterConfig& cfg);

// Rolling sample history that keeps only what the estimator can still use.
// Out-of-order and invalid samples are dropped on push.
class SampleHistory {
 public:
  explicit SampleHistory(double retention_seconds = 1.0) : retention_(retention_seconds) {}

  // Returns false when the sample was ignored.
  bool push(const RawSample& s);
  std::span<const RawSample> samples() const { return samples_; }
  std::optional<double> last_time() const;
  void clear() { samples_.clear(); }

  friend bool operator==(const SampleHistory&, const SampleHistory&) = default;

 private:
  double retention_;
  std::vector<RawSample> samples_;
};

// Single-writer, multi-reader ingestion buffer. One producer appends
// samples; readers take immutable copies.
class SampleBuffer {
 public:
  explicit SampleBuffer(std::size_t capacity = 4096) : capacity_(capacity) {}

  // Returns false if the buffer was full and the oldest sample was dropped.
  bool push(const RawSample& s);
  std::vector<RawSample> drain();
  std::vector<RawSample> snapshot() const;
  std::size_t size() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<RawSample> queue_;
};

// Replay stream: one JSON object per line {"t":..,"u":..,"v":..,"valid":..}.
std::string format_sample_line(const RawSample& s);
RawSample parse_sample_line(std::string_view line);
std::vector<RawSample> read_sample_stream(std::istream& in);
void write_sample_stream(std::ostream& out, std::span<const RawSample> samples);

}  // namespace mrr
