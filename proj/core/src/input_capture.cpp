#include "mrr/input_capture.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "mrr/errors.hpp"

namespace mrr {

namespace {

using json = nlohmann::json;

// Relative eigenvalue ratio below which camera points count as collinear.
constexpr double kCollinearityTolerance = 1e-12;

bool collinear(std::span<const Correspondence> pairs) {
  double mu = 0.0, mv = 0.0;
  for (const auto& p : pairs) {
    mu += p.camera.u;
    mv += p.camera.v;
  }
  const double n = static_cast<double>(pairs.size());
  mu /= n;
  mv /= n;
  double suu = 0.0, svv = 0.0, suv = 0.0;
  for (const auto& p : pairs) {
    const double du = p.camera.u - mu;
    const double dv = p.camera.v - mv;
    suu += du * du;
    svv += dv * dv;
    suv += du * dv;
  }
  const double trace = suu + svv;
  if (!(trace > 0.0)) return true;
  const double det = suu * svv - suv * suv;
  // det / trace^2 is the product of normalized eigenvalues.
  return det <= kCollinearityTolerance * trace * trace;
}

}  // namespace

CalibrationMap CalibrationMap::inverse() const {
  const double det = determinant();
  if (det == 0.0 || !std::isfinite(det)) {
    throw DegenerateCorrespondences("calibration map is not invertible");
  }
  CalibrationMap inv;
  inv.a = e / det;
  inv.b = -b / det;
  inv.d = -d / det;
  inv.e = a / det;
  inv.c = -(inv.a * c + inv.b * f);
  inv.f = -(inv.d * c + inv.e * f);
  return inv;
}

void FilterConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("filter.alpha must be in (0, 1]");
  if (!(velocity_window > 0.0)) throw ConfigError("filter.velocity_window must be > 0");
  if (!(dropout_timeout > 0.0)) throw ConfigError("filter.dropout_timeout must be > 0");
}

CalibrationMap solve_calibration(std::span<const Correspondence> pairs) {
  if (pairs.size() < 3) {
    throw DegenerateCorrespondences("at least 3 correspondences are required");
  }
  if (collinear(pairs)) {
    throw DegenerateCorrespondences("camera points are collinear");
  }
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::MatrixXd targets(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    design(i, 0) = p.camera.u;
    design(i, 1) = p.camera.v;
    design(i, 2) = 1.0;
    targets(i, 0) = p.game.x;
    targets(i, 1) = p.game.y;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw DegenerateCorrespondences("correspondences are rank deficient");
  const Eigen::MatrixXd coef = qr.solve(targets);

  CalibrationMap m;
  m.a = coef(0, 0);
  m.b = coef(1, 0);
  m.c = coef(2, 0);
  m.d = coef(0, 1);
  m.e = coef(1, 1);
  m.f = coef(2, 1);
  if (m.determinant() == 0.0) throw DegenerateCorrespondences("fitted map is singular");
  return m;
}

Vec3 apply_calibration(const CalibrationMap& map, const RawSample& s) {
  if (!s.valid) throw InvalidSample("sample has no tracking lock");
  const PlanePoint p = map.apply({s.u, s.v});
  return {p.x, p.y, 0.0};
}

CameraPoint to_camera(const CalibrationMap& map, const Vec3& p) {
  const PlanePoint q = map.inverse().apply({p.x, p.y});
  return {q.x, q.y};
}

HandState estimate_state(std::span<const RawSample> history, const CalibrationMap& map,
                         const FilterConfig& cfg, double now) {
  // Accepted samples: valid and strictly increasing in time.
  std::vector<const RawSample*> accepted;
  accepted.reserve(history.size());
  for (const auto& s : history) {
    if (!s.valid) continue;
    if (!accepted.empty() && !(s.t > accepted.back()->t)) continue;
    accepted.push_back(&s);
  }
  if (accepted.empty()) throw TrackingLost("no valid sample in history");
  const double t_last = accepted.back()->t;
  if (now - t_last > cfg.dropout_timeout) {
    throw TrackingLost("latest valid sample is older than the dropout timeout");
  }

  const double window_start = t_last - cfg.velocity_window;
  auto first = std::find_if(accepted.begin(), accepted.end(),
                            [&](const RawSample* s) { return s->t >= window_start; });

  // Exponential smoothing restricted to the window, then an ordinary
  // least-squares line through (t, smoothed position) per axis.
  std::vector<double> ts;
  std::vector<Vec3> smoothed;
  ts.reserve(static_cast<std::size_t>(accepted.end() - first));
  smoothed.reserve(ts.capacity());
  Vec3 s_pos;
  for (auto it = first; it != accepted.end(); ++it) {
    const Vec3 p = apply_calibration(map, **it);
    s_pos = smoothed.empty() ? p : p * cfg.alpha + s_pos * (1.0 - cfg.alpha);
    ts.push_back((*it)->t);
    smoothed.push_back(s_pos);
  }

  HandState out;
  out.pos = smoothed.back();
  out.t = now;
  if (smoothed.size() >= 2) {
    double t_mean = 0.0;
    Vec3 p_mean;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      t_mean += ts[i];
      p_mean += smoothed[i];
    }
    const double n = static_cast<double>(ts.size());
    t_mean /= n;
    p_mean *= 1.0 / n;
    double stt = 0.0;
    Vec3 stp;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double dt = ts[i] - t_mean;
      stt += dt * dt;
      stp += (smoothed[i] - p_mean) * dt;
    }
    if (stt > 0.0) out.vel = stp * (1.0 / stt);
  }
  out.vel.z = 0.0;
  out.speed = norm(out.vel);
  return out;
}

HandState estimate_state(std::span<const RawSample> history, const CalibrationMap& map,
                         const FilterConfig& cfg) {
  double t_last = 0.0;
  bool any = false;
  for (const auto& s : history) {
    if (s.valid && (!any || s.t > t_last)) {
      t_last = s.t;
      any = true;
    }
  }
  if (!any) throw TrackingLost("no valid sample in history");
  return estimate_state(history, map, cfg, t_last);
}

bool SampleHistory::push(const RawSample& s) {
  if (!s.valid) return false;
  if (!samples_.empty() && !(s.t > samples_.back().t)) return false;
  samples_.push_back(s);
  const double cutoff = s.t - retention_;
  auto keep = std::find_if(samples_.begin(), samples_.end(),
                           [&](const RawSample& x) { return x.t >= cutoff; });
  samples_.erase(samples_.begin(), keep);
  return true;
}

std::optional<double> SampleHistory::last_time() const {
  if (samples_.empty()) return std::nullopt;
  return samples_.back().t;
}

bool SampleBuffer::push(const RawSample& s) {
  std::lock_guard lock(mu_);
  bool kept_all = true;
  if (queue_.size() >= capacity_) {
    queue_.pop_front();
    kept_all = false;
  }
  queue_.push_back(s);
  return kept_all;
}

std::vector<RawSample> SampleBuffer::drain() {
  std::lock_guard lock(mu_);
  std::vector<RawSample> out(queue_.begin(), queue_.end());
  queue_.clear();
  return out;
}

std::vector<RawSample> SampleBuffer::snapshot() const {
  std::lock_guard lock(mu_);
  return {queue_.begin(), queue_.end()};
}

std::size_t SampleBuffer::size() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

std::string format_sample_line(const RawSample& s) {
  json j = {{"t", s.t}, {"u", s.u}, {"v", s.v}, {"valid", s.valid}};
  return j.dump();
}

RawSample parse_sample_line(std::string_view line) {
  const json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidSample("sample line is not a JSON object");
  try {
    RawSample s;
    s.t = j.at("t").get<double>();
    s.u = j.at("u").get<double>();
    s.v = j.at("v").get<double>();
    s.valid = j.at("valid").get<bool>();
    return s;
  } catch (const json::exception& e) {
    throw InvalidSample(std::string("bad sample line: ") + e.what());
  }
}

std::vector<RawSample> read_sample_stream(std::istream& in) {
  std::vector<RawSample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_sample_line(line));
  }
  return out;
}

void write_sample_stream(std::ostream& out, std::span<const RawSample> samples) {
  for (const auto& s : samples) out << format_sample_line(s) << '\n';
}

}  // namespace mrr
