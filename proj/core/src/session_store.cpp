#include "mrr/session_store.hpp"

#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "mrr/errors.hpp"
#include "mrr/json_codec.hpp"

namespace mrr {

namespace {

Json header_json(const SessionHeader& h) {
  Json j = {{"kind", "header"},
            {"format", kSessionFormat},
            {"session_id", h.session_id},
            {"patient", h.patient},
            {"seed", h.seed},
            {"started_at", h.started_at}};
  if (h.started_utc) j["started_utc"] = *h.started_utc;
  j["config"] = to_json(h.config);
  return j;
}

std::string line_of(const InputRecord& r) {
  return Json{{"kind", "input"}, {"tick", r.tick}, {"sample", to_json(r.sample)}}.dump();
}
std::string line_of(const OverrideRecord& r) {
  return Json{{"kind", "override"}, {"tick", r.tick}, {"patch", to_json(r.patch)}}.dump();
}
std::string line_of(const CalibrationRecord& r) {
  return Json{{"kind", "calibration"}, {"tick", r.tick}, {"map", to_json(r.map)}}.dump();
}
std::string line_of(const GameEvent& e) {
  return Json{{"kind", "event"}, {"event", to_json(e)}}.dump();
}
std::string line_of(const TraceSample& s) {
  return Json{{"kind", "hand"},
              {"tick", s.tick},
              {"t", s.t},
              {"pos", to_json(s.pos)},
              {"vel", to_json(s.vel)},
              {"speed", s.speed},
              {"tracking_lost", s.tracking_lost},
              {"digest", format_digest(s.digest)}}
      .dump();
}
std::string line_of(const SessionFooter& f) {
  return Json{{"kind", "footer"},
              {"ended_at", f.ended_at},
              {"ticks", f.ticks},
              {"digest", format_digest(f.digest)}}
      .dump();
}

std::uint64_t read_digest(const JsonReader& r) {
  try {
    return parse_digest(r.string());
  } catch (const Error& e) {
    r.fail(e.what());
  }
}

// Parses one complete line into the record. Throws DecodeError.
void ingest_line(const Json& j, SessionRecord& rec, bool& has_header, std::size_t line_no) {
  const JsonReader r(j, "", false);
  r.require_object();
  const std::string kind = r.string("kind");
  if (line_no == 1) {
    if (kind != "header") r.at("kind").fail("first line must be the header");
    if (r.string("format") != kSessionFormat) r.at("format").fail("unsupported session format");
    rec.header.session_id = r.string("session_id");
    rec.header.patient = r.string("patient");
    rec.header.seed = r.uint("seed");
    rec.header.started_at = r.number("started_at");
    if (r.has("started_utc")) rec.header.started_utc = r.string("started_utc");
    rec.header.config = read_game_config(JsonReader(j.at("config"), "config", true));
    has_header = true;
    return;
  }
  if (kind == "input") {
    rec.inputs.push_back({r.uint("tick"), read_raw_sample(r.at("sample"))});
  } else if (kind == "override") {
    rec.overrides.push_back({r.uint("tick"), read_difficulty_patch(r.at("patch"))});
  } else if (kind == "calibration") {
    rec.calibrations.push_back({r.uint("tick"), read_calibration(r.at("map"))});
  } else if (kind == "event") {
    rec.events.push_back(read_game_event(r.at("event")));
  } else if (kind == "hand") {
    TraceSample s;
    s.tick = r.uint("tick");
    s.t = r.number("t");
    s.pos = read_vec3(r.at("pos"));
    s.vel = read_vec3(r.at("vel"));
    s.speed = r.number("speed");
    s.tracking_lost = r.boolean("tracking_lost");
    s.digest = read_digest(r.at("digest"));
    rec.trace.push_back(s);
  } else if (kind == "footer") {
    rec.footer = SessionFooter{r.number("ended_at"), r.uint("ticks"), read_digest(r.at("digest"))};
  } else if (kind == "header") {
    r.at("kind").fail("duplicate header");
  } else {
    r.at("kind").fail("unknown line kind '" + kind + "'");
  }
}

std::string fmt(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::vector<TransitionEvent> SessionRecord::transitions() const {
  std::vector<TransitionEvent> out;
  for (const auto& e : events) {
    if (const auto* p = std::get_if<events::AgentTransition>(&e.payload)) {
      out.push_back({e.t, p->from, p->to, p->trigger_speed});
    }
  }
  return out;
}

std::string format_digest(std::uint64_t d) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

std::uint64_t parse_digest(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (s.size() != 16 || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error("digest must be 16 hex digits");
  }
  return v;
}

// ---- writer ----------------------------------------------------------------

SessionWriter::SessionWriter(std::filesystem::path path, SessionHeader header)
    : path_(std::move(path)) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw StorageFailure("cannot create session file " + path_.string());
  open_ = true;
  record_.header = std::move(header);
  write_line(header_json(record_.header).dump());
}

SessionWriter::~SessionWriter() {
  if (out_.is_open()) out_.close();
}

void SessionWriter::write_line(const std::string& line) {
  if (!open_) throw SessionClosed("session file " + path_.string() + " is closed");
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw StorageFailure("write to " + path_.string() + " failed");
}

void SessionWriter::append(const InputRecord& r) {
  write_line(line_of(r));
  record_.inputs.push_back(r);
}
void SessionWriter::append(const OverrideRecord& r) {
  write_line(line_of(r));
  record_.overrides.push_back(r);
}
void SessionWriter::append(const CalibrationRecord& r) {
  write_line(line_of(r));
  record_.calibrations.push_back(r);
}
void SessionWriter::append(const GameEvent& e) {
  write_line(line_of(e));
  record_.events.push_back(e);
}
void SessionWriter::append(const TraceSample& s) {
  write_line(line_of(s));
  record_.trace.push_back(s);
}

void SessionWriter::close(const SessionFooter& footer) {
  write_line(line_of(footer));
  record_.footer = footer;
  out_.close();
  open_ = false;
  // Make the finished file durable.
  if (std::FILE* f = std::fopen(path_.c_str(), "rb")) {
    ::fsync(::fileno(f));
    std::fclose(f);
  }
}

// ---- loader ----------------------------------------------------------------

LoadResult parse_session(std::string_view contents) {
  LoadResult out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    const auto nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.truncated = true;
      break;
    }
    const std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const Json j = Json::parse(line.begin(), line.end(), nullptr, false);
    try {
      if (j.is_discarded()) throw DecodeError("line is not valid JSON");
      ingest_line(j, out.record, out.has_header, line_no);
    } catch (const DecodeError& e) {
      out.corrupt_line = line_no;
      out.corrupt_reason = e.what();
      break;
    }
    out.complete_lines = line_no;
  }
  std::stable_sort(out.record.events.begin(), out.record.events.end(),
                   [](const GameEvent& a, const GameEvent& b) { return a.t < b.t; });
  std::stable_sort(out.record.inputs.begin(), out.record.inputs.end(),
                   [](const InputRecord& a, const InputRecord& b) { return a.tick < b.tick; });
  return out;
}

LoadResult load_session(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageFailure("cannot open session file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_session(ss.str());
}

std::string serialize_session(const SessionRecord& rec) {
  // Canonical order: header, then per tick inputs/overrides/calibrations,
  // events and trace, then footer. Events at tick 0 precede tick 1 input.
  std::string out = header_json(rec.header).dump() + "\n";
  std::size_t ii = 0, oi = 0, ci = 0, ei = 0, ti = 0;
  auto tick_of_event = [&](std::size_t i) { return rec.events[i].tick; };
  std::uint64_t max_tick = 0;
  for (const auto& x : rec.inputs) max_tick = std::max(max_tick, x.tick);
  for (const auto& x : rec.overrides) max_tick = std::max(max_tick, x.tick);
  for (const auto& x : rec.calibrations) max_tick = std::max(max_tick, x.tick);
  for (const auto& x : rec.events) max_tick = std::max(max_tick, x.tick);
  for (const auto& x : rec.trace) max_tick = std::max(max_tick, x.tick);
  for (std::uint64_t k = 0; k <= max_tick; ++k) {
    while (oi < rec.overrides.size() && rec.overrides[oi].tick == k) out += line_of(rec.overrides[oi++]) + "\n";
    while (ci < rec.calibrations.size() && rec.calibrations[ci].tick == k) out += line_of(rec.calibrations[ci++]) + "\n";
    while (ii < rec.inputs.size() && rec.inputs[ii].tick == k) out += line_of(rec.inputs[ii++]) + "\n";
    while (ei < rec.events.size() && tick_of_event(ei) == k &&
           !rec.events[ei].is<events::SessionEnded>()) {
      out += line_of(rec.events[ei++]) + "\n";
    }
    while (ti < rec.trace.size() && rec.trace[ti].tick == k) out += line_of(rec.trace[ti++]) + "\n";
  }
  for (; ei < rec.events.size(); ++ei) out += line_of(rec.events[ei]) + "\n";
  if (rec.footer) out += line_of(*rec.footer) + "\n";
  return out;
}

// ---- metrics ---------------------------------------------------------------

SessionMetrics compute_metrics(const SessionRecord& rec) {
  std::vector<const TraceSample*> tracked;
  for (const auto& s : rec.trace) {
    if (!s.tracking_lost) tracked.push_back(&s);
  }
  if (tracked.size() < 2) {
    throw InsufficientData("metrics need at least 2 tracked hand samples");
  }

  SessionMetrics m;
  const double start = rec.header.started_at;
  double end = start;
  if (rec.footer) {
    end = rec.footer->ended_at;
  } else {
    for (const auto& e : rec.events) end = std::max(end, e.t);
    for (const auto& s : rec.trace) end = std::max(end, s.t);
  }
  m.duration = end - start;

  // Path over consecutive tracked trace samples; a loss splits the path.
  double tracked_time = 0.0;
  for (std::size_t i = 1; i < rec.trace.size(); ++i) {
    const auto& a = rec.trace[i - 1];
    const auto& b = rec.trace[i];
    if (a.tracking_lost || b.tracking_lost) continue;
    const double len = norm(b.pos - a.pos);
    const double dt = b.t - a.t;
    m.movement_volume += len;
    tracked_time += dt;
    if (dt > 0.0) m.peak_speed = std::max(m.peak_speed, len / dt);
  }
  m.mean_speed = tracked_time > 0.0 ? m.movement_volume / tracked_time : 0.0;

  // Agent occupancy from the transition log.
  m.occupancy = {{AgentMode::Wander, 0.0}, {AgentMode::Helpful, 0.0}, {AgentMode::Challenging, 0.0}};
  if (m.duration > 0.0) {
    AgentMode mode = AgentMode::Wander;
    double since = start;
    for (const auto& tr : rec.transitions()) {
      const double at = std::clamp(tr.t, since, end);
      m.occupancy[mode] += at - since;
      mode = tr.to;
      since = at;
    }
    m.occupancy[mode] += end - since;
    for (auto& [k, v] : m.occupancy) v /= m.duration;
  } else {
    m.occupancy[AgentMode::Wander] = 1.0;
  }

  // Tasks, endorsements, tracking loss.
  std::optional<double> lost_since;
  for (const auto& e : rec.events) {
    if (const auto* a = std::get_if<events::TaskActivated>(&e.payload)) {
      auto it = std::find_if(m.tasks.begin(), m.tasks.end(),
                             [&](const TaskTiming& t) { return t.index == a->index; });
      if (it == m.tasks.end()) {
        m.tasks.push_back({a->index, a->zone, e.t, std::nullopt});
      } else {
        it->activated_at = e.t;
      }
    } else if (const auto* c = std::get_if<events::TaskCompleted>(&e.payload)) {
      auto it = std::find_if(m.tasks.begin(), m.tasks.end(),
                             [&](const TaskTiming& t) { return t.index == c->index; });
      if (it == m.tasks.end()) {
        m.tasks.push_back({c->index, c->zone, std::nullopt, e.t});
      } else {
        it->completed_at = e.t;
      }
    } else if (e.is<events::TouchEndorsed>()) {
      ++m.endorsed_touches;
    } else if (e.is<events::TrackingLost>()) {
      if (!lost_since) lost_since = e.t;
    } else if (e.is<events::TrackingRecovered>()) {
      if (lost_since) {
        m.tracking_loss_duration += e.t - *lost_since;
        lost_since.reset();
      }
    }
  }
  if (lost_since) m.tracking_loss_duration += std::max(0.0, end - *lost_since);
  std::sort(m.tasks.begin(), m.tasks.end(),
            [](const TaskTiming& a, const TaskTiming& b) { return a.index < b.index; });
  return m;
}

std::string metrics_to_json(const SessionMetrics& m) {
  Json tasks = Json::array();
  for (const auto& t : m.tasks) {
    const auto d = t.duration();
    tasks.push_back({{"index", t.index},
                     {"zone", to_string(t.zone)},
                     {"activated_at", t.activated_at ? Json(*t.activated_at) : Json(nullptr)},
                     {"completed_at", t.completed_at ? Json(*t.completed_at) : Json(nullptr)},
                     {"completion_time", d ? Json(*d) : Json(nullptr)}});
  }
  Json occ = Json::object();
  for (const auto& [mode, v] : m.occupancy) occ[std::string(to_string(mode))] = v;
  const Json j = {{"duration", m.duration},
                  {"movement_volume", m.movement_volume},
                  {"mean_speed", m.mean_speed},
                  {"peak_speed", m.peak_speed},
                  {"endorsed_touches", m.endorsed_touches},
                  {"occupancy", occ},
                  {"tracking_loss_duration", m.tracking_loss_duration},
                  {"tasks", tasks}};
  return j.dump(2);
}

std::string metrics_to_csv(const SessionMetrics& m) {
  std::ostringstream os;
  os << "row,task_index,zone,activated_at,completed_at,completion_time,duration,"
        "movement_volume,mean_speed,peak_speed,endorsed_touches,occupancy_wander,"
        "occupancy_helpful,occupancy_challenging,tracking_loss_duration\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (const auto& t : m.tasks) {
    os << "task," << t.index << ',' << to_string(t.zone) << ',' << opt(t.activated_at) << ','
       << opt(t.completed_at) << ',' << opt(t.duration()) << ",,,,,,,,,\n";
  }
  auto occ = [&](AgentMode mode) {
    auto it = m.occupancy.find(mode);
    return fmt(it == m.occupancy.end() ? 0.0 : it->second);
  };
  os << "summary,,,,,," << fmt(m.duration) << ',' << fmt(m.movement_volume) << ','
     << fmt(m.mean_speed) << ',' << fmt(m.peak_speed) << ',' << m.endorsed_touches << ','
     << occ(AgentMode::Wander) << ',' << occ(AgentMode::Helpful) << ','
     << occ(AgentMode::Challenging) << ',' << fmt(m.tracking_loss_duration) << '\n';
  return os.str();
}

std::string metrics_to_text(const SessionMetrics& m) {
  std::ostringstream os;
  os << "duration           " << fmt(m.duration, 2) << " s\n"
     << "movement volume    " << fmt(m.movement_volume, 3) << " m\n"
     << "mean speed         " << fmt(m.mean_speed, 3) << " m/s\n"
     << "peak speed         " << fmt(m.peak_speed, 3) << " m/s\n"
     << "endorsed touches   " << m.endorsed_touches << "\n"
     << "tracking loss      " << fmt(m.tracking_loss_duration, 2) << " s\n"
     << "agent occupancy   ";
  for (const auto& [mode, v] : m.occupancy) os << ' ' << to_string(mode) << '=' << fmt(v, 3);
  os << '\n';
  for (const auto& t : m.tasks) {
    os << "task " << t.index << " (" << to_string(t.zone) << ")  ";
    if (const auto d = t.duration()) {
      os << "completed in " << fmt(*d, 2) << " s\n";
    } else {
      os << "not completed\n";
    }
  }
  return os.str();
}

}  // namespace mrr
