// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when everything passes).
//
//   mrr_acceptance --mrr <path to mrr> --scratch <dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "mrr/assessment.hpp"
#include "mrr/errors.hpp"
#include "mrr/input_capture.hpp"
#include "mrr/patient_sim.hpp"
#include "mrr/protocol.hpp"
#include "mrr/session.hpp"
#include "mrr/session_store.hpp"
#include "mrr/steering.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mrr;

namespace {

// Tolerances.
constexpr double kExact = 1e-9;               // calibration, constant velocity, speed clamp
constexpr double kStatsTol = 1e-12;           // assessment vs oracle
constexpr double kVolumeTol = 1e-6;           // straight-line movement volume
constexpr double kOccupancySumTol = 1e-9;     // occupancy fractions
constexpr double kMaxRunSeconds = 5.0;        // wall clock per 15-minute session
constexpr double kMinHelpfulOccupancy = 0.9;  // stuck profile after the first t_low
constexpr int kTickSlack = 2;                 // FSM timing slack, ticks
constexpr double kBiasSigmas = 4.0;           // noisy velocity: |bias| <= 4 sd / sqrt(M)
constexpr double kSdRelTol = 0.10;            // noisy velocity: empirical sd within 10%

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      else detail.str("");
      pass = false;
      detail << what;
    }
  }
};

struct Context {
  fs::path mrr;
  fs::path scratch;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// ---- FSM scenario suite ----------------------------------------------------

struct Trajectory {
  std::vector<AgentMode> mode;  // per tick, index 0 = tick 1
  std::vector<double> speed;    // estimated hand speed
  double seconds = 0.0;
};

Trajectory simulate_profile(const std::string& name, double duration) {
  const GameConfig cfg;
  const PatientModel patient = find_patient_profile(name, MRR_PROFILE_DIR);
  Trajectory tr;
  SimulationOptions o;
  o.duration = duration;
  o.on_tick = [&](const GameState& s) {
    tr.mode.push_back(s.agent.mode);
    tr.speed.push_back(s.tracking_lost ? 0.0 : s.hand.speed);
  };
  const auto t0 = std::chrono::steady_clock::now();
  run_simulation(cfg, patient, o);
  tr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return tr;
}

std::optional<std::size_t> first_tick_in(const Trajectory& tr, AgentMode m) {
  for (std::size_t i = 0; i < tr.mode.size(); ++i) {
    if (tr.mode[i] == m) return i + 1;
  }
  return std::nullopt;
}

Outcome fsm_scenarios(const Context&) {
  Outcome out;
  const GameConfig cfg;
  const double dt = cfg.dt();
  const double duration = 900.0;

  const Trajectory stuck = simulate_profile("stuck", duration);
  const Trajectory fast = simulate_profile("fast", duration);
  const Trajectory mid = simulate_profile("mid", duration);

  for (const auto& [name, tr] : {std::pair{"stuck", &stuck}, {"fast", &fast}, {"mid", &mid}}) {
    out.require(tr->seconds < kMaxRunSeconds, std::string(name) + " took " + fmt("%.2f s", tr->seconds));
  }

  // Stuck: Helpful after t_low, then mostly Helpful.
  double stuck_at = -1, helpful_share = 0;
  if (auto k = first_tick_in(stuck, AgentMode::Helpful)) {
    stuck_at = *k * dt;
    out.require(std::abs(stuck_at - cfg.difficulty.t_low) <= kTickSlack * dt + 1e-12,
                "stuck transition at " + fmt("%.4f s", stuck_at));
    const auto from = static_cast<std::size_t>(std::llround(cfg.difficulty.t_low / dt));
    std::size_t helpful = 0;
    for (std::size_t i = from; i < stuck.mode.size(); ++i) helpful += stuck.mode[i] == AgentMode::Helpful;
    helpful_share = static_cast<double>(helpful) / static_cast<double>(stuck.mode.size() - from);
    out.require(helpful_share >= kMinHelpfulOccupancy, "stuck Helpful share " + fmt("%.3f", helpful_share));
  } else {
    out.require(false, "stuck never reached Helpful");
  }

  // Fast: lag from the onset of sustained estimated over-speed to Challenging.
  double lag = -1;
  if (auto k = first_tick_in(fast, AgentMode::Challenging)) {
    std::size_t onset = *k - 1;  // index of the transition tick
    while (onset > 0 && fast.speed[onset - 1] > cfg.difficulty.v_max) --onset;
    lag = static_cast<double>(*k - onset) * dt;
    out.require(lag <= cfg.difficulty.t_high + kTickSlack * dt + 1e-12,
                "fast lag " + fmt("%.4f s", lag));
  } else {
    out.require(false, "fast never reached Challenging");
  }

  // Mid: never leaves Wander.
  const auto wander = std::count(mid.mode.begin(), mid.mode.end(), AgentMode::Wander);
  const double mid_share = static_cast<double>(wander) / static_cast<double>(mid.mode.size());
  out.require(mid_share == 1.0, "mid Wander share " + fmt("%.6f", mid_share));

  if (out.pass) {
    out.detail << "stuck->Helpful at " << fmt("%.4f s", stuck_at) << ", Helpful share "
               << fmt("%.3f", helpful_share) << "; fast lag " << fmt("%.4f s", lag)
               << " (bound " << fmt("%.4f s", cfg.difficulty.t_high + kTickSlack * dt)
               << "); mid Wander share " << fmt("%.1f", mid_share) << "; runtimes "
               << fmt("%.2f", stuck.seconds) << "/" << fmt("%.2f", fast.seconds) << "/"
               << fmt("%.2f s", mid.seconds) << " per 900 s";
  }
  return out;
}

// ---- endorsement oracle ----------------------------------------------------

Outcome endorsement_oracle(const Context&) {
  Outcome out;
  Rng rng(2024);
  const std::array<double, 4> fills{0.5, 1.0, 1.5, 2.0};
  const std::array<double, 3> rates{30.0, 60.0, 90.0};
  std::uint64_t total = 0;
  for (int trial = 0; trial < 10000 && out.pass; ++trial) {
    GameConfig cfg;
    cfg.fill_duration = fills[testing::pick_index(rng, fills.size())];
    cfg.tick_rate = rates[testing::pick_index(rng, rates.size())];
    const auto required = static_cast<std::uint64_t>(std::llround(cfg.fill_duration * cfg.tick_rate));

    // Alternating runs whose lengths cluster around the fill length.
    std::vector<bool> contact;
    bool on = testing::coin(rng);
    while (contact.size() < 600) {
      const auto len = 1 + testing::pick_index(rng, 2 * required + 2);
      contact.insert(contact.end(), len, on);
      on = !on;
    }

    TouchProgress p;
    std::uint64_t endorsed = 0;
    for (bool c : contact) {
      // Contact includes the radius itself.
      double d = cfg.touch_radius * (1.0 + 1e-9 + rng.uniform());
      if (c) d = testing::coin(rng) ? cfg.touch_radius : rng.uniform(0.0, cfg.touch_radius);
      const TouchUpdate u = update_touch(p, d, cfg, cfg.dt());
      for (const auto& e : u.events) endorsed += std::holds_alternative<events::TouchEndorsed>(e);
      p = u.progress;
    }
    const auto expected = testing::interval_scan_endorsements(contact, required);
    total += expected;
    out.require(endorsed == expected, "trial " + std::to_string(trial) + ": " + std::to_string(endorsed) +
                                          " endorsements, oracle " + std::to_string(expected));
  }
  if (out.pass) out.detail << "10000 schedules, " << total << " endorsements, all equal to the interval scan";
  return out;
}

// ---- steering invariants ---------------------------------------------------

Outcome steering_invariants(const Context&) {
  Outcome out;
  const BehaviorParams p;
  const double dt = 1.0 / 60.0;
  const double touch_radius = GameConfig{}.touch_radius;
  const Aabb open{{-100, -100, -100}, {100, 100, 100}};
  const int align = static_cast<int>(std::ceil(2.0 * p.max_speed / p.max_accel / dt)) + 1;
  double worst_speed = 0.0;

  Rng rng(11);
  FishState w{p.wander_center, {}, BehaviorKind::Wander};
  for (int i = 0; i < 10000; ++i) {
    w = wander_step(w, p, rng, dt);
    if (norm(w.pos - p.wander_center) > p.wander_radius) {
      out.require(false, "wander left the sphere at step " + std::to_string(i));
      break;
    }
    worst_speed = std::max(worst_speed, norm(w.vel));
  }

  const Vec3 target{0, 0, 0};
  int pursue_fail = 0, flee_fail = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 start = rng.unit_vector() * rng.uniform(0.3, 1.0);
    const Vec3 v0 = rng.unit_vector() * rng.uniform(0.0, p.max_speed);

    FishState s{start, v0, BehaviorKind::Pursue};
    double prev = norm(s.pos - target);
    for (int i = 0; i < 3000 && prev > touch_radius; ++i) {
      s = pursue_step(s, target, p, open, dt);
      const double d = norm(s.pos - target);
      if (i >= align && !(d < prev)) ++pursue_fail;
      worst_speed = std::max(worst_speed, norm(s.vel));
      prev = d;
    }
    if (prev > touch_radius) ++pursue_fail;

    FishState f{start, v0, BehaviorKind::Flee};
    prev = norm(f.pos - target);
    for (int i = 0; i < 600; ++i) {
      f = flee_step(f, target, p, open, rng, dt);
      const double d = norm(f.pos - target);
      if (i >= align && !(d > prev)) ++flee_fail;
      worst_speed = std::max(worst_speed, norm(f.vel));
      prev = d;
    }
  }
  out.require(pursue_fail == 0, std::to_string(pursue_fail) + " pursue steps failed to close");
  out.require(flee_fail == 0, std::to_string(flee_fail) + " flee steps failed to open");
  out.require(worst_speed <= p.max_speed + kExact, "speed " + fmt("%.12f", worst_speed));
  if (out.pass) {
    out.detail << "wander 10000 steps inside R; 500 pursue and 500 flee trials monotone after "
               << align << " ticks; max speed " << fmt("%.9f", worst_speed) << " <= "
               << fmt("%.3f", p.max_speed);
  }
  return out;
}

// ---- determinism and replay ------------------------------------------------

Outcome determinism_replay(const Context& ctx) {
  Outcome out;
  const fs::path a = ctx.scratch / "det_a.jsonl";
  const fs::path b = ctx.scratch / "det_b.jsonl";
  for (const auto& f : {a, b}) {
    fs::remove(f);
    const int rc = run(quote(ctx.mrr) + " simulate --patient tremor --duration 120 --seed 99 --out " + quote(f));
    out.require(rc == 0, "simulate exited " + std::to_string(rc));
  }
  if (!out.pass) return out;
  const std::string text = slurp(a);
  out.require(text == slurp(b), "simulate output differs between runs");

  const int verify = run(quote(ctx.mrr) + " replay --verify --session " + quote(a));
  out.require(verify == 0, "verify on untouched file exited " + std::to_string(verify));

  // Single-sample mutations at scattered positions, including the last input.
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  std::vector<std::size_t> inputs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].rfind(R"({"kind":"input")", 0) == 0) inputs.push_back(i);
  }
  Rng rng(5);
  std::vector<std::size_t> picks{inputs.front(), inputs.back()};
  for (int i = 0; i < 6; ++i) picks.push_back(inputs[testing::pick_index(rng, inputs.size())]);
  int detected = 0;
  for (std::size_t n = 0; n < picks.size(); ++n) {
    auto j = nlohmann::json::parse(lines[picks[n]]);
    const char* field = n % 3 == 0 ? "t" : (n % 3 == 1 ? "u" : "v");
    if (std::string(field) == "t") {
      j["sample"]["t"] = j["sample"]["t"].get<double>() - 1e-7;
    } else {
      const double x = j["sample"][field].get<double>();
      j["sample"][field] = x > 0.5 ? x - 1e-6 : x + 1e-6;
    }
    std::string mutated;
    for (std::size_t i = 0; i < lines.size(); ++i) mutated += (i == picks[n] ? j.dump() : lines[i]) + "\n";
    const fs::path m = ctx.scratch / ("mutated_" + std::to_string(n) + ".jsonl");
    std::ofstream(m, std::ios::binary) << mutated;
    const int rc = run(quote(ctx.mrr) + " replay --verify --session " + quote(m));
    if (rc == 1) ++detected;
    else out.require(false, std::string("mutation of ") + field + " on line " + std::to_string(picks[n] + 1) +
                                " gave exit " + std::to_string(rc));
  }
  if (out.pass) {
    out.detail << "two runs byte-identical (" << text.size() << " bytes); verify exit 0 untouched, exit 1 for "
               << detected << "/" << picks.size() << " single-sample mutations";
  }
  return out;
}

// ---- calibration and kinematics -------------------------------------------

Outcome calibration_kinematics(const Context&) {
  Outcome out;
  Rng rng(31);
  double worst_map = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    CalibrationMap truth{rng.uniform(0.2, 2.0), rng.uniform(-0.5, 0.5), rng.uniform(-1, 1),
                         rng.uniform(-0.5, 0.5), rng.uniform(0.2, 2.0), rng.uniform(-1, 1)};
    if (std::abs(truth.a * truth.e - truth.b * truth.d) < 0.05) continue;
    std::vector<Correspondence> pairs;
    const int n = 3 + static_cast<int>(testing::pick_index(rng, 8));
    for (int i = 0; i < n; ++i) {
      const CameraPoint c{rng.uniform(), rng.uniform()};
      pairs.push_back({c, truth.apply(c)});
    }
    try {
      const CalibrationMap got = solve_calibration(pairs);
      for (double cu : {0.0, 0.5, 1.0}) {
        for (double cv : {0.0, 0.5, 1.0}) {
          const PlanePoint g = got.apply({cu, cv}), t = truth.apply({cu, cv});
          worst_map = std::max({worst_map, std::abs(g.x - t.x), std::abs(g.y - t.y)});
        }
      }
    } catch (const DegenerateCorrespondences&) {
      // Random triples can be nearly collinear; the solver is right to refuse.
    }
  }
  out.require(worst_map <= kExact, "affine recovery error " + fmt("%.3e", worst_map));

  // Noiseless constant velocity, alpha = 1.
  FilterConfig f;
  f.alpha = 1.0;
  f.velocity_window = 0.26;  // 16 samples at 60 Hz
  const CalibrationMap id = CalibrationMap::identity();
  double worst_rel = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 v{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0.0};
    std::vector<RawSample> h;
    for (int k = 0; k <= 60; ++k) {
      const double t = k / 60.0;
      h.push_back({t, 0.5 + v.x * (t - 0.5), 0.5 + v.y * (t - 0.5), true});
    }
    const HandState s = estimate_state(h, id, f);
    if (norm(v) > 0) worst_rel = std::max(worst_rel, norm(s.vel - v) / norm(v));
  }
  out.require(worst_rel <= kExact, "constant velocity relative error " + fmt("%.3e", worst_rel));

  // Noisy: LS slope variance is sigma^2 / sum (t - tbar)^2 over the window.
  const double sigma = 0.002, vx = 0.1;
  const int m = 4000;
  std::vector<double> window_t;
  for (int k = 45; k <= 60; ++k) window_t.push_back(k / 60.0);
  double tbar = 0, stt = 0;
  for (double t : window_t) tbar += t / static_cast<double>(window_t.size());
  for (double t : window_t) stt += (t - tbar) * (t - tbar);
  const double sd_theory = sigma / std::sqrt(stt);
  std::mt19937_64 gen(77);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<double> est;
  for (int trial = 0; trial < m; ++trial) {
    std::vector<RawSample> h;
    for (int k = 0; k <= 60; ++k) {
      const double t = k / 60.0;
      h.push_back({t, 0.4 + vx * t + noise(gen), 0.25 + noise(gen), true});
    }
    est.push_back(estimate_state(h, id, f).vel.x);
  }
  const auto ms = testing::brute_force_mean_sd(est);
  const double bias = ms.mean - vx;
  out.require(std::abs(bias) <= kBiasSigmas * sd_theory / std::sqrt(m),
              "noisy bias " + fmt("%.3e", bias));
  out.require(std::abs(ms.sd / sd_theory - 1.0) <= kSdRelTol,
              "noisy sd " + fmt("%.4f", ms.sd) + " vs theory " + fmt("%.4f", sd_theory));

  if (out.pass) {
    out.detail << "affine error " << fmt("%.1e", worst_map) << "; constant velocity rel error "
               << fmt("%.1e", worst_rel) << "; noisy (M=" << m << ", sigma=" << sigma << ") bias "
               << fmt("%.2e", bias) << " (limit " << fmt("%.2e", kBiasSigmas * sd_theory / std::sqrt(m))
               << "), sd " << fmt("%.4f", ms.sd) << " vs " << fmt("%.4f", sd_theory);
  }
  return out;
}

// ---- protocol --------------------------------------------------------------

Outcome protocol_suite(const Context&) {
  using namespace protocol;
  Outcome out;
  Rng rng(606);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const ClientMessage c = testing::random_client_message(rng);
    const ServerMessage s = testing::random_server_message(rng);
    bad += !(decode_client(encode(c)) == c);
    bad += !(decode_server(encode(s)) == s);
  }
  out.require(bad == 0, std::to_string(bad) + " messages failed to round-trip");

  // Live session with one patient client over the loopback transport.
  const GameConfig cfg;
  SessionOptions so;
  so.seed = 4;
  Session session(cfg, so);
  auto link = std::make_shared<LoopbackConnection>();
  const auto id = session.attach(link);
  session.receive(id, encode(Hello{ClientKind::Simulator}));
  session.receive(id, encode(Control{ControlAction::Start}));
  PatientSim patient(find_patient_profile("tremor", MRR_PROFILE_DIR), 4);
  patient.set_calibration(cfg.calibration);

  std::vector<ServerMessage> stream;
  const int ticks = 60 * 180;
  for (int k = 1; k <= ticks; ++k) {
    session.receive(id, encode(InputSample{patient.step(k * cfg.dt())}));
    session.advance();
    for (const auto& p : link->receive()) {
      stream.push_back(decode_server(p));
      if (const auto* u = std::get_if<StateUpdate>(&stream.back())) patient.observe(*u);
    }
  }
  session.end();
  for (const auto& p : link->receive()) stream.push_back(decode_server(p));

  std::vector<GameEvent> received;
  std::uint64_t last_update = 0;
  int updates = 0, order_violations = 0;
  for (const auto& m : stream) {
    if (const auto* u = std::get_if<StateUpdate>(&m)) {
      if (u->tick <= last_update) ++order_violations;
      last_update = u->tick;
      ++updates;
    } else if (const auto* e = std::get_if<EventNotice>(&m)) {
      if (e->event.tick < last_update) ++order_violations;
      received.push_back(e->event);
    }
  }
  const auto log = session.event_log();
  out.require(received == log, "received " + std::to_string(received.size()) + " events, log has " +
                                   std::to_string(log.size()));
  out.require(order_violations == 0, std::to_string(order_violations) + " ordering violations");
  out.require(updates == ticks / 3, std::to_string(updates) + " state updates for " + std::to_string(ticks) +
                                        " ticks");
  if (out.pass) {
    out.detail << "2000 messages round-trip; " << ticks << " ticks -> " << updates << " updates, "
               << received.size() << " events delivered in log order, none behind a later update";
  }
  return out;
}

// ---- assessment ------------------------------------------------------------

Outcome assessment_suite(const Context&) {
  using namespace assessment;
  Outcome out;
  Rng rng(8080);
  double worst = 0.0;
  for (int dataset = 0; dataset < 500; ++dataset) {
    std::vector<GeqResponse> rs;
    const std::size_t n = 1 + testing::pick_index(rng, 30);
    const Scale scale{0.0, testing::coin(rng) ? 4.0 : 5.0};
    for (std::size_t i = 0; i < n; ++i) {
      GeqResponse r;
      r.respondent = "r" + std::to_string(i);
      r.condition = kConditions[testing::pick_index(rng, 3)];
      r.scale = scale;
      for (auto& it : r.items) it = static_cast<double>(testing::pick_index(rng, static_cast<std::uint64_t>(scale.max) + 1));
      rs.push_back(r);
    }
    const ItemMap map = ItemMap::standard();
    for (Condition cond : kConditions) {
      for (GeqComponent comp : kComponents) {
        std::vector<double> scores;
        const auto idx = map.items_of(comp);
        for (const auto& r : rs) {
          if (r.condition == cond) scores.push_back((*r.items[idx[0]] + *r.items[idx[1]]) / 2.0);
        }
        if (scores.empty()) continue;
        const auto o = testing::brute_force_mean_sd(scores);
        const auto s = aggregate(rs, comp, cond);
        worst = std::max({worst, std::abs(s.mean - o.mean), std::abs(s.sd - o.sd)});
      }
    }
  }
  out.require(worst <= kStatsTol, "oracle mismatch " + fmt("%.3e", worst));

  std::vector<GeqResponse> three;
  for (double x : {1.0, 1.0, 4.0}) {
    GeqResponse r;
    r.respondent = "x" + std::to_string(three.size());
    r.items.fill(x);
    three.push_back(r);
  }
  const auto s = aggregate(three, GeqComponent::Flow, Condition::PC);
  out.require(std::abs(s.mean - 2.0) <= kStatsTol && std::abs(s.sd - std::sqrt(2.0)) <= kStatsTol,
              "{1,1,4} gave " + fmt("%.15f", s.mean) + " / " + fmt("%.15f", s.sd));
  out.require(format_mean_sd(s.mean, s.sd) == "2.00 ± 1.41", "{1,1,4} renders " + format_mean_sd(s.mean, s.sd));
  out.require(format_mean_sd(3.34, 0.74) == "3.34 ± 0.74", "3.34/0.74 renders " + format_mean_sd(3.34, 0.74));

  const fs::path fixtures = MRR_FIXTURE_DIR;
  Report report;
  report.stats = load_stats(fixtures / "comparison_stats.json");
  report.rankings = load_rankings_csv(fixtures / "comparison_rankings.csv");
  const std::string rendered = render_report(report);
  const std::string golden = slurp(fixtures / "comparison_report.txt");
  out.require(rendered == golden, "comparison report differs from golden");
  out.require(rendered.find("Competence       3.34 ± 0.74") != std::string::npos,
              "Competence/PC row not rendered as 3.34 ± 0.74");

  if (out.pass) {
    out.detail << "500 datasets within " << fmt("%.1e", worst) << " of the oracle; {1,1,4} -> "
               << format_mean_sd(s.mean, s.sd) << "; \"3.34 ± 0.74\"; comparison golden identical ("
               << golden.size() << " bytes)";
  }
  return out;
}

// ---- metrics ---------------------------------------------------------------

Outcome metrics_suite(const Context& ctx) {
  Outcome out;

  SessionRecord line;
  line.header.session_id = "line";
  for (int i = 0; i <= 300; ++i) {
    TraceSample s;
    s.tick = static_cast<std::uint64_t>(i) * 6;
    s.t = i / 10.0;
    s.pos = {0.1 + 0.1 * s.t, 0.25, 0.0};
    s.vel = {0.1, 0, 0};
    s.speed = 0.1;
    line.trace.push_back(s);
  }
  line.footer = SessionFooter{30.0, 1800, 0};
  const double volume = compute_metrics(line).movement_volume;
  out.require(std::abs(volume - 3.0) <= kVolumeTol, "straight line volume " + fmt("%.9f", volume));

  double worst_sum = 0.0;
  for (const char* profile : {"stuck", "mid", "fast", "tremor"}) {
    const fs::path f = ctx.scratch / (std::string("occupancy_") + profile + ".jsonl");
    SimulationOptions o;
    o.duration = 120;
    o.out = f;
    run_simulation(GameConfig{}, find_patient_profile(profile, MRR_PROFILE_DIR), o);
    const SessionMetrics m = compute_metrics(load_session(f).record);
    double sum = 0.0;
    for (const auto& [mode, frac] : m.occupancy) sum += frac;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  out.require(worst_sum <= kOccupancySumTol, "occupancy sum off by " + fmt("%.3e", worst_sum));

  const std::string full = slurp(fs::path(MRR_FIXTURE_DIR) / "session_small.jsonl");
  const LoadResult whole = parse_session(full);
  out.require(whole.clean(), "fixture does not load cleanly");
  std::size_t failures = 0;
  for (std::size_t cut = 0; cut <= full.size(); ++cut) {
    const std::string prefix = full.substr(0, cut);
    const std::size_t complete = prefix.empty() ? 0 : prefix.rfind('\n') + 1;
    const LoadResult r = parse_session(prefix);
    const LoadResult expect = parse_session(prefix.substr(0, complete));
    const bool ok = !r.corrupt_line && r.record == expect.record &&
                    r.complete_lines == static_cast<std::size_t>(std::count(prefix.begin(), prefix.end(), '\n')) &&
                    r.truncated == (complete != prefix.size()) && r.has_header == (complete > 0);
    failures += !ok;
  }
  out.require(failures == 0, std::to_string(failures) + " truncation offsets failed to recover");

  if (out.pass) {
    out.detail << "straight line " << fmt("%.9f m", volume) << "; occupancy sums within "
               << fmt("%.1e", worst_sum) << " over 4 profiles; truncation recovered at all "
               << full.size() + 1 << " offsets";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--mrr") ctx.mrr = argv[i + 1];
    else if (flag == "--scratch") ctx.scratch = argv[i + 1];
  }
  if (ctx.mrr.empty() || ctx.scratch.empty()) {
    std::cerr << "usage: mrr_acceptance --mrr <path> --scratch <dir>\n";
    return 2;
  }
  fs::create_directories(ctx.scratch);

  const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria{
      {"fsm-scenarios", fsm_scenarios},
      {"endorsement-oracle", endorsement_oracle},
      {"steering-invariants", steering_invariants},
      {"determinism-replay", determinism_replay},
      {"calibration-kinematics", calibration_kinematics},
      {"protocol", protocol_suite},
      {"assessment", assessment_suite},
      {"metrics", metrics_suite},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check(ctx);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail.str(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
  }
  return failed;
}
