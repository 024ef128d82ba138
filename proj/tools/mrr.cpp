// mrr: serve, simulate, replay and report.
//
// Exit codes: 0 success, 1 domain error, 2 usage or configuration error.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrr/assessment.hpp"
#include "mrr/config_file.hpp"
#include "mrr/errors.hpp"
#include "mrr/net/ws_server.hpp"
#include "mrr/patient_sim.hpp"
#include "mrr/session_engine.hpp"
#include "mrr/session_store.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : mrr::Error {
  using Error::Error;
};

mrr::GameConfig config_from(const std::string& path) {
  return path.empty() ? mrr::GameConfig{} : mrr::load_game_config(path);
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw mrr::StorageFailure("cannot write " + path);
  out << text;
}

void print_load_problems(const mrr::LoadResult& r, const std::string& path) {
  std::cerr << path << ": recovered " << r.complete_lines << " complete line(s)";
  if (!r.has_header) std::cerr << "; header missing or unreadable";
  if (r.truncated) std::cerr << "; final line truncated";
  if (r.corrupt_line) std::cerr << "; line " << *r.corrupt_line << " corrupt (" << r.corrupt_reason << ")";
  if (r.has_header && !r.record.footer) std::cerr << "; no footer";
  std::cerr << "\n";
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  std::string config;
  std::string bind = "127.0.0.1:8080";
  std::string data_dir;
};

int run_serve(const ServeArgs& a) {
  mrr::net::ServerOptions o;
  o.config = config_from(a.config);
  const auto colon = a.bind.rfind(':');
  if (colon == std::string::npos) throw UsageError("--bind: expected HOST:PORT");
  o.host = a.bind.substr(0, colon);
  if (o.host.size() >= 2 && o.host.front() == '[' && o.host.back() == ']') {
    o.host = o.host.substr(1, o.host.size() - 2);
  }
  try {
    const int port = std::stoi(a.bind.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    o.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw UsageError("--bind: invalid port in '" + a.bind + "'");
  }
  o.data_dir = a.data_dir.empty() ? env_or("MRR_DATA_DIR", "sessions") : a.data_dir;
  o.handle_signals = true;
  o.utc_now = utc_now;

  mrr::net::Server server(o);
  std::cout << "mrr serve: listening on ws://" << server.endpoint() << "/session/{id}"
            << " (protocol " << mrr::protocol::kVersion << ", data dir " << o.data_dir.string()
            << ")" << std::endl;
  server.run();
  std::cout << "mrr serve: shut down, session files finalized" << std::endl;
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string patient;
  double duration = 60.0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string profiles_dir;
  std::string session_id = "sim";
};

int run_simulate(const SimulateArgs& a) {
  const mrr::GameConfig cfg = config_from(a.config);
  const std::string dir = a.profiles_dir.empty()
                              ? env_or("MRR_PROFILE_DIR", MRR_DEFAULT_PROFILE_DIR)
                              : a.profiles_dir;
  const mrr::PatientModel patient = mrr::find_patient_profile(a.patient, dir);
  if (!(a.duration >= 0.0)) throw UsageError("--duration must be >= 0");

  mrr::SimulationOptions so;
  so.duration = a.duration;
  so.seed = a.seed;
  so.out = a.out;
  so.session_id = a.session_id;
  const mrr::SimulationResult r = mrr::run_simulation(cfg, patient, so);

  std::cout << "session " << a.session_id << ": patient " << patient.name << ", seed " << r.seed
            << ", " << r.ticks << " ticks, " << r.events.size() << " events -> " << a.out
            << "\n";
  const mrr::LoadResult loaded = mrr::load_session(a.out);
  try {
    std::cout << mrr::metrics_to_text(mrr::compute_metrics(loaded.record));
  } catch (const mrr::InsufficientData& e) {
    std::cout << "metrics: insufficient data (" << e.what() << ")\n";
  }
  return kOk;
}

// ---- replay ---------------------------------------------------------------

struct ReplayArgs {
  std::string session;
  bool verify = false;
  std::string out;
};

int run_replay(const ReplayArgs& a) {
  const mrr::LoadResult loaded = mrr::load_session(a.session);
  if (!loaded.has_header || loaded.corrupt_line || loaded.truncated) {
    print_load_problems(loaded, a.session);
    return kDomainError;
  }
  const mrr::ReplayResult r = mrr::replay_session(loaded.record);
  if (!a.out.empty()) write_text(a.out, mrr::serialize_session(r.regenerated));

  const auto ticks = r.regenerated.footer ? r.regenerated.footer->ticks : 0;
  if (!a.verify) {
    std::cout << "replayed " << ticks << " ticks, " << r.regenerated.events.size()
              << " events, digest "
              << mrr::format_digest(r.regenerated.footer ? r.regenerated.footer->digest : 0)
              << "\n";
    return kOk;
  }
  if (r.matches) {
    std::cout << "verify ok: " << ticks << " ticks, " << r.regenerated.events.size()
              << " events match the recording\n";
    return kOk;
  }
  std::cout << "verify FAILED: first divergent tick "
            << (r.first_divergent_tick ? std::to_string(*r.first_divergent_tick) : "?") << ": "
            << r.divergence << "\n";
  return kDomainError;
}

// ---- report ---------------------------------------------------------------

struct ReportArgs {
  std::string session;
  bool json = false;
  bool csv = false;
  std::string out;
};

struct GeqArgs {
  std::vector<std::string> files;
  std::string stats;
  std::string rankings;
  std::string rubric;
  std::string acceptance;
  std::string items;
};

int run_report_session(const ReportArgs& a) {
  const mrr::LoadResult loaded = mrr::load_session(a.session);
  if (!loaded.has_header || loaded.corrupt_line) {
    print_load_problems(loaded, a.session);
    return kDomainError;
  }
  if (!loaded.clean()) print_load_problems(loaded, a.session);
  const mrr::SessionMetrics m = mrr::compute_metrics(loaded.record);
  if (a.json) write_text(a.out, mrr::metrics_to_json(m) + "\n");
  else if (a.csv) write_text(a.out, mrr::metrics_to_csv(m));
  else write_text(a.out, mrr::metrics_to_text(m));
  return kOk;
}

int run_report_geq(const ReportArgs& a, const GeqArgs& g) {
  namespace as = mrr::assessment;
  if (g.files.empty() && g.stats.empty()) {
    throw UsageError("report geq: give response files or --stats");
  }
  const as::ItemMap items = g.items.empty() ? as::ItemMap::standard() : as::load_item_map(g.items);
  as::Report report;
  if (!g.files.empty()) {
    std::vector<as::GeqResponse> responses;
    for (const auto& f : g.files) {
      auto rs = as::load_responses_csv(f);
      responses.insert(responses.end(), rs.begin(), rs.end());
    }
    report.stats = as::aggregate_all(responses, items);
  } else {
    report.stats = as::load_stats(g.stats);
  }
  if (!g.rankings.empty()) report.rankings = as::load_rankings_csv(g.rankings);
  if (!g.rubric.empty()) report.rubric = as::load_rubric(g.rubric);
  if (!g.acceptance.empty()) report.acceptance = as::load_acceptance_csv(g.acceptance);

  if (a.json) write_text(a.out, as::report_to_json(report).dump(2) + "\n");
  else write_text(a.out, as::render_report(report));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-reality rehabilitation game server and simulation harness"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Run the WebSocket session service");
  s->add_option("--config", serve.config, "Game configuration file");
  s->add_option("--bind", serve.bind, "HOST:PORT to listen on (port 0 picks one)")
      ->capture_default_str();
  s->add_option("--data-dir", serve.data_dir,
                "Directory for session files (default $MRR_DATA_DIR or ./sessions)");

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "Run a headless session with a simulated patient");
  m->add_option("--config", sim.config, "Game configuration file");
  m->add_option("--patient", sim.patient, "Profile name (stuck, mid, fast, tremor) or JSON file")
      ->required();
  m->add_option("--duration", sim.duration, "Simulated seconds")->capture_default_str();
  m->add_option("--seed", sim.seed, "Session seed (default: behavior.rng_seed)");
  m->add_option("--out", sim.out, "Session file to write")->required();
  m->add_option("--profiles-dir", sim.profiles_dir,
                "Where profile names are looked up (default $MRR_PROFILE_DIR or the shipped set)");
  m->add_option("--session-id", sim.session_id, "Session id recorded in the file")
      ->capture_default_str();

  ReplayArgs rep;
  auto* r = app.add_subcommand("replay", "Re-execute a recorded session");
  r->add_option("--session", rep.session, "Session file")->required();
  r->add_flag("--verify", rep.verify, "Compare against the recording; exit 1 on mismatch");
  r->add_option("--out", rep.out, "Write the regenerated session file here");

  ReportArgs rpt;
  GeqArgs geq;
  auto* p = app.add_subcommand("report", "Session metrics or questionnaire report");
  p->add_option("--session", rpt.session, "Session file");
  p->add_flag("--json", rpt.json, "Machine-readable JSON output");
  p->add_flag("--csv", rpt.csv, "CSV output (session metrics only)");
  p->add_option("--out", rpt.out, "Write to a file instead of stdout");
  p->require_subcommand(0, 1);
  auto* g = p->add_subcommand("geq", "Score in-game GEQ response files");
  g->add_option("files", geq.files, "Response CSV files");
  g->add_option("--stats", geq.stats, "Precomputed component stats (JSON) instead of responses");
  g->add_option("--rankings", geq.rankings, "Preference rankings CSV");
  g->add_option("--rubric", geq.rubric, "Evaluation rubric JSON");
  g->add_option("--acceptance", geq.acceptance, "Acceptance ratings CSV");
  g->add_option("--items", geq.items, "Item-to-component map JSON");
  g->add_flag("--json", rpt.json, "Machine-readable JSON output");
  g->add_option("--out", rpt.out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (s->parsed()) return run_serve(serve);
    if (m->parsed()) return run_simulate(sim);
    if (r->parsed()) return run_replay(rep);
    if (g->parsed()) return run_report_geq(rpt, geq);
    if (p->parsed()) {
      if (rpt.session.empty()) throw UsageError("report: give --session PATH or the geq subcommand");
      return run_report_session(rpt);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const mrr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const mrr::net::BindError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const mrr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}
