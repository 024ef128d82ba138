#include "mrr/assessment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mrr/errors.hpp"

namespace mrr::assessment {

namespace {

std::string lower_alnum(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class F>
auto with_file_context(const std::filesystem::path& path, F&& f) {
  try {
    return f(read_file(path));
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("cannot open", 0) == 0) throw;
    throw ConfigError(path.string() + ": " + what);
  }
}

// Display width in columns; "±" is two bytes but one column.
std::size_t columns(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char ch : s) n += (ch & 0xC0) != 0x80;
  return n;
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  const std::size_t w = columns(s);
  if (w < width) out.append(width - w, ' ');
  return out;
}

std::string rstrip(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

// Fixed-width table with two-space gutters; trailing blanks trimmed.
std::string render_table(const std::vector<std::vector<std::string>>& rows, bool rule) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], columns(row[i]));
  }
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += "  ";
      line += pad(row[i], width[i]);
    }
    out += rstrip(line) + "\n";
  };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    emit(rows[r]);
    if (rule && r == 0) {
      std::vector<std::string> dashes;
      for (std::size_t w : width) dashes.emplace_back(w, '-');
      emit(dashes);
    }
  }
  return out;
}

// One CSV record per line; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"' && cur.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw ConfigError("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return fields;
}

struct CsvRow {
  std::size_t line;
  std::vector<std::string> fields;
};

// Parses header + rows. Blank lines and lines starting with '#' are skipped.
std::pair<std::vector<std::string>, std::vector<CsvRow>> parse_csv(std::string_view text) {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') continue;
    auto fields = split_csv_line(line, line_no);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    rows.push_back({line_no, std::move(fields)});
  }
  if (header.empty()) throw ConfigError("missing CSV header");
  return {header, rows};
}

std::size_t column_of(const std::vector<std::string>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("missing column '" + std::string(name) + "'");
}

double parse_number(const std::string& s, std::size_t line, std::string_view column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw ConfigError("line " + std::to_string(line) + ": column '" + std::string(column) +
                      "' is not a number: '" + s + "'");
  }
  return v;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  return out + "\"";
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class E, std::size_t N>
E enum_from(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
            std::string_view what) {
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  std::string allowed;
  for (const auto& [e, name] : table) {
    if (!allowed.empty()) allowed += ", ";
    allowed += name;
  }
  throw ConfigError(std::string(what) + ": '" + std::string(s) + "' is not one of " + allowed);
}

template <class E, std::size_t N>
std::string_view enum_name(E e, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [v, name] : table) {
    if (v == e) return name;
  }
  return "?";
}

using R = EvaluationRubric;
constexpr std::array<std::pair<R::Intervention, std::string_view>, 2> kIntervention{
    {{R::Intervention::Yes, "yes"}, {R::Intervention::No, "no"}}};
constexpr std::array<std::pair<R::HabitChange, std::string_view>, 3> kHabit{
    {{R::HabitChange::Negligible, "negligible"},
     {R::HabitChange::Moderate, "moderate"},
     {R::HabitChange::Important, "important"}}};
constexpr std::array<std::pair<R::Setup, std::string_view>, 2> kSetup{
    {{R::Setup::Therapist, "therapist"}, {R::Setup::Assistant, "assistant"}}};
constexpr std::array<std::pair<R::Location, std::string_view>, 2> kLocation{
    {{R::Location::Dedicated, "dedicated"}, {R::Location::Anywhere, "anywhere"}}};
constexpr std::array<std::pair<R::EyeHandFocus, std::string_view>, 2> kFocus{
    {{R::EyeHandFocus::Same, "same"}, {R::EyeHandFocus::Different, "different"}}};
constexpr std::array<std::pair<R::Invasiveness, std::string_view>, 2> kInvasive{
    {{R::Invasiveness::Convenient, "convenient"}, {R::Invasiveness::Invasive, "invasive"}}};
constexpr std::array<std::pair<R::UnitaryCost, std::string_view>, 4> kCost{
    {{R::UnitaryCost::Under1KE, "<1KE"},
     {R::UnitaryCost::From1To5KE, "1-5KE"},
     {R::UnitaryCost::From5To10KE, "5-10KE"},
     {R::UnitaryCost::Over10KE, ">10KE"}}};
constexpr std::array<std::pair<R::ExtraResources, std::string_view>, 2> kExtra{
    {{R::ExtraResources::Yes, "yes"}, {R::ExtraResources::No, "no"}}};

constexpr std::array<std::pair<R::EyeHandFocus, std::string_view>, 2> kFocusText{
    {{R::EyeHandFocus::Same, "same place"}, {R::EyeHandFocus::Different, "different places"}}};
constexpr std::array<std::pair<R::UnitaryCost, std::string_view>, 4> kCostText{
    {{R::UnitaryCost::Under1KE, "less than 1 KE per unit"},
     {R::UnitaryCost::From1To5KE, "1-5 KE per unit"},
     {R::UnitaryCost::From5To10KE, "5-10 KE per unit"},
     {R::UnitaryCost::Over10KE, "more than 10 KE per unit"}}};

}  // namespace

// ---- names ----------------------------------------------------------------

std::string_view to_string(GeqComponent c) {
  switch (c) {
    case GeqComponent::Competence: return "competence";
    case GeqComponent::Immersion: return "immersion";
    case GeqComponent::Flow: return "flow";
    case GeqComponent::Tension: return "tension";
    case GeqComponent::Challenge: return "challenge";
    case GeqComponent::NegativeAffect: return "negative_affect";
    case GeqComponent::PositiveAffect: return "positive_affect";
  }
  return "?";
}

std::string_view display_name(GeqComponent c) {
  switch (c) {
    case GeqComponent::Competence: return "Competence";
    case GeqComponent::Immersion: return "Immersion";
    case GeqComponent::Flow: return "Flow";
    case GeqComponent::Tension: return "Tension";
    case GeqComponent::Challenge: return "Challenge";
    case GeqComponent::NegativeAffect: return "Negative affect";
    case GeqComponent::PositiveAffect: return "Positive affect";
  }
  return "?";
}

GeqComponent component_from_string(std::string_view s) {
  const std::string key = lower_alnum(s);
  for (auto c : kComponents) {
    if (lower_alnum(to_string(c)) == key) return c;
  }
  throw ConfigError("unknown GEQ component '" + std::string(s) + "'");
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::PC: return "PC";
    case Condition::MixedReality: return "MixedReality";
    case Condition::ClassicalTherapy: return "ClassicalTherapy";
  }
  return "?";
}

std::string_view display_name(Condition c) {
  switch (c) {
    case Condition::PC: return "PC";
    case Condition::MixedReality: return "Mixed Reality";
    case Condition::ClassicalTherapy: return "Classical Therapy";
  }
  return "?";
}

Condition condition_from_string(std::string_view s) {
  const std::string key = lower_alnum(s);
  for (auto c : kConditions) {
    if (lower_alnum(to_string(c)) == key) return c;
  }
  throw ConfigError("unknown condition '" + std::string(s) + "'");
}

std::string_view to_string(RankingRole r) {
  return r == RankingRole::Patient ? "patient-role" : "therapist-role";
}

RankingRole ranking_role_from_string(std::string_view s) {
  if (s == "patient-role") return RankingRole::Patient;
  if (s == "therapist-role") return RankingRole::Therapist;
  throw ConfigError("unknown ranking role '" + std::string(s) + "'");
}

// ---- items ----------------------------------------------------------------

ItemMap ItemMap::standard() {
  using C = GeqComponent;
  return ItemMap{{C::Immersion, C::Competence, C::NegativeAffect, C::Immersion, C::Flow,
                  C::Tension, C::NegativeAffect, C::Tension, C::Competence, C::Flow,
                  C::PositiveAffect, C::Challenge, C::Challenge, C::PositiveAffect},
                 {}};
}

std::array<std::size_t, 2> ItemMap::items_of(GeqComponent c) const {
  std::array<std::size_t, 2> out{};
  std::size_t n = 0;
  for (std::size_t i = 0; i < kItemCount; ++i) {
    if (component[i] != c) continue;
    if (n == 2) throw ConfigError("item map assigns more than two items to " +
                                  std::string(to_string(c)));
    out[n++] = i;
  }
  if (n != 2) throw ConfigError("item map assigns fewer than two items to " +
                                std::string(to_string(c)));
  return out;
}

void ItemMap::validate() const {
  for (auto c : kComponents) items_of(c);
}

ItemMap parse_item_map(std::string_view json_text) {
  const Json j = Json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded()) throw ConfigError("item map is not valid JSON");
  ItemMap m = ItemMap::standard();
  try {
    const JsonReader root(j, "", true);
    root.require_object();
    root.expect_only({"items"});
    const JsonReader items = root.at("items");
    items.require_array();
    if (items.size() != kItemCount) items.fail("expected 14 items");
    for (std::size_t i = 0; i < kItemCount; ++i) {
      const JsonReader it = items.at(i);
      it.require_object();
      it.expect_only({"item", "component", "text"});
      if (it.has("item") && it.uint("item") != i + 1) it.fail("items must be listed in order 1..14");
      try {
        m.component[i] = component_from_string(it.string("component"));
      } catch (const ConfigError& e) {
        it.at("component").fail(e.what());
      }
      if (it.has("text")) m.text[i] = it.string("text");
    }
  } catch (const DecodeError& e) {
    throw ConfigError(e.what());
  }
  m.validate();
  return m;
}

ItemMap load_item_map(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& s) { return parse_item_map(s); });
}

// ---- scoring --------------------------------------------------------------

void GeqResponse::validate() const {
  if (!(scale.min < scale.max)) {
    throw ConfigError("respondent " + respondent + ": scale_min must be below scale_max");
  }
  for (std::size_t i = 0; i < kItemCount; ++i) {
    if (!items[i]) continue;
    const double v = *items[i];
    if (!std::isfinite(v) || v < scale.min || v > scale.max) {
      throw ConfigError("respondent " + respondent + ": item_" + std::to_string(i + 1) +
                        " = " + format_number(v) + " is outside the scale");
    }
  }
}

double score_component(const GeqResponse& r, GeqComponent c, const ItemMap& map) {
  const auto idx = map.items_of(c);
  for (auto i : idx) {
    if (!r.items[i]) {
      throw MissingItem("respondent " + r.respondent + ": item_" + std::to_string(i + 1) +
                        " (" + std::string(to_string(c)) + ") is missing");
    }
  }
  return (*r.items[idx[0]] + *r.items[idx[1]]) / 2.0;
}

ComponentStats aggregate(std::span<const GeqResponse> responses, GeqComponent c,
                         Condition condition, const ItemMap& map) {
  std::vector<double> scores;
  for (const auto& r : responses) {
    if (r.condition == condition) scores.push_back(score_component(r, c, map));
  }
  if (scores.empty()) {
    throw NoData("no responses for condition " + std::string(to_string(condition)));
  }
  const double n = static_cast<double>(scores.size());
  double sum = 0.0;
  for (double s : scores) sum += s;
  const double mean = sum / n;
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return {c, condition, mean, std::sqrt(ss / n), scores.size()};
}

std::vector<ComponentStats> aggregate_all(std::span<const GeqResponse> responses,
                                          const ItemMap& map) {
  std::vector<ComponentStats> out;
  for (auto cond : kConditions) {
    const bool any = std::any_of(responses.begin(), responses.end(),
                                 [&](const GeqResponse& r) { return r.condition == cond; });
    if (!any) continue;
    for (auto c : kComponents) out.push_back(aggregate(responses, c, cond, map));
  }
  return out;
}

std::string format_mean_sd(double mean, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", mean, sd);
  return buf;
}

// ---- rankings -------------------------------------------------------------

void PreferenceRanking::validate() const {
  if (respondent.empty()) throw ConfigError("ranking: empty respondent id");
  for (char ch : respondent) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '[' || ch == ']') {
      throw ConfigError("ranking: respondent id '" + respondent +
                        "' may not contain whitespace or brackets");
    }
  }
  for (auto c : kConditions) {
    if (std::count(order.begin(), order.end(), c) != 1) {
      throw ConfigError("ranking for " + respondent + " is not a permutation of the conditions");
    }
  }
}

std::string format_ranking(const PreferenceRanking& r) {
  std::string out = r.respondent + " [" + std::string(to_string(r.role)) + "]";
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    out += i == 0 ? " " : ", ";
    out += std::to_string(i + 1) + ") " + std::string(display_name(r.order[i]));
  }
  return out;
}

PreferenceRanking parse_ranking(std::string_view line) {
  auto bad = [&](const std::string& why) -> ConfigError {
    return ConfigError("ranking '" + std::string(line) + "': " + why);
  };
  PreferenceRanking r;
  const auto open = line.find(" [");
  const auto close = line.find("] ");
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw bad("expected '<respondent> [<role>] 1) ..., 2) ..., 3) ...'");
  }
  r.respondent = std::string(line.substr(0, open));
  r.role = ranking_role_from_string(line.substr(open + 2, close - open - 2));
  std::string_view rest = line.substr(close + 2);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string prefix = std::to_string(i + 1) + ") ";
    if (rest.substr(0, prefix.size()) != prefix) throw bad("missing '" + prefix + "'");
    rest.remove_prefix(prefix.size());
    const auto comma = rest.find(", ");
    const std::string_view name = i < 2 ? rest.substr(0, comma) : rest;
    if (i < 2 && comma == std::string_view::npos) throw bad("expected three entries");
    r.order[i] = condition_from_string(name);
    if (i < 2) rest.remove_prefix(comma + 2);
  }
  r.validate();
  return r;
}

// ---- acceptance -----------------------------------------------------------

void AcceptanceRating::validate() const {
  auto check = [&](int v, std::string_view field) {
    if (v < 1 || v > 5) {
      throw ConfigError("acceptance rating for " + system + ": " + std::string(field) +
                        " must be in 1..5");
    }
  };
  if (system.empty()) throw ConfigError("acceptance rating: empty system name");
  check(utility, "utility");
  check(usability, "usability");
  check(likeability, "likeability");
}

// ---- report ---------------------------------------------------------------

std::string render_report(const Report& r) {
  std::string out;

  std::vector<Condition> conds;
  for (auto cond : kConditions) {
    if (std::any_of(r.stats.begin(), r.stats.end(),
                    [&](const ComponentStats& s) { return s.condition == cond; })) {
      conds.push_back(cond);
    }
  }
  if (!conds.empty()) {
    out += "GEQ component scores (in-game version)\n";
    out += "Cells are mean ± standard deviation of respondents' component scores.\n";
    out += "Standard deviation uses the population form (divisor N).\n\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Component"});
    for (auto cond : conds) rows[0].emplace_back(display_name(cond));
    for (auto c : kComponents) {
      std::vector<std::string> row{std::string(display_name(c))};
      bool any = false;
      for (auto cond : conds) {
        auto it = std::find_if(r.stats.begin(), r.stats.end(), [&](const ComponentStats& s) {
          return s.component == c && s.condition == cond;
        });
        if (it == r.stats.end()) {
          row.emplace_back("-");
        } else {
          row.push_back(format_mean_sd(it->mean, it->sd));
          any = true;
        }
      }
      if (any) rows.push_back(std::move(row));
    }
    std::vector<std::string> nrow{"Respondents"};
    for (auto cond : conds) {
      std::size_t n = 0;
      for (const auto& s : r.stats) {
        if (s.condition == cond) n = std::max(n, s.n);
      }
      nrow.push_back(std::to_string(n));
    }
    rows.push_back(std::move(nrow));
    out += render_table(rows, true);
  }

  if (!r.rankings.empty()) {
    if (!out.empty()) out += "\n";
    out += "Preference rankings\n";
    for (const auto& k : r.rankings) out += format_ranking(k) + "\n";
  }

  if (r.rubric) {
    const auto& b = *r.rubric;
    if (!out.empty()) out += "\n";
    out += "Evaluation rubric: " + b.system + "\n";
    std::vector<std::vector<std::string>> rows{
        {"Therapist perspective"},
        {"  Therapist intervention", std::string(enum_name(b.intervention, kIntervention))},
        {"  Changes on therapist habits", std::string(enum_name(b.habit_change, kHabit))},
        {"  System setup", std::string(enum_name(b.setup, kSetup))},
        {"  Location", std::string(enum_name(b.location, kLocation))},
        {"Patient perspective"},
        {"  Eye-hand focus", std::string(enum_name(b.eye_hand_focus, kFocusText))},
        {"  Invasiveness", std::string(enum_name(b.invasiveness, kInvasive))},
        {"Economical perspective"},
        {"  Unitary cost", std::string(enum_name(b.unitary_cost, kCostText))},
        {"  Extra required resources", std::string(enum_name(b.extra_resources, kExtra))},
    };
    out += render_table(rows, false);
  }

  if (!r.acceptance.empty()) {
    if (!out.empty()) out += "\n";
    out += "Acceptance ratings (1-5)\n";
    std::vector<std::vector<std::string>> rows{
        {"System", "Utility", "Usability", "Likeability", "Cost"}};
    for (const auto& a : r.acceptance) {
      rows.push_back({a.system, std::to_string(a.utility), std::to_string(a.usability),
                      std::to_string(a.likeability), a.cost_note.empty() ? "-" : a.cost_note});
    }
    out += render_table(rows, true);
  }
  return out;
}

Json to_json(const ComponentStats& s) {
  return Json{{"component", to_string(s.component)},
              {"condition", to_string(s.condition)},
              {"mean", s.mean},
              {"sd", s.sd},
              {"n", s.n},
              {"formatted", format_mean_sd(s.mean, s.sd)}};
}

Json to_json(const PreferenceRanking& r) {
  Json order = Json::array();
  for (auto c : r.order) order.push_back(to_string(c));
  return Json{{"respondent", r.respondent}, {"role", to_string(r.role)}, {"order", order}};
}

Json to_json(const EvaluationRubric& b) {
  return Json{{"system", b.system},
              {"therapist",
               {{"intervention", enum_name(b.intervention, kIntervention)},
                {"habit_change", enum_name(b.habit_change, kHabit)},
                {"setup", enum_name(b.setup, kSetup)},
                {"location", enum_name(b.location, kLocation)}}},
              {"patient",
               {{"eye_hand_focus", enum_name(b.eye_hand_focus, kFocus)},
                {"invasiveness", enum_name(b.invasiveness, kInvasive)}}},
              {"economical",
               {{"unitary_cost", enum_name(b.unitary_cost, kCost)},
                {"extra_resources", enum_name(b.extra_resources, kExtra)}}}};
}

Json to_json(const AcceptanceRating& a) {
  return Json{{"system", a.system},
              {"utility", a.utility},
              {"usability", a.usability},
              {"likeability", a.likeability},
              {"cost_note", a.cost_note}};
}

Json report_to_json(const Report& r) {
  Json j{{"sd_form", "population"}, {"stats", Json::array()}};
  for (const auto& s : r.stats) j["stats"].push_back(to_json(s));
  if (!r.rankings.empty()) {
    j["rankings"] = Json::array();
    for (const auto& k : r.rankings) j["rankings"].push_back(to_json(k));
  }
  if (r.rubric) j["rubric"] = to_json(*r.rubric);
  if (!r.acceptance.empty()) {
    j["acceptance"] = Json::array();
    for (const auto& a : r.acceptance) j["acceptance"].push_back(to_json(a));
  }
  return j;
}

namespace {

template <class E, std::size_t N>
E read_enum(const JsonReader& r, std::string_view key,
            const std::array<std::pair<E, std::string_view>, N>& table) {
  const JsonReader f = r.at(key);
  try {
    return enum_from(f.string(), table, f.path());
  } catch (const ConfigError& e) {
    throw DecodeError(e.what());
  }
}

}  // namespace

ComponentStats read_component_stats(const JsonReader& r) {
  r.require_object();
  r.expect_only({"component", "condition", "mean", "sd", "n", "formatted"});
  ComponentStats s;
  try {
    s.component = component_from_string(r.string("component"));
    s.condition = condition_from_string(r.string("condition"));
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  s.mean = r.number("mean");
  s.sd = r.number("sd");
  if (s.sd < 0.0) r.at("sd").fail("must be >= 0");
  std::uint64_t n = 0;
  r.read("n", n);
  s.n = n;
  return s;
}

EvaluationRubric read_rubric(const JsonReader& r) {
  r.require_object();
  r.expect_only({"system", "therapist", "patient", "economical"});
  EvaluationRubric b;
  if (r.has("system")) b.system = r.string("system");
  const JsonReader t = r.at("therapist");
  t.require_object();
  t.expect_only({"intervention", "habit_change", "setup", "location"});
  b.intervention = read_enum(t, "intervention", kIntervention);
  b.habit_change = read_enum(t, "habit_change", kHabit);
  b.setup = read_enum(t, "setup", kSetup);
  b.location = read_enum(t, "location", kLocation);
  const JsonReader p = r.at("patient");
  p.require_object();
  p.expect_only({"eye_hand_focus", "invasiveness"});
  b.eye_hand_focus = read_enum(p, "eye_hand_focus", kFocus);
  b.invasiveness = read_enum(p, "invasiveness", kInvasive);
  const JsonReader e = r.at("economical");
  e.require_object();
  e.expect_only({"unitary_cost", "extra_resources"});
  b.unitary_cost = read_enum(e, "unitary_cost", kCost);
  b.extra_resources = read_enum(e, "extra_resources", kExtra);
  return b;
}

AcceptanceRating read_acceptance(const JsonReader& r) {
  r.require_object();
  r.expect_only({"system", "utility", "usability", "likeability", "cost_note"});
  AcceptanceRating a;
  a.system = r.string("system");
  a.utility = static_cast<int>(r.uint("utility"));
  a.usability = static_cast<int>(r.uint("usability"));
  a.likeability = static_cast<int>(r.uint("likeability"));
  if (r.has("cost_note")) a.cost_note = r.string("cost_note");
  try {
    a.validate();
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  return a;
}

PreferenceRanking read_ranking(const JsonReader& r) {
  r.require_object();
  r.expect_only({"respondent", "role", "order"});
  PreferenceRanking k;
  try {
    k.respondent = r.string("respondent");
    k.role = ranking_role_from_string(r.string("role"));
    const JsonReader order = r.at("order");
    order.require_array();
    if (order.size() != 3) order.fail("expected three conditions");
    for (std::size_t i = 0; i < 3; ++i) k.order[i] = condition_from_string(order.at(i).string());
    k.validate();
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  return k;
}

// ---- files ----------------------------------------------------------------

std::vector<GeqResponse> parse_responses_csv(std::string_view text) {
  const auto [header, rows] = parse_csv(text);
  const std::size_t c_resp = column_of(header, "respondent");
  const std::size_t c_cond = column_of(header, "condition");
  std::array<std::size_t, kItemCount> c_item{};
  for (std::size_t i = 0; i < kItemCount; ++i) {
    c_item[i] = column_of(header, "item_" + std::to_string(i + 1));
  }
  const std::size_t c_min = column_of(header, "scale_min");
  const std::size_t c_max = column_of(header, "scale_max");

  std::vector<GeqResponse> out;
  for (const auto& row : rows) {
    const std::string where = "line " + std::to_string(row.line) + ": ";
    GeqResponse r;
    r.respondent = row.fields[c_resp];
    if (r.respondent.empty()) throw ConfigError(where + "empty respondent");
    try {
      r.condition = condition_from_string(row.fields[c_cond]);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    for (std::size_t i = 0; i < kItemCount; ++i) {
      const auto& f = row.fields[c_item[i]];
      if (!f.empty()) r.items[i] = parse_number(f, row.line, header[c_item[i]]);
    }
    if (!row.fields[c_min].empty()) r.scale.min = parse_number(row.fields[c_min], row.line, "scale_min");
    if (!row.fields[c_max].empty()) r.scale.max = parse_number(row.fields[c_max], row.line, "scale_max");
    try {
      r.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GeqResponse> load_responses_csv(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& s) { return parse_responses_csv(s); });
}

std::string responses_to_csv(std::span<const GeqResponse> responses) {
  std::string out = "respondent,condition";
  for (std::size_t i = 0; i < kItemCount; ++i) out += ",item_" + std::to_string(i + 1);
  out += ",scale_min,scale_max\n";
  for (const auto& r : responses) {
    out += csv_field(r.respondent) + "," + std::string(to_string(r.condition));
    for (const auto& v : r.items) out += "," + (v ? format_number(*v) : std::string{});
    out += "," + format_number(r.scale.min) + "," + format_number(r.scale.max) + "\n";
  }
  return out;
}

std::vector<PreferenceRanking> parse_rankings_csv(std::string_view text) {
  const auto [header, rows] = parse_csv(text);
  const std::size_t c_resp = column_of(header, "respondent");
  const std::size_t c_role = column_of(header, "role");
  const std::array<std::size_t, 3> c_order{column_of(header, "first"),
                                           column_of(header, "second"),
                                           column_of(header, "third")};
  std::vector<PreferenceRanking> out;
  for (const auto& row : rows) {
    try {
      PreferenceRanking k;
      k.respondent = row.fields[c_resp];
      k.role = ranking_role_from_string(row.fields[c_role]);
      for (std::size_t i = 0; i < 3; ++i) k.order[i] = condition_from_string(row.fields[c_order[i]]);
      k.validate();
      out.push_back(std::move(k));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(row.line) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PreferenceRanking> load_rankings_csv(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& s) { return parse_rankings_csv(s); });
}

std::vector<AcceptanceRating> parse_acceptance_csv(std::string_view text) {
  const auto [header, rows] = parse_csv(text);
  const std::size_t c_sys = column_of(header, "system");
  const std::size_t c_ut = column_of(header, "utility");
  const std::size_t c_us = column_of(header, "usability");
  const std::size_t c_li = column_of(header, "likeability");
  const std::size_t c_cost = column_of(header, "cost_note");
  std::vector<AcceptanceRating> out;
  for (const auto& row : rows) {
    AcceptanceRating a;
    a.system = row.fields[c_sys];
    auto ordinal = [&](std::size_t c) {
      const double v = parse_number(row.fields[c], row.line, header[c]);
      if (v != std::floor(v)) {
        throw ConfigError("line " + std::to_string(row.line) + ": " + header[c] +
                          " must be an integer");
      }
      return static_cast<int>(v);
    };
    a.utility = ordinal(c_ut);
    a.usability = ordinal(c_us);
    a.likeability = ordinal(c_li);
    a.cost_note = row.fields[c_cost];
    try {
      a.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(row.line) + ": " + e.what());
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<AcceptanceRating> load_acceptance_csv(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& s) { return parse_acceptance_csv(s); });
}

EvaluationRubric load_rubric(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& s) {
    const Json j = Json::parse(s, nullptr, false);
    if (j.is_discarded()) throw ConfigError("rubric is not valid JSON");
    try {
      return read_rubric(JsonReader(j, "", true));
    } catch (const DecodeError& e) {
      throw ConfigError(e.what());
    }
  });
}

std::vector<ComponentStats> load_stats(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& s) {
    const Json j = Json::parse(s, nullptr, false);
    if (j.is_discarded()) throw ConfigError("stats file is not valid JSON");
    std::vector<ComponentStats> out;
    try {
      const JsonReader r(j, "", true);
      r.require_array();
      for (std::size_t i = 0; i < r.size(); ++i) out.push_back(read_component_stats(r.at(i)));
    } catch (const DecodeError& e) {
      throw ConfigError(e.what());
    }
    return out;
  });
}

}  // namespace mrr::assessment
