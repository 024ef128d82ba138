#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrr/json_codec.hpp"

namespace mrr::assessment {

enum class GeqComponent {
  Competence,
  Immersion,
  Flow,
  Tension,
  Challenge,
  NegativeAffect,
  PositiveAffect,
};
inline constexpr std::array<GeqComponent, 7> kComponents{
    GeqComponent::Competence, GeqComponent::Immersion,      GeqComponent::Flow,
    GeqComponent::Tension,    GeqComponent::Challenge,      GeqComponent::NegativeAffect,
    GeqComponent::PositiveAffect};

enum class Condition { PC, MixedReality, ClassicalTherapy };
inline constexpr std::array<Condition, 3> kConditions{Condition::PC, Condition::MixedReality,
                                                      Condition::ClassicalTherapy};

inline constexpr std::size_t kItemCount = 14;

std::string_view to_string(GeqComponent c);  // "competence", "negative_affect", ...
std::string_view display_name(GeqComponent c);  // "Competence", "Negative affect", ...
GeqComponent component_from_string(std::string_view s);
std::string_view to_string(Condition c);     // "PC", "MixedReality", "ClassicalTherapy"
std::string_view display_name(Condition c);  // "PC", "Mixed Reality", "Classical Therapy"
// Accepts either spelling, case-insensitively.
Condition condition_from_string(std::string_view s);

// Which component each of the 14 items (1-based in files) scores.
struct ItemMap {
  std::array<GeqComponent, kItemCount> component;
  std::array<std::string, kItemCount> text;

  // Standard in-game GEQ assignment, without item texts.
  static ItemMap standard();
  // Item indices (0-based) for one component. Exactly two per component.
  std::array<std::size_t, 2> items_of(GeqComponent c) const;
  void validate() const;
};
ItemMap load_item_map(const std::filesystem::path& path);
ItemMap parse_item_map(std::string_view json_text);

struct Scale {
  double min = 0.0;
  double max = 4.0;
  friend bool operator==(const Scale&, const Scale&) = default;
};

struct GeqResponse {
  std::string respondent;
  Condition condition = Condition::PC;
  std::array<std::optional<double>, kItemCount> items{};
  Scale scale;

  // Throws ConfigError for out-of-scale scores or an empty scale.
  void validate() const;
  friend bool operator==(const GeqResponse&, const GeqResponse&) = default;
};

struct ComponentStats {
  GeqComponent component = GeqComponent::Competence;
  Condition condition = Condition::PC;
  double mean = 0.0;
  double sd = 0.0;  // population form
  std::size_t n = 0;
  friend bool operator==(const ComponentStats&, const ComponentStats&) = default;
};

// Mean of the component's two items. Throws MissingItem.
double score_component(const GeqResponse& r, GeqComponent c,
                       const ItemMap& map = ItemMap::standard());

// Mean and population sd of component scores over the responses for
// `condition`. Throws NoData when there are none.
ComponentStats aggregate(std::span<const GeqResponse> responses, GeqComponent c,
                         Condition condition, const ItemMap& map = ItemMap::standard());

// Stats for every component, for each condition that has responses.
std::vector<ComponentStats> aggregate_all(std::span<const GeqResponse> responses,
                                          const ItemMap& map = ItemMap::standard());

// "3.34 ± 0.74"
std::string format_mean_sd(double mean, double sd);

enum class RankingRole { Patient, Therapist };
std::string_view to_string(RankingRole r);  // "patient-role", "therapist-role"
RankingRole ranking_role_from_string(std::string_view s);

struct PreferenceRanking {
  std::string respondent;
  RankingRole role = RankingRole::Patient;
  std::array<Condition, 3> order{Condition::MixedReality, Condition::PC,
                                 Condition::ClassicalTherapy};

  void validate() const;  // permutation, non-empty id without whitespace
  friend bool operator==(const PreferenceRanking&, const PreferenceRanking&) = default;
};

// "t1 [patient-role] 1) Mixed Reality, 2) PC, 3) Classical Therapy"
std::string format_ranking(const PreferenceRanking& r);
PreferenceRanking parse_ranking(std::string_view line);

struct EvaluationRubric {
  enum class Intervention { Yes, No };
  enum class HabitChange { Negligible, Moderate, Important };
  enum class Setup { Therapist, Assistant };
  enum class Location { Dedicated, Anywhere };
  enum class EyeHandFocus { Same, Different };
  enum class Invasiveness { Convenient, Invasive };
  enum class UnitaryCost { Under1KE, From1To5KE, From5To10KE, Over10KE };
  enum class ExtraResources { Yes, No };

  std::string system = "system";
  Intervention intervention = Intervention::Yes;
  HabitChange habit_change = HabitChange::Negligible;
  Setup setup = Setup::Therapist;
  Location location = Location::Anywhere;
  EyeHandFocus eye_hand_focus = EyeHandFocus::Same;
  Invasiveness invasiveness = Invasiveness::Convenient;
  UnitaryCost unitary_cost = UnitaryCost::Under1KE;
  ExtraResources extra_resources = ExtraResources::No;

  friend bool operator==(const EvaluationRubric&, const EvaluationRubric&) = default;
};

struct AcceptanceRating {
  std::string system;
  int utility = 3;      // 1..5
  int usability = 3;    // 1..5
  int likeability = 3;  // 1..5
  std::string cost_note;

  void validate() const;
  friend bool operator==(const AcceptanceRating&, const AcceptanceRating&) = default;
};

struct Report {
  std::vector<ComponentStats> stats;
  std::vector<PreferenceRanking> rankings;
  std::optional<EvaluationRubric> rubric;
  std::vector<AcceptanceRating> acceptance;
};

std::string render_report(const Report& r);
Json report_to_json(const Report& r);

Json to_json(const ComponentStats& s);
Json to_json(const PreferenceRanking& r);
Json to_json(const EvaluationRubric& r);
Json to_json(const AcceptanceRating& a);
ComponentStats read_component_stats(const JsonReader& r);
EvaluationRubric read_rubric(const JsonReader& r);
AcceptanceRating read_acceptance(const JsonReader& r);
PreferenceRanking read_ranking(const JsonReader& r);

// ---- files ----------------------------------------------------------------

// respondent,condition,item_1..item_14,scale_min,scale_max. Empty item cells
// are missing items. Errors name the file line.
std::vector<GeqResponse> parse_responses_csv(std::string_view text);
std::vector<GeqResponse> load_responses_csv(const std::filesystem::path& path);
std::string responses_to_csv(std::span<const GeqResponse> responses);

// respondent,role,first,second,third
std::vector<PreferenceRanking> parse_rankings_csv(std::string_view text);
std::vector<PreferenceRanking> load_rankings_csv(const std::filesystem::path& path);

// system,utility,usability,likeability,cost_note
std::vector<AcceptanceRating> parse_acceptance_csv(std::string_view text);
std::vector<AcceptanceRating> load_acceptance_csv(const std::filesystem::path& path);

EvaluationRubric load_rubric(const std::filesystem::path& path);
// A JSON array of ComponentStats objects.
std::vector<ComponentStats> load_stats(const std::filesystem::path& path);

}  // namespace mrr::assessment
