#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "percrs/dataset.hpp"
#include "percrs/outcome.hpp"
#include "percrs/persona.hpp"

namespace percrs {

// Which rounds feed SCR. The default follows the metric's prose ("a
// successful recommendation"): any acceptance counts.
enum class SuccessBasis { AnyAccepted, TargetAccepted };

enum class GroupKind { All, TraitPolarity, PersuasionCondition, ModelName, Domain };

struct GroupKey {
  GroupKind kind = GroupKind::All;
  TraitDimension dimension = TraitDimension::Openness;  // TraitPolarity
  Polarity polarity = Polarity::Positive;               // TraitPolarity
  bool persuasion = true;                               // PersuasionCondition
  std::string model_name;                               // ModelName
  DomainTag domain;                                     // Domain

  std::string label() const;

  static GroupKey all();
  static GroupKey trait(TraitDimension d, Polarity p);
  static GroupKey condition(bool persuasion_enabled);
  static GroupKey model(std::string name);
  static GroupKey for_domain(DomainTag tag);

  // The 10 Table-style trait rows: OPE+, OPE-, ..., NEU-.
  static std::vector<GroupKey> trait_polarity_keys();
};

// Everything aggregation needs to know about one finished session.
struct SessionMetricsInput {
  PersonalityProfile profile;
  bool persuasion_enabled = true;
  std::string model_name;
  DomainTag domain;
  SessionOutcome outcome;
  std::optional<IntentionTrace> intentions;
};

struct MetricsReport {
  GroupKey group;
  int n_sessions = 0;
  std::optional<double> sr;
  std::optional<double> gsr;
  std::optional<double> prs;
  std::optional<double> scr;
  std::optional<double> tcr;
  int n_prs_valid = 0;
};

// SR: fraction of sessions where the user accepted the target item.
double success_rate(std::span<const SessionOutcome> outcomes);

// GSR: fraction of sessions where the user accepted any item.
double general_success_rate(std::span<const SessionOutcome> outcomes);

// SCR: mean success round over successful sessions. Throws
// UndefinedMetricError when no session qualifies.
double success_conversational_rounds(
    std::span<const SessionOutcome> outcomes,
    SuccessBasis basis = SuccessBasis::AnyAccepted);

// TCR: mean rounds over all sessions.
double total_conversational_rounds(std::span<const SessionOutcome> outcomes);

struct PrsValue {
  double value = 0.0;
  bool degenerate = false;  // i_true == i_pre: denominator was zero
};

// P = 1 - (i_true - i_post) / (i_true - i_pre). Zero denominator yields 0,
// flagged rather than failed.
PrsValue persuasiveness(const IntentionTrace& trace);

// One report per key. Trait keys include every session whose profile
// exhibits that polarity; PRS averages over sessions that carry an
// intention trace, with n_prs_valid recording how many did.
std::vector<MetricsReport> aggregate(
    std::span<const SessionMetricsInput> sessions,
    std::span<const GroupKey> keys,
    SuccessBasis basis = SuccessBasis::AnyAccepted);

// Sample Pearson correlation. Throws std::invalid_argument on a length
// mismatch or fewer than two points, UndefinedCorrelationError when either
// series is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Fixed column order: group,n,SR,GSR,PRS,SCR,TCR. Undefined cells render
// empty.
std::string reports_to_csv(std::span<const MetricsReport> reports);

}  // namespace percrs
