#include "percrs/metrics.hpp"

#include <cmath>
#include <sstream>

#include "percrs/common.hpp"

namespace percrs {

namespace {

bool succeeded(const SessionOutcome& outcome, SuccessBasis basis) {
  return basis == SuccessBasis::AnyAccepted ? outcome.accepted_any
                                            : outcome.accepted_target;
}

bool matches(const GroupKey& key, const SessionMetricsInput& session) {
  switch (key.kind) {
    case GroupKind::All:
      return true;
    case GroupKind::TraitPolarity:
      return session.profile.polarity(key.dimension) == key.polarity;
    case GroupKind::PersuasionCondition:
      return session.persuasion_enabled == key.persuasion;
    case GroupKind::ModelName:
      return session.model_name == key.model_name;
    case GroupKind::Domain:
      return session.domain == key.domain;
  }
  return false;
}

}  // namespace

std::string GroupKey::label() const {
  switch (kind) {
    case GroupKind::All:
      return "ALL";
    case GroupKind::TraitPolarity:
      return std::string(trait_code(dimension)) + polarity_char(polarity);
    case GroupKind::PersuasionCondition:
      return persuasion ? "persuasion=on" : "persuasion=off";
    case GroupKind::ModelName:
      return "model=" + model_name;
    case GroupKind::Domain:
      return "domain=" + domain.name();
  }
  return "ALL";
}

GroupKey GroupKey::all() { return {}; }

GroupKey GroupKey::trait(TraitDimension d, Polarity p) {
  GroupKey key;
  key.kind = GroupKind::TraitPolarity;
  key.dimension = d;
  key.polarity = p;
  return key;
}

GroupKey GroupKey::condition(bool persuasion_enabled) {
  GroupKey key;
  key.kind = GroupKind::PersuasionCondition;
  key.persuasion = persuasion_enabled;
  return key;
}

GroupKey GroupKey::model(std::string name) {
  GroupKey key;
  key.kind = GroupKind::ModelName;
  key.model_name = std::move(name);
  return key;
}

GroupKey GroupKey::for_domain(DomainTag tag) {
  GroupKey key;
  key.kind = GroupKind::Domain;
  key.domain = std::move(tag);
  return key;
}

std::vector<GroupKey> GroupKey::trait_polarity_keys() {
  std::vector<GroupKey> keys;
  keys.reserve(2 * kTraitCount);
  for (TraitDimension d : kTraitOrder) {
    keys.push_back(trait(d, Polarity::Positive));
    keys.push_back(trait(d, Polarity::Negative));
  }
  return keys;
}

double success_rate(std::span<const SessionOutcome> outcomes) {
  if (outcomes.empty()) {
    throw UndefinedMetricError("SR is undefined on an empty outcome set");
  }
  std::size_t hits = 0;
  for (const auto& o : outcomes) hits += o.accepted_target ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

double general_success_rate(std::span<const SessionOutcome> outcomes) {
  if (outcomes.empty()) {
    throw UndefinedMetricError("GSR is undefined on an empty outcome set");
  }
  std::size_t hits = 0;
  for (const auto& o : outcomes) hits += o.accepted_any ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

double success_conversational_rounds(std::span<const SessionOutcome> outcomes,
                                     SuccessBasis basis) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : outcomes) {
    if (!succeeded(o, basis) || !o.success_round) continue;
    sum += static_cast<double>(*o.success_round);
    ++n;
  }
  if (n == 0) {
    throw UndefinedMetricError("SCR is undefined without successful sessions");
  }
  return sum / static_cast<double>(n);
}

double total_conversational_rounds(std::span<const SessionOutcome> outcomes) {
  if (outcomes.empty()) {
    throw UndefinedMetricError("TCR is undefined on an empty outcome set");
  }
  double sum = 0.0;
  for (const auto& o : outcomes) sum += static_cast<double>(o.rounds_total);
  return sum / static_cast<double>(outcomes.size());
}

PrsValue persuasiveness(const IntentionTrace& trace) {
  double denominator = trace.i_true - trace.i_pre;
  if (denominator == 0.0) {
    return {0.0, true};
  }
  double value = 1.0 - (trace.i_true - trace.i_post) / denominator;
  return {value, false};
}

std::vector<MetricsReport> aggregate(
    std::span<const SessionMetricsInput> sessions,
    std::span<const GroupKey> keys, SuccessBasis basis) {
  std::vector<MetricsReport> reports;
  reports.reserve(keys.size());
  for (const auto& key : keys) {
    MetricsReport report;
    report.group = key;

    std::vector<SessionOutcome> outcomes;
    double prs_sum = 0.0;
    int prs_n = 0;
    for (const auto& session : sessions) {
      if (!matches(key, session)) continue;
      outcomes.push_back(session.outcome);
      if (session.intentions) {
        prs_sum += persuasiveness(*session.intentions).value;
        ++prs_n;
      }
    }
    report.n_sessions = static_cast<int>(outcomes.size());
    report.n_prs_valid = prs_n;
    if (!outcomes.empty()) {
      report.sr = success_rate(outcomes);
      report.gsr = general_success_rate(outcomes);
      report.tcr = total_conversational_rounds(outcomes);
      try {
        report.scr = success_conversational_rounds(outcomes, basis);
      } catch (const UndefinedMetricError&) {
        // no successful session in this group
      }
    }
    if (prs_n > 0) report.prs = prs_sum / prs_n;
    reports.push_back(std::move(report));
  }
  return reports;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("pearson: series lengths differ");
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("pearson: need at least two points");
  }
  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mean_x;
    double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError(
        "pearson: correlation undefined for a constant series");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::string reports_to_csv(std::span<const MetricsReport> reports) {
  std::ostringstream out;
  out << "group,n,SR,GSR,PRS,SCR,TCR\n";
  auto cell = [&out](const std::optional<double>& v) {
    out << ',';
    if (v) out << *v;
  };
  for (const auto& r : reports) {
    out << r.group.label() << ',' << r.n_sessions;
    cell(r.sr);
    cell(r.gsr);
    cell(r.prs);
    cell(r.scr);
    cell(r.tcr);
    out << '\n';
  }
  return out.str();
}

}  // namespace percrs
