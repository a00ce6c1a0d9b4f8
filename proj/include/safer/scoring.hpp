#pragma once

#include <optional>
#include <span>
#include <vector>

#include "safer/domain.hpp"

namespace safer {

// One record plus the actor histories needed to score it. Histories are
// matched against the record's identifier lists inside assess(); identifiers
// without a matching history trigger the missing-data policy.
struct SegmentInputs {
    SoftwareRecord record;
    std::vector<DeveloperHistory> developer_histories;
    std::vector<PublisherHistory> publisher_histories;
};

// Hypothetical-value substitutions used by parameter sweeps. A normal
// assessment leaves everything unset. context_weight and
// unresolved_proportion replace the penalty inputs, r_* replace computed
// segment risks, w_* pin one or more actor weights (the remainder is
// redistributed proportionally).
struct AssessOverrides {
    std::optional<double> context_weight;
    std::optional<double> unresolved_proportion;
    std::optional<double> r_dev;
    std::optional<double> r_pb;
    std::optional<double> r_ur;
    std::optional<double> w_dev;
    std::optional<double> w_pb;
    std::optional<double> w_ur;
};

// Dependency-count risk; sensitivity defaults to 1.
double code_dependency_risk(long long dependency_count, double sensitivity = 1.0);

// Average number of vulnerabilities per previously developed software across
// the given developers. Empty or zero-count histories yield nullopt
// ("history unavailable"); the caller applies the missing-data policy.
std::optional<double> developer_vuln_weight(std::span<const DeveloperHistory> histories);

double code_spec_risk(double vuln_weight, long long code_length);

// 1 - (years in language / years total); exactly 1 when no experience is on
// record.
double language_experience_risk(std::span<const DeveloperHistory> histories);

// Share of previously developed software written in the record's language.
// nullopt when no software count is available.
std::optional<double> language_expertise(std::span<const DeveloperHistory> histories);

double dependency_weight(double code_coverage);
double code_spec_weight(double expertise);

// |1 - (w_cd + w_cs)|, bit-for-bit.
double language_weight(double w_cd, double w_cs);

double developer_risk(double r_cd, double r_cs, double r_pl,
                      double w_cd, double w_cs, double w_pl);

// (years publishing / software published) / update_frequency. Exactly 1 for
// a new publisher (no published software or no years on record) and when the
// update frequency is absent.
double publisher_risk(std::span<const PublisherHistory> histories,
                      std::optional<double> update_frequency);

// 1 - rating/downloads; nullopt when downloads is zero (segment unevaluable).
std::optional<double> user_risk(long long rating_count, long long downloads);

// unresolved/total, 0 when there are no known vulnerabilities.
double unresolved_proportion(long long unresolved, long long total);

// 1 - context_weight^proportion; 0 when the proportion is 0.
double penalty(double context_weight, double unresolved_proportion);

// Data-driven actor weights. w_dev = 1/forks (1 when there are none),
// w_pb = (unresolved+1)/(resolved+unresolved+2), w_ur takes the remainder.
// When the remainder is negative it is clamped to 0 and the other two are
// rescaled so the triple stays on the simplex.
FinalWeights final_weights(long long forks, long long unresolved, long long resolved);

// Sigmoid-composed final score, strictly inside (0, 1).
double final_risk(double r_dev, double r_pb, double r_ur,
                  double w_dev, double w_pb, double w_ur,
                  double shift = 4.0, double scale = 0.04);

// Adds the penalty only above the mistrust threshold, saturating at 1.
double apply_penalty(double final_risk, double penalty, double threshold);

// Low [0,t1), Moderate [t1,t2), High [t2,t3), Critical [t3,1].
RiskBand band(double score, const std::array<double, 3>& thresholds);

// Min-max normalization over the given set; constant lists map to zeros.
std::vector<double> normalize_scores(std::span<const double> scores);

// Full pipeline: validation, the three actor segments under the missing-data
// policy, penalty, weights, sigmoid, penalty application, banding. Throws
// ValidationError when the record has hard violations. Deterministic: equal
// inputs produce bit-identical breakdowns.
RiskBreakdown assess(const SegmentInputs& inputs, const AssessmentConfig& config,
                     std::int64_t assessed_at, const AssessOverrides& overrides = {});

}  // namespace safer
