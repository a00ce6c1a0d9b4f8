#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace safer {

enum class RiskBand { Low, Moderate, High, Critical };

std::string_view band_name(RiskBand band);                    // "Moderate"
std::string band_display(RiskBand band);                      // "Moderate Risk"
std::optional<RiskBand> band_from_name(std::string_view name);

// One software sample's observable attributes. Most fields are optional:
// absent values feed the missing-data policy during assessment instead of
// being errors.
struct SoftwareRecord {
    std::string software_id;
    std::vector<std::string> developer_ids;
    std::vector<std::string> publisher_ids;
    std::optional<int> year;
    std::optional<std::string> language;
    std::optional<double> update_frequency;             // (0, 1]
    std::optional<long long> forks;
    std::optional<long long> downloads;
    std::optional<long long> vulnerabilities_unresolved;
    std::optional<long long> vulnerabilities_total;
    std::optional<long long> dependency_count;
    std::optional<long long> rating_count;              // star count, not a 1-5 scale
    std::optional<double> code_coverage;                // [0, 1]
    std::optional<double> context;                      // member of the configured context table
    std::optional<long long> code_length;               // lines, > 0

    bool operator==(const SoftwareRecord&) const = default;
};

// Aggregates over software previously developed by one developer. The
// same-language counters are scoped to the language of the record under
// assessment.
struct DeveloperHistory {
    std::string developer_id;
    long long total_vulnerabilities = 0;
    long long software_count = 0;
    long long software_count_same_language = 0;
    long long years_in_language = 0;
    long long years_total = 0;

    bool operator==(const DeveloperHistory&) const = default;
};

struct PublisherHistory {
    std::string publisher_id;
    long long published_count = 0;
    long long years_publishing = 0;

    bool operator==(const PublisherHistory&) const = default;
};

// Fixed actor weights replacing the data-driven ones when an organization
// pins its own. Must be nonnegative and sum to 1.
struct FinalWeights {
    double w_dev = 0.0;
    double w_pb = 0.0;
    double w_ur = 0.0;

    bool operator==(const FinalWeights&) const = default;
};

// Missing-data behavior. segment_max_risk: a segment that cannot be
// evaluated scores the maximum risk of 1. parameter_zero: a missing
// parameter inside an evaluable segment contributes 0. Disabling
// segment_max_risk turns unevaluable segments into assessment errors;
// disabling parameter_zero escalates any missing parameter to the segment
// rule.
struct MissingDataPolicy {
    bool segment_max_risk = true;
    bool parameter_zero = true;

    bool operator==(const MissingDataPolicy&) const = default;
};

struct AssessmentConfig {
    double dependency_sensitivity = 1.0;
    std::map<std::string, double> context_table = default_context_table();
    std::array<double, 3> band_thresholds{0.25, 0.5, 0.75};
    double penalty_threshold = 0.5;
    double sigmoid_shift = 4.0;
    double sigmoid_scale = 0.04;
    std::optional<FinalWeights> weight_overrides;
    MissingDataPolicy missing_data_policy;

    static std::map<std::string, double> default_context_table();

    bool context_known(double value) const;
    // Fallback weight when a record carries no context: the "security" class
    // when the table has one, otherwise the smallest (= strictest) weight.
    double most_stringent_context() const;
};

// Problems that make a config unusable; empty means valid.
std::vector<std::string> config_problems(const AssessmentConfig& config);

enum class Severity { Hard, Gap };

struct Violation {
    Severity severity = Severity::Hard;
    std::string field;
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const;  // true when there are no hard violations
    std::vector<Violation> hard() const;
    std::vector<Violation> gaps() const;
};

// Checks every record invariant. Violations are data, not exceptions: hard
// errors (out-of-range coverage, unknown context, contradictory counts) are
// distinguished from soft gaps (absent optional values). Pure; the order of
// the returned list is stable.
ValidationResult validate_record(const SoftwareRecord& record, const AssessmentConfig& config);

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

// Every intermediate and final quantity of one assessment.
struct RiskBreakdown {
    std::string software_id;
    std::int64_t assessed_at = 0;  // unix seconds, UTC

    double r_cd = 0.0;
    double r_cs = 0.0;
    double r_pl = 0.0;
    double r_dev = 0.0;
    double w_lc = 0.0;
    double w_cd = 0.0;
    double w_cs = 0.0;
    double w_pl = 0.0;
    double r_pb = 0.0;
    double r_ur = 0.0;
    double w_dev = 0.0;
    double w_pb = 0.0;
    double w_ur = 0.0;
    double penalty = 0.0;
    double final_risk = 0.0;
    double final_risk_penalized = 0.0;
    RiskBand band = RiskBand::Low;
    // Segments forced to maximum risk by missing data; subset of
    // {"developer", "publisher", "user"} in that order.
    std::vector<std::string> segment_defaulted;

    bool operator==(const RiskBreakdown&) const = default;
};

std::string format_timestamp(std::int64_t unix_seconds);              // ISO 8601 UTC
std::optional<std::int64_t> parse_timestamp(std::string_view text);   // ISO 8601 or integer seconds

}  // namespace safer
