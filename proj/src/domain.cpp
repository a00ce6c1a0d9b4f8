#include "safer/domain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>

namespace safer {

std::string_view band_name(RiskBand band) {
    switch (band) {
        case RiskBand::Low: return "Low";
        case RiskBand::Moderate: return "Moderate";
        case RiskBand::High: return "High";
        case RiskBand::Critical: return "Critical";
    }
    return "Low";
}

std::string band_display(RiskBand band) {
    return std::string(band_name(band)) + " Risk";
}

std::optional<RiskBand> band_from_name(std::string_view name) {
    if (name == "Low") return RiskBand::Low;
    if (name == "Moderate") return RiskBand::Moderate;
    if (name == "High") return RiskBand::High;
    if (name == "Critical") return RiskBand::Critical;
    return std::nullopt;
}

std::map<std::string, double> AssessmentConfig::default_context_table() {
    return {{"security", 0.2}, {"automation", 0.3}, {"other", 0.5}};
}

bool AssessmentConfig::context_known(double value) const {
    for (const auto& [label, weight] : context_table) {
        if (weight == value) return true;
    }
    return false;
}

double AssessmentConfig::most_stringent_context() const {
    auto it = context_table.find("security");
    if (it != context_table.end()) return it->second;
    double smallest = 1.0;
    for (const auto& [label, weight] : context_table) smallest = std::min(smallest, weight);
    return smallest;
}

std::vector<std::string> config_problems(const AssessmentConfig& config) {
    std::vector<std::string> problems;
    if (!(config.dependency_sensitivity >= 0.0)) {
        problems.push_back("dependency_sensitivity must be nonnegative");
    }
    if (config.context_table.empty()) {
        problems.push_back("context_table must not be empty");
    } else {
        double sum = 0.0;
        bool in_range = true;
        for (const auto& [label, weight] : config.context_table) {
            sum += weight;
            if (!(weight > 0.0 && weight <= 1.0)) in_range = false;
        }
        if (!in_range) problems.push_back("context_table weights must lie in (0, 1]");
        if (std::abs(sum - 1.0) > 1e-9) problems.push_back("context_table weights must sum to 1");
    }
    const auto& t = config.band_thresholds;
    if (!(t[0] < t[1] && t[1] < t[2])) {
        problems.push_back("band_thresholds must be strictly increasing");
    }
    if (!(t[0] > 0.0 && t[2] < 1.0)) {
        problems.push_back("band_thresholds must lie in (0, 1)");
    }
    if (!(config.penalty_threshold >= 0.0 && config.penalty_threshold <= 1.0)) {
        problems.push_back("penalty_threshold must lie in [0, 1]");
    }
    if (!std::isfinite(config.sigmoid_shift) || !std::isfinite(config.sigmoid_scale)) {
        problems.push_back("sigmoid constants must be finite");
    }
    if (config.weight_overrides) {
        const auto& w = *config.weight_overrides;
        if (w.w_dev < 0.0 || w.w_pb < 0.0 || w.w_ur < 0.0) {
            problems.push_back("weight_overrides must be nonnegative");
        }
        if (std::abs(w.w_dev + w.w_pb + w.w_ur - 1.0) > 1e-9) {
            problems.push_back("weight_overrides must sum to 1");
        }
    }
    return problems;
}

bool ValidationResult::ok() const {
    return std::none_of(violations.begin(), violations.end(),
                        [](const Violation& v) { return v.severity == Severity::Hard; });
}

std::vector<Violation> ValidationResult::hard() const {
    std::vector<Violation> out;
    for (const auto& v : violations) {
        if (v.severity == Severity::Hard) out.push_back(v);
    }
    return out;
}

std::vector<Violation> ValidationResult::gaps() const {
    std::vector<Violation> out;
    for (const auto& v : violations) {
        if (v.severity == Severity::Gap) out.push_back(v);
    }
    return out;
}

namespace {

void gap(std::vector<Violation>& out, const char* field) {
    out.push_back({Severity::Gap, field, std::string(field) + " missing"});
}

void hard(std::vector<Violation>& out, const char* field, std::string message) {
    out.push_back({Severity::Hard, field, std::move(message)});
}

void check_count(std::vector<Violation>& out, const std::optional<long long>& value,
                 const char* field) {
    if (!value) {
        gap(out, field);
    } else if (*value < 0) {
        hard(out, field, std::string(field) + " must be nonnegative");
    }
}

}  // namespace

ValidationResult validate_record(const SoftwareRecord& record, const AssessmentConfig& config) {
    ValidationResult result;
    auto& v = result.violations;

    if (record.developer_ids.empty()) gap(v, "developer_ids");
    if (record.publisher_ids.empty()) gap(v, "publisher_ids");
    if (!record.year) gap(v, "year");
    if (!record.language) gap(v, "language");

    if (!record.update_frequency) {
        gap(v, "update_frequency");
    } else if (!(*record.update_frequency > 0.0 && *record.update_frequency <= 1.0)) {
        hard(v, "update_frequency", "update frequency out of range (0, 1]");
    }

    check_count(v, record.forks, "forks");
    check_count(v, record.downloads, "downloads");
    check_count(v, record.vulnerabilities_unresolved, "vulnerabilities_unresolved");
    check_count(v, record.vulnerabilities_total, "vulnerabilities_total");
    if (record.vulnerabilities_unresolved && record.vulnerabilities_total &&
        *record.vulnerabilities_unresolved > *record.vulnerabilities_total) {
        hard(v, "vulnerabilities_unresolved",
             "unresolved vulnerabilities exceed known vulnerabilities");
    }

    check_count(v, record.dependency_count, "dependency_count");
    check_count(v, record.rating_count, "rating_count");
    if (record.rating_count && record.downloads && *record.rating_count >= 0 &&
        *record.downloads >= 0 && *record.rating_count > *record.downloads) {
        hard(v, "rating_count", "rating count exceeds downloads");
    }

    if (!record.code_coverage) {
        gap(v, "code_coverage");
    } else if (!(*record.code_coverage >= 0.0 && *record.code_coverage <= 1.0)) {
        hard(v, "code_coverage", "coverage out of range [0, 1]");
    }

    if (!record.context) {
        gap(v, "context");
    } else if (!config.context_known(*record.context)) {
        hard(v, "context", "unknown context");
    }

    if (!record.code_length) {
        gap(v, "code_length");
    } else if (*record.code_length <= 0) {
        hard(v, "code_length", "code length must be positive");
    }

    return result;
}

namespace {

std::string join_messages(const std::vector<Violation>& violations) {
    std::string text = "record validation failed:";
    for (const auto& v : violations) {
        text += " [" + v.field + "] " + v.message + ";";
    }
    return text;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

std::string format_timestamp(std::int64_t unix_seconds) {
    std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
    if (text.empty()) return std::nullopt;

    // Plain integer seconds.
    {
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc() && ptr == text.data() + text.size()) return value;
    }

    // ISO 8601, date or date-time, UTC.
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    int consumed = 0;
    std::string s(text);
    int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month, &day, &hour,
                        &minute, &second, &consumed);
    if (n < 3) return std::nullopt;
    if (n >= 3 && n < 6) {
        hour = minute = second = 0;
        if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &year, &month, &day, &consumed) != 3) {
            return std::nullopt;
        }
        if (consumed != static_cast<int>(s.size())) return std::nullopt;
    } else {
        std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
        if (!rest.empty() && rest != "Z") return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;

    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    return static_cast<std::int64_t>(timegm(&tm));
}

}  // namespace safer
