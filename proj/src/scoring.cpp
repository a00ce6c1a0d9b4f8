#include "safer/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace safer {

double code_dependency_risk(long long dependency_count, double sensitivity) {
    return sensitivity * static_cast<double>(dependency_count);
}

std::optional<double> developer_vuln_weight(std::span<const DeveloperHistory> histories) {
    long long vulnerabilities = 0;
    long long software = 0;
    for (const auto& h : histories) {
        vulnerabilities += h.total_vulnerabilities;
        software += h.software_count;
    }
    if (software <= 0) return std::nullopt;
    return static_cast<double>(vulnerabilities) / static_cast<double>(software);
}

double code_spec_risk(double vuln_weight, long long code_length) {
    return vuln_weight * static_cast<double>(code_length);
}

double language_experience_risk(std::span<const DeveloperHistory> histories) {
    long long in_language = 0;
    long long total = 0;
    for (const auto& h : histories) {
        in_language += h.years_in_language;
        total += h.years_total;
    }
    if (total <= 0) return 1.0;
    return 1.0 - static_cast<double>(in_language) / static_cast<double>(total);
}

std::optional<double> language_expertise(std::span<const DeveloperHistory> histories) {
    long long same_language = 0;
    long long total = 0;
    for (const auto& h : histories) {
        same_language += h.software_count_same_language;
        total += h.software_count;
    }
    if (total <= 0) return std::nullopt;
    return static_cast<double>(same_language) / static_cast<double>(total);
}

double dependency_weight(double code_coverage) {
    return 1.0 - code_coverage;
}

double code_spec_weight(double expertise) {
    return std::exp(-expertise);
}

double language_weight(double w_cd, double w_cs) {
    return std::abs(1.0 - (w_cd + w_cs));
}

double developer_risk(double r_cd, double r_cs, double r_pl,
                      double w_cd, double w_cs, double w_pl) {
    return w_cd * r_cd + w_cs * r_cs + w_pl * r_pl;
}

double publisher_risk(std::span<const PublisherHistory> histories,
                      std::optional<double> update_frequency) {
    long long published = 0;
    long long years = 0;
    for (const auto& h : histories) {
        published += h.published_count;
        years += h.years_publishing;
    }
    if (published <= 0 || years <= 0) return 1.0;
    if (!update_frequency || !(*update_frequency > 0.0)) return 1.0;
    return (static_cast<double>(years) / static_cast<double>(published)) *
           (1.0 / *update_frequency);
}

std::optional<double> user_risk(long long rating_count, long long downloads) {
    if (downloads <= 0) return std::nullopt;
    return 1.0 - static_cast<double>(rating_count) / static_cast<double>(downloads);
}

double unresolved_proportion(long long unresolved, long long total) {
    if (total <= 0) return 0.0;
    return static_cast<double>(unresolved) / static_cast<double>(total);
}

double penalty(double context_weight, double unresolved_proportion) {
    if (unresolved_proportion == 0.0) return 0.0;
    return 1.0 - std::pow(context_weight, unresolved_proportion);
}

FinalWeights final_weights(long long forks, long long unresolved, long long resolved) {
    FinalWeights w;
    w.w_dev = forks > 0 ? 1.0 / static_cast<double>(forks) : 1.0;
    w.w_pb = (static_cast<double>(unresolved) + 1.0) /
             (static_cast<double>(resolved) + static_cast<double>(unresolved) + 2.0);
    w.w_ur = 1.0 - (w.w_dev + w.w_pb);
    if (w.w_ur < 0.0) {
        // w_dev + w_pb can exceed 1 (zero forks pins w_dev at 1); keep the
        // triple on the simplex by zeroing w_ur and rescaling the other two.
        double sum = w.w_dev + w.w_pb;
        w.w_dev /= sum;
        w.w_pb /= sum;
        w.w_ur = 0.0;
    }
    return w;
}

double final_risk(double r_dev, double r_pb, double r_ur,
                  double w_dev, double w_pb, double w_ur,
                  double shift, double scale) {
    double weighted = w_dev * r_dev + w_pb * r_pb + w_ur * r_ur;
    double value = 1.0 / (1.0 + std::exp(shift - scale * weighted));
    // exp can under- or overflow for extreme sums, saturating the quotient;
    // the score must stay strictly inside (0, 1).
    if (value >= 1.0) value = std::nextafter(1.0, 0.0);
    if (value <= 0.0) value = std::nextafter(0.0, 1.0);
    return value;
}

double apply_penalty(double final_risk, double penalty, double threshold) {
    if (final_risk > threshold && final_risk + penalty < 1.0) return final_risk + penalty;
    if (final_risk >= 1.0 - penalty) return 1.0;
    return final_risk;
}

RiskBand band(double score, const std::array<double, 3>& thresholds) {
    if (score < thresholds[0]) return RiskBand::Low;
    if (score < thresholds[1]) return RiskBand::Moderate;
    if (score < thresholds[2]) return RiskBand::High;
    return RiskBand::Critical;
}

std::vector<double> normalize_scores(std::span<const double> scores) {
    std::vector<double> out(scores.size(), 0.0);
    if (scores.empty()) return out;
    auto [mn_it, mx_it] = std::minmax_element(scores.begin(), scores.end());
    double mn = *mn_it;
    double mx = *mx_it;
    if (mx == mn) return out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = (scores[i] - mn) / (mx - mn);
    }
    return out;
}

namespace {

// First matching history per distinct identifier, in record order.
std::vector<DeveloperHistory> match_developers(const SoftwareRecord& record,
                                               std::span<const DeveloperHistory> histories) {
    std::vector<DeveloperHistory> matched;
    std::unordered_set<std::string> seen;
    for (const auto& id : record.developer_ids) {
        if (!seen.insert(id).second) continue;
        for (const auto& h : histories) {
            if (h.developer_id == id) {
                matched.push_back(h);
                break;
            }
        }
    }
    return matched;
}

std::vector<PublisherHistory> match_publishers(const SoftwareRecord& record,
                                               std::span<const PublisherHistory> histories) {
    std::vector<PublisherHistory> matched;
    std::unordered_set<std::string> seen;
    for (const auto& id : record.publisher_ids) {
        if (!seen.insert(id).second) continue;
        for (const auto& h : histories) {
            if (h.publisher_id == id) {
                matched.push_back(h);
                break;
            }
        }
    }
    return matched;
}

[[noreturn]] void unevaluable(const char* segment) {
    throw ValidationError({{Severity::Hard, segment,
                            std::string(segment) +
                                " segment unevaluable and max-risk defaulting is disabled"}});
}

// Pins selected actor weights and refills the remainder proportionally from
// the data-driven values.
FinalWeights pin_weights(const FinalWeights& base, const AssessOverrides& o) {
    const std::array<std::optional<double>, 3> pinned{o.w_dev, o.w_pb, o.w_ur};
    const std::array<double, 3> data{base.w_dev, base.w_pb, base.w_ur};
    std::array<double, 3> out{};

    double pinned_sum = 0.0;
    double free_sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (pinned[i]) {
            out[i] = std::clamp(*pinned[i], 0.0, 1.0);
            pinned_sum += out[i];
        } else {
            free_sum += data[i];
        }
    }
    if (pinned_sum > 1.0) {
        for (int i = 0; i < 3; ++i) out[i] = pinned[i] ? out[i] / pinned_sum : 0.0;
        return {out[0], out[1], out[2]};
    }
    double rest = 1.0 - pinned_sum;
    int free_count = 0;
    for (int i = 0; i < 3; ++i) {
        if (!pinned[i]) ++free_count;
    }
    for (int i = 0; i < 3; ++i) {
        if (!pinned[i]) {
            out[i] = free_sum > 0.0 ? data[i] * (rest / free_sum)
                                    : rest / static_cast<double>(free_count);
        }
    }
    return {out[0], out[1], out[2]};
}

}  // namespace

RiskBreakdown assess(const SegmentInputs& inputs, const AssessmentConfig& config,
                     std::int64_t assessed_at, const AssessOverrides& overrides) {
    const SoftwareRecord& rec = inputs.record;

    auto validation = validate_record(rec, config);
    if (!validation.ok()) throw ValidationError(validation.hard());

    const MissingDataPolicy& policy = config.missing_data_policy;
    RiskBreakdown out;
    out.software_id = rec.software_id;
    out.assessed_at = assessed_at;

    auto devs = match_developers(rec, inputs.developer_histories);
    auto pubs = match_publishers(rec, inputs.publisher_histories);

    // Developer segment. Absent record parameters contribute zero; a record
    // with no developer history at all cannot be evaluated.
    out.r_cd = code_dependency_risk(rec.dependency_count.value_or(0),
                                    config.dependency_sensitivity);
    out.w_lc = developer_vuln_weight(devs).value_or(0.0);
    out.r_cs = code_spec_risk(out.w_lc, rec.code_length.value_or(0));
    out.r_pl = language_experience_risk(devs);
    out.w_cd = dependency_weight(rec.code_coverage.value_or(0.0));
    out.w_cs = code_spec_weight(language_expertise(devs).value_or(0.0));
    out.w_pl = language_weight(out.w_cd, out.w_cs);

    bool dev_params_present =
        rec.dependency_count && rec.code_length && rec.code_coverage;
    bool dev_evaluable = !devs.empty() && (policy.parameter_zero || dev_params_present);
    if (dev_evaluable) {
        out.r_dev = developer_risk(out.r_cd, out.r_cs, out.r_pl, out.w_cd, out.w_cs, out.w_pl);
    } else if (policy.segment_max_risk) {
        out.r_dev = 1.0;
        out.segment_defaulted.push_back("developer");
    } else {
        unevaluable("developer");
    }

    // Publisher segment. A publisher on record with no published software or
    // no years of experience scores 1 inside publisher_risk (new-publisher
    // rule); missing histories or a missing update frequency default the
    // whole segment.
    if (!pubs.empty() && rec.update_frequency) {
        out.r_pb = publisher_risk(pubs, rec.update_frequency);
    } else if (policy.segment_max_risk) {
        out.r_pb = 1.0;
        out.segment_defaulted.push_back("publisher");
    } else {
        unevaluable("publisher");
    }

    // User segment.
    bool user_params_present = rec.rating_count.has_value();
    std::optional<double> ur;
    if (rec.downloads && (policy.parameter_zero || user_params_present)) {
        ur = user_risk(rec.rating_count.value_or(0), *rec.downloads);
    }
    if (ur) {
        out.r_ur = *ur;
    } else if (policy.segment_max_risk) {
        out.r_ur = 1.0;
        out.segment_defaulted.push_back("user");
    } else {
        unevaluable("user");
    }

    if (overrides.r_dev) out.r_dev = *overrides.r_dev;
    if (overrides.r_pb) out.r_pb = *overrides.r_pb;
    if (overrides.r_ur) out.r_ur = *overrides.r_ur;

    // Penalty. A record without a context is treated as the strictest class.
    double vup = overrides.unresolved_proportion
                     ? *overrides.unresolved_proportion
                     : unresolved_proportion(rec.vulnerabilities_unresolved.value_or(0),
                                             rec.vulnerabilities_total.value_or(0));
    double context_weight = overrides.context_weight
                                ? *overrides.context_weight
                                : rec.context ? *rec.context
                                              : config.most_stringent_context();
    out.penalty = penalty(context_weight, vup);

    // Actor weights.
    FinalWeights w;
    if (config.weight_overrides) {
        w = *config.weight_overrides;
    } else {
        long long vu = rec.vulnerabilities_unresolved.value_or(0);
        long long vr = rec.vulnerabilities_total ? *rec.vulnerabilities_total - vu : 0;
        w = final_weights(rec.forks.value_or(0), vu, vr);
    }
    if (overrides.w_dev || overrides.w_pb || overrides.w_ur) {
        w = pin_weights(w, overrides);
    }
    out.w_dev = w.w_dev;
    out.w_pb = w.w_pb;
    out.w_ur = w.w_ur;

    out.final_risk = final_risk(out.r_dev, out.r_pb, out.r_ur, out.w_dev, out.w_pb, out.w_ur,
                                config.sigmoid_shift, config.sigmoid_scale);
    out.final_risk_penalized =
        apply_penalty(out.final_risk, out.penalty, config.penalty_threshold);
    out.band = band(out.final_risk_penalized, config.band_thresholds);
    return out;
}

}  // namespace safer
