#include "safer/collector.hpp"

#include <algorithm>

#include <json.hpp>

namespace safer::collector {

namespace {

using json = nlohmann::json;

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr std::int64_t kSecondsPerYear = 365 * kSecondsPerDay;

long long require_integer(const json& value, const std::string& path) {
    if (!value.is_number_integer()) {
        throw SnapshotError("snapshot field " + path + " must be an integer");
    }
    return value.get<long long>();
}

std::vector<std::string> string_list(const json& value, const std::string& path) {
    if (!value.is_array()) {
        throw SnapshotError("snapshot field " + path + " must be an array");
    }
    std::vector<std::string> out;
    for (const auto& item : value) {
        if (!item.is_string()) {
            throw SnapshotError("snapshot field " + path + " must contain strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

std::string_view source_kind_name(SourceKind kind) {
    return kind == SourceKind::CodeHost ? "code-host" : "package-registry";
}

HostSnapshot load_snapshot(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SnapshotError("snapshot parse error at byte " + std::to_string(e.byte) + ": " +
                                e.what(),
                            e.byte);
    }
    if (!doc.is_object()) throw SnapshotError("snapshot must be a JSON object");

    HostSnapshot snapshot;

    std::string source = doc.value("source", std::string());
    if (source == "code-host") {
        snapshot.kind = SourceKind::CodeHost;
    } else if (source == "package-registry") {
        snapshot.kind = SourceKind::PackageRegistry;
    } else {
        throw SnapshotError("unknown snapshot source kind '" + source + "'");
    }

    snapshot.identifier = doc.value("identifier", std::string());
    if (snapshot.identifier.empty()) throw SnapshotError("snapshot identifier is missing");

    if (!doc.contains("captured_at")) throw SnapshotError("snapshot captured_at is missing");
    if (auto ts = parse_timestamp(doc["captured_at"].is_string()
                                      ? doc["captured_at"].get<std::string>()
                                      : doc["captured_at"].dump())) {
        snapshot.captured_at = *ts;
    } else {
        throw SnapshotError("snapshot captured_at is not a timestamp");
    }

    if (!doc.contains("fields")) return snapshot;
    const json& fields = doc["fields"];
    if (!fields.is_object()) throw SnapshotError("snapshot fields must be an object");

    if (fields.contains("stars")) snapshot.stars = require_integer(fields["stars"], "fields.stars");
    if (fields.contains("forks")) snapshot.forks = require_integer(fields["forks"], "fields.forks");
    if (fields.contains("downloads")) {
        snapshot.downloads = require_integer(fields["downloads"], "fields.downloads");
    }
    if (fields.contains("dependencies")) {
        snapshot.dependencies = string_list(fields["dependencies"], "fields.dependencies");
    }
    if (fields.contains("advisories")) {
        const json& advisories = fields["advisories"];
        if (!advisories.is_array()) {
            throw SnapshotError("snapshot field fields.advisories must be an array");
        }
        std::vector<Advisory> out;
        for (const auto& item : advisories) {
            if (!item.is_object() || !item.contains("id")) {
                throw SnapshotError("snapshot advisories must be objects with an id");
            }
            out.push_back({item["id"].get<std::string>(), item.value("resolved", false)});
        }
        snapshot.advisories = std::move(out);
    }
    if (fields.contains("releases")) {
        std::vector<std::int64_t> dates;
        for (const auto& date : string_list(fields["releases"], "fields.releases")) {
            auto ts = parse_timestamp(date);
            if (!ts) throw SnapshotError("snapshot release date '" + date + "' is not a date");
            dates.push_back(*ts);
        }
        snapshot.release_dates = std::move(dates);
    }
    if (fields.contains("primary_language")) {
        if (!fields["primary_language"].is_string()) {
            throw SnapshotError("snapshot field fields.primary_language must be a string");
        }
        snapshot.primary_language = fields["primary_language"].get<std::string>();
    }
    if (fields.contains("contributors")) {
        snapshot.contributors = string_list(fields["contributors"], "fields.contributors");
    }
    if (fields.contains("maintainers")) {
        snapshot.maintainers = string_list(fields["maintainers"], "fields.maintainers");
    }
    return snapshot;
}

NormalizedRecord normalize(const HostSnapshot& snapshot, const std::string& context_label,
                           const std::map<std::string, double>& context_table) {
    auto context = context_table.find(context_label);
    if (context == context_table.end()) {
        throw std::invalid_argument("unknown context label '" + context_label + "'");
    }

    NormalizedRecord out;
    SoftwareRecord& record = out.record;
    record.software_id = snapshot.identifier;
    record.context = context->second;

    if (snapshot.contributors.empty()) {
        out.gaps.push_back("developer_ids");
    } else {
        record.developer_ids = snapshot.contributors;
    }
    if (snapshot.maintainers.empty()) {
        out.gaps.push_back("publisher_ids");
    } else {
        record.publisher_ids = snapshot.maintainers;
    }

    if (snapshot.release_dates && !snapshot.release_dates->empty()) {
        std::int64_t first = *std::min_element(snapshot.release_dates->begin(),
                                               snapshot.release_dates->end());
        // format_timestamp is UTC; reuse it instead of a second gmtime path.
        record.year = std::stoi(format_timestamp(first).substr(0, 4));

        long long recent = std::count_if(
            snapshot.release_dates->begin(), snapshot.release_dates->end(),
            [&](std::int64_t date) {
                return date > snapshot.captured_at - kSecondsPerYear &&
                       date <= snapshot.captured_at;
            });
        double frequency = static_cast<double>(recent) / 12.0;
        record.update_frequency = std::clamp(frequency, 1.0 / 365.0, 1.0);
    } else {
        out.gaps.push_back("year");
        if (snapshot.release_dates) {
            // A recorded empty release list still pins the cadence at the
            // floor rate; a missing list leaves the field open.
            record.update_frequency = 1.0 / 365.0;
        } else {
            out.gaps.push_back("update_frequency");
        }
    }

    if (snapshot.primary_language) {
        record.language = snapshot.primary_language;
    } else {
        out.gaps.push_back("language");
    }

    if (snapshot.forks) record.forks = snapshot.forks;
    else out.gaps.push_back("forks");

    if (snapshot.downloads) record.downloads = snapshot.downloads;
    else out.gaps.push_back("downloads");

    if (snapshot.stars) record.rating_count = snapshot.stars;
    else out.gaps.push_back("rating_count");

    if (snapshot.dependencies) {
        record.dependency_count = static_cast<long long>(snapshot.dependencies->size());
    } else {
        out.gaps.push_back("dependency_count");
    }

    if (snapshot.advisories) {
        record.vulnerabilities_total = static_cast<long long>(snapshot.advisories->size());
        record.vulnerabilities_unresolved = static_cast<long long>(
            std::count_if(snapshot.advisories->begin(), snapshot.advisories->end(),
                          [](const Advisory& a) { return !a.resolved; }));
    } else {
        out.gaps.push_back("vulnerabilities_unresolved");
        out.gaps.push_back("vulnerabilities_total");
    }

    // Snapshots carry no test-coverage or code-size data.
    out.gaps.push_back("code_coverage");
    out.gaps.push_back("code_length");
    return out;
}

}  // namespace safer::collector
