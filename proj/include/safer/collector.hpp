#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "safer/domain.hpp"

namespace safer::collector {

enum class SourceKind { CodeHost, PackageRegistry };

std::string_view source_kind_name(SourceKind kind);

struct Advisory {
    std::string id;
    bool resolved = false;

    bool operator==(const Advisory&) const = default;
};

// Recorded code-host or package-registry metadata for one repository or
// package, captured at a known instant. Raw fields are optional; gaps flow
// into the missing-data policy downstream.
struct HostSnapshot {
    SourceKind kind = SourceKind::CodeHost;
    std::string identifier;
    std::int64_t captured_at = 0;  // unix seconds, UTC

    std::optional<long long> stars;
    std::optional<long long> forks;
    std::optional<long long> downloads;
    std::optional<std::vector<std::string>> dependencies;
    std::optional<std::vector<Advisory>> advisories;
    std::optional<std::vector<std::int64_t>> release_dates;  // unix seconds, UTC
    std::optional<std::string> primary_language;
    std::vector<std::string> contributors;
    std::vector<std::string> maintainers;
};

class SnapshotError : public std::runtime_error {
public:
    explicit SnapshotError(const std::string& message, std::size_t byte_offset = 0)
        : std::runtime_error(message), byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_ = 0;
};

// Parses one snapshot document (JSON object). Malformed text raises
// SnapshotError naming the byte offset; an unknown source kind or missing
// identifier/captured_at is an error too.
HostSnapshot load_snapshot(std::string_view text);

struct NormalizedRecord {
    SoftwareRecord record;
    // Record fields left absent because the snapshot lacked the raw data,
    // one entry per absent field.
    std::vector<std::string> gaps;
};

// Maps a snapshot onto a SoftwareRecord: dependency and advisory counts,
// direct fork/download/star mapping, release cadence over the final year
// before capture as the update frequency (clamped to (0, 1] with a 1/365
// floor), and the first release year. The context label is resolved through
// the given context table; an unknown label throws std::invalid_argument.
NormalizedRecord normalize(const HostSnapshot& snapshot, const std::string& context_label,
                           const std::map<std::string, double>& context_table);

}  // namespace safer::collector
