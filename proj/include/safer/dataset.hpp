#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "safer/scoring.hpp"

namespace safer::dataset {

// Column names of the corpus schema, in file order.
inline constexpr std::array<std::string_view, 15> kCorpusColumns{
    "Sample",        "Code Length", "Developer",
    "Publisher",     "Year",        "Language",
    "Update Frequency", "Forks",    "Downloads",
    "Unresolved Vulnerabilities",   "Known Vulnerabilities",
    "Dependencies",  "Rating",      "Code Coverage",
    "Context"};

// One corpus line with every cell typed; blank cells stay absent. Developer
// and Publisher cells may carry several comma-separated identifiers.
struct CorpusRow {
    std::string sample;
    std::optional<long long> code_length;
    std::vector<std::string> developers;
    std::vector<std::string> publishers;
    std::optional<int> year;
    std::optional<std::string> language;
    std::optional<double> update_frequency;
    std::optional<long long> forks;
    std::optional<long long> downloads;
    std::optional<long long> vulnerabilities_unresolved;
    std::optional<long long> vulnerabilities_total;
    std::optional<long long> dependency_count;
    std::optional<long long> rating_count;
    std::optional<double> code_coverage;
    std::optional<double> context;

    bool operator==(const CorpusRow&) const = default;
};

struct RowError {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string sample;
    std::string message;
};

using RowResult = std::variant<CorpusRow, RowError>;

// Header does not match the corpus schema; the whole parse is aborted.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Comma-separated UTF-8 text, header first. Cell-level problems become
// RowErrors and never abort the batch.
std::vector<RowResult> parse_corpus(std::string_view text);
std::string serialize_corpus(std::span<const CorpusRow> rows);

SoftwareRecord to_record(const CorpusRow& row);

struct HistoryDerivationRule {
    int current_year = 0;
    bool language_case_insensitive = true;
};

// Per-actor aggregates over a corpus. Developer histories depend on the
// queried language, so the index keeps per-language tallies and materializes
// a DeveloperHistory on demand.
class HistoryIndex {
public:
    std::optional<DeveloperHistory> developer(const std::string& id,
                                              const std::optional<std::string>& language) const;
    std::optional<PublisherHistory> publisher(const std::string& id) const;

    std::size_t developer_count() const { return developers_.size(); }
    std::size_t publisher_count() const { return publishers_.size(); }

private:
    struct YearSpan {
        int min_year = 0;
        int max_year = 0;
        bool any = false;
        void add(int year);
        long long years() const;  // max - min + 1, 0 when no year was seen
    };
    struct DeveloperAggregate {
        long long total_vulnerabilities = 0;
        long long software_count = 0;
        std::vector<std::pair<std::string, long long>> count_by_language;
        std::vector<std::pair<std::string, YearSpan>> span_by_language;
        YearSpan span;
    };
    struct PublisherAggregate {
        long long published_count = 0;
        YearSpan span;
    };

    friend HistoryIndex derive_histories(std::span<const CorpusRow>,
                                         const HistoryDerivationRule&);

    std::string language_key(std::string_view language) const;

    std::vector<std::pair<std::string, DeveloperAggregate>> developers_;
    std::vector<std::pair<std::string, PublisherAggregate>> publishers_;
    bool language_case_insensitive_ = true;
};

// Aggregates the corpus into actor histories: vulnerability totals and
// software counts per developer, publication counts per publisher, and
// experience in years as the spread of the actor's corpus years
// (max - min + 1). Throws std::invalid_argument when rule.current_year is
// older than the newest corpus year.
HistoryIndex derive_histories(std::span<const CorpusRow> corpus,
                              const HistoryDerivationRule& rule);

// Optional side-table supplying actor histories directly when corpus
// derivation is insufficient. Entries take precedence over derived values.
struct SideTable {
    std::vector<DeveloperHistory> developers;
    std::vector<PublisherHistory> publishers;

    const DeveloperHistory* developer(const std::string& id) const;
    const PublisherHistory* publisher(const std::string& id) const;
};

inline constexpr std::string_view kSideTableHeader =
    "actor_id,kind,total_vulnerabilities,software_count,software_count_same_language,"
    "years_in_language,years_total,published_count,years_publishing";

std::string serialize_side_table(const SideTable& table);
SideTable parse_side_table(std::string_view text);  // throws SchemaError

// Record plus matched histories for one row; side-table entries override
// derived ones per actor.
SegmentInputs assemble_inputs(const CorpusRow& row, const HistoryIndex& index,
                              const SideTable* side_table = nullptr);

// Deterministic synthetic corpus: single-letter actors, years 2016-2023,
// languages C/Python/Java, code length 40-700, context in {0.2, 0.3, 0.5},
// remaining columns from ranges matching the reference corpus magnitudes,
// with unresolved <= known vulnerabilities and rating <= downloads.
std::vector<CorpusRow> generate_synthetic(std::size_t count, std::uint64_t seed);

// JSON document recording seed, count and the per-column distributions of
// generate_synthetic.
std::string generator_manifest(std::size_t count, std::uint64_t seed);

}  // namespace safer::dataset
