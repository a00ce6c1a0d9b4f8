#include "safer/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <random>

#include <json.hpp>

namespace safer::dataset {

namespace {

struct RawRow {
    std::vector<std::string> cells;
    std::size_t line = 0;
};

// Minimal RFC-4180 reader: quoted cells may contain commas, doubled quotes
// and newlines. Blank lines are skipped.
std::vector<RawRow> read_csv(std::string_view text) {
    std::vector<RawRow> rows;
    std::vector<std::string> cells;
    std::string cell;
    bool in_quotes = false;
    bool row_has_content = false;
    std::size_t line = 1;
    std::size_t row_line = 1;

    auto end_cell = [&] {
        cells.push_back(std::move(cell));
        cell.clear();
    };
    auto end_row = [&] {
        if (row_has_content || !cells.empty()) {
            end_cell();
            rows.push_back({std::move(cells), row_line});
            cells.clear();
        }
        cell.clear();
        row_has_content = false;
        row_line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                cell.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_has_content = true;
                break;
            case ',':
                end_cell();
                row_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                end_row();
                break;
            default:
                cell.push_back(c);
                row_has_content = true;
        }
    }
    end_row();
    return rows;
}

std::string csv_cell(std::string_view value) {
    bool needs_quotes = value.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_bom(std::string_view s) {
    if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
    return s;
}

bool parse_int_cell(std::string_view cell, long long& out) {
    cell = trim(cell);
    if (cell.empty()) return false;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

bool parse_real_cell(std::string_view cell, double& out) {
    cell = trim(cell);
    if (cell.empty()) return false;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::vector<std::string> split_actors(std::string_view cell) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= cell.size()) {
        std::size_t comma = cell.find(',', start);
        std::string_view part = comma == std::string_view::npos
                                    ? cell.substr(start)
                                    : cell.substr(start, comma - start);
        part = trim(part);
        if (!part.empty()) out.emplace_back(part);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join_actors(const std::vector<std::string>& actors) {
    std::string out;
    for (std::size_t i = 0; i < actors.size(); ++i) {
        if (i) out.push_back(',');
        out += actors[i];
    }
    return out;
}

template <typename T>
void parse_optional_int(std::string_view cell, std::optional<T>& out, const char* what,
                        std::vector<std::string>& issues) {
    cell = trim(cell);
    if (cell.empty()) return;
    long long value = 0;
    if (!parse_int_cell(cell, value)) {
        issues.push_back(std::string("non-integer ") + what);
        return;
    }
    if (value < std::numeric_limits<T>::min() || value > std::numeric_limits<T>::max()) {
        issues.push_back(std::string(what) + " out of range");
        return;
    }
    out = static_cast<T>(value);
}

void parse_optional_real(std::string_view cell, std::optional<double>& out, const char* what,
                         std::vector<std::string>& issues) {
    cell = trim(cell);
    if (cell.empty()) return;
    double value = 0.0;
    if (parse_real_cell(cell, value)) {
        out = value;
    } else {
        issues.push_back(std::string("non-numeric ") + what);
    }
}

}  // namespace

std::vector<RowResult> parse_corpus(std::string_view text) {
    auto raw = read_csv(strip_bom(text));
    if (raw.empty()) throw SchemaError("corpus is empty: expected a header row");

    const auto& header = raw.front().cells;
    if (header.size() != kCorpusColumns.size()) {
        throw SchemaError("corpus header has " + std::to_string(header.size()) +
                          " columns, expected " + std::to_string(kCorpusColumns.size()));
    }
    for (std::size_t i = 0; i < kCorpusColumns.size(); ++i) {
        if (trim(header[i]) != kCorpusColumns[i]) {
            throw SchemaError("corpus header column " + std::to_string(i + 1) + " is '" +
                              header[i] + "', expected '" + std::string(kCorpusColumns[i]) + "'");
        }
    }

    std::vector<RowResult> results;
    results.reserve(raw.size() - 1);
    for (std::size_t r = 1; r < raw.size(); ++r) {
        const auto& cells = raw[r].cells;
        std::string sample = cells.empty() ? "" : std::string(trim(cells[0]));
        if (cells.size() != kCorpusColumns.size()) {
            results.push_back(RowError{raw[r].line, sample,
                                       "expected " + std::to_string(kCorpusColumns.size()) +
                                           " cells, got " + std::to_string(cells.size())});
            continue;
        }

        CorpusRow row;
        std::vector<std::string> issues;
        row.sample = sample;
        parse_optional_int(cells[1], row.code_length, "code length", issues);
        row.developers = split_actors(cells[2]);
        row.publishers = split_actors(cells[3]);
        parse_optional_int(cells[4], row.year, "year", issues);
        if (auto language = trim(cells[5]); !language.empty()) row.language = std::string(language);
        parse_optional_real(cells[6], row.update_frequency, "update frequency", issues);
        parse_optional_int(cells[7], row.forks, "forks", issues);
        parse_optional_int(cells[8], row.downloads, "downloads", issues);
        parse_optional_int(cells[9], row.vulnerabilities_unresolved, "unresolved vulnerabilities",
                           issues);
        parse_optional_int(cells[10], row.vulnerabilities_total, "known vulnerabilities", issues);
        parse_optional_int(cells[11], row.dependency_count, "dependencies", issues);
        parse_optional_int(cells[12], row.rating_count, "rating", issues);
        parse_optional_real(cells[13], row.code_coverage, "code coverage", issues);
        parse_optional_real(cells[14], row.context, "context", issues);

        if (issues.empty()) {
            results.push_back(std::move(row));
        } else {
            std::string message;
            for (std::size_t i = 0; i < issues.size(); ++i) {
                if (i) message += "; ";
                message += issues[i];
            }
            results.push_back(RowError{raw[r].line, sample, std::move(message)});
        }
    }
    return results;
}

std::string serialize_corpus(std::span<const CorpusRow> rows) {
    std::string out;
    for (std::size_t i = 0; i < kCorpusColumns.size(); ++i) {
        if (i) out.push_back(',');
        out += kCorpusColumns[i];
    }
    out.push_back('\n');

    auto cell_int = [](const auto& opt) {
        return opt ? std::to_string(*opt) : std::string();
    };
    auto cell_real = [](const std::optional<double>& opt) {
        return opt ? format_double(*opt) : std::string();
    };

    for (const auto& row : rows) {
        std::string cells[15] = {
            row.sample,
            cell_int(row.code_length),
            join_actors(row.developers),
            join_actors(row.publishers),
            cell_int(row.year),
            row.language.value_or(""),
            cell_real(row.update_frequency),
            cell_int(row.forks),
            cell_int(row.downloads),
            cell_int(row.vulnerabilities_unresolved),
            cell_int(row.vulnerabilities_total),
            cell_int(row.dependency_count),
            cell_int(row.rating_count),
            cell_real(row.code_coverage),
            cell_real(row.context),
        };
        for (std::size_t i = 0; i < 15; ++i) {
            if (i) out.push_back(',');
            out += csv_cell(cells[i]);
        }
        out.push_back('\n');
    }
    return out;
}

SoftwareRecord to_record(const CorpusRow& row) {
    SoftwareRecord record;
    record.software_id = row.sample;
    record.developer_ids = row.developers;
    record.publisher_ids = row.publishers;
    record.year = row.year;
    record.language = row.language;
    record.update_frequency = row.update_frequency;
    record.forks = row.forks;
    record.downloads = row.downloads;
    record.vulnerabilities_unresolved = row.vulnerabilities_unresolved;
    record.vulnerabilities_total = row.vulnerabilities_total;
    record.dependency_count = row.dependency_count;
    record.rating_count = row.rating_count;
    record.code_coverage = row.code_coverage;
    record.context = row.context;
    record.code_length = row.code_length;
    return record;
}

void HistoryIndex::YearSpan::add(int year) {
    if (!any) {
        min_year = max_year = year;
        any = true;
    } else {
        min_year = std::min(min_year, year);
        max_year = std::max(max_year, year);
    }
}

long long HistoryIndex::YearSpan::years() const {
    return any ? static_cast<long long>(max_year) - min_year + 1 : 0;
}

std::string HistoryIndex::language_key(std::string_view language) const {
    std::string key(language);
    if (language_case_insensitive_) {
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return std::tolower(c); });
    }
    return key;
}

std::optional<DeveloperHistory> HistoryIndex::developer(
    const std::string& id, const std::optional<std::string>& language) const {
    auto it = std::find_if(developers_.begin(), developers_.end(),
                           [&](const auto& entry) { return entry.first == id; });
    if (it == developers_.end()) return std::nullopt;
    const DeveloperAggregate& agg = it->second;

    DeveloperHistory history;
    history.developer_id = id;
    history.total_vulnerabilities = agg.total_vulnerabilities;
    history.software_count = agg.software_count;
    history.years_total = agg.span.years();
    if (language) {
        std::string key = language_key(*language);
        for (const auto& [lang, count] : agg.count_by_language) {
            if (lang == key) history.software_count_same_language = count;
        }
        for (const auto& [lang, span] : agg.span_by_language) {
            if (lang == key) history.years_in_language = span.years();
        }
    }
    return history;
}

std::optional<PublisherHistory> HistoryIndex::publisher(const std::string& id) const {
    auto it = std::find_if(publishers_.begin(), publishers_.end(),
                           [&](const auto& entry) { return entry.first == id; });
    if (it == publishers_.end()) return std::nullopt;
    return PublisherHistory{id, it->second.published_count, it->second.span.years()};
}

HistoryIndex derive_histories(std::span<const CorpusRow> corpus,
                              const HistoryDerivationRule& rule) {
    HistoryIndex index;
    index.language_case_insensitive_ = rule.language_case_insensitive;

    bool any_year = false;
    int max_year = 0;

    for (const auto& row : corpus) {
        if (row.year) {
            max_year = any_year ? std::max(max_year, *row.year) : *row.year;
            any_year = true;
        }
        for (const auto& id : row.developers) {
            auto it = std::find_if(index.developers_.begin(), index.developers_.end(),
                                   [&](const auto& entry) { return entry.first == id; });
            if (it == index.developers_.end()) {
                index.developers_.push_back({id, {}});
                it = std::prev(index.developers_.end());
            }
            auto& agg = it->second;
            agg.total_vulnerabilities += row.vulnerabilities_total.value_or(0);
            agg.software_count += 1;
            if (row.year) agg.span.add(*row.year);
            if (row.language) {
                std::string key = index.language_key(*row.language);
                auto lang_it = std::find_if(agg.count_by_language.begin(),
                                            agg.count_by_language.end(),
                                            [&](const auto& e) { return e.first == key; });
                if (lang_it == agg.count_by_language.end()) {
                    agg.count_by_language.push_back({key, 0});
                    agg.span_by_language.push_back({key, {}});
                    lang_it = std::prev(agg.count_by_language.end());
                }
                lang_it->second += 1;
                if (row.year) {
                    for (auto& [lang, span] : agg.span_by_language) {
                        if (lang == key) span.add(*row.year);
                    }
                }
            }
        }
        for (const auto& id : row.publishers) {
            auto it = std::find_if(index.publishers_.begin(), index.publishers_.end(),
                                   [&](const auto& entry) { return entry.first == id; });
            if (it == index.publishers_.end()) {
                index.publishers_.push_back({id, {}});
                it = std::prev(index.publishers_.end());
            }
            it->second.published_count += 1;
            if (row.year) it->second.span.add(*row.year);
        }
    }

    if (any_year && rule.current_year < max_year) {
        throw std::invalid_argument("history derivation current_year " +
                                    std::to_string(rule.current_year) +
                                    " predates the newest corpus year " +
                                    std::to_string(max_year));
    }
    return index;
}

const DeveloperHistory* SideTable::developer(const std::string& id) const {
    for (const auto& h : developers) {
        if (h.developer_id == id) return &h;
    }
    return nullptr;
}

const PublisherHistory* SideTable::publisher(const std::string& id) const {
    for (const auto& h : publishers) {
        if (h.publisher_id == id) return &h;
    }
    return nullptr;
}

std::string serialize_side_table(const SideTable& table) {
    std::string out(kSideTableHeader);
    out.push_back('\n');
    for (const auto& d : table.developers) {
        out += csv_cell(d.developer_id);
        out += ",developer," + std::to_string(d.total_vulnerabilities) + "," +
               std::to_string(d.software_count) + "," +
               std::to_string(d.software_count_same_language) + "," +
               std::to_string(d.years_in_language) + "," + std::to_string(d.years_total) +
               ",,\n";
    }
    for (const auto& p : table.publishers) {
        out += csv_cell(p.publisher_id);
        out += ",publisher,,,,,," + std::to_string(p.published_count) + "," +
               std::to_string(p.years_publishing) + "\n";
    }
    return out;
}

SideTable parse_side_table(std::string_view text) {
    auto raw = read_csv(strip_bom(text));
    if (raw.empty()) throw SchemaError("side table is empty: expected a header row");

    std::vector<std::string_view> expected;
    {
        std::string_view header = kSideTableHeader;
        std::size_t start = 0;
        while (start <= header.size()) {
            std::size_t comma = header.find(',', start);
            expected.push_back(comma == std::string_view::npos
                                   ? header.substr(start)
                                   : header.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    }
    const auto& header = raw.front().cells;
    if (header.size() != expected.size()) {
        throw SchemaError("side table header has " + std::to_string(header.size()) +
                          " columns, expected " + std::to_string(expected.size()));
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (trim(header[i]) != expected[i]) {
            throw SchemaError("side table header column " + std::to_string(i + 1) + " is '" +
                              header[i] + "', expected '" + std::string(expected[i]) + "'");
        }
    }

    auto cell_value = [](std::string_view cell, const char* what, std::size_t line) {
        cell = trim(cell);
        if (cell.empty()) return 0LL;
        long long value = 0;
        if (!parse_int_cell(cell, value)) {
            throw SchemaError("side table line " + std::to_string(line) + ": non-integer " +
                              what);
        }
        return value;
    };

    SideTable table;
    for (std::size_t r = 1; r < raw.size(); ++r) {
        const auto& cells = raw[r].cells;
        std::size_t line = raw[r].line;
        if (cells.size() != expected.size()) {
            throw SchemaError("side table line " + std::to_string(line) + ": expected " +
                              std::to_string(expected.size()) + " cells, got " +
                              std::to_string(cells.size()));
        }
        std::string id(trim(cells[0]));
        std::string_view kind = trim(cells[1]);
        if (kind == "developer") {
            DeveloperHistory h;
            h.developer_id = id;
            h.total_vulnerabilities = cell_value(cells[2], "total_vulnerabilities", line);
            h.software_count = cell_value(cells[3], "software_count", line);
            h.software_count_same_language =
                cell_value(cells[4], "software_count_same_language", line);
            h.years_in_language = cell_value(cells[5], "years_in_language", line);
            h.years_total = cell_value(cells[6], "years_total", line);
            table.developers.push_back(std::move(h));
        } else if (kind == "publisher") {
            PublisherHistory h;
            h.publisher_id = id;
            h.published_count = cell_value(cells[7], "published_count", line);
            h.years_publishing = cell_value(cells[8], "years_publishing", line);
            table.publishers.push_back(std::move(h));
        } else {
            throw SchemaError("side table line " + std::to_string(line) + ": unknown kind '" +
                              std::string(kind) + "'");
        }
    }
    return table;
}

SegmentInputs assemble_inputs(const CorpusRow& row, const HistoryIndex& index,
                              const SideTable* side_table) {
    SegmentInputs inputs;
    inputs.record = to_record(row);
    for (const auto& id : row.developers) {
        if (side_table) {
            if (const auto* h = side_table->developer(id)) {
                inputs.developer_histories.push_back(*h);
                continue;
            }
        }
        if (auto h = index.developer(id, inputs.record.language)) {
            inputs.developer_histories.push_back(std::move(*h));
        }
    }
    for (const auto& id : row.publishers) {
        if (side_table) {
            if (const auto* h = side_table->publisher(id)) {
                inputs.publisher_histories.push_back(*h);
                continue;
            }
        }
        if (auto h = index.publisher(id)) {
            inputs.publisher_histories.push_back(std::move(*h));
        }
    }
    return inputs;
}

namespace {

constexpr long long kCodeLengthMin = 40, kCodeLengthMax = 700;
constexpr int kYearMin = 2016, kYearMax = 2023;
constexpr long long kForksMax = 5000;
constexpr long long kDownloadsMin = 500, kDownloadsMax = 100000;
constexpr long long kVulnerabilitiesMax = 12000;
constexpr long long kDependenciesMax = 30;
constexpr int kFrequencySteps = 100000;
constexpr int kCoverageSteps = 100;
constexpr std::array<std::string_view, 3> kLanguages{"C", "Python", "Java"};
constexpr std::array<double, 3> kContexts{0.2, 0.3, 0.5};

}  // namespace

std::vector<CorpusRow> generate_synthetic(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // Modulo draw keeps the byte stream independent of the standard
    // library's distribution implementations.
    auto uniform = [&rng](long long lo, long long hi) {
        return lo + static_cast<long long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    std::vector<CorpusRow> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        CorpusRow row;
        row.sample = std::to_string(i + 1);
        row.code_length = uniform(kCodeLengthMin, kCodeLengthMax);
        row.developers = {std::string(1, static_cast<char>('A' + uniform(0, 25)))};
        row.publishers = {std::string(1, static_cast<char>('A' + uniform(0, 25)))};
        row.year = static_cast<int>(uniform(kYearMin, kYearMax));
        row.language = std::string(kLanguages[static_cast<std::size_t>(uniform(0, 2))]);
        row.update_frequency =
            static_cast<double>(uniform(1, kFrequencySteps)) / kFrequencySteps;
        row.forks = uniform(0, kForksMax);
        row.downloads = uniform(kDownloadsMin, kDownloadsMax);
        row.vulnerabilities_total = uniform(0, kVulnerabilitiesMax);
        row.vulnerabilities_unresolved = uniform(0, *row.vulnerabilities_total);
        row.dependency_count = uniform(0, kDependenciesMax);
        row.rating_count = uniform(0, *row.downloads);
        row.code_coverage = static_cast<double>(uniform(0, kCoverageSteps)) / kCoverageSteps;
        row.context = kContexts[static_cast<std::size_t>(uniform(0, 2))];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string generator_manifest(std::size_t count, std::uint64_t seed) {
    using json = nlohmann::ordered_json;
    json columns;
    columns["Sample"] = {{"distribution", "sequential"}, {"first", 1}};
    columns["Code Length"] = {
        {"distribution", "uniform integer"}, {"min", kCodeLengthMin}, {"max", kCodeLengthMax}};
    columns["Developer"] = {{"distribution", "uniform choice"}, {"values", "A-Z"}};
    columns["Publisher"] = {{"distribution", "uniform choice"},
                            {"values", "A-Z"},
                            {"note", "drawn independently of Developer"}};
    columns["Year"] = {{"distribution", "uniform integer"}, {"min", kYearMin}, {"max", kYearMax}};
    columns["Language"] = {{"distribution", "uniform choice"},
                           {"values", json::array({"C", "Python", "Java"})}};
    columns["Update Frequency"] = {{"distribution", "uniform grid"},
                                   {"min", 1.0 / kFrequencySteps},
                                   {"max", 1.0},
                                   {"step", 1.0 / kFrequencySteps}};
    columns["Forks"] = {{"distribution", "uniform integer"}, {"min", 0}, {"max", kForksMax}};
    columns["Downloads"] = {
        {"distribution", "uniform integer"}, {"min", kDownloadsMin}, {"max", kDownloadsMax}};
    columns["Unresolved Vulnerabilities"] = {{"distribution", "uniform integer"},
                                             {"min", 0},
                                             {"max", "Known Vulnerabilities"}};
    columns["Known Vulnerabilities"] = {
        {"distribution", "uniform integer"}, {"min", 0}, {"max", kVulnerabilitiesMax}};
    columns["Dependencies"] = {
        {"distribution", "uniform integer"}, {"min", 0}, {"max", kDependenciesMax}};
    columns["Rating"] = {{"distribution", "uniform integer"}, {"min", 0}, {"max", "Downloads"}};
    columns["Code Coverage"] = {{"distribution", "uniform grid"},
                                {"min", 0.0},
                                {"max", 1.0},
                                {"step", 1.0 / kCoverageSteps}};
    columns["Context"] = {{"distribution", "uniform choice"},
                          {"values", json::array({0.2, 0.3, 0.5})}};

    json manifest;
    manifest["generator"] = "synthetic-corpus";
    manifest["seed"] = seed;
    manifest["count"] = count;
    manifest["rng"] = "mt19937_64, one fixed draw sequence per row";
    manifest["columns"] = std::move(columns);
    return manifest.dump(2) + "\n";
}

}  // namespace safer::dataset
