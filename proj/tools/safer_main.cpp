#include <algorithm>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "safer/collector.hpp"
#include "safer/dataset.hpp"
#include "safer/report.hpp"
#include "safer/scoring.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataFailure = 1;
constexpr int kExitUsage = 2;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

safer::AssessmentConfig load_config(const std::string& path) {
    safer::AssessmentConfig config;
    if (path.empty()) return config;

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        if (doc.contains("dependency_sensitivity")) {
            config.dependency_sensitivity = doc["dependency_sensitivity"].get<double>();
        }
        if (doc.contains("context_table")) {
            config.context_table.clear();
            for (const auto& [label, weight] : doc["context_table"].items()) {
                config.context_table[label] = weight.get<double>();
            }
        }
        if (doc.contains("band_thresholds")) {
            auto thresholds = doc["band_thresholds"].get<std::vector<double>>();
            if (thresholds.size() != 3) {
                throw ConfigError("config: band_thresholds must hold exactly 3 values");
            }
            std::copy(thresholds.begin(), thresholds.end(), config.band_thresholds.begin());
        }
        if (doc.contains("penalty_threshold")) {
            config.penalty_threshold = doc["penalty_threshold"].get<double>();
        }
        if (doc.contains("sigmoid_shift")) config.sigmoid_shift = doc["sigmoid_shift"].get<double>();
        if (doc.contains("sigmoid_scale")) config.sigmoid_scale = doc["sigmoid_scale"].get<double>();
        if (doc.contains("weight_overrides") && !doc["weight_overrides"].is_null()) {
            const auto& w = doc["weight_overrides"];
            config.weight_overrides = safer::FinalWeights{
                w.at("w_dev").get<double>(), w.at("w_pb").get<double>(),
                w.at("w_ur").get<double>()};
        }
        if (doc.contains("missing_data_policy")) {
            config.missing_data_policy.segment_max_risk = false;
            config.missing_data_policy.parameter_zero = false;
            for (const auto& flag : doc["missing_data_policy"]) {
                std::string name = flag.get<std::string>();
                if (name == "segment-max-risk") {
                    config.missing_data_policy.segment_max_risk = true;
                } else if (name == "parameter-zero") {
                    config.missing_data_policy.parameter_zero = true;
                } else {
                    throw ConfigError("config: unknown missing_data_policy flag '" + name + "'");
                }
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    auto problems = safer::config_problems(config);
    if (!problems.empty()) {
        std::string message = "config:";
        for (const auto& p : problems) message += " " + p + ";";
        throw ConfigError(message);
    }
    return config;
}

std::int64_t resolve_now(const std::string& now_flag) {
    if (now_flag.empty()) return static_cast<std::int64_t>(std::time(nullptr));
    auto ts = safer::parse_timestamp(now_flag);
    if (!ts) throw ConfigError("--now is not a timestamp: '" + now_flag + "'");
    return *ts;
}

int utc_year(std::int64_t unix_seconds) {
    return std::stoi(safer::format_timestamp(unix_seconds).substr(0, 4));
}

struct FailedRow {
    std::size_t line = 0;
    std::string sample;
    std::string message;
};

std::string sidecar_path(const std::string& output) { return output + ".errors.csv"; }

void write_sidecar(const std::string& output, const std::vector<FailedRow>& failures) {
    if (failures.empty()) {
        std::error_code ec;
        std::filesystem::remove(sidecar_path(output), ec);
        return;
    }
    std::string text = "Line,Sample,Error\n";
    for (const auto& f : failures) {
        std::string message = f.message;
        std::replace(message.begin(), message.end(), '\n', ' ');
        bool quote = message.find(',') != std::string::npos;
        text += std::to_string(f.line) + "," + f.sample + "," +
                (quote ? "\"" + message + "\"" : message) + "\n";
    }
    write_file(sidecar_path(output), text);
}

std::string violation_text(const safer::Violation& v) {
    return "[" + v.field + "] " + v.message;
}

// ---------------------------------------------------------------------------
// Built-in robustness checks: six error/missing-information scenarios run
// against an embedded single-row corpus.

const char* kSelfTestHeader =
    "Sample,Code Length,Developer,Publisher,Year,Language,Update Frequency,Forks,Downloads,"
    "Unresolved Vulnerabilities,Known Vulnerabilities,Dependencies,Rating,Code Coverage,Context";

const std::vector<std::string> kSelfTestCells = {
    "1",    "304", "W",    "Z",    "2018", "Java", "0.08424", "2003",
    "20455", "135", "7556", "28",   "7153", "0.99", "0.2"};

const char* kSelfTestSideTable =
    "actor_id,kind,total_vulnerabilities,software_count,software_count_same_language,"
    "years_in_language,years_total,published_count,years_publishing\n"
    "W,developer,96912,129,33,2,2,,\n"
    "Z,publisher,,,,,,123,2\n";

std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out.push_back(',');
        bool quote = cells[i].find(',') != std::string::npos;
        out += quote ? "\"" + cells[i] + "\"" : cells[i];
    }
    return out;
}

// Assesses one corpus text against the embedded histories. Returns the
// breakdown, or the error text when the row cannot be scored.
struct SelfTestOutcome {
    bool scored = false;
    std::string error;
};

SelfTestOutcome self_test_assess(const std::string& corpus_text) {
    SelfTestOutcome outcome;
    auto side_table = safer::dataset::parse_side_table(kSelfTestSideTable);
    auto results = safer::dataset::parse_corpus(corpus_text);
    if (results.size() != 1) {
        outcome.error = "expected one row";
        return outcome;
    }
    if (const auto* error = std::get_if<safer::dataset::RowError>(&results[0])) {
        outcome.error = error->message;
        return outcome;
    }
    const auto& row = std::get<safer::dataset::CorpusRow>(results[0]);
    safer::dataset::HistoryIndex empty_index;
    auto inputs = safer::dataset::assemble_inputs(row, empty_index, &side_table);
    try {
        safer::assess(inputs, safer::AssessmentConfig{}, 0);
        outcome.scored = true;
    } catch (const safer::ValidationError& e) {
        outcome.error = e.what();
    }
    return outcome;
}

int run_self_test(std::ostream& out) {
    const std::string header = kSelfTestHeader;
    int passed = 0;
    auto report = [&](int number, const char* title, bool pass, const std::string& detail) {
        out << "self-test " << number << " (" << title << "): " << (pass ? "PASS" : "FAIL");
        if (!detail.empty()) out << " - " << detail;
        out << "\n";
        if (pass) ++passed;
    };

    {  // 1: no value for dependencies -> still scored
        auto cells = kSelfTestCells;
        cells[11].clear();
        auto outcome = self_test_assess(header + "\n" + join_row(cells) + "\n");
        report(1, "missing dependencies still scores", outcome.scored, outcome.error);
    }
    {  // 2: code coverage above 1 -> error
        auto cells = kSelfTestCells;
        cells[13] = "1.3";
        auto outcome = self_test_assess(header + "\n" + join_row(cells) + "\n");
        report(2, "coverage above 1 rejected", !outcome.scored, "");
    }
    {  // 3: context outside the configured table -> error
        auto cells = kSelfTestCells;
        cells[14] = "0.4";
        auto outcome = self_test_assess(header + "\n" + join_row(cells) + "\n");
        report(3, "unknown context rejected", !outcome.scored, "");
    }
    {  // 4: any five blank cells -> still scored (all 2002 subsets)
        bool all_pass = true;
        std::string first_failure;
        for (int a = 1; a <= 14 && all_pass; ++a)
            for (int b = a + 1; b <= 14 && all_pass; ++b)
                for (int c = b + 1; c <= 14 && all_pass; ++c)
                    for (int d = c + 1; d <= 14 && all_pass; ++d)
                        for (int e = d + 1; e <= 14 && all_pass; ++e) {
                            auto cells = kSelfTestCells;
                            cells[a].clear();
                            cells[b].clear();
                            cells[c].clear();
                            cells[d].clear();
                            cells[e].clear();
                            auto outcome =
                                self_test_assess(header + "\n" + join_row(cells) + "\n");
                            if (!outcome.scored) {
                                all_pass = false;
                                first_failure = "blanking cells " + std::to_string(a) + "," +
                                                std::to_string(b) + "," + std::to_string(c) +
                                                "," + std::to_string(d) + "," +
                                                std::to_string(e) + ": " + outcome.error;
                            }
                        }
        report(4, "any five blank cells still score", all_pass, first_failure);
    }
    {  // 5: several developers in one cell -> still scored
        auto cells = kSelfTestCells;
        cells[2] = "3,5,10";
        auto outcome = self_test_assess(header + "\n" + join_row(cells) + "\n");
        report(5, "multi-developer cell still scores", outcome.scored, outcome.error);
    }
    {  // 6: decimal downloads -> error
        auto cells = kSelfTestCells;
        cells[8] = "3.5";
        auto outcome = self_test_assess(header + "\n" + join_row(cells) + "\n");
        bool pass = !outcome.scored && outcome.error.find("non-integer downloads") !=
                                           std::string::npos;
        report(6, "decimal downloads rejected", pass, outcome.error);
    }

    out << "self-test: " << passed << "/6 passed\n";
    return passed == 6 ? kExitOk : kExitDataFailure;
}

// ---------------------------------------------------------------------------

struct AssessFlow {
    std::string input;
    std::string config_path;
    std::string histories_path;
    std::string output;
    std::string format = "csv";
    std::string now_flag;
};

int run_assess(const AssessFlow& flow) {
    auto config = load_config(flow.config_path);
    std::int64_t now = resolve_now(flow.now_flag);

    std::string corpus_text;
    try {
        corpus_text = read_file(flow.input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }

    std::vector<safer::dataset::RowResult> results;
    safer::dataset::SideTable side_table;
    bool have_side_table = false;
    try {
        results = safer::dataset::parse_corpus(corpus_text);
        if (!flow.histories_path.empty()) {
            side_table = safer::dataset::parse_side_table(read_file(flow.histories_path));
            have_side_table = true;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }

    std::vector<safer::dataset::CorpusRow> rows;
    rows.reserve(results.size());
    for (const auto& result : results) {
        if (const auto* row = std::get_if<safer::dataset::CorpusRow>(&result)) {
            rows.push_back(*row);
        }
    }

    safer::dataset::HistoryDerivationRule rule;
    rule.current_year = utc_year(now);
    for (const auto& row : rows) {
        if (row.year) rule.current_year = std::max(rule.current_year, *row.year);
    }
    auto index = safer::dataset::derive_histories(rows, rule);

    std::vector<safer::RiskBreakdown> breakdowns;
    std::vector<FailedRow> failures;
    std::size_t data_line = 1;
    for (const auto& result : results) {
        ++data_line;
        if (const auto* error = std::get_if<safer::dataset::RowError>(&result)) {
            failures.push_back({error->line, error->sample, error->message});
            continue;
        }
        const auto& row = std::get<safer::dataset::CorpusRow>(result);
        auto inputs = safer::dataset::assemble_inputs(row, index,
                                                      have_side_table ? &side_table : nullptr);
        try {
            breakdowns.push_back(safer::assess(inputs, config, now));
        } catch (const safer::ValidationError& e) {
            std::string message;
            for (const auto& v : e.violations()) {
                if (!message.empty()) message += "; ";
                message += violation_text(v);
            }
            failures.push_back({data_line, row.sample, message});
        }
    }

    try {
        write_file(flow.output, flow.format == "json"
                                    ? safer::report::emit_breakdowns_json(breakdowns)
                                    : safer::report::emit_breakdowns_csv(breakdowns));
        write_sidecar(flow.output, failures);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }

    std::cerr << "assessed " << breakdowns.size() << " of " << results.size() << " rows";
    if (!failures.empty()) std::cerr << " (" << failures.size() << " listed in the error sidecar)";
    std::cerr << "\n";
    return breakdowns.empty() ? kExitDataFailure : kExitOk;
}

int run_generate(std::size_t count, std::uint64_t seed, const std::string& output) {
    auto rows = safer::dataset::generate_synthetic(count, seed);
    try {
        write_file(output, safer::dataset::serialize_corpus(rows));
        write_file(output + ".manifest.json", safer::dataset::generator_manifest(count, seed));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }
    std::cerr << "wrote " << rows.size() << " rows to " << output << "\n";
    return kExitOk;
}

int run_validate(const std::string& input) {
    std::string text;
    try {
        text = read_file(input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }

    std::vector<safer::dataset::RowResult> results;
    try {
        results = safer::dataset::parse_corpus(text);
    } catch (const std::exception& e) {
        std::cout << "schema error: " << e.what() << "\n";
        return kExitDataFailure;
    }

    safer::AssessmentConfig config;
    std::size_t hard_count = 0;
    std::size_t data_line = 1;
    for (const auto& result : results) {
        ++data_line;
        if (const auto* error = std::get_if<safer::dataset::RowError>(&result)) {
            ++hard_count;
            std::cout << "line " << error->line << " sample '" << error->sample
                      << "': " << error->message << " (hard)\n";
            continue;
        }
        const auto& row = std::get<safer::dataset::CorpusRow>(result);
        auto validation = safer::validate_record(safer::dataset::to_record(row), config);
        for (const auto& violation : validation.violations) {
            bool is_hard = violation.severity == safer::Severity::Hard;
            if (is_hard) ++hard_count;
            std::cout << "line " << data_line << " sample '" << row.sample
                      << "': " << violation_text(violation) << (is_hard ? " (hard)" : " (gap)")
                      << "\n";
        }
    }
    std::cout << "validated " << results.size() << " rows, " << hard_count
              << " hard error(s)\n";
    return hard_count == 0 ? kExitOk : kExitDataFailure;
}

int run_grid(const std::string& spec_path, const std::string& input,
             const std::string& histories_path, const std::string& config_path,
             const std::string& output) {
    auto config = load_config(config_path);

    safer::report::GridSpec spec;
    try {
        spec = safer::report::parse_grid_spec(read_file(spec_path));
    } catch (const safer::report::GridError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        auto results = safer::dataset::parse_corpus(read_file(input));
        safer::dataset::SideTable side_table;
        bool have_side_table = false;
        if (!histories_path.empty()) {
            side_table = safer::dataset::parse_side_table(read_file(histories_path));
            have_side_table = true;
        }
        std::vector<safer::dataset::CorpusRow> rows;
        for (const auto& result : results) {
            if (const auto* row = std::get_if<safer::dataset::CorpusRow>(&result)) {
                rows.push_back(*row);
            }
        }
        if (rows.empty()) {
            std::cerr << "error: no usable base row in " << input << "\n";
            return kExitDataFailure;
        }

        safer::dataset::HistoryDerivationRule rule;
        rule.current_year = utc_year(static_cast<std::int64_t>(std::time(nullptr)));
        for (const auto& row : rows) {
            if (row.year) rule.current_year = std::max(rule.current_year, *row.year);
        }
        auto index = safer::dataset::derive_histories(rows, rule);
        auto base = safer::dataset::assemble_inputs(rows.front(), index,
                                                    have_side_table ? &side_table : nullptr);

        auto grid = safer::report::sweep_grid(spec, base, config);
        write_file(output, safer::report::emit_grid_csv(grid));
        std::cerr << "wrote " << grid.cells.size() << "x"
                  << (grid.cells.empty() ? 0 : grid.cells.front().size()) << " grid to "
                  << output << "\n";
        return kExitOk;
    } catch (const safer::report::GridError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }
}

int run_normalize(const std::string& input, const std::string& context_label,
                  const std::string& config_path, const std::string& output) {
    auto config = load_config(config_path);
    try {
        auto snapshot = safer::collector::load_snapshot(read_file(input));
        auto normalized = safer::collector::normalize(snapshot, context_label,
                                                      config.context_table);
        safer::dataset::CorpusRow row;
        const auto& r = normalized.record;
        row.sample = r.software_id;
        row.code_length = r.code_length;
        row.developers = r.developer_ids;
        row.publishers = r.publisher_ids;
        row.year = r.year;
        row.language = r.language;
        row.update_frequency = r.update_frequency;
        row.forks = r.forks;
        row.downloads = r.downloads;
        row.vulnerabilities_unresolved = r.vulnerabilities_unresolved;
        row.vulnerabilities_total = r.vulnerabilities_total;
        row.dependency_count = r.dependency_count;
        row.rating_count = r.rating_count;
        row.code_coverage = r.code_coverage;
        row.context = r.context;
        write_file(output, safer::dataset::serialize_corpus({&row, 1}));
        for (const auto& gap : normalized.gaps) std::cout << "gap: " << gap << "\n";
        std::cerr << "normalized " << snapshot.identifier << " to " << output << "\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }
}

int run_snapshot_assess(const std::string& input, const std::string& context_label,
                        const std::string& histories_path, const std::string& config_path,
                        const std::string& output, const std::string& format,
                        const std::string& now_flag) {
    auto config = load_config(config_path);
    std::int64_t now = resolve_now(now_flag);
    try {
        auto snapshot = safer::collector::load_snapshot(read_file(input));
        auto normalized = safer::collector::normalize(snapshot, context_label,
                                                      config.context_table);
        for (const auto& gap : normalized.gaps) std::cout << "gap: " << gap << "\n";

        safer::SegmentInputs inputs;
        inputs.record = normalized.record;
        if (!histories_path.empty()) {
            auto side_table = safer::dataset::parse_side_table(read_file(histories_path));
            for (const auto& id : inputs.record.developer_ids) {
                if (const auto* h = side_table.developer(id)) {
                    inputs.developer_histories.push_back(*h);
                }
            }
            for (const auto& id : inputs.record.publisher_ids) {
                if (const auto* h = side_table.publisher(id)) {
                    inputs.publisher_histories.push_back(*h);
                }
            }
        }

        auto breakdown = safer::assess(inputs, config, now);
        write_file(output, format == "json"
                               ? safer::report::emit_breakdowns_json({&breakdown, 1})
                               : safer::report::emit_breakdowns_csv({&breakdown, 1}));
        std::cerr << "assessed " << snapshot.identifier << ": "
                  << safer::band_display(breakdown.band) << "\n";
        return kExitOk;
    } catch (const safer::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trust-based security risk scoring for software records"};
    app.require_subcommand(1);

    // assess
    auto* assess_cmd = app.add_subcommand("assess", "score every row of a corpus file");
    AssessFlow assess_flow;
    assess_cmd->add_option("--input", assess_flow.input, "corpus CSV")->required();
    assess_cmd->add_option("--config", assess_flow.config_path, "config JSON");
    assess_cmd->add_option("--histories", assess_flow.histories_path, "history side-table CSV");
    assess_cmd->add_option("--output", assess_flow.output, "report path")->required();
    assess_cmd->add_option("--format", assess_flow.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    assess_cmd->add_option("--now", assess_flow.now_flag,
                           "assessment timestamp (ISO 8601 or unix seconds); defaults to the "
                           "current time");

    // generate
    auto* generate_cmd = app.add_subcommand("generate", "write a synthetic corpus");
    std::size_t count = 0;
    std::uint64_t seed = 42;
    std::string generate_output;
    generate_cmd->add_option("--count", count, "number of rows")
        ->required()
        ->check(CLI::PositiveNumber);
    generate_cmd->add_option("--seed", seed, "generator seed (default 42)");
    generate_cmd->add_option("--output", generate_output, "corpus path")->required();

    // grid
    auto* grid_cmd = app.add_subcommand("grid", "emit a parameter-sweep grid");
    std::string grid_spec_path, grid_input, grid_histories, grid_config, grid_output;
    grid_cmd->add_option("--spec", grid_spec_path, "grid spec JSON")->required();
    grid_cmd->add_option("--input", grid_input, "base corpus CSV (first row is swept)")
        ->required();
    grid_cmd->add_option("--histories", grid_histories, "history side-table CSV");
    grid_cmd->add_option("--config", grid_config, "config JSON");
    grid_cmd->add_option("--output", grid_output, "grid CSV path")->required();

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check a corpus, or run the self-test");
    std::string validate_input;
    bool self_test = false;
    validate_cmd->add_option("--input", validate_input, "corpus CSV");
    validate_cmd->add_flag("--self-test", self_test,
                           "run the built-in error/missing-information checks");

    // normalize
    auto* normalize_cmd =
        app.add_subcommand("normalize", "turn a metadata snapshot into a corpus row");
    std::string normalize_input, normalize_context = "security", normalize_config,
                normalize_output;
    normalize_cmd->add_option("--input", normalize_input, "snapshot JSON")->required();
    normalize_cmd->add_option("--context", normalize_context,
                              "context label (default: security)");
    normalize_cmd->add_option("--config", normalize_config, "config JSON");
    normalize_cmd->add_option("--output", normalize_output, "corpus CSV path")->required();

    // snapshot-assess
    auto* snapshot_cmd =
        app.add_subcommand("snapshot-assess", "normalize and score one metadata snapshot");
    std::string snap_input, snap_context = "security", snap_histories, snap_config,
                snap_output, snap_format = "csv", snap_now;
    snapshot_cmd->add_option("--input", snap_input, "snapshot JSON")->required();
    snapshot_cmd->add_option("--context", snap_context, "context label (default: security)");
    snapshot_cmd->add_option("--histories", snap_histories, "history side-table CSV");
    snapshot_cmd->add_option("--config", snap_config, "config JSON");
    snapshot_cmd->add_option("--output", snap_output, "report path")->required();
    snapshot_cmd->add_option("--format", snap_format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    snapshot_cmd->add_option("--now", snap_now, "assessment timestamp");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (assess_cmd->parsed()) return run_assess(assess_flow);
        if (generate_cmd->parsed()) return run_generate(count, seed, generate_output);
        if (grid_cmd->parsed()) {
            return run_grid(grid_spec_path, grid_input, grid_histories, grid_config,
                            grid_output);
        }
        if (validate_cmd->parsed()) {
            if (self_test) return run_self_test(std::cout);
            if (validate_input.empty()) {
                std::cerr << "error: validate needs --input or --self-test\n";
                return kExitUsage;
            }
            return run_validate(validate_input);
        }
        if (normalize_cmd->parsed()) {
            return run_normalize(normalize_input, normalize_context, normalize_config,
                                 normalize_output);
        }
        if (snapshot_cmd->parsed()) {
            return run_snapshot_assess(snap_input, snap_context, snap_histories, snap_config,
                                       snap_output, snap_format, snap_now);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataFailure;
    }
    return kExitUsage;
}
