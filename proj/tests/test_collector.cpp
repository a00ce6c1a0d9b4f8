#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "safer/collector.hpp"

using namespace safer;
using namespace safer::collector;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(SAFER_FIXTURES_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const std::map<std::string, double>& default_table() {
    static const auto table = AssessmentConfig::default_context_table();
    return table;
}

}  // namespace

TEST_CASE("code-host fixture normalizes to the golden record") {
    auto snapshot = load_snapshot(read_fixture("snapshot_codehost.json"));
    CHECK(snapshot.kind == SourceKind::CodeHost);
    CHECK(snapshot.identifier == "acme/widget-engine");

    auto normalized = normalize(snapshot, "security", default_table());
    const auto& r = normalized.record;
    CHECK(r.software_id == "acme/widget-engine");
    CHECK(r.dependency_count == 6);
    CHECK(r.vulnerabilities_total == 5);
    CHECK(r.vulnerabilities_unresolved == 3);
    CHECK(r.forks == 562);
    CHECK(r.rating_count == 5037);
    CHECK(r.language == "Python");
    CHECK(r.year == 2019);
    CHECK(r.context == 0.2);
    CHECK(r.developer_ids == std::vector<std::string>{"V", "K"});
    CHECK(r.publisher_ids == std::vector<std::string>{"L"});
    // Four releases fall in the year before the capture instant.
    REQUIRE(r.update_frequency.has_value());
    CHECK(*r.update_frequency == 4.0 / 12.0);
    CHECK_FALSE(r.downloads.has_value());

    CHECK(normalized.gaps ==
          std::vector<std::string>{"downloads", "code_coverage", "code_length"});
}

TEST_CASE("package-registry fixture carries downloads instead of stars") {
    auto snapshot = load_snapshot(read_fixture("snapshot_registry.json"));
    CHECK(snapshot.kind == SourceKind::PackageRegistry);

    auto normalized = normalize(snapshot, "other", default_table());
    const auto& r = normalized.record;
    CHECK(r.downloads == 15181);
    CHECK(r.vulnerabilities_total == 1);
    CHECK(r.vulnerabilities_unresolved == 0);
    CHECK(r.year == 2022);
    CHECK(*r.update_frequency == 1.0 / 12.0);
    CHECK(r.context == 0.5);
    CHECK(r.developer_ids.empty());

    for (const auto& gap : normalized.gaps) {
        bool expected = gap == "developer_ids" || gap == "forks" || gap == "rating_count" ||
                        gap == "code_coverage" || gap == "code_length";
        CHECK(expected);
    }
}

TEST_CASE("every gap matches exactly one absent record field") {
    auto snapshot = load_snapshot(read_fixture("snapshot_codehost.json"));
    auto normalized = normalize(snapshot, "security", default_table());
    const auto& r = normalized.record;
    auto absent = [&](const std::string& gap) {
        if (gap == "downloads") return !r.downloads.has_value();
        if (gap == "forks") return !r.forks.has_value();
        if (gap == "rating_count") return !r.rating_count.has_value();
        if (gap == "dependency_count") return !r.dependency_count.has_value();
        if (gap == "vulnerabilities_total") return !r.vulnerabilities_total.has_value();
        if (gap == "vulnerabilities_unresolved")
            return !r.vulnerabilities_unresolved.has_value();
        if (gap == "update_frequency") return !r.update_frequency.has_value();
        if (gap == "year") return !r.year.has_value();
        if (gap == "language") return !r.language.has_value();
        if (gap == "code_coverage") return !r.code_coverage.has_value();
        if (gap == "code_length") return !r.code_length.has_value();
        if (gap == "developer_ids") return r.developer_ids.empty();
        if (gap == "publisher_ids") return r.publisher_ids.empty();
        return false;
    };
    for (const auto& gap : normalized.gaps) CHECK(absent(gap));
}

TEST_CASE("dependency and advisory counting") {
    std::string text = R"({
        "source": "code-host", "identifier": "x", "captured_at": "2024-01-01",
        "fields": {"dependencies": [)";
    for (int i = 0; i < 26; ++i) text += (i ? "," : "") + std::string("\"d") + std::to_string(i) + "\"";
    text += R"(], "advisories": [)";
    for (int i = 0; i < 2294; ++i) {
        text += (i ? "," : "") + std::string(R"({"id":"a)") + std::to_string(i) +
                R"(","resolved":true})";
    }
    text += "]}}";

    auto normalized = normalize(load_snapshot(text), "security", default_table());
    CHECK(normalized.record.dependency_count == 26);
    CHECK(normalized.record.vulnerabilities_total == 2294);
    CHECK(normalized.record.vulnerabilities_unresolved == 0);
}

TEST_CASE("no releases in the final year clamps the frequency to the floor") {
    std::string text = R"({
        "source": "code-host", "identifier": "x", "captured_at": "2024-01-01",
        "fields": {"releases": ["2019-03-01", "2020-06-15"]}})";
    auto normalized = normalize(load_snapshot(text), "security", default_table());
    CHECK(*normalized.record.update_frequency == 1.0 / 365.0);
    CHECK(normalized.record.year == 2019);
    // The absent advisory list shows up as one gap per vulnerability field.
    bool total_gap = false, unresolved_gap = false;
    for (const auto& gap : normalized.gaps) {
        total_gap = total_gap || gap == "vulnerabilities_total";
        unresolved_gap = unresolved_gap || gap == "vulnerabilities_unresolved";
    }
    CHECK(total_gap);
    CHECK(unresolved_gap);
    CHECK_FALSE(normalized.record.vulnerabilities_total.has_value());

    std::string empty = R"({
        "source": "code-host", "identifier": "x", "captured_at": "2024-01-01",
        "fields": {"releases": []}})";
    auto none = normalize(load_snapshot(empty), "security", default_table());
    CHECK(*none.record.update_frequency == 1.0 / 365.0);
    CHECK_FALSE(none.record.year.has_value());
}

TEST_CASE("a dense release cadence clamps to 1") {
    std::string text = R"({
        "source": "code-host", "identifier": "x", "captured_at": "2024-01-01",
        "fields": {"releases": [)";
    for (int i = 0; i < 20; ++i) {
        text += (i ? "," : "") + std::string("\"2023-0") + std::to_string(1 + i % 9) + "-0" +
                std::to_string(1 + i % 9) + "\"";
    }
    text += "]}}";
    auto normalized = normalize(load_snapshot(text), "security", default_table());
    CHECK(*normalized.record.update_frequency == 1.0);
}

TEST_CASE("truncated snapshots fail with a byte offset") {
    std::string text = read_fixture("snapshot_codehost.json");
    text.resize(text.size() / 2);
    try {
        load_snapshot(text);
        FAIL("expected a parse error");
    } catch (const SnapshotError& e) {
        CHECK(e.byte_offset() > 0);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("structural problems are rejected") {
    CHECK_THROWS_AS(load_snapshot(R"({"source":"warehouse","identifier":"x",)"
                                  R"("captured_at":"2024-01-01"})"),
                    SnapshotError);
    CHECK_THROWS_AS(load_snapshot(R"({"source":"code-host","captured_at":"2024-01-01"})"),
                    SnapshotError);
    CHECK_THROWS_AS(load_snapshot(R"({"source":"code-host","identifier":"x"})"), SnapshotError);
    CHECK_THROWS_AS(load_snapshot(R"({"source":"code-host","identifier":"x",)"
                                  R"("captured_at":"2024-01-01","fields":{"stars":"many"}})"),
                    SnapshotError);
}

TEST_CASE("an unknown context label is an argument error") {
    auto snapshot = load_snapshot(read_fixture("snapshot_codehost.json"));
    CHECK_THROWS_AS(normalize(snapshot, "firmware", default_table()), std::invalid_argument);
}

TEST_CASE("normalization is pure") {
    auto snapshot = load_snapshot(read_fixture("snapshot_registry.json"));
    auto a = normalize(snapshot, "other", default_table());
    auto b = normalize(snapshot, "other", default_table());
    CHECK(a.record == b.record);
    CHECK(a.gaps == b.gaps);
}
