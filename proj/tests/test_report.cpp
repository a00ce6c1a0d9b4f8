#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "safer/report.hpp"
#include "support/random_records.hpp"

using namespace safer;
using namespace safer::report;

namespace {

SegmentInputs reference_inputs() {
    SegmentInputs inputs;
    SoftwareRecord& r = inputs.record;
    r.software_id = "1";
    r.developer_ids = {"W"};
    r.publisher_ids = {"Z"};
    r.year = 2018;
    r.language = "Java";
    r.update_frequency = 0.08424;
    r.forks = 2003;
    r.downloads = 20455;
    r.vulnerabilities_unresolved = 135;
    r.vulnerabilities_total = 7556;
    r.dependency_count = 28;
    r.rating_count = 7153;
    r.code_coverage = 0.99;
    r.context = 0.2;
    r.code_length = 304;
    inputs.developer_histories = {{"W", 96912, 129, 33, 2, 2}};
    inputs.publisher_histories = {{"Z", 123, 2}};
    return inputs;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(text);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    return out;
}

}  // namespace

TEST_CASE("format_real rounds ties away from zero") {
    CHECK(format_real(1.25, 2) == "1.3");
    CHECK(format_real(-1.25, 2) == "-1.3");
    CHECK(format_real(0.125, 2) == "0.13");
    CHECK(format_real(2.5, 1) == "3");
    CHECK(format_real(-2.5, 1) == "-3");
    CHECK(format_real(0.375, 2) == "0.38");
}

TEST_CASE("format_real trims and keeps plain decimals") {
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(28.0) == "28");
    CHECK(format_real(0.37) == "0.37");
    CHECK(format_real(1000000.0) == "1000000");
    CHECK(format_real(0.000499251123315, 12) == "0.000499251123315");
    CHECK(format_real(0.0004992511233151234, 12) == "0.000499251123315");
    CHECK(format_real(176833.08715041287, 12) == "176833.08715");
    CHECK(format_real(9.999, 3) == "10");
    CHECK(format_real(1e30) == "1e30");
    CHECK(format_real(123.456e-25) == "1.23456e-23");
}

TEST_CASE("format_real is lossless at 12 significant digits") {
    testgen::RecordGen gen(5);
    for (int i = 0; i < 2000; ++i) {
        double value = (gen.unit() - 0.5) * std::pow(10.0, gen.range(-9, 9));
        double parsed = std::strtod(format_real(value).c_str(), nullptr);
        CHECK(std::fabs(parsed - value) <= std::fabs(value) * 1e-11);
    }
}

TEST_CASE("tabular report matches the expected row shape") {
    RiskBreakdown b;
    b.software_id = "1";
    b.assessed_at = 1546214400;
    b.r_dev = 48476.27;
    b.r_pb = 0.37;
    b.r_ur = 0.66;
    b.final_risk = 0.37;
    b.final_risk_penalized = 0.37;
    b.band = RiskBand::Moderate;

    auto csv = emit_breakdowns_csv({&b, 1});
    auto lines = split(csv, '\n');
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "Sample,Assessed At,Segments Defaulted,R_Dev,R_Pb,R_ur,R_F,R_FP,Band");
    CHECK(lines[1] == "1,2018-12-31T00:00:00Z,,48476.27,0.37,0.66,0.37,0.37,Moderate Risk");

    // The defaulted-segments cell is empty, not the word "none".
    auto cells = split(lines[1], ',');
    CHECK(cells[2].empty());

    b.segment_defaulted = {"developer", "user"};
    auto with_defaults = split(emit_breakdowns_csv({&b, 1}), '\n');
    CHECK(split(with_defaults[1], ',')[2] == "developer;user");
}

TEST_CASE("structured report round-trips every field") {
    auto breakdown = assess(reference_inputs(), AssessmentConfig{}, 1546214400);
    RiskBreakdown defaulted;
    defaulted.software_id = "empty";
    defaulted.band = RiskBand::Critical;
    defaulted.segment_defaulted = {"developer", "publisher", "user"};

    std::vector<RiskBreakdown> batch{breakdown, defaulted};
    auto text = emit_breakdowns_json(batch);
    auto parsed = parse_breakdowns_json(text);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0] == batch[0]);
    CHECK(parsed[1] == batch[1]);

    CHECK(text.find("\"schema_version\": \"1\"") != std::string::npos);
    CHECK_THROWS(parse_breakdowns_json("{\"schema_version\":\"2\",\"breakdowns\":[]}"));
}

TEST_CASE("grid specs parse from JSON") {
    auto spec = parse_grid_spec(R"({
        "x": {"parameter": "w_dev", "min": 0, "max": 1, "step": 0.25},
        "y": {"parameter": "context", "values": [0.2, 0.3, 0.5]},
        "fixed": {"v_up": 0.5},
        "output": "penalty"})");
    CHECK(spec.x.values.size() == 5);
    CHECK(spec.y.values == std::vector<double>{0.2, 0.3, 0.5});
    REQUIRE(spec.fixed.size() == 1);
    CHECK(spec.fixed[0].first == "v_up");
    CHECK(spec.output == "penalty");

    CHECK_THROWS_AS(parse_grid_spec(R"({"x": {"parameter": "w_dev", "min": 0, "max": 1,
        "step": 0.5}, "y": {"parameter": "w_dev", "values": [1]}})"),
                    GridError);
    CHECK_THROWS_AS(parse_grid_spec("not json"), GridError);
}

TEST_CASE("unknown sweep parameters name the alternatives") {
    GridSpec spec;
    spec.x = {"warp_factor", {0.0}};
    spec.y = {"v_up", {0.0}};
    spec.output = "penalty";
    try {
        sweep_grid(spec, reference_inputs(), AssessmentConfig{});
        FAIL("expected a grid error");
    } catch (const GridError& e) {
        std::string message = e.what();
        CHECK(message.find("warp_factor") != std::string::npos);
        CHECK(message.find("v_up") != std::string::npos);
        CHECK(message.find("code_coverage") != std::string::npos);
    }
}

TEST_CASE("a 1x1 grid equals a direct assessment") {
    GridSpec spec;
    spec.x = {"dependency_count", {28.0}};
    spec.y = {"code_coverage", {0.99}};
    spec.output = "final_risk_penalized";

    auto inputs = reference_inputs();
    auto grid = sweep_grid(spec, inputs, AssessmentConfig{});
    REQUIRE(grid.cells.size() == 1);
    REQUIRE(grid.cells[0].size() == 1);
    auto direct = assess(inputs, AssessmentConfig{}, 0);
    CHECK(grid.cells[0][0] == direct.final_risk_penalized);
}

TEST_CASE("grid dimensions equal the axis step counts") {
    GridSpec spec;
    spec.x = {"w_dev", {}};
    for (int i = 0; i <= 20; ++i) spec.x.values.push_back(i / 20.0);
    spec.y = {"code_coverage", {}};
    for (int i = 0; i < 20; ++i) spec.y.values.push_back(i / 19.0);
    spec.output = "final_risk_penalized";

    auto grid = sweep_grid(spec, reference_inputs(), AssessmentConfig{});
    CHECK(grid.cells.size() == 20);
    for (const auto& row : grid.cells) CHECK(row.size() == 21);
}

TEST_CASE("grid csv layout and losslessness") {
    GridSpec spec;
    spec.x = {"v_up", {0.0, 0.5, 1.0}};
    spec.y = {"context", {0.2, 0.5}};
    spec.output = "penalty";
    auto grid = sweep_grid(spec, reference_inputs(), AssessmentConfig{});
    auto csv = emit_grid_csv(grid);
    auto lines = split(csv, '\n');
    REQUIRE(lines.size() >= 3);
    auto header = split(lines[0], ',');
    CHECK(header[0] == "penalty");
    CHECK(header.size() == 4);
    for (std::size_t y = 0; y < 2; ++y) {
        auto cells = split(lines[1 + y], ',');
        CHECK(std::strtod(cells[0].c_str(), nullptr) == grid.spec.y.values[y]);
        for (std::size_t x = 0; x < 3; ++x) {
            double parsed = std::strtod(cells[1 + x].c_str(), nullptr);
            CHECK(std::fabs(parsed - grid.cells[y][x]) <=
                  std::fabs(grid.cells[y][x]) * 1e-11);
        }
    }
}

TEST_CASE("developer-weight sweeps move the final score monotonically") {
    GridSpec spec;
    spec.x = {"w_dev", {}};
    for (int i = 0; i <= 20; ++i) spec.x.values.push_back(i / 20.0);
    spec.y = {"code_coverage", {}};
    for (int i = 0; i <= 20; ++i) spec.y.values.push_back(i / 20.0);
    spec.output = "final_risk_penalized";

    auto grid = sweep_grid(spec, reference_inputs(), AssessmentConfig{});
    for (const auto& row : grid.cells) {
        for (std::size_t x = 1; x < row.size(); ++x) {
            CHECK(row[x] >= row[x - 1] - 1e-12);
        }
    }
}

TEST_CASE("penalty grids honor the context ordering and proportion trend") {
    GridSpec spec;
    spec.x = {"context", {0.2, 0.3, 0.5}};
    spec.y = {"v_up", {}};
    for (int i = 0; i <= 10; ++i) spec.y.values.push_back(i / 10.0);
    spec.output = "penalty";

    auto grid = sweep_grid(spec, reference_inputs(), AssessmentConfig{});
    for (std::size_t y = 0; y < grid.cells.size(); ++y) {
        if (grid.spec.y.values[y] > 0.0) {
            CHECK(grid.cells[y][0] >= grid.cells[y][2]);
        }
    }
    for (std::size_t x = 0; x < 3; ++x) {
        for (std::size_t y = 1; y < grid.cells.size(); ++y) {
            CHECK(grid.cells[y][x] >= grid.cells[y - 1][x] - 1e-12);
        }
    }
}

TEST_CASE("weight sweeps stay monotone per row on random bases") {
    testgen::RecordGen gen(31);
    GridSpec spec;
    spec.x = {"w_dev", {}};
    for (int i = 0; i <= 10; ++i) spec.x.values.push_back(i / 10.0);
    spec.y = {"v_up", {0.0, 0.5}};
    spec.output = "final_risk_penalized";

    int grids = 0;
    while (grids < 40) {
        auto inputs = gen.next_inputs();
        GridResult grid;
        try {
            grid = sweep_grid(spec, inputs, AssessmentConfig{});
        } catch (const ValidationError&) {
            continue;
        }
        ++grids;
        for (const auto& row : grid.cells) {
            bool nondecreasing = true;
            bool nonincreasing = true;
            for (std::size_t x = 1; x < row.size(); ++x) {
                if (row[x] < row[x - 1] - 1e-9) nondecreasing = false;
                if (row[x] > row[x - 1] + 1e-9) nonincreasing = false;
            }
            CHECK((nondecreasing || nonincreasing));
        }
    }
}
