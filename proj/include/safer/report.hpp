#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "safer/scoring.hpp"

namespace safer::report {

// Plain decimal text, at most `significant_digits` significant digits,
// trailing zeros trimmed, ties rounded half away from zero.
std::string format_real(double value, int significant_digits = 12);

// Comma-separated report, one row per breakdown:
// Sample, Assessed At, Segments Defaulted, R_Dev, R_Pb, R_ur, R_F, R_FP, Band.
std::string emit_breakdowns_csv(std::span<const RiskBreakdown> breakdowns);

// JSON document with every breakdown field; schema_version "1".
std::string emit_breakdowns_json(std::span<const RiskBreakdown> breakdowns);
std::vector<RiskBreakdown> parse_breakdowns_json(std::string_view text);

class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridAxis {
    std::string parameter;
    std::vector<double> values;
};

struct GridSpec {
    GridAxis x;
    GridAxis y;
    std::vector<std::pair<std::string, double>> fixed;
    std::string output;  // a RiskBreakdown quantity name
};

// {"x": {"parameter": ..., "min"/"max"/"step" or "values": [...]},
//  "y": {...}, "fixed": {...}, "output": "..."}
GridSpec parse_grid_spec(std::string_view json_text);

const std::vector<std::string>& sweepable_parameters();
const std::vector<std::string>& output_quantities();

struct GridResult {
    GridSpec spec;
    std::vector<std::vector<double>> cells;  // cells[y][x]
};

// Re-assesses the base inputs once per cell with both axis values (and the
// held-fixed parameters) substituted. Throws GridError for unknown parameter
// or quantity names.
GridResult sweep_grid(const GridSpec& spec, const SegmentInputs& base,
                      const AssessmentConfig& config);

// First row: output quantity name then the x-axis values; each following
// row: the y-axis value then the cells. Lossless at 12 significant digits.
std::string emit_grid_csv(const GridResult& grid);

}  // namespace safer::report
