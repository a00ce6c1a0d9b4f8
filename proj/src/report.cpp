#include "safer/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include <json.hpp>

namespace safer::report {

namespace {

using ordered_json = nlohmann::ordered_json;

// Decimal digit string of |value| rounded half away from zero to `digits`
// significant digits, plus the decimal exponent of the leading digit.
struct Decimal {
    std::string digits;
    int exponent = 0;
    bool negative = false;
};

Decimal round_decimal(double value, int digits) {
    Decimal out;
    out.negative = std::signbit(value);

    // Print with generous precision, then round the digit string ourselves;
    // printf rounds ties to even, the report format wants them away from zero.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*e", 24, std::abs(value));
    std::string text(buf);

    auto e_pos = text.find('e');
    std::string mantissa = text.substr(0, e_pos);
    out.exponent = std::stoi(text.substr(e_pos + 1));
    mantissa.erase(std::remove(mantissa.begin(), mantissa.end(), '.'), mantissa.end());

    if (static_cast<int>(mantissa.size()) > digits) {
        bool round_up = mantissa[static_cast<std::size_t>(digits)] >= '5';
        mantissa.resize(static_cast<std::size_t>(digits));
        if (round_up) {
            int i = digits - 1;
            while (i >= 0 && mantissa[static_cast<std::size_t>(i)] == '9') {
                mantissa[static_cast<std::size_t>(i)] = '0';
                --i;
            }
            if (i < 0) {
                mantissa.insert(mantissa.begin(), '1');
                mantissa.pop_back();
                ++out.exponent;
            } else {
                ++mantissa[static_cast<std::size_t>(i)];
            }
        }
    }
    while (mantissa.size() > 1 && mantissa.back() == '0') mantissa.pop_back();
    out.digits = std::move(mantissa);
    return out;
}

}  // namespace

std::string format_real(double value, int significant_digits) {
    if (!std::isfinite(value)) return value > 0 ? "inf" : (value < 0 ? "-inf" : "nan");
    if (value == 0.0) return "0";

    Decimal d = round_decimal(value, significant_digits);
    if (d.digits == "0") return "0";

    std::string out = d.negative ? "-" : "";
    // Plain decimal for everything a report realistically holds; fall back
    // to exponent notation only for extreme magnitudes.
    if (d.exponent >= -9 && d.exponent <= 17) {
        if (d.exponent < 0) {
            out += "0.";
            out.append(static_cast<std::size_t>(-d.exponent - 1), '0');
            out += d.digits;
        } else if (d.exponent + 1 >= static_cast<int>(d.digits.size())) {
            out += d.digits;
            out.append(static_cast<std::size_t>(d.exponent + 1) - d.digits.size(), '0');
        } else {
            out += d.digits.substr(0, static_cast<std::size_t>(d.exponent) + 1);
            out += ".";
            out += d.digits.substr(static_cast<std::size_t>(d.exponent) + 1);
        }
        return out;
    }
    out += d.digits.substr(0, 1);
    if (d.digits.size() > 1) out += "." + d.digits.substr(1);
    out += "e" + std::to_string(d.exponent);
    return out;
}

namespace {

std::string defaulted_cell(const std::vector<std::string>& segments) {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) out.push_back(';');
        out += segments[i];
    }
    return out;
}

std::string quoted_cell(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

std::string emit_breakdowns_csv(std::span<const RiskBreakdown> breakdowns) {
    std::string out = "Sample,Assessed At,Segments Defaulted,R_Dev,R_Pb,R_ur,R_F,R_FP,Band\n";
    for (const auto& b : breakdowns) {
        out += quoted_cell(b.software_id);
        out += ",";
        out += format_timestamp(b.assessed_at);
        out += ",";
        out += defaulted_cell(b.segment_defaulted);
        out += ",";
        out += format_real(b.r_dev);
        out += ",";
        out += format_real(b.r_pb);
        out += ",";
        out += format_real(b.r_ur);
        out += ",";
        out += format_real(b.final_risk);
        out += ",";
        out += format_real(b.final_risk_penalized);
        out += ",";
        out += band_display(b.band);
        out += "\n";
    }
    return out;
}

std::string emit_breakdowns_json(std::span<const RiskBreakdown> breakdowns) {
    ordered_json doc;
    doc["schema_version"] = "1";
    doc["breakdowns"] = ordered_json::array();
    for (const auto& b : breakdowns) {
        ordered_json j;
        j["software_id"] = b.software_id;
        j["assessed_at"] = format_timestamp(b.assessed_at);
        j["r_cd"] = b.r_cd;
        j["r_cs"] = b.r_cs;
        j["r_pl"] = b.r_pl;
        j["r_dev"] = b.r_dev;
        j["w_lc"] = b.w_lc;
        j["w_cd"] = b.w_cd;
        j["w_cs"] = b.w_cs;
        j["w_pl"] = b.w_pl;
        j["r_pb"] = b.r_pb;
        j["r_ur"] = b.r_ur;
        j["w_dev"] = b.w_dev;
        j["w_pb"] = b.w_pb;
        j["w_ur"] = b.w_ur;
        j["penalty"] = b.penalty;
        j["final_risk"] = b.final_risk;
        j["final_risk_penalized"] = b.final_risk_penalized;
        j["band"] = std::string(band_name(b.band));
        j["segment_defaulted"] = b.segment_defaulted;
        doc["breakdowns"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::vector<RiskBreakdown> parse_breakdowns_json(std::string_view text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.value("schema_version", std::string()) != "1") {
        throw std::runtime_error("unsupported breakdown schema_version");
    }
    std::vector<RiskBreakdown> out;
    for (const auto& j : doc.at("breakdowns")) {
        RiskBreakdown b;
        b.software_id = j.at("software_id").get<std::string>();
        auto ts = parse_timestamp(j.at("assessed_at").get<std::string>());
        if (!ts) throw std::runtime_error("breakdown assessed_at is not a timestamp");
        b.assessed_at = *ts;
        b.r_cd = j.at("r_cd").get<double>();
        b.r_cs = j.at("r_cs").get<double>();
        b.r_pl = j.at("r_pl").get<double>();
        b.r_dev = j.at("r_dev").get<double>();
        b.w_lc = j.at("w_lc").get<double>();
        b.w_cd = j.at("w_cd").get<double>();
        b.w_cs = j.at("w_cs").get<double>();
        b.w_pl = j.at("w_pl").get<double>();
        b.r_pb = j.at("r_pb").get<double>();
        b.r_ur = j.at("r_ur").get<double>();
        b.w_dev = j.at("w_dev").get<double>();
        b.w_pb = j.at("w_pb").get<double>();
        b.w_ur = j.at("w_ur").get<double>();
        b.penalty = j.at("penalty").get<double>();
        b.final_risk = j.at("final_risk").get<double>();
        b.final_risk_penalized = j.at("final_risk_penalized").get<double>();
        auto band = band_from_name(j.at("band").get<std::string>());
        if (!band) throw std::runtime_error("unknown band name in breakdown");
        b.band = *band;
        b.segment_defaulted = j.at("segment_defaulted").get<std::vector<std::string>>();
        out.push_back(std::move(b));
    }
    return out;
}

namespace {

struct ParameterSetter {
    std::string name;
    std::function<void(SegmentInputs&, AssessOverrides&, double)> apply;
};

const std::vector<ParameterSetter>& parameter_setters() {
    static const std::vector<ParameterSetter> setters = [] {
        std::vector<ParameterSetter> s;
        auto int_field = [](std::optional<long long> SoftwareRecord::* member) {
            return [member](SegmentInputs& inputs, AssessOverrides&, double v) {
                inputs.record.*member = std::llround(v);
            };
        };
        s.push_back({"dependency_count", int_field(&SoftwareRecord::dependency_count)});
        s.push_back({"code_length", int_field(&SoftwareRecord::code_length)});
        s.push_back({"forks", int_field(&SoftwareRecord::forks)});
        s.push_back({"downloads", int_field(&SoftwareRecord::downloads)});
        s.push_back({"rating_count", int_field(&SoftwareRecord::rating_count)});
        s.push_back({"vulnerabilities_unresolved",
                     int_field(&SoftwareRecord::vulnerabilities_unresolved)});
        s.push_back(
            {"vulnerabilities_total", int_field(&SoftwareRecord::vulnerabilities_total)});
        s.push_back({"year", [](SegmentInputs& inputs, AssessOverrides&, double v) {
                         inputs.record.year = static_cast<int>(std::llround(v));
                     }});
        s.push_back({"code_coverage", [](SegmentInputs& inputs, AssessOverrides&, double v) {
                         inputs.record.code_coverage = v;
                     }});
        s.push_back({"update_frequency", [](SegmentInputs& inputs, AssessOverrides&, double v) {
                         inputs.record.update_frequency = v;
                     }});
        // Penalty inputs are substituted directly so hypothetical context
        // weights outside the configured table can be explored.
        s.push_back({"context", [](SegmentInputs&, AssessOverrides& o, double v) {
                         o.context_weight = v;
                     }});
        s.push_back({"v_up", [](SegmentInputs&, AssessOverrides& o, double v) {
                         o.unresolved_proportion = v;
                     }});
        s.push_back({"r_dev", [](SegmentInputs&, AssessOverrides& o, double v) { o.r_dev = v; }});
        s.push_back({"r_pb", [](SegmentInputs&, AssessOverrides& o, double v) { o.r_pb = v; }});
        s.push_back({"r_ur", [](SegmentInputs&, AssessOverrides& o, double v) { o.r_ur = v; }});
        s.push_back({"w_dev", [](SegmentInputs&, AssessOverrides& o, double v) { o.w_dev = v; }});
        s.push_back({"w_pb", [](SegmentInputs&, AssessOverrides& o, double v) { o.w_pb = v; }});
        s.push_back({"w_ur", [](SegmentInputs&, AssessOverrides& o, double v) { o.w_ur = v; }});
        return s;
    }();
    return setters;
}

using QuantityGetter = std::pair<std::string, double RiskBreakdown::*>;

const std::vector<QuantityGetter>& quantity_getters() {
    static const std::vector<QuantityGetter> getters{
        {"r_cd", &RiskBreakdown::r_cd},
        {"r_cs", &RiskBreakdown::r_cs},
        {"r_pl", &RiskBreakdown::r_pl},
        {"r_dev", &RiskBreakdown::r_dev},
        {"w_lc", &RiskBreakdown::w_lc},
        {"w_cd", &RiskBreakdown::w_cd},
        {"w_cs", &RiskBreakdown::w_cs},
        {"w_pl", &RiskBreakdown::w_pl},
        {"r_pb", &RiskBreakdown::r_pb},
        {"r_ur", &RiskBreakdown::r_ur},
        {"w_dev", &RiskBreakdown::w_dev},
        {"w_pb", &RiskBreakdown::w_pb},
        {"w_ur", &RiskBreakdown::w_ur},
        {"penalty", &RiskBreakdown::penalty},
        {"final_risk", &RiskBreakdown::final_risk},
        {"final_risk_penalized", &RiskBreakdown::final_risk_penalized},
    };
    return getters;
}

std::string joined_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

const ParameterSetter& find_setter(const std::string& name) {
    for (const auto& setter : parameter_setters()) {
        if (setter.name == name) return setter;
    }
    throw GridError("unknown sweep parameter '" + name +
                    "'; sweepable parameters: " + joined_names(sweepable_parameters()));
}

double RiskBreakdown::* find_quantity(const std::string& name) {
    for (const auto& [quantity, member] : quantity_getters()) {
        if (quantity == name) return member;
    }
    throw GridError("unknown output quantity '" + name +
                    "'; available quantities: " + joined_names(output_quantities()));
}

GridAxis parse_axis(const nlohmann::json& j, const char* which) {
    if (!j.is_object() || !j.contains("parameter")) {
        throw GridError(std::string("grid axis ") + which + " needs a parameter name");
    }
    GridAxis axis;
    axis.parameter = j["parameter"].get<std::string>();
    if (j.contains("values")) {
        axis.values = j["values"].get<std::vector<double>>();
    } else {
        if (!j.contains("min") || !j.contains("max") || !j.contains("step")) {
            throw GridError(std::string("grid axis ") + which +
                            " needs either values or min/max/step");
        }
        double min = j["min"].get<double>();
        double max = j["max"].get<double>();
        double step = j["step"].get<double>();
        if (!(step > 0.0)) throw GridError(std::string("grid axis ") + which + " step must be > 0");
        if (max < min) throw GridError(std::string("grid axis ") + which + " has max < min");
        for (int k = 0;; ++k) {
            double value = min + step * k;
            if (value > max + step * 1e-9) break;
            axis.values.push_back(std::min(value, max));
        }
    }
    if (axis.values.empty()) {
        throw GridError(std::string("grid axis ") + which + " has no values");
    }
    return axis;
}

}  // namespace

const std::vector<std::string>& sweepable_parameters() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& setter : parameter_setters()) out.push_back(setter.name);
        return out;
    }();
    return names;
}

const std::vector<std::string>& output_quantities() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, member] : quantity_getters()) out.push_back(name);
        return out;
    }();
    return names;
}

GridSpec parse_grid_spec(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw GridError(std::string("grid spec parse error: ") + e.what());
    }
    GridSpec spec;
    spec.x = parse_axis(doc.at("x"), "x");
    spec.y = parse_axis(doc.at("y"), "y");
    if (spec.x.parameter == spec.y.parameter) {
        throw GridError("grid axes must name distinct parameters");
    }
    if (doc.contains("fixed")) {
        for (const auto& [key, value] : doc["fixed"].items()) {
            spec.fixed.push_back({key, value.get<double>()});
        }
    }
    spec.output = doc.value("output", std::string("final_risk_penalized"));

    find_setter(spec.x.parameter);
    find_setter(spec.y.parameter);
    for (const auto& [name, value] : spec.fixed) find_setter(name);
    find_quantity(spec.output);
    return spec;
}

GridResult sweep_grid(const GridSpec& spec, const SegmentInputs& base,
                      const AssessmentConfig& config) {
    const auto& x_setter = find_setter(spec.x.parameter);
    const auto& y_setter = find_setter(spec.y.parameter);
    double RiskBreakdown::* quantity = find_quantity(spec.output);

    GridResult result;
    result.spec = spec;
    result.cells.reserve(spec.y.values.size());
    for (double y : spec.y.values) {
        std::vector<double> row;
        row.reserve(spec.x.values.size());
        for (double x : spec.x.values) {
            SegmentInputs inputs = base;
            AssessOverrides overrides;
            for (const auto& [name, value] : spec.fixed) {
                find_setter(name).apply(inputs, overrides, value);
            }
            y_setter.apply(inputs, overrides, y);
            x_setter.apply(inputs, overrides, x);
            RiskBreakdown breakdown = assess(inputs, config, 0, overrides);
            row.push_back(breakdown.*quantity);
        }
        result.cells.push_back(std::move(row));
    }
    return result;
}

std::string emit_grid_csv(const GridResult& grid) {
    std::string out = grid.spec.output;
    for (double x : grid.spec.x.values) {
        out += ",";
        out += format_real(x);
    }
    out += "\n";
    for (std::size_t yi = 0; yi < grid.cells.size(); ++yi) {
        out += format_real(grid.spec.y.values[yi]);
        for (double cell : grid.cells[yi]) {
            out += ",";
            out += format_real(cell);
        }
        out += "\n";
    }
    return out;
}

}  // namespace safer::report
