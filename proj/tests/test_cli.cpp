#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "safer/report.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SAFER_CLI_PATH;
const std::string kFixtures = SAFER_FIXTURES_DIR;

fs::path work_dir() {
    static const fs::path dir = [] {
        auto path = fs::temp_directory_path() / "safer_cli_tests";
        fs::remove_all(path);
        fs::create_directories(path);
        return path;
    }();
    return dir;
}

int run(const std::string& args) {
    std::string command = kCli + " " + args + " > " + (work_dir() / "stdout.txt").string() +
                          " 2> " + (work_dir() / "stderr.txt").string();
    int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string captured_stdout() { return slurp(work_dir() / "stdout.txt"); }

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

}  // namespace

TEST_CASE("generate is deterministic per seed") {
    auto a = work_dir() / "gen_a.csv";
    auto b = work_dir() / "gen_b.csv";
    REQUIRE(run("generate --count 500 --seed 42 --output " + a.string()) == 0);
    REQUIRE(run("generate --count 500 --seed 42 --output " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(fs::exists(a.string() + ".manifest.json"));

    auto c = work_dir() / "gen_c.csv";
    REQUIRE(run("generate --count 500 --seed 43 --output " + c.string()) == 0);
    CHECK(slurp(a) != slurp(c));

    auto single = work_dir() / "gen_one.csv";
    REQUIRE(run("generate --count 1 --output " + single.string()) == 0);
    auto text = slurp(single);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);  // header plus one row
}

TEST_CASE("assess scores the worked-example fixture") {
    auto out = work_dir() / "reference.json";
    int code = run("assess --input " + kFixtures + "/reference_record.csv --histories " +
                   kFixtures + "/reference_histories.csv --output " + out.string() +
                   " --format json --now 2018-12-31T00:00:00Z");
    REQUIRE(code == 0);
    auto breakdowns = safer::report::parse_breakdowns_json(slurp(out));
    REQUIRE(breakdowns.size() == 1);
    CHECK(breakdowns[0].r_cd == 28.0);
    CHECK(breakdowns[0].band == safer::RiskBand::Moderate);
    CHECK(breakdowns[0].assessed_at == 1546214400);
    CHECK_FALSE(fs::exists(out.string() + ".errors.csv"));
}

TEST_CASE("assess reruns are byte-identical") {
    auto out = work_dir() / "rerun.csv";
    std::string command = "assess --input " + kFixtures + "/reference_record.csv --histories " +
                          kFixtures + "/reference_histories.csv --config " + kFixtures +
                          "/default_config.json --output " + out.string() +
                          " --now 2018-12-31T00:00:00Z";
    REQUIRE(run(command) == 0);
    auto first = slurp(out);
    REQUIRE(run(command) == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("an all-malformed corpus fails with a populated sidecar") {
    auto corpus = work_dir() / "broken.csv";
    write(corpus,
          "Sample,Code Length,Developer,Publisher,Year,Language,Update Frequency,Forks,"
          "Downloads,Unresolved Vulnerabilities,Known Vulnerabilities,Dependencies,Rating,"
          "Code Coverage,Context\n"
          "1,222,V,L,2019,Python,0.77,562,3.5,0,2294,26,5037,0.97,0.2\n"
          "2,222,V,L,2019,Python,0.77,562,100,0,2294,26,5037,1.7,0.2\n");
    auto out = work_dir() / "broken_report.csv";
    int code = run("assess --input " + corpus.string() + " --output " + out.string() +
                   " --now 0");
    CHECK(code == 1);
    auto report = slurp(out);
    CHECK(report == "Sample,Assessed At,Segments Defaulted,R_Dev,R_Pb,R_ur,R_F,R_FP,Band\n");
    auto sidecar = slurp(out.string() + ".errors.csv");
    CHECK(sidecar.find("non-integer downloads") != std::string::npos);
    CHECK(sidecar.find("coverage out of range") != std::string::npos);
}

TEST_CASE("a partly bad corpus still succeeds") {
    auto corpus = work_dir() / "mixed.csv";
    write(corpus,
          "Sample,Code Length,Developer,Publisher,Year,Language,Update Frequency,Forks,"
          "Downloads,Unresolved Vulnerabilities,Known Vulnerabilities,Dependencies,Rating,"
          "Code Coverage,Context\n"
          "1,222,V,L,2019,Python,0.77,562,15181,0,2294,26,5037,0.97,0.2\n"
          "2,222,V,L,2019,Python,0.77,562,3.5,0,2294,26,5037,0.97,0.2\n");
    auto out = work_dir() / "mixed_report.csv";
    CHECK(run("assess --input " + corpus.string() + " --output " + out.string() + " --now 0") ==
          0);
    auto sidecar = slurp(out.string() + ".errors.csv");
    CHECK(sidecar.find("non-integer downloads") != std::string::npos);
}

TEST_CASE("self-test battery passes") {
    CHECK(run("validate --self-test") == 0);
    auto text = captured_stdout();
    CHECK(text.find("6/6 passed") != std::string::npos);
}

TEST_CASE("validate reports hard errors with a nonzero exit") {
    auto corpus = work_dir() / "invalid.csv";
    write(corpus,
          "Sample,Code Length,Developer,Publisher,Year,Language,Update Frequency,Forks,"
          "Downloads,Unresolved Vulnerabilities,Known Vulnerabilities,Dependencies,Rating,"
          "Code Coverage,Context\n"
          "1,222,V,L,2019,Python,0.77,562,15181,0,2294,26,5037,0.97,0.4\n");
    CHECK(run("validate --input " + corpus.string()) == 1);
    CHECK(captured_stdout().find("unknown context") != std::string::npos);

    CHECK(run("validate --input " + kFixtures + "/reference_record.csv") == 0);
}

TEST_CASE("grid emits the requested sweep") {
    auto out = work_dir() / "grid.csv";
    int code = run("grid --spec " + kFixtures + "/grid_context_vup.json --input " + kFixtures +
                   "/reference_record.csv --histories " + kFixtures +
                   "/reference_histories.csv --output " + out.string());
    REQUIRE(code == 0);
    auto text = slurp(out);
    CHECK(text.rfind("penalty,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 22);  // header + 21 v_up rows

    auto weight_grid = work_dir() / "grid_wdev.csv";
    code = run("grid --spec " + kFixtures + "/grid_wdev_coverage.json --input " + kFixtures +
               "/reference_record.csv --histories " + kFixtures +
               "/reference_histories.csv --output " + weight_grid.string());
    REQUIRE(code == 0);
    auto weight_text = slurp(weight_grid);
    CHECK(weight_text.rfind("final_risk_penalized,", 0) == 0);
    CHECK(std::count(weight_text.begin(), weight_text.end(), '\n') == 22);
}

TEST_CASE("usage problems exit with 2") {
    CHECK(run("assess --input missing.csv") == 2);           // --output missing
    CHECK(run("frobnicate") == 2);                           // unknown subcommand
    CHECK(run("generate --count 5 --seed 1") == 2);          // --output missing
    auto bad_config = work_dir() / "bad_config.json";
    write(bad_config, "{\"band_thresholds\": [0.9, 0.5, 0.1]}");
    CHECK(run("assess --input " + kFixtures + "/reference_record.csv --config " +
              bad_config.string() + " --output " + (work_dir() / "x.csv").string()) == 2);
    auto bad_grid = work_dir() / "bad_grid.json";
    write(bad_grid, R"({"x": {"parameter": "warp", "values": [1]},
                        "y": {"parameter": "v_up", "values": [0]}, "output": "penalty"})");
    CHECK(run("grid --spec " + bad_grid.string() + " --input " + kFixtures +
              "/reference_record.csv --output " + (work_dir() / "g.csv").string()) == 2);
}

TEST_CASE("missing input files exit with 1") {
    CHECK(run("assess --input nowhere.csv --output " + (work_dir() / "n.csv").string()) == 1);
    CHECK(run("validate --input nowhere.csv") == 1);
}

TEST_CASE("normalize writes a schema-conformant corpus row") {
    auto out = work_dir() / "normalized.csv";
    int code = run("normalize --input " + kFixtures +
                   "/snapshot_codehost.json --context security --output " + out.string());
    REQUIRE(code == 0);
    auto text = slurp(out);
    CHECK(text.rfind("Sample,Code Length,Developer,", 0) == 0);
    CHECK(text.find("acme/widget-engine") != std::string::npos);
    CHECK(captured_stdout().find("gap: downloads") != std::string::npos);

    CHECK(run("normalize --input " + kFixtures +
              "/snapshot_codehost.json --context firmware --output " + out.string()) == 2);
}

TEST_CASE("snapshot-assess scores a snapshot end to end") {
    auto out = work_dir() / "snapshot_report.json";
    int code = run("snapshot-assess --input " + kFixtures +
                   "/snapshot_registry.json --context other --output " + out.string() +
                   " --format json --now 2024-03-15T00:00:00Z");
    REQUIRE(code == 0);
    auto breakdowns = safer::report::parse_breakdowns_json(slurp(out));
    REQUIRE(breakdowns.size() == 1);
    // No actor histories were supplied, so the developer segment defaults.
    CHECK(breakdowns[0].r_dev == 1.0);
    CHECK(breakdowns[0].segment_defaulted.front() == "developer");
}
