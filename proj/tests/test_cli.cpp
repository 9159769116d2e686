#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsfrac/cli.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = tsfrac::run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path write_temp(const char* name, const json& j) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream f(path);
    f << j.dump(2);
    return path;
}

std::filesystem::path constant_problem() {
    return write_temp("tsfrac_cli_const.json",
                      json{{"alpha", 0.5},
                           {"horizon", 1.0},
                           {"f", "1"},
                           {"timescale", {{"kind", "interval"}, {"lo", 0.0}, {"hi", 1.0}}}});
}

// Last field of the final CSV data row; data rows start with a digit or sign
// and the summary lines that follow the table do not.
double last_csv_value(const std::string& text, int column) {
    std::istringstream in(text);
    std::string line, last;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty() || (!std::isdigit(static_cast<unsigned char>(line[0])) &&
                             line[0] != '-' && line[0] != '.'))
            break;
        last = line;
    }
    std::istringstream row(last);
    std::string cell;
    for (int i = 0; i <= column; ++i) std::getline(row, cell, ',');
    return std::stod(cell);
}

// The JSON payload embedded in a command's stdout, ignoring summary lines.
json payload_of(const std::string& text) {
    auto lo = text.find('{');
    auto hi = text.rfind('}');
    REQUIRE(lo != std::string::npos);
    REQUIRE(hi != std::string::npos);
    return json::parse(text.substr(lo, hi - lo + 1));
}

} // namespace

TEST_CASE("solve reads a problem file and writes csv") {
    auto res = run({"solve", "--problem", constant_problem().string()});
    REQUIRE(res.code == 0);
    CHECK(res.out.find("t,y,residual") != std::string::npos);
    double y_end = last_csv_value(res.out.substr(res.out.find("t,y,residual")), 1);
    CHECK(y_end == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-8));
}

TEST_CASE("solve output is deterministic") {
    std::string path = constant_problem().string();
    auto a = run({"solve", "--problem", path});
    auto b = run({"solve", "--problem", path});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
}

TEST_CASE("solve emits json on request") {
    auto res = run({"solve", "--problem", constant_problem().string(), "--format", "json"});
    REQUIRE(res.code == 0);
    json j = payload_of(res.out);
    CHECK(j["converged"] == true);
    CHECK(j["iterations"] == 2);
    REQUIRE(j["t"].size() == j["y"].size());
    CHECK(j["contraction"]["satisfied"] == true);
}

TEST_CASE("solve writes to a file when asked") {
    auto out_path = std::filesystem::temp_directory_path() / "tsfrac_cli_out.json";
    std::filesystem::remove(out_path);
    auto res = run({"solve", "--problem", constant_problem().string(), "--format", "json",
                    "--out", out_path.string()});
    REQUIRE(res.code == 0);
    std::ifstream f(out_path);
    REQUIRE(f.good());
    json j = json::parse(f);
    CHECK(j["converged"] == true);
}

TEST_CASE("solve reports non-convergence with exit code 1") {
    auto res = run({"solve", "--f", "10*y + 1", "--alpha", "0.5", "--horizon", "1",
                    "--timescale", R"({"kind":"interval","lo":0,"hi":1})", "--max-iter", "5"});
    CHECK(res.code == 1);
    CHECK(res.err.find("did not reach") != std::string::npos);
}

TEST_CASE("fracint evaluates inline problems") {
    auto res = run({"fracint", "--alpha", "0.5", "--f", "1", "--timescale",
                    R"({"kind":"interval","lo":0,"hi":1})", "--t", "1"});
    REQUIRE(res.code == 0);
    double v = last_csv_value(res.out, 1);
    CHECK(v == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-8));
}

TEST_CASE("fracint cross-checks against the discrete oracle") {
    auto res = run({"fracint", "--alpha", "0.5", "--f", "t", "--timescale",
                    R"({"kind":"uniform","h":1,"window":[0,10]})", "--t", "3", "--t", "7",
                    "--oracle"});
    REQUIRE(res.code == 0);
    CHECK(res.out.find("oracle") != std::string::npos);
    std::istringstream in(res.out);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto pos = line.rfind(',');
        CHECK(std::stod(line.substr(pos + 1)) <= 1e-12);
    }
}

TEST_CASE("fracderiv fails cleanly at a left-scattered maximum") {
    auto res = run({"fracderiv", "--alpha", "0.5", "--f", "t", "--timescale",
                    R"({"kind":"points","xs":[0,1,2]})", "--t", "2"});
    CHECK(res.code == 1);
    CHECK_FALSE(res.err.empty());
}

TEST_CASE("malformed expressions exit with usage code and a position") {
    auto res = run({"fracint", "--alpha", "0.5", "--f", "t*(", "--timescale",
                    R"({"kind":"interval","lo":0,"hi":1})", "--t", "1"});
    CHECK(res.code == 2);
    CHECK(res.err.find("position") != std::string::npos);
}

TEST_CASE("check reports the contraction bound") {
    auto res = run({"check", "--problem", constant_problem().string(), "--lipschitz", "0.1",
                    "--format", "json"});
    REQUIRE(res.code == 0);
    json j = payload_of(res.out);
    CHECK(j["lipschitz"] == 0.1);
    CHECK(j["lipschitz_source"] == "given");
    CHECK(j["satisfied"] == true);
    CHECK(j["max_bound"].get<double>() > 0.0);
}

TEST_CASE("reproduce-example4 prints the worked tables") {
    auto res = run({"reproduce-example4"});
    REQUIRE(res.code == 0);
    CHECK(res.out.find("M_alpha") != std::string::npos);
    CHECK(res.out.find("2.99999") != std::string::npos);
    CHECK(res.out.find("converged") != std::string::npos);
}

TEST_CASE("ts-info classifies points") {
    auto res = run({"ts-info", "--timescale",
                    R"({"kind":"geometric","q":2,"include_zero":true,"window":[0,16]})",
                    "--t", "4", "--t", "3"});
    REQUIRE(res.code == 0);
    json j = json::parse(res.out);
    CHECK(j["points"][0]["member"] == true);
    CHECK(j["points"][0]["sigma"] == 8.0);
    CHECK(j["points"][0]["rho"] == 2.0);
    CHECK(j["points"][1]["member"] == false);
    CHECK(j["scattered_count"].get<int>() > 0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"solve", "--no-such-flag"}).code == 2);
    CHECK(run({"fracint", "--alpha", "0.5"}).code == 2); // missing --f and --t
    CHECK(run({"solve", "--problem", "/nonexistent/file.json"}).code == 2);
}

TEST_CASE("help is available and exits cleanly") {
    auto res = run({"--help"});
    CHECK(res.code == 0);
    CHECK(res.out.find("solve") != std::string::npos);
    auto sub = run({"solve", "--help"});
    CHECK(sub.code == 0);
    CHECK(sub.out.find("--horizon") != std::string::npos);
}
