#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "gew/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result gew_run(std::vector<std::string> args) {
    args.insert(args.begin(), "gew");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = gew::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content = {}) {
    const auto path = std::filesystem::temp_directory_path() / ("gew_cli_" + name);
    if (!content.empty()) std::ofstream(path) << content;
    return path;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("classify family points") {
    auto r = gew_run({"classify", "--alpha", "0", "--beta", "0", "--gamma", "0"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["label"] == "PPT_UNDECIDED");
    CHECK(j["ppt_margin"].get<double>() > 0.0);

    r = gew_run({"classify", "--horodecki-b", "3.5"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["label"] == "BOUND_ENTANGLED");

    r = gew_run({"classify", "--horodecki-b", "0.5"});
    CHECK(nlohmann::json::parse(r.out)["label"] == "NPT_ENTANGLED");

    r = gew_run({"classify", "--horodecki-b", "7"});
    CHECK(r.code == 2);
    r = gew_run({"classify", "--alpha", "1", "--beta", "1"});
    CHECK(r.code == 2);
    CHECK(nlohmann::json::parse(r.out)["label"] == "INVALID_STATE");
}

TEST_CASE("classify matrix files") {
    const auto bad = temp_file("bad.json", R"({"rows":4,"cols":4,"re":[1,0,0,0, 0,1,0,0, 0,0,0,0, 0,0,0,0]})");
    auto r = gew_run({"classify", "--matrix", bad.string()});
    CHECK(r.code == 2);
    CHECK(nlohmann::json::parse(r.out)["label"] == "INVALID_STATE");

    // |phi+><phi+| for two qubits.
    const auto bell = temp_file(
        "bell.json", R"({"rows":4,"cols":4,"re":[0.5,0,0,0.5, 0,0,0,0, 0,0,0,0, 0.5,0,0,0.5],"im":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]})");
    r = gew_run({"classify", "--matrix", bell.string()});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["label"] == "NPT_ENTANGLED");

    CHECK(gew_run({"classify", "--matrix", "/nonexistent/x.json"}).code == 1);
    const auto junk = temp_file("junk.json", "{not json");
    CHECK(gew_run({"classify", "--matrix", junk.string()}).code == 1);
    const auto odd = temp_file("odd.json", R"({"rows":2,"cols":3,"re":[1,0,0,0,0,0]})");
    CHECK(gew_run({"classify", "--matrix", odd.string()}).code == 1);
    CHECK(gew_run({"classify"}).code == 1);
    CHECK(gew_run({"classify", "--alpha", "0", "--horodecki-b", "1"}).code == 1);
}

TEST_CASE("scan output") {
    auto r = gew_run({"scan", "--grid", "3"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "alpha,beta,gamma,a,b,c,pos_margin,ppt_margin,realign_sum,label");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 27);

    const auto parallel = gew_run({"scan", "--grid", "3", "--jobs", "4"});
    CHECK(parallel.out == r.out);

    CHECK(gew_run({"scan", "--box", "0.5,0.5"}).code == 1);
    CHECK(gew_run({"scan", "--box", "1,-1"}).code == 1);
    CHECK(gew_run({"scan", "--grid", "1"}).code == 1);
    CHECK(gew_run({"scan", "--format", "xml"}).code == 1);

    r = gew_run({"scan", "--grid", "21", "--gamma", "0", "--format", "json"});
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.size() == 441);
    for (const auto& row : j) {
        CHECK(row["label"] != "BOUND_ENTANGLED");
        CHECK(row["closed_form_agrees"] == true);
    }
}

TEST_CASE("output files are reproducible") {
    const auto a = temp_file("scan_a.csv"), b = temp_file("scan_b.csv");
    REQUIRE(gew_run({"scan", "--grid", "5", "--out", a.string()}).code == 0);
    REQUIRE(gew_run({"scan", "--grid", "5", "--out", b.string(), "--jobs", "3"}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
    CHECK(gew_run({"mesh", "--grid", "5", "--out", "/nonexistent/dir/m.obj"}).code == 1);
}

TEST_CASE("horodecki sweep") {
    const auto r = gew_run({"horodecki", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"].size() == 21);
    const auto bounds = j["ppt_boundaries"].get<std::vector<double>>();
    REQUIRE(bounds.size() == 2);
    CHECK(bounds[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(bounds[1] == doctest::Approx(4.0).epsilon(1e-6));
    for (const auto& row : j["rows"]) {
        const double b = row["b"];
        if (b > 3.0 + 1e-9 && b <= 4.0 + 1e-9) CHECK(row["label"] == "BOUND_ENTANGLED");
        if (b < 1.0 - 1e-9 || b > 4.0 + 1e-9) CHECK(row["label"] == "NPT_ENTANGLED");
    }
    const auto csv = gew_run({"horodecki", "--grid", "6"});
    CHECK(csv.out.rfind("b,alpha,beta,gamma,", 0) == 0);
}

TEST_CASE("witness-check") {
    auto r = gew_run({"witness-check", "--beta", "0", "--gamma", "0.3333333333333333", "--restarts", "8"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["witness"] == true);
    CHECK(j["all_singular_values_at_most_one"] == true);
    CHECK(gew_run({"witness-check", "--beta", "-0.2222222222222222", "--gamma", "0"}).code == 2);
    CHECK(gew_run({"witness-check"}).code == 1);

    const auto nh = temp_file("nh.json", R"({"rows":4,"cols":4,"re":[0,1,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,0]})");
    CHECK(gew_run({"witness-check", "--matrix", nh.string()}).code == 2);
    // Swap operator: a witness for two qubits.
    const auto swap = temp_file("swap.json", R"({"rows":4,"cols":4,"re":[1,0,0,0, 0,0,1,0, 0,1,0,0, 0,0,0,1]})");
    r = gew_run({"witness-check", "--matrix", swap.string()});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["witness"] == true);
    CHECK(j["detecting"] == true);
    CHECK(j["product_minimum"].get<double>() == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("shift") {
    auto r = gew_run({"shift", "--horodecki-b", "3.5", "--restarts", "8"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    const double star = j["lambda_star"];
    CHECK(star > 0.0);
    CHECK(star < 1.0);
    CHECK(j["entangled_segment"][1] == 1.0);
    CHECK(j.contains("crossing"));
    CHECK(!j["probes"].empty());

    r = gew_run({"shift", "--face", "u+", "--restarts", "8"});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["boundary_distance"].get<double>()) < 1e-3);

    r = gew_run({"shift", "--horodecki-b", "3.5", "--to-horodecki-b", "3.5"});
    CHECK(r.code == 2);
    CHECK(r.err.find("bracket") != std::string::npos);
    CHECK(gew_run({"shift", "--face", "x"}).code == 1);
    CHECK(gew_run({"shift", "--horodecki-b", "1", "--mode", "sideways"}).code == 1);
    CHECK(gew_run({"shift", "--alpha", "2"}).code == 2);
}

TEST_CASE("environment overrides --jobs") {
    const auto reference = gew_run({"scan", "--grid", "4"});
    ::setenv("GEW_JOBS", "3", 1);
    CHECK(gew_run({"scan", "--grid", "4", "--jobs", "1"}).out == reference.out);
    ::setenv("GEW_JOBS", "three", 1);
    CHECK(gew_run({"scan", "--grid", "4"}).code == 1);
    ::unsetenv("GEW_JOBS");
}

TEST_CASE("mesh and usage") {
    const auto r = gew_run({"mesh", "--grid", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("o pyramid") != std::string::npos);
    CHECK(gew_run({}).code == 1);
    CHECK(gew_run({"frobnicate"}).code == 1);
    CHECK(gew_run({"--help"}).code == 0);
}
