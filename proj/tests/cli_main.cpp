#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
    const std::string command = std::string(MBQC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buffer[4096];
    while (std::size_t got = std::fread(buffer, 1, sizeof buffer, pipe)) {
        output.append(buffer, got);
    }
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "mbqcfid-cli-tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string state_file(const std::string& name, const std::string& build_args) {
    const auto path = (temp_dir() / name).string();
    const RunResult r = run_cli(build_args + " --out " + path);
    REQUIRE(r.exit_code == 0);
    return path;
}

}  // namespace

TEST_CASE("version flag") {
    const RunResult r = run_cli("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("mbqcfid") != std::string::npos);
}

TEST_CASE("build emits the chain generators") {
    const RunResult r = run_cli("build --type cluster1d --n 3");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    CHECK(doc.at("n") == 3);
    CHECK(doc.at("generators") == json::array({"+XZI", "+ZXZ", "+IZX"}));
    CHECK(doc.at("outputs") == json::array({2}));
    CHECK(doc.at("provenance").at("seed") == 123456789);
}

TEST_CASE("build validates sizes and custom input") {
    CHECK(run_cli("build --type cluster1d --n 1").exit_code == 2);
    CHECK(run_cli("build --type cluster2d --rows 1 --cols 4").exit_code == 2);
    CHECK(run_cli("build --type nonsense --n 3").exit_code == 2);

    const auto dir = temp_dir();
    const auto bad = dir / "bad_state.json";
    {
        json doc;
        doc["n"] = 3;
        doc["generators"] = {"+XZI", "+ZXZ", "+IZX"};
        doc["outputs"] = {2};
        doc["order"] = {0, 1};
        doc["r_ops"] = {{"0", "+IZX"}, {"1", "+IIX"}};  // broken correction
        std::ofstream out(bad);
        out << doc.dump();
    }
    CHECK(run_cli("build --type custom --in " + bad.string()).exit_code == 2);
    CHECK(run_cli("build --type custom --in " + (dir / "missing.json").string()).exit_code == 4);

    const auto good = state_file("c4.json", "build --type cluster1d --n 4");
    const RunResult rebuilt = run_cli("build --type custom --in " + good);
    CHECK(rebuilt.exit_code == 0);
    CHECK(json::parse(rebuilt.output).at("generators").size() == 4);
}

TEST_CASE("spectrum reports the known gaps") {
    const auto c8 = state_file("c8.json", "build --type cluster1d --n 8");
    const json doc = json::parse(run_cli("spectrum --state " + c8).output);
    CHECK(doc.at("nu").get<double>() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(doc.at("max").get<double>() == doctest::Approx(1.0));
    CHECK(doc.at("max_multiplicity") == 1);

    const auto c2 = state_file("c2.json", "build --type cluster1d --n 2");
    const json two = json::parse(run_cli("spectrum --state " + c2).output);
    CHECK(two.at("nu").get<double>() == doctest::Approx(0.5));

    const auto grid = state_file("g34.json", "build --type cluster2d --rows 3 --cols 4");
    const RunResult csv = run_cli("spectrum --state " + grid + " --csv");
    CHECK(csv.exit_code == 0);
    CHECK(csv.output.find("max,beta,tau,nu,max_multiplicity") == 0);
    std::string row = csv.output.substr(csv.output.find('\n') + 1);
    std::vector<double> fields;
    std::stringstream row_ss(row);
    std::string field;
    while (std::getline(row_ss, field, ',')) {
        fields.push_back(std::stod(field));
    }
    REQUIRE(fields.size() == 5);
    CHECK(fields[3] >= 0.25 - 1e-9);  // nu for a grid
    CHECK(fields[3] <= 0.5 + 1e-9);

    CHECK(run_cli("spectrum --state " + c8 + " --spectral-cap 4").exit_code == 3);
}

TEST_CASE("omega term listing matches the closed form") {
    const auto c3 = state_file("c3.json", "build --type cluster1d --n 3");
    const json doc = json::parse(run_cli("omega --state " + c3).output);
    CHECK(doc.at("n") == 3);
    REQUIRE(doc.at("terms").size() == 4);
    double sum = 0.0;
    for (const auto& term : doc.at("terms")) {
        sum += term.at("coeff").get<double>();
        if (term.at("word") == "+YXY") {
            CHECK(term.at("coeff").get<double>() == -0.125);
            CHECK(term.at("coeff_exact") == json::array({-1, 3}));
        }
    }
    CHECK(sum == doctest::Approx(0.75));  // 1 - 2 * (1/8)

    const json recursive =
        json::parse(run_cli("omega --state " + c3 + " --method recursive").output);
    CHECK(recursive.at("terms") == doc.at("terms"));

    const json fixed = json::parse(run_cli("omega --state " + c3 + " --mu X,X").output);
    CHECK(fixed.at("terms").size() == 2);
    CHECK(run_cli("omega --state " + c3 + " --mu X").exit_code == 2);
}

TEST_CASE("sampling emits one JSON line per draw with exact probabilities") {
    const auto c4 = state_file("c4s.json", "build --type cluster1d --n 4");
    const RunResult r = run_cli("sample --state " + c4 + " --count 25 --seed 5");
    REQUIRE(r.exit_code == 0);
    std::size_t lines = 0;
    std::stringstream ss(r.output);
    std::string line;
    while (std::getline(ss, line)) {
        const json entry = json::parse(line);
        CHECK(entry.at("word").get<std::string>().size() == 5);  // sign + 4 letters
        CHECK(entry.at("log2_prob").get<int>() <= -1);
        ++lines;
    }
    CHECK(lines == 25);

    const RunResult again = run_cli("sample --state " + c4 + " --count 25 --seed 5");
    CHECK(again.output == r.output);
    const RunResult other = run_cli("sample --state " + c4 + " --count 25 --seed 6");
    CHECK(other.output != r.output);
}

TEST_CASE("simulate agrees with the exact expectation") {
    const auto c4 = state_file("c4sim.json", "build --type cluster1d --n 4");
    const json doc = json::parse(
        run_cli("simulate --state " + c4 + " --noise global_mix:0.2 --angles clifford_exact")
            .output);
    CHECK(doc.at("mean").get<double>() ==
          doctest::Approx(doc.at("exact").get<double>()).epsilon(1e-9));
    CHECK(doc.at("exact").get<double>() == doctest::Approx(0.8 + 0.2 * 0.5).epsilon(1e-9));
}

TEST_CASE("estimate honours the shot budget") {
    const auto c4 = state_file("c4est.json", "build --type cluster1d --n 4");
    const json doc = json::parse(
        run_cli("estimate --state " + c4 +
                " --target mbqc --eps 0.1 --delta 0.1 --noise depolarizing:0.05 --seed 9")
            .output);
    CHECK(doc.at("samples_used").get<std::size_t>() == 600);  // ceil(200 ln 20)
    CHECK(doc.at("estimate").get<double>() > 0.5);
    CHECK(json::parse(run_cli("estimate --state " + c4 + " --target state --eps 0.1 --delta 0.1")
                          .output)
              .at("estimate")
              .get<double>() == 1.0);
    CHECK(run_cli("estimate --state " + c4 + " --target mbqc --eps 0 --delta 0.1").exit_code == 2);
}

TEST_CASE("bounds verdicts") {
    const json doc =
        json::parse(run_cli("bounds --fs 0.9 --fmbqc 0.95 --nu 0.25").output);
    CHECK(doc.at("holds") == true);
    CHECK(doc.at("upper_slack").get<double>() == doctest::Approx(0.05));
    const json bad = json::parse(run_cli("bounds --fs 0.9 --fmbqc 0.8 --nu 0.25").output);
    CHECK(bad.at("holds") == false);
}

TEST_CASE("consolidated report on a mixed state") {
    const auto c6 = state_file("c6.json", "build --type cluster1d --n 6");
    const RunResult r = run_cli("report --state " + c6 +
                                " --noise global_mix:0.2 --eps 0.08 --delta 0.1 --mc-samples 24");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    CHECK(doc.at("nu").get<double>() == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(doc.at("f_s").at("exact").get<double>() == doctest::Approx(0.8 + 0.2 / 64).epsilon(1e-9));
    CHECK(doc.at("f_mbqc").at("exact").get<double>() == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(doc.at("bounds").at("holds") == true);
    CHECK(std::abs(doc.at("f_mbqc").at("estimated").get<double>() - 0.9) < 0.08 + 1e-9);
    CHECK(std::abs(doc.at("f_mbqc").at("mc_mean").get<double>() - 0.9) <
          5 * doc.at("f_mbqc").at("mc_std_error").get<double>() + 1e-6);
    CHECK(doc.contains("timings_ms"));

    // Identical command, identical numeric payload (timings excluded).
    const json again = json::parse(run_cli("report --state " + c6 +
                                           " --noise global_mix:0.2 --eps 0.08 --delta 0.1 "
                                           "--mc-samples 24")
                                       .output);
    CHECK(again.at("f_s") == doc.at("f_s"));
    CHECK(again.at("f_mbqc") == doc.at("f_mbqc"));
    CHECK(again.at("estimates") == doc.at("estimates"));
}

TEST_CASE("report on a fully excited mixture collapses both fidelities") {
    const auto c3 = state_file("c3ex.json", "build --type cluster1d --n 3");
    const json doc = json::parse(
        run_cli("report --state " + c3 + " --noise excited_mix:2=1 --eps 0.1 --delta 0.1 "
                                         "--mc-samples 16")
            .output);
    CHECK(std::abs(doc.at("f_mbqc").at("exact").get<double>()) < 1e-10);
    CHECK(std::abs(doc.at("f_s").at("exact").get<double>()) < 1e-10);
}

TEST_CASE("seed falls back to the environment variable") {
    const auto c4 = state_file("c4env.json", "build --type cluster1d --n 4");
    setenv("MBQC_SEED", "777", 1);
    const json doc = json::parse(run_cli("sample --state " + c4 + " --count 1").output);
    unsetenv("MBQC_SEED");
    const json explicit_seed =
        json::parse(run_cli("sample --state " + c4 + " --count 1 --seed 777").output);
    CHECK(doc == explicit_seed);
}

TEST_CASE("ideal report saturates everything") {
    const auto c3 = state_file("c3id.json", "build --type cluster1d --n 3");
    const json doc = json::parse(
        run_cli("report --state " + c3 + " --eps 0.2 --delta 0.2 --mc-samples 8").output);
    CHECK(doc.at("f_s").at("exact").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(doc.at("f_mbqc").at("exact").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(doc.at("f_s").at("estimated").get<double>() == 1.0);
    CHECK(doc.at("f_mbqc").at("estimated").get<double>() == 1.0);
    CHECK(doc.at("bounds").at("holds") == true);
}

