#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "palintoep/config.hpp"
#include "palintoep/report.hpp"
#include "palintoep/rng.hpp"

using namespace palintoep;
namespace fs = std::filesystem;

namespace {

const char* kGoodConfig = R"({
  "schema": 1,
  "n": 1,
  "N": [8, 16],
  "num_matrices": 40,
  "max_moment": 4,
  "distribution": "gaussian",
  "seed": 42,
  "fit_order": 0,
  "moment_path": "eigenvalues",
  "histogram": {"enabled": false, "bins": 120, "min": -6.0, "max": 6.0},
  "outputs": {"moments_csv": "moments.csv", "report_json": "", "histogram_csv_prefix": ""}
})";

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const char* cli = std::getenv("PALINTOEP_CLI");
    REQUIRE(cli != nullptr);
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() / ("palintoep_out_" + std::to_string(counter));
    const fs::path err = fs::temp_directory_path() / ("palintoep_err_" + std::to_string(counter));
    ++counter;
    const std::string cmd = env_prefix + std::string(cli) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    fs::remove(out);
    fs::remove(err);
    return r;
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream f(p, std::ios::binary);
    f << text;
    return p;
}

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("good config round-trips byte-identically") {
        const auto cfg = parse_run_config(nlohmann::json::parse(kGoodConfig));
        const std::string canonical = canonical_config_json(cfg).dump(2);
        const auto reparsed = parse_run_config(nlohmann::json::parse(canonical));
        CHECK(canonical_config_json(reparsed).dump(2) == canonical);
        CHECK(cfg.Ns == std::vector<int>{8, 16});
        CHECK(cfg.num_matrices == 40);
    }
    SUBCASE("dimension violations are listed") {
        auto j = nlohmann::json::parse(kGoodConfig);
        j["N"] = {6};
        try {
            parse_run_config(j);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("multiple of 2^(n+1) = 4") != std::string::npos);
        }
    }
    SUBCASE("odd max moment is rejected") {
        auto j = nlohmann::json::parse(kGoodConfig);
        j["max_moment"] = 7;
        CHECK_THROWS_AS(parse_run_config(j), ConfigError);
    }
    SUBCASE("unknown keys are rejected") {
        auto j = nlohmann::json::parse(kGoodConfig);
        j["wat"] = 1;
        CHECK_THROWS_AS(parse_run_config(j), ConfigError);
        auto h = nlohmann::json::parse(kGoodConfig);
        h["histogram"]["color"] = "red";
        CHECK_THROWS_AS(parse_run_config(h), ConfigError);
    }
    SUBCASE("multiple violations are reported together") {
        auto j = nlohmann::json::parse(kGoodConfig);
        j["N"] = {6};
        j["max_moment"] = 7;
        j["num_matrices"] = 0;
        try {
            parse_run_config(j);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("multiple") != std::string::npos);
            CHECK(msg.find("even") != std::string::npos);
            CHECK(msg.find("num_matrices") != std::string::npos);
        }
    }
    SUBCASE("parse errors carry line and column") {
        const auto p = write_temp("palintoep_broken.json", "{\n  \"schema\": 1,,\n}bad\n");
        try {
            load_run_config(p.string());
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
        fs::remove(p);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_run_config("/nonexistent.json"), ConfigError); }
    SUBCASE("histograms need eigenvalues") {
        auto j = nlohmann::json::parse(kGoodConfig);
        j["moment_path"] = "trace";
        j["histogram"]["enabled"] = true;
        CHECK_THROWS_AS(parse_run_config(j), ConfigError);
        j["histogram"]["enabled"] = false;
        CHECK_NOTHROW(parse_run_config(j));
    }
}

TEST_CASE("double formatting round-trips bit-exactly") {
    EntryStream stream(424242, 0);
    for (int trial = 0; trial < 2000; ++trial) {
        const int exponent = static_cast<int>(stream.next_u64() % 61) - 30;
        const double value = std::ldexp(stream.next_normal(), exponent);
        const std::string text = format_double(value);
        double back = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), back);
        REQUIRE(res.ec == std::errc{});
        CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(value));
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.5) == "1.5");
}

TEST_CASE("csv round trip") {
    MomentTable table = {{8, 100, 2, 1.0009765625, 0.001220703125}, {16, 100, 4, 4.5, 0.25}};
    const std::string csv = moment_table_csv(table);
    CHECK(csv.rfind("N,sims,moment,mean,stderr\n", 0) == 0);
    const auto parsed = parse_moment_table_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].mean == table[0].mean);
    CHECK(parsed[1].std_error == table[1].std_error);
    CHECK_THROWS_AS(parse_moment_table_csv("a,b\n"), ConfigError);
}

TEST_CASE("cli validate") {
    const auto good = write_temp("palintoep_good.json", kGoodConfig);
    CHECK(run_cli("validate --config " + good.string()).exit_code == 0);
    fs::remove(good);

    std::string bad = kGoodConfig;
    const auto pos = bad.find("[8, 16]");
    bad.replace(pos, 7, "[6]");
    const auto bad_path = write_temp("palintoep_bad.json", bad);
    const auto r = run_cli("validate --config " + bad_path.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("multiple of 2^(n+1) = 4") != std::string::npos);
    fs::remove(bad_path);

    CHECK(run_cli("validate --config /definitely/not/there.json").exit_code == 2);
}

TEST_CASE("cli exact and formulas") {
    const auto r = run_cli("exact --n 1 --N 8 --k 2 --dist gaussian");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["value"].get<double>() == 1.0);
    CHECK(j["N"] == 8);

    CHECK(run_cli("exact --n 1 --N 8 --k 3").exit_code == 0);
    CHECK(run_cli("exact --n 1 --N 64 --k 6").exit_code == 3);
    CHECK(run_cli("exact --n 1 --N 7 --k 2").exit_code == 2);

    const auto f = run_cli("formulas --m 2:5 --n 1:1");
    CHECK(f.exit_code == 0);
    const auto rows = nlohmann::json::parse(f.out)["rows"];
    REQUIRE(rows.size() == 4);
    CHECK(rows[0]["conjectured_moment"].get<double>() == 4.5);
    CHECK(rows[1]["conjectured_moment"].get<double>() == 37.5);
    CHECK(rows[2]["conjectured_moment"].get<double>() == 433.125);
    CHECK(rows[3]["conjectured_moment"].get<double>() == 6260.625);

    const auto f2 = run_cli("formulas --m 2 --n 0:3");
    REQUIRE(f2.exit_code == 0);
    const auto rows2 = nlohmann::json::parse(f2.out)["rows"];
    REQUIRE(rows2.size() == 4);
    const std::vector<double> limits = {3.0, 4.5, 8.25, 16.125};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(rows2[i]["fourth_moment_limit"].get<double>() == limits[i]);
        CHECK(rows2[i]["lower_bound_conjectured"].get<double>() <=
              rows2[i]["upper_bound"].get<double>());
    }
    CHECK(run_cli("formulas --m 0:2 --n 1").exit_code == 2);
}

TEST_CASE("cli simulate is deterministic and feeds extrapolate") {
    const fs::path dir = fs::temp_directory_path() / "palintoep_sim";
    fs::create_directories(dir);
    const std::string csv_path = (dir / "moments.csv").string();
    const std::string report_path = (dir / "report.json").string();

    // the exact same config twice, only the worker cap changes
    const std::string cmd = "simulate --n 1 --N 8 --N 12 --N 16 --N 20 --sims 60 --k 4 "
                            "--seed 20090604 --order 1 --out " +
                            csv_path + " --report " + report_path;
    const auto ra = run_cli(cmd, "PALINTOEP_THREADS=1 ");
    REQUIRE(ra.exit_code == 0);
    const std::string csv_first = slurp(csv_path);
    const std::string report_first = slurp(report_path);
    const auto rb = run_cli(cmd, "PALINTOEP_THREADS=3 ");
    REQUIRE(rb.exit_code == 0);
    CHECK(csv_first == slurp(csv_path));
    CHECK(report_first == slurp(report_path));

    // the one-shot pipeline fit equals re-fitting the written CSV
    const auto report = nlohmann::json::parse(report_first);
    const auto fit_cli = run_cli("extrapolate --in " + csv_path + " --k 4 --order 1");
    REQUIRE(fit_cli.exit_code == 0);
    const auto fit = nlohmann::json::parse(fit_cli.out);
    CHECK(fit["limit"].get<double>() == report["fits"]["4"]["limit"].get<double>());

    // config echo in the report re-validates and re-serializes identically
    const auto echoed = parse_run_config(report["config"]);
    CHECK(nlohmann::json(canonical_config_json(echoed)) == report["config"]);

    fs::remove_all(dir);
}

TEST_CASE("cli simulate failure modes") {
    CHECK(run_cli("simulate --n 1 --N 8 --sims 0 --k 4 --out /tmp/x.csv").exit_code == 2);
    CHECK(run_cli("simulate --n 1 --N 8 --sims 10 --k 4").exit_code == 2); // no --out
    CHECK(run_cli("simulate --n 1 --N 6 --sims 10 --k 4 --out /tmp/x.csv").exit_code == 2);
    const auto r = run_cli("simulate --n 1 --N 8 --sims 10 --k 4 --out /no/such/dir/x.csv");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli simulate histograms and the trace path") {
    const fs::path dir = fs::temp_directory_path() / "palintoep_hist";
    fs::create_directories(dir);
    const std::string base = (dir / "m.csv").string();
    const auto r = run_cli("simulate --n 0 --N 16 --sims 30 --k 2 --seed 9 --out " + base +
                           " --hist --hist-prefix " + (dir / "h").string() + " --hist-bins 10");
    REQUIRE(r.exit_code == 0);
    const std::string hist = slurp(dir / "h_N16.csv");
    CHECK(hist.rfind("bin_left,bin_right,mass\n", 0) == 0);
    double total = 0.0;
    std::istringstream lines(hist.substr(hist.find('\n') + 1));
    std::string line;
    int bins = 0;
    while (std::getline(lines, line)) {
        total += std::stod(line.substr(line.rfind(',') + 1));
        ++bins;
    }
    CHECK(bins == 10);
    CHECK(total <= 1.0 + 1e-12);
    CHECK(total > 0.5);

    const auto t = run_cli("simulate --n 0 --N 16 --sims 30 --k 4 --seed 9 --path trace --out " +
                           base);
    CHECK(t.exit_code == 0);
    const auto bad = run_cli("simulate --n 0 --N 16 --sims 30 --k 4 --seed 9 --path trace --out " +
                             base + " --hist --hist-prefix " + (dir / "h").string());
    CHECK(bad.exit_code == 2);
    fs::remove_all(dir);
}

TEST_CASE("cli extrapolate errors") {
    const auto small = write_temp("palintoep_small.csv",
                                  "N,sims,moment,mean,stderr\n8,10,4,5.75,0.1\n16,10,4,5.125,0.1\n"
                                  "24,10,4,4.9166666,0.1\n");
    CHECK(run_cli("extrapolate --in " + small.string() + " --k 4 --order 3").exit_code == 2);
    const auto ok = run_cli("extrapolate --in " + small.string() + " --k 4 --order 1");
    CHECK(ok.exit_code == 0);
    CHECK(nlohmann::json::parse(ok.out)["limit"].get<double>() == doctest::Approx(4.5).epsilon(1e-6));
    CHECK(run_cli("extrapolate --in /missing.csv --k 4 --order 1").exit_code == 2);
    fs::remove(small);
}

TEST_CASE("cli configurations") {
    const auto r = run_cli("configurations --n 1 --N 16 --m 2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto& configs = j["reports"][0]["configurations"];
    REQUIRE(configs.size() == 3);
    CHECK(configs[0]["count"].get<std::uint64_t>() == 6224);
    CHECK(configs[0]["matching"][0][0] == 1);
    CHECK(configs[0]["positive_sign_count"].get<std::uint64_t>() +
              configs[0]["negative_sign_count"].get<std::uint64_t>() ==
          configs[0]["count"].get<std::uint64_t>());

    CHECK(run_cli("configurations --n 1 --N 16 --m 6").exit_code == 3);
    CHECK(run_cli("configurations --n 1 --N 16").exit_code == 2); // missing --m
}
