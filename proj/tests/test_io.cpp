#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "resfluor/io.hpp"
#include "resfluor/model.hpp"
#include "resfluor/moments.hpp"

using namespace resfluor;

namespace {

std::filesystem::path scratch_dir() {
    const auto dir =
        std::filesystem::temp_directory_path() / "resfluor_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

std::string table_json_with_entries(const std::string& entries) {
    return std::string(R"({
      "order_max": 1,
      "params": {"omega_sigma": 1e-3, "gamma_sigma": 1.0, "Gamma": 0.2,
                 "g": 1e-3, "omega_a": 0.0, "heitler_threshold": 1e-2},
      "entries": )") +
           entries + "}";
}

}  // namespace

TEST_CASE("round-trip double formatting") {
    const std::vector<double> values{0.1,
                                     1.0 / 3.0,
                                     2.5e-300,
                                     9.87654321e18,
                                     25.0 / 36.0,
                                     -1.2345678901234567e-5};
    for (double v : values) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("moment table JSON round trip") {
    SystemParams p;
    p.omega_sigma = 1e-3;
    p.gamma_sigma = 1.0;
    p.Gamma = 0.2;
    p.g = 1e-3;
    p.omega_a = 2e-6;
    const MomentTable table = solve_recursive(p, 3);

    const MomentTable copy = moment_table_from_json(moment_table_to_json(table));
    CHECK(copy.order_max == table.order_max);
    CHECK(copy.params.omega_sigma == table.params.omega_sigma);
    CHECK(copy.params.Gamma == table.params.Gamma);
    CHECK(copy.params.omega_a == table.params.omega_a);
    REQUIRE(copy.entries.size() == table.entries.size());
    for (const auto& [idx, value] : table.entries) {
        REQUIRE(copy.contains(idx));
        CHECK(copy.at(idx) == value);
    }
}

TEST_CASE("moment table JSON validation") {
    CHECK_THROWS_AS(moment_table_from_json("not json"), std::exception);

    SUBCASE("malformed index key") {
        const std::string text =
            table_json_with_entries(R"({"0,0,0": [1.0, 0.0]})");
        CHECK_THROWS_WITH_AS(moment_table_from_json(text),
                             doctest::Contains("malformed moment index key"),
                             std::runtime_error);
    }
    SUBCASE("index outside the two-level range") {
        const std::string text =
            table_json_with_entries(R"({"5,0,0,0": [1.0, 0.0]})");
        CHECK_THROWS_WITH_AS(moment_table_from_json(text),
                             doctest::Contains("moment index out of range"),
                             std::runtime_error);
    }
    SUBCASE("entry is not a pair") {
        const std::string text =
            table_json_with_entries(R"({"0,0,0,0": [1.0]})");
        CHECK_THROWS_WITH_AS(moment_table_from_json(text),
                             doctest::Contains("is not a [re, im] pair"),
                             std::runtime_error);
    }
}

TEST_CASE("generic table writer") {
    const auto dir = scratch_dir();

    SUBCASE("exact file content") {
        const auto path = dir / "small.csv";
        const CsvMetadata metadata{{"gamma_sigma", "1"}, {"note", "demo"}};
        write_table_csv(path.string(), metadata, {"a", "b"}, {{0.5, 0.25}});
        CHECK(read_file(path) ==
              "# gamma_sigma = 1\n# note = demo\na,b\n0.5,0.25\n");
    }
    SUBCASE("rewriting produces identical bytes") {
        const auto first = dir / "repeat_1.csv";
        const auto second = dir / "repeat_2.csv";
        const std::vector<std::vector<double>> rows{
            {0.1, 1.0 / 3.0}, {2.5e-300, 9.87654321e18}};
        write_table_csv(first.string(), {}, {"x", "y"}, rows);
        write_table_csv(second.string(), {}, {"x", "y"}, rows);
        CHECK(read_file(first) == read_file(second));
    }
    SUBCASE("row width mismatch is an error") {
        const auto path = dir / "ragged.csv";
        CHECK_THROWS_WITH_AS(
            write_table_csv(path.string(), {}, {"a", "b"}, {{1.0}}),
            doctest::Contains("row width does not match header"),
            std::runtime_error);
    }
    SUBCASE("unwritable path is an error") {
        CHECK_THROWS_WITH_AS(
            write_table_csv("/nonexistent_dir_xyz/out.csv", {}, {"a"}, {}),
            doctest::Contains("cannot open"), std::runtime_error);
    }
}

TEST_CASE("series and spectrum writers") {
    const auto dir = scratch_dir();

    SUBCASE("correlation series layout") {
        CorrelationSeries series;
        series.tau_grid = {0.0, 1.0};
        series.values = {Complex(0.25, 0.0), Complex(0.5, -0.125)};
        series.label = "g2_a";
        series.normalization = 2.0;
        const auto path = dir / "series.csv";
        write_series_csv(series, path.string(), {{"Gamma", "0.2"}});
        CHECK(read_file(path) ==
              "# Gamma = 0.2\n# correlator = g2_a\n# normalization = 2\n"
              "tau,value_re,value_im\n0,0.25,0\n1,0.5,-0.125\n");
    }
    SUBCASE("spectrum layout") {
        SpectrumCurve curve;
        curve.omega_grid = {-1.0, 1.0};
        curve.density = {0.125, 0.25};
        curve.delta_weight = 0.5;
        curve.delta_location = 0.0;
        const auto path = dir / "spectrum.csv";
        write_spectrum_csv(curve, path.string(), {});
        CHECK(read_file(path) ==
              "# delta_weight = 0.5\n# delta_location = 0\n"
              "omega,density\n-1,0.125\n1,0.25\n");
    }
    SUBCASE("click train layout") {
        ClickTrain train;
        train.times = {0.5, 1.5};
        train.duration = 2.0;
        train.seed = 7;
        const auto path = dir / "clicks.csv";
        write_clicks_csv(train, path.string());
        CHECK(read_file(path) ==
              "# duration = 2\n# seed = 7\ntime\n0.5\n1.5\n");
    }
    SUBCASE("waiting-time layout") {
        WaitingTimeCDF cdf;
        cdf.x_grid = {0.5, 1.0};
        cdf.cdf = {0.25, 1.0};
        cdf.n_pairs = 4;
        cdf.rate_i = 0.125;
        const auto path = dir / "cdf.csv";
        write_cdf_csv(cdf, path.string(), {});
        CHECK(read_file(path) ==
              "# n_pairs = 4\n# rate = 0.125\nx,cdf\n0.5,0.25\n1,1\n");
    }
}

TEST_CASE("run manifest") {
    const auto dir = scratch_dir();
    RunManifest manifest;
    manifest.command_line = {"resfluor", "figure", "2a"};
    manifest.config.params.omega_sigma = 0.05;
    manifest.config.homodyne = HomodyneConfig::with_transmission(1.0, 0.8);
    manifest.config.truncation.n_max = 6;
    manifest.seeds = {20260816, 20260817};
    manifest.version = "0.1.0";
    manifest.outputs = {"figure_2a.csv"};
    manifest.wall_clock_seconds = 1.5;

    const auto path = dir / "manifest.json";
    write_manifest(manifest, path.string());
    const nlohmann::json j = nlohmann::json::parse(read_file(path));

    CHECK(j.at("command_line").get<std::vector<std::string>>() ==
          manifest.command_line);
    CHECK(j.at("params").at("omega_sigma").get<double>() == 0.05);
    CHECK(j.at("homodyne").at("f_prime").get<double>() == 1.0);
    CHECK(j.at("homodyne").at("t").get<double>() == 0.8);
    CHECK(j.at("homodyne").at("r").get<double>() ==
          manifest.config.homodyne.r);
    CHECK(j.at("truncation").at("n_max").get<int>() == 6);
    CHECK(j.at("seeds").get<std::vector<std::uint64_t>>() == manifest.seeds);
    CHECK(j.at("version").get<std::string>() == "0.1.0");
    CHECK(j.at("outputs").get<std::vector<std::string>>() ==
          manifest.outputs);
    CHECK(j.at("wall_clock_seconds").get<double>() == 1.5);
}
