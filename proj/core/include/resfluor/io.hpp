// Serialization: moment tables to JSON, curves and click data to CSV,
// and the run manifest that records how an output set was produced.
//
// CSV column order and headers are a stable external contract. All
// floating-point output uses round-trip (17 significant digit)
// formatting so that re-running a command reproduces files byte for
// byte and row-wise identities survive parsing.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "resfluor/dynamics.hpp"
#include "resfluor/model.hpp"
#include "resfluor/moments.hpp"
#include "resfluor/trajectories.hpp"

namespace resfluor {

// Round-trip decimal form of a double (%.17g).
std::string format_double(double v);

std::string moment_table_to_json(const MomentTable& table);
MomentTable moment_table_from_json(const std::string& text);

// Comment metadata written as leading "# key = value" lines.
using CsvMetadata = std::vector<std::pair<std::string, std::string>>;

// Generic numeric table. Every figure and sweep output goes through
// this so the formatting rules live in one place.
void write_table_csv(const std::string& path, const CsvMetadata& metadata,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

void write_series_csv(const CorrelationSeries& series,
                      const std::string& path, const CsvMetadata& metadata);
void write_spectrum_csv(const SpectrumCurve& curve, const std::string& path,
                        const CsvMetadata& metadata);
void write_clicks_csv(const ClickTrain& train, const std::string& path);
void write_cdf_csv(const WaitingTimeCDF& cdf, const std::string& path,
                   const CsvMetadata& metadata);
// Dense matrix dump (row, col, re, im) for debugging.
void write_density_csv(const DensityOperator& dens, const std::string& path);

// Record of one CLI invocation: the command line, the fully resolved
// configuration, every seed used, the artifact version, and the files
// written. Re-running the recorded command reproduces the outputs
// byte for byte; wall_clock_seconds is informational and excluded
// from that claim.
struct RunManifest {
    std::vector<std::string> command_line;
    Config config;
    std::vector<std::uint64_t> seeds;
    std::string version;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace resfluor
