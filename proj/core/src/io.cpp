#include "resfluor/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace resfluor {

namespace {

using nlohmann::json;

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    return out;
}

void write_metadata(std::ofstream& out, const CsvMetadata& metadata) {
    for (const auto& [key, value] : metadata) {
        out << "# " << key << " = " << value << "\n";
    }
}

void write_row(std::ofstream& out, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out << ",";
        out << format_double(row[i]);
    }
    out << "\n";
}

json params_to_json(const SystemParams& p) {
    return json{{"omega_sigma", p.omega_sigma},
                {"gamma_sigma", p.gamma_sigma},
                {"Gamma", p.Gamma},
                {"g", p.g},
                {"omega_a", p.omega_a},
                {"heitler_threshold", p.heitler_threshold}};
}

SystemParams params_from_json(const json& j) {
    SystemParams p;
    p.omega_sigma = j.at("omega_sigma").get<double>();
    p.gamma_sigma = j.at("gamma_sigma").get<double>();
    p.Gamma = j.at("Gamma").get<double>();
    p.g = j.at("g").get<double>();
    p.omega_a = j.at("omega_a").get<double>();
    p.heitler_threshold = j.at("heitler_threshold").get<double>();
    return p;
}

std::string index_key(const MomentIndex& idx) {
    std::ostringstream key;
    key << idx.m << "," << idx.n << "," << idx.mu << "," << idx.nu;
    return key.str();
}

MomentIndex index_from_key(const std::string& key) {
    MomentIndex idx{};
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream in(key);
    if (!(in >> idx.m >> c1 >> idx.n >> c2 >> idx.mu >> c3 >> idx.nu) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
        throw std::runtime_error("malformed moment index key: " + key);
    }
    if (!idx.valid()) {
        throw std::runtime_error("moment index out of range: " + key);
    }
    return idx;
}

}  // namespace

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::string moment_table_to_json(const MomentTable& table) {
    json entries = json::object();
    for (const auto& [idx, value] : table.entries) {
        entries[index_key(idx)] = json::array({value.real(), value.imag()});
    }
    json j{{"order_max", table.order_max},
           {"params", params_to_json(table.params)},
           {"entries", entries}};
    return j.dump(2);
}

MomentTable moment_table_from_json(const std::string& text) {
    json j = json::parse(text);
    MomentTable table;
    table.order_max = j.at("order_max").get<int>();
    table.params = params_from_json(j.at("params"));
    for (const auto& [key, value] : j.at("entries").items()) {
        if (!value.is_array() || value.size() != 2) {
            throw std::runtime_error("moment entry " + key +
                                     " is not a [re, im] pair");
        }
        table.entries[index_from_key(key)] =
            Complex(value[0].get<double>(), value[1].get<double>());
    }
    return table;
}

void write_table_csv(const std::string& path, const CsvMetadata& metadata,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
    auto out = open_for_write(path);
    write_metadata(out, metadata);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) out << ",";
        out << columns[i];
    }
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != columns.size()) {
            throw std::runtime_error("row width does not match header in " +
                                     path);
        }
        write_row(out, row);
    }
}

void write_series_csv(const CorrelationSeries& series,
                      const std::string& path, const CsvMetadata& metadata) {
    auto out = open_for_write(path);
    write_metadata(out, metadata);
    out << "# correlator = " << series.label << "\n";
    out << "# normalization = " << format_double(series.normalization)
        << "\n";
    out << "tau,value_re,value_im\n";
    for (std::size_t i = 0; i < series.tau_grid.size(); ++i) {
        write_row(out, {series.tau_grid[i], series.values[i].real(),
                        series.values[i].imag()});
    }
}

void write_spectrum_csv(const SpectrumCurve& curve, const std::string& path,
                        const CsvMetadata& metadata) {
    auto out = open_for_write(path);
    write_metadata(out, metadata);
    out << "# delta_weight = " << format_double(curve.delta_weight) << "\n";
    out << "# delta_location = " << format_double(curve.delta_location)
        << "\n";
    out << "omega,density\n";
    for (std::size_t i = 0; i < curve.omega_grid.size(); ++i) {
        write_row(out, {curve.omega_grid[i], curve.density[i]});
    }
}

void write_clicks_csv(const ClickTrain& train, const std::string& path) {
    auto out = open_for_write(path);
    out << "# duration = " << format_double(train.duration) << "\n";
    out << "# seed = " << train.seed << "\n";
    out << "time\n";
    for (double t : train.times) {
        out << format_double(t) << "\n";
    }
}

void write_cdf_csv(const WaitingTimeCDF& cdf, const std::string& path,
                   const CsvMetadata& metadata) {
    auto out = open_for_write(path);
    write_metadata(out, metadata);
    out << "# n_pairs = " << cdf.n_pairs << "\n";
    out << "# rate = " << format_double(cdf.rate_i) << "\n";
    out << "x,cdf\n";
    for (std::size_t i = 0; i < cdf.x_grid.size(); ++i) {
        write_row(out, {cdf.x_grid[i], cdf.cdf[i]});
    }
}

void write_density_csv(const DensityOperator& dens, const std::string& path) {
    auto out = open_for_write(path);
    out << "# n_max = " << dens.n_max << "\n";
    out << "row,col,re,im\n";
    const auto dim = dens.matrix.rows();
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            out << r << "," << c << ","
                << format_double(dens.matrix(r, c).real()) << ","
                << format_double(dens.matrix(r, c).imag()) << "\n";
        }
    }
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j{{"command_line", manifest.command_line},
           {"params", params_to_json(manifest.config.params)},
           {"homodyne",
            json{{"f_prime", manifest.config.homodyne.f_prime},
                 {"t", manifest.config.homodyne.t},
                 {"r", manifest.config.homodyne.r}}},
           {"truncation",
            json{{"n_max", manifest.config.truncation.n_max},
                 {"tol", manifest.config.truncation.tol},
                 {"g_eval", manifest.config.truncation.g_eval},
                 {"omega_eval", manifest.config.truncation.omega_eval}}},
           {"seeds", manifest.seeds},
           {"version", manifest.version},
           {"outputs", manifest.outputs},
           {"wall_clock_seconds", manifest.wall_clock_seconds}};
    auto out = open_for_write(path);
    out << j.dump(2) << "\n";
}

}  // namespace resfluor
