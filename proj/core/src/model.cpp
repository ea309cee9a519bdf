#include "resfluor/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace resfluor {

SystemParams SystemParams::rescaled() const {
    SystemParams p = *this;
    p.omega_sigma /= gamma_sigma;
    p.Gamma /= gamma_sigma;
    p.g /= gamma_sigma;
    p.omega_a /= gamma_sigma;
    p.gamma_sigma = 1.0;
    return p;
}

HomodyneConfig HomodyneConfig::with_transmission(double f_prime, double t) {
    HomodyneConfig h;
    h.f_prime = f_prime;
    h.t = t;
    h.r = std::sqrt(std::max(0.0, 1.0 - t * t));
    return h;
}

ValidationReport validate(const SystemParams& params, const HomodyneConfig& h,
                          const TruncationConfig& trunc) {
    ValidationReport rep;
    auto bad = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(params.omega_sigma) || !finite(params.gamma_sigma) ||
        !finite(params.Gamma) || !finite(params.g) || !finite(params.omega_a)) {
        bad("all rates and drives must be finite");
    }
    if (!(params.gamma_sigma > 0.0)) bad("gamma_sigma must be positive");
    if (!(params.Gamma > 0.0)) bad("Gamma must be positive");
    if (params.omega_sigma < 0.0) bad("omega_sigma must be non-negative");
    if (params.g < 0.0) bad("g must be non-negative");

    if (h.f_prime < 0.0) bad("f_prime must be non-negative");
    if (!(h.t > 0.0 && h.t <= 1.0)) bad("t must lie in (0, 1]");
    if (!(h.r >= 0.0 && h.r < 1.0)) bad("r must lie in [0, 1)");
    if (std::abs(h.r * h.r + h.t * h.t - 1.0) > 1e-12) {
        bad("r^2 + t^2 must equal 1 within 1e-12");
    }

    if (trunc.n_max < 2) bad("n_max must be at least 2");
    if (!(trunc.tol > 0.0)) bad("tol must be positive");
    if (!(trunc.g_eval > 0.0)) bad("g_eval must be positive");
    if (!(trunc.omega_eval > 0.0)) bad("omega_eval must be positive");

    if (std::abs(h.f_prime - 2.0) <= 1e-6) {
        rep.hazards.push_back("homodyne divergence point");
    }
    return rep;
}

SystemParams resolve_drive(SystemParams params, const HomodyneConfig& h) {
    params.omega_a = params.g * params.omega_sigma * h.f_prime / params.gamma_sigma;
    return params;
}

namespace {

void trim(std::string& s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    auto e = s.find_last_not_of(ws);
    s = (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

Config load_config(std::istream& in) {
    Config cfg;
    std::string line;
    int lineno = 0;
    bool saw_t = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key=value, got '" + line + "'");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        trim(key);
        trim(value);

        double num = 0.0;
        try {
            size_t used = 0;
            num = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": value for '" + key + "' is not a number");
        }

        if (key == "omega_sigma") {
            cfg.params.omega_sigma = num;
        } else if (key == "gamma_sigma") {
            cfg.params.gamma_sigma = num;
        } else if (key == "Gamma") {
            cfg.params.Gamma = num;
        } else if (key == "g") {
            cfg.params.g = num;
        } else if (key == "omega_a") {
            cfg.params.omega_a = num;
        } else if (key == "f_prime") {
            cfg.homodyne.f_prime = num;
        } else if (key == "t") {
            cfg.homodyne.t = num;
            saw_t = true;
        } else if (key == "n_max") {
            cfg.truncation.n_max = static_cast<int>(num);
        } else if (key == "tol") {
            cfg.truncation.tol = num;
        } else {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        }
    }
    if (saw_t) {
        cfg.homodyne = HomodyneConfig::with_transmission(cfg.homodyne.f_prime,
                                                         cfg.homodyne.t);
    }
    return cfg;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return load_config(in);
}

}  // namespace resfluor
