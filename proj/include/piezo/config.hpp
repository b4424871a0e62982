#pragma once

// INI run configuration. Sections: [model], [grid], [initial], [time],
// [check], [lyapunov], [output]. Every key maps to exactly one field and
// unknown keys are rejected.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "piezo/functionals.hpp"
#include "piezo/initial.hpp"
#include "piezo/model.hpp"
#include "piezo/stepper.hpp"

namespace piezo {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tolerance constants and check windows.
struct CheckSettings {
    double c_tol = 1.0;    // tol_E = c_tol (hx^2 + hy + dt) E(0)
    double c_tol_h = 1.0;  // tol_h = c_tol_h (hx^2 + hy), unit-norm states
    std::optional<double> fit_t_lo;  // defaults to t_end / 8
    std::optional<double> fit_t_hi;  // defaults to t_end
    int probes = 200;
    int diss_states = 100;
    int diss_times = 20;
    std::uint64_t seed = 1;
};

struct RunConfig {
    Problem problem;
    int nx = 201;
    int ny = 33;
    InitialData initial;
    std::optional<double> dt;  // empty: default_dt
    double t_end = 40.0;
    Scheme scheme = Scheme::trapezoid;
    int record_every = 20;
    int history_every = 4;
    CheckSettings check;
    std::optional<double> N1, N2, N3;
    std::string out_dir = "out";

    [[nodiscard]] Grid grid() const { return Grid(nx, ny, problem.phys.length); }
    [[nodiscard]] double time_step() const;
    [[nodiscard]] SchemeConfig scheme_config() const;
    /// N2 = 8 / gamma and N3 = 1 unless overridden; N left at 1.
    [[nodiscard]] LyapunovWeights base_weights() const;
    [[nodiscard]] double fit_lo() const { return check.fit_t_lo.value_or(t_end / 8.0); }
    [[nodiscard]] double fit_hi() const { return check.fit_t_hi.value_or(t_end); }
};

/// Raw "section.key" -> value pairs, e.g. "model.tau.kind" -> "sinusoidal".
using ConfigMap = std::map<std::string, std::string>;

ConfigMap read_config_map(std::istream& is);
ConfigMap read_config_map(const std::string& path);
/// Throws ConfigError on unknown keys or malformed values.
RunConfig build_config(const ConfigMap& entries);

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Inverse of build_config.
ConfigMap to_config_map(const RunConfig& c);
void write_config(std::ostream& os, const RunConfig& c);

}  // namespace piezo
