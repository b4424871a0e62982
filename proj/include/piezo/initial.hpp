#pragma once

#include <string>
#include <variant>
#include <vector>

#include "piezo/grid.hpp"

namespace piezo {

struct ZeroProfile {};
/// amplitude * sin((2 mode - 1) pi x / (2 L)): the clamped-free modes.
struct SineProfile {
    double amplitude;
    int mode;
};
/// sum_k coeffs[k] * (x / L)^k
struct PolyProfile {
    std::vector<double> coeffs;
};
/// Values at evenly spaced points of [0, L], linearly interpolated.
struct TableProfile {
    std::vector<double> values;
};

class Profile {
public:
    using Kind = std::variant<ZeroProfile, SineProfile, PolyProfile, TableProfile>;

    Profile() = default;
    Profile(Kind k) : kind_(std::move(k)) {}  // NOLINT: implicit by intent

    static Profile from_kind(const std::string& name, const std::vector<double>& params);

    [[nodiscard]] double operator()(double x, double length) const;
    [[nodiscard]] std::string kind_name() const;
    [[nodiscard]] std::vector<double> params() const;

private:
    Kind kind_ = ZeroProfile{};
};

/// Separable history v2(x, s) = profile(x) * sum_k s_coeffs[k] s^k.
struct HistoryProfile {
    Profile x_part;
    std::vector<double> s_coeffs{1.0};

    [[nodiscard]] double operator()(double x, double s, double length) const;
};

struct InitialData {
    Profile v0, v1, p0, p1;
    HistoryProfile v2;
};

struct InitReport {
    /// Largest change made when enforcing v[0] = p[0] = 0 and z(., 0) = u.
    double max_adjustment = 0.0;
    /// sup |v2(., 0) - v1| on the grid.
    double history_mismatch = 0.0;
    bool history_incompatible = false;
};

struct Initialized {
    BeamState state;
    InitReport report;
};

/// Samples the initial data on the grid and enforces the clamped end and the
/// inflow compatibility. An incompatible history is reported and then
/// overwritten in favour of v1.
Initialized initialize(const InitialData& data, const Grid& grid, double tolerance = 1e-10);

}  // namespace piezo
