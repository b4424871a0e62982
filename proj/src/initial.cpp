#include "piezo/initial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace piezo {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double horner(const std::vector<double>& c, double s) {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * s + *it;
    return r;
}
}  // namespace

Profile Profile::from_kind(const std::string& name, const std::vector<double>& p) {
    if (name == "zero") {
        if (!p.empty()) throw std::invalid_argument("profile 'zero' takes no parameters");
        return Profile{ZeroProfile{}};
    }
    if (name == "sine") {
        if (p.size() != 2) throw std::invalid_argument("profile 'sine' takes amplitude, mode");
        const double mode = p[1];
        if (mode < 1 || std::floor(mode) != mode) throw std::invalid_argument("profile 'sine': mode must be a positive integer");
        return Profile{SineProfile{p[0], static_cast<int>(mode)}};
    }
    if (name == "poly") {
        if (p.empty()) throw std::invalid_argument("profile 'poly' needs at least one coefficient");
        return Profile{PolyProfile{p}};
    }
    if (name == "table") {
        if (p.size() < 2) throw std::invalid_argument("profile 'table' needs at least two values");
        return Profile{TableProfile{p}};
    }
    throw std::invalid_argument("unknown profile kind '" + name + "'");
}

double Profile::operator()(double x, double length) const {
    return std::visit(overloaded{
                          [](const ZeroProfile&) { return 0.0; },
                          [&](const SineProfile& k) {
                              return k.amplitude * std::sin((2 * k.mode - 1) * std::numbers::pi * x / (2 * length));
                          },
                          [&](const PolyProfile& k) { return horner(k.coeffs, x / length); },
                          [&](const TableProfile& k) {
                              const double pos = std::clamp(x / length, 0.0, 1.0) * (k.values.size() - 1);
                              const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), k.values.size() - 2);
                              const double w = pos - i;
                              return (1 - w) * k.values[i] + w * k.values[i + 1];
                          },
                      },
                      kind_);
}

std::string Profile::kind_name() const {
    return std::visit(overloaded{
                          [](const ZeroProfile&) { return std::string("zero"); },
                          [](const SineProfile&) { return std::string("sine"); },
                          [](const PolyProfile&) { return std::string("poly"); },
                          [](const TableProfile&) { return std::string("table"); },
                      },
                      kind_);
}

std::vector<double> Profile::params() const {
    return std::visit(overloaded{
                          [](const ZeroProfile&) { return std::vector<double>{}; },
                          [](const SineProfile& k) { return std::vector<double>{k.amplitude, double(k.mode)}; },
                          [](const PolyProfile& k) { return k.coeffs; },
                          [](const TableProfile& k) { return k.values; },
                      },
                      kind_);
}

double HistoryProfile::operator()(double x, double s, double length) const {
    return x_part(x, length) * horner(s_coeffs, s);
}

Initialized initialize(const InitialData& data, const Grid& g, double tolerance) {
    BeamState s(g);
    const double L = g.length();
    for (int i = 0; i < g.nx(); ++i) {
        const double x = g.x(i);
        s.v[i] = data.v0(x, L);
        s.u[i] = data.v1(x, L);
        s.p[i] = data.p0(x, L);
        s.q[i] = data.p1(x, L);
        for (int j = 0; j < g.ny(); ++j) s.z_at(i, j) = data.v2(x, g.y(j), L);
    }

    InitReport rep;
    // clamped end: v, p and their rates vanish at x = 0
    for (auto* f : {&s.v, &s.u, &s.p, &s.q}) {
        rep.max_adjustment = std::max(rep.max_adjustment, std::abs((*f)[0]));
        (*f)[0] = 0.0;
    }
    for (int i = 0; i < g.nx(); ++i) {
        const double gap = std::abs(s.z_at(i, 0) - s.u[i]);
        rep.history_mismatch = std::max(rep.history_mismatch, std::abs(data.v2(g.x(i), 0.0, L) - data.v1(g.x(i), L)));
        rep.max_adjustment = std::max(rep.max_adjustment, gap);
    }
    rep.history_incompatible = rep.history_mismatch > tolerance;
    s.impose_inflow();
    return {std::move(s), rep};
}

}  // namespace piezo
