#include "piezo/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>

#include "piezo/format.hpp"

namespace piezo {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": expected a number, got '" + raw + "'");
    return v;
}

long to_integer(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": expected an integer, got '" + raw + "'");
    return v;
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::string cur;
    auto flush = [&] {
        if (!trim(cur).empty()) out.push_back(to_double(key, cur));
        cur.clear();
    };
    for (char ch : raw) {
        if (ch == ',' || ch == ' ' || ch == '\t')
            flush();
        else
            cur.push_back(ch);
    }
    flush();
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "model.rho",         "model.alpha1",      "model.gamma",       "model.beta",       "model.mu",
        "model.length",      "model.tau.kind",    "model.tau.params",  "model.mu1.kind",   "model.mu1.params",
        "model.mu2.kind",    "model.mu2.params",  "model.xi_bar",      "model.delta",      "model.M1",
        "model.M2",          "grid.nx",           "grid.ny",           "initial.v0.kind",  "initial.v0.params",
        "initial.v1.kind",   "initial.v1.params", "initial.p0.kind",   "initial.p0.params", "initial.p1.kind",
        "initial.p1.params", "initial.v2.kind",   "initial.v2.x.kind", "initial.v2.x.params",
        "initial.v2.s.coeffs", "time.dt",         "time.t_end",        "time.scheme",      "time.record_every",
        "time.history_every", "check.c_tol",      "check.c_tol_h",     "check.fit_t_lo",   "check.fit_t_hi",
        "check.probes",      "check.diss_states", "check.diss_times",  "check.seed",       "lyapunov.N1",
        "lyapunov.N2",       "lyapunov.N3",       "output.dir",
    };
    return keys;
}

// Wraps model constructors so their argument errors surface as config errors.
template <class F>
auto guarded(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

}  // namespace

double RunConfig::time_step() const { return dt ? *dt : default_dt(grid(), problem); }

SchemeConfig RunConfig::scheme_config() const {
    SchemeConfig s;
    s.dt = time_step();
    s.scheme = scheme;
    s.t_end = t_end;
    s.record_every = record_every;
    s.history_every = history_every;
    return s;
}

LyapunovWeights RunConfig::base_weights() const {
    auto w = LyapunovWeights::defaults(problem.phys);
    if (N1) w.N1 = *N1;
    if (N2) w.N2 = *N2;
    if (N3) w.N3 = *N3;
    return w;
}

ConfigMap read_config_map(std::istream& is) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    ConfigMap out;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + section + "' must belong to a section");
        for (const auto& [key, value] : body) out[section + "." + key] = trim(value.data());
    }
    return out;
}

ConfigMap read_config_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return read_config_map(in);
}

RunConfig build_config(const ConfigMap& m) {
    for (const auto& [k, v] : m)
        if (!known_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");

    RunConfig c;
    auto has = [&](const std::string& k) { return m.count(k) > 0; };
    auto num = [&](const std::string& k, double& dst) {
        if (has(k)) dst = to_double(k, m.at(k));
    };
    auto integer = [&](const std::string& k, int& dst) {
        if (has(k)) dst = static_cast<int>(to_integer(k, m.at(k)));
    };
    auto opt_num = [&](const std::string& k, std::optional<double>& dst) {
        if (has(k)) dst = to_double(k, m.at(k));
    };
    auto str = [&](const std::string& k, const std::string& fallback) { return has(k) ? m.at(k) : fallback; };
    auto list = [&](const std::string& k) { return has(k) ? to_list(k, m.at(k)) : std::vector<double>{}; };

    auto& ph = c.problem.phys;
    num("model.rho", ph.rho);
    num("model.alpha1", ph.alpha1);
    num("model.gamma", ph.gamma);
    num("model.beta", ph.beta);
    num("model.mu", ph.mu);
    num("model.length", ph.length);
    if (!(ph.length > 0.0)) throw ConfigError("model.length: must be positive");
    if (has("model.tau.kind") || has("model.tau.params")) {
        const auto kind = str("model.tau.kind", "constant");
        const auto params = list("model.tau.params");
        c.problem.delay = guarded("model.tau", [&] { return DelaySpec::from_kind(kind, params); });
    }
    auto& dm = c.problem.damping;
    if (has("model.mu1.kind") || has("model.mu1.params")) {
        const auto kind = str("model.mu1.kind", "constant");
        const auto params = list("model.mu1.params");
        dm.mu1_kind = guarded("model.mu1", [&] { return instant_weight_from_kind(kind, params); });
    }
    if (has("model.mu2.kind") || has("model.mu2.params")) {
        const auto kind = str("model.mu2.kind", "constant");
        const auto params = list("model.mu2.params");
        dm.mu2_kind = guarded("model.mu2", [&] { return delayed_weight_from_kind(kind, params); });
    }
    num("model.xi_bar", c.problem.xi_bar);
    num("model.delta", dm.delta);
    num("model.M1", dm.M1);
    num("model.M2", dm.M2);

    integer("grid.nx", c.nx);
    integer("grid.ny", c.ny);
    guarded("grid", [&] { return c.grid(); });

    auto profile = [&](const std::string& name, Profile& dst) {
        const std::string base = "initial." + name;
        if (!has(base + ".kind") && !has(base + ".params")) return;
        const auto kind = str(base + ".kind", "zero");
        const auto params = list(base + ".params");
        dst = guarded(base, [&] { return Profile::from_kind(kind, params); });
    };
    profile("v0", c.initial.v0);
    profile("v1", c.initial.v1);
    profile("p0", c.initial.p0);
    profile("p1", c.initial.p1);
    const auto v2kind = str("initial.v2.kind", "zero");
    if (v2kind == "zero") {
        if (has("initial.v2.x.kind") || has("initial.v2.x.params") || has("initial.v2.s.coeffs"))
            throw ConfigError("initial.v2: x/s entries require v2.kind = separable");
        c.initial.v2 = HistoryProfile{Profile{}, {1.0}};
    } else if (v2kind == "separable") {
        const auto kind = str("initial.v2.x.kind", "zero");
        const auto params = list("initial.v2.x.params");
        c.initial.v2.x_part = guarded("initial.v2.x", [&] { return Profile::from_kind(kind, params); });
        c.initial.v2.s_coeffs = has("initial.v2.s.coeffs") ? list("initial.v2.s.coeffs") : std::vector<double>{1.0};
        if (c.initial.v2.s_coeffs.empty()) throw ConfigError("initial.v2.s.coeffs: needs at least one coefficient");
    } else {
        throw ConfigError("initial.v2.kind: expected zero or separable, got '" + v2kind + "'");
    }

    if (has("time.dt")) {
        const auto raw = m.at("time.dt");
        if (raw != "auto") {
            c.dt = to_double("time.dt", raw);
            if (!(*c.dt > 0.0)) throw ConfigError("time.dt: must be positive or 'auto'");
        }
    }
    num("time.t_end", c.t_end);
    if (!(c.t_end > 0.0)) throw ConfigError("time.t_end: must be positive");
    if (has("time.scheme")) c.scheme = guarded("time.scheme", [&] { return scheme_from_string(m.at("time.scheme")); });
    integer("time.record_every", c.record_every);
    integer("time.history_every", c.history_every);
    if (c.record_every < 1) throw ConfigError("time.record_every: must be at least 1");
    if (c.history_every < 0) throw ConfigError("time.history_every: must be non-negative");

    auto& ck = c.check;
    num("check.c_tol", ck.c_tol);
    num("check.c_tol_h", ck.c_tol_h);
    opt_num("check.fit_t_lo", ck.fit_t_lo);
    opt_num("check.fit_t_hi", ck.fit_t_hi);
    integer("check.probes", ck.probes);
    integer("check.diss_states", ck.diss_states);
    integer("check.diss_times", ck.diss_times);
    if (has("check.seed")) {
        const long s = to_integer("check.seed", m.at("check.seed"));
        if (s < 0) throw ConfigError("check.seed: must be non-negative");
        ck.seed = static_cast<std::uint64_t>(s);
    }
    if (ck.probes < 1 || ck.diss_states < 1 || ck.diss_times < 1)
        throw ConfigError("check: probes, diss_states and diss_times must be positive");

    opt_num("lyapunov.N1", c.N1);
    opt_num("lyapunov.N2", c.N2);
    opt_num("lyapunov.N3", c.N3);
    if (has("output.dir")) c.out_dir = m.at("output.dir");
    return c;
}

RunConfig parse_config(std::istream& is) { return build_config(read_config_map(is)); }
RunConfig load_config(const std::string& path) { return build_config(read_config_map(path)); }

ConfigMap to_config_map(const RunConfig& c) {
    ConfigMap m;
    const auto& ph = c.problem.phys;
    const auto& dm = c.problem.damping;
    m["model.rho"] = format_double(ph.rho);
    m["model.alpha1"] = format_double(ph.alpha1);
    m["model.gamma"] = format_double(ph.gamma);
    m["model.beta"] = format_double(ph.beta);
    m["model.mu"] = format_double(ph.mu);
    m["model.length"] = format_double(ph.length);
    m["model.tau.kind"] = c.problem.delay.kind_name();
    m["model.tau.params"] = join(c.problem.delay.params());
    m["model.mu1.kind"] = kind_name(dm.mu1_kind);
    m["model.mu1.params"] = join(kind_params(dm.mu1_kind));
    m["model.mu2.kind"] = kind_name(dm.mu2_kind);
    m["model.mu2.params"] = join(kind_params(dm.mu2_kind));
    m["model.xi_bar"] = format_double(c.problem.xi_bar);
    m["model.delta"] = format_double(dm.delta);
    m["model.M1"] = format_double(dm.M1);
    m["model.M2"] = format_double(dm.M2);
    m["grid.nx"] = std::to_string(c.nx);
    m["grid.ny"] = std::to_string(c.ny);
    auto profile = [&](const std::string& name, const Profile& p) {
        m["initial." + name + ".kind"] = p.kind_name();
        m["initial." + name + ".params"] = join(p.params());
    };
    profile("v0", c.initial.v0);
    profile("v1", c.initial.v1);
    profile("p0", c.initial.p0);
    profile("p1", c.initial.p1);
    m["initial.v2.kind"] = "separable";
    m["initial.v2.x.kind"] = c.initial.v2.x_part.kind_name();
    m["initial.v2.x.params"] = join(c.initial.v2.x_part.params());
    m["initial.v2.s.coeffs"] = join(c.initial.v2.s_coeffs);
    m["time.dt"] = c.dt ? format_double(*c.dt) : "auto";
    m["time.t_end"] = format_double(c.t_end);
    m["time.scheme"] = to_string(c.scheme);
    m["time.record_every"] = std::to_string(c.record_every);
    m["time.history_every"] = std::to_string(c.history_every);
    m["check.c_tol"] = format_double(c.check.c_tol);
    m["check.c_tol_h"] = format_double(c.check.c_tol_h);
    if (c.check.fit_t_lo) m["check.fit_t_lo"] = format_double(*c.check.fit_t_lo);
    if (c.check.fit_t_hi) m["check.fit_t_hi"] = format_double(*c.check.fit_t_hi);
    m["check.probes"] = std::to_string(c.check.probes);
    m["check.diss_states"] = std::to_string(c.check.diss_states);
    m["check.diss_times"] = std::to_string(c.check.diss_times);
    m["check.seed"] = std::to_string(c.check.seed);
    if (c.N1) m["lyapunov.N1"] = format_double(*c.N1);
    if (c.N2) m["lyapunov.N2"] = format_double(*c.N2);
    if (c.N3) m["lyapunov.N3"] = format_double(*c.N3);
    m["output.dir"] = c.out_dir;
    return m;
}

void write_config(std::ostream& os, const RunConfig& c) {
    std::string section;
    for (const auto& [key, value] : to_config_map(c)) {
        const auto dot = key.find('.');
        const auto sec = key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) os << '\n';
            os << '[' << sec << "]\n";
            section = sec;
        }
        os << key.substr(dot + 1) << " = " << value << '\n';
    }
}

}  // namespace piezo
