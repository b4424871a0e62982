#include "piezo/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>

namespace piezo {

std::string to_string(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::pass:
            return "pass";
        case ConditionStatus::fail:
            return "FAIL";
        case ConditionStatus::unevaluable:
            return "unevaluable";
    }
    return "?";
}

bool AdmissibilityReport::admissible() const { return first_failure() == nullptr; }

const ConditionResult* AdmissibilityReport::first_failure() const {
    for (const auto& c : conditions)
        if (c.status != ConditionStatus::pass) return &c;
    return nullptr;
}

const ConditionResult* AdmissibilityReport::find(const std::string& id) const {
    for (const auto& c : conditions)
        if (c.id == id) return &c;
    return nullptr;
}

namespace {

// Evaluates slack(t) >= 0 over the sample set; slack < 0 is a violation and a
// non-finite slack or an exception marks the condition unevaluable.
ConditionResult sampled(const char* id, std::string description, const std::vector<double>& times,
                        const std::function<double(double)>& slack) {
    ConditionResult r{id, std::move(description)};
    r.margin = std::numeric_limits<double>::infinity();
    for (double t : times) {
        double s;
        try {
            s = slack(t);
        } catch (const std::exception& e) {
            r.status = ConditionStatus::unevaluable;
            r.worst_t = t;
            r.detail = e.what();
            return r;
        }
        if (!std::isfinite(s)) {
            r.status = ConditionStatus::unevaluable;
            r.worst_t = t;
            r.detail = "non-finite value";
            return r;
        }
        if (s < r.margin) {
            r.margin = s;
            r.worst_t = t;
        }
    }
    if (r.margin < 0.0) r.status = ConditionStatus::fail;
    return r;
}

ConditionResult scalar(const char* id, std::string description, double slack, bool strict) {
    ConditionResult r{id, std::move(description)};
    r.margin = slack;
    if (!std::isfinite(slack)) {
        r.status = ConditionStatus::unevaluable;
        r.detail = "non-finite value";
    } else if (strict ? !(slack > 0.0) : slack < 0.0) {
        r.status = ConditionStatus::fail;
    }
    return r;
}

}  // namespace

AdmissibilityReport validate_admissibility(const Problem& problem, double horizon, int samples) {
    if (samples < 2) throw std::invalid_argument("validate_admissibility: samples must be >= 2");
    if (!(horizon > 0.0)) throw std::invalid_argument("validate_admissibility: horizon must be positive");

    const auto& delay = problem.delay;
    const auto& damping = problem.damping;

    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(samples) + 16);
    for (int k = 0; k < samples; ++k) times.push_back(horizon * k / (samples - 1));
    for (double t : delay.critical_times(horizon)) times.push_back(t);
    for (double t : damping.critical_times(horizon)) times.push_back(t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    AdmissibilityReport rep;
    rep.horizon = horizon;
    rep.samples = samples;
    auto& out = rep.conditions;

    const auto& ph = problem.phys;
    out.push_back(scalar(condition::physical, "rho, alpha1, gamma, beta, mu, L all positive",
                         std::min({ph.rho, ph.alpha1, ph.gamma, ph.beta, ph.mu, ph.length}), true));

    {
        ConditionResult r{condition::delay_regular, "tau' Lipschitz (tau'' bounded) on the horizon"};
        const auto bound = delay.ddtau_bound(horizon);
        if (!bound) {
            r.status = ConditionStatus::fail;
            r.margin = -std::numeric_limits<double>::infinity();
            r.detail = "tau' jumps inside the horizon";
        } else {
            r.margin = std::numeric_limits<double>::infinity();
            r.detail = "sup|tau''| = " + std::to_string(*bound);
        }
        out.push_back(r);
    }

    const double tau0 = delay.tau0();
    const double tau1 = delay.tau1();
    {
        auto r = sampled(condition::delay_bounds, "0 < tau0 <= tau(t) <= tau1", times, [&](double t) {
            const double v = delay.tau(t);
            return std::min({tau0, v - tau0, tau1 - v});
        });
        if (r.status == ConditionStatus::pass && !(tau0 > 0.0)) r.status = ConditionStatus::fail;
        r.detail = "tau0 = " + std::to_string(tau0) + ", tau1 = " + std::to_string(tau1);
        out.push_back(r);
    }

    const double d = delay.d();
    {
        auto r = sampled(condition::delay_rate, "tau'(t) <= d < 1", times,
                         [&](double t) { return std::min(d - delay.dtau(t), 1.0 - d); });
        if (r.status == ConditionStatus::pass && !(d < 1.0)) r.status = ConditionStatus::fail;
        r.detail = "d = " + std::to_string(d);
        out.push_back(r);
    }

    out.push_back(sampled(condition::weight_monotone, "mu1(t) > 0 and mu1'(t) <= 0", times, [&](double t) {
        const double m = damping.mu1(t);
        if (!(m > 0.0)) return m == 0.0 ? -std::numeric_limits<double>::min() : m;
        return -damping.dmu1(t);
    }));

    out.push_back(sampled(condition::weight_log_rate, "|mu1'(t)/mu1(t)| <= M1", times, [&](double t) {
        return damping.M1 - std::abs(damping.dmu1(t) / damping.mu1(t));
    }));

    {
        const double root = d < 1.0 ? std::sqrt(1.0 - d) : std::numeric_limits<double>::quiet_NaN();
        ConditionResult r{condition::delta_window, "0 < delta < sqrt(1-d)"};
        r.margin = std::min(damping.delta, root - damping.delta);
        if (!std::isfinite(r.margin)) {
            r.status = ConditionStatus::unevaluable;
        } else if (!(damping.delta > 0.0) || !(damping.delta < root)) {
            r.status = ConditionStatus::fail;
        }
        r.detail = "delta = " + std::to_string(damping.delta) + ", sqrt(1-d) = " + std::to_string(root);
        out.push_back(r);
    }

    out.push_back(sampled(condition::delayed_weight_bound, "|mu2(t)| <= delta mu1(t)", times, [&](double t) {
        return damping.delta * damping.mu1(t) - std::abs(damping.mu2(t));
    }));

    out.push_back(sampled(condition::delayed_weight_rate, "|mu2'(t)| <= M2 mu1(t)", times, [&](double t) {
        return damping.M2 * damping.mu1(t) - std::abs(damping.dmu2(t));
    }));

    {
        ConditionResult r{condition::xi_window, "delta/sqrt(1-d) < xi_bar < 2 - delta/sqrt(1-d)"};
        try {
            const auto w = xi_window(damping.delta, d);
            r.margin = std::min(problem.xi_bar - w.lo, w.hi - problem.xi_bar);
            if (!w.contains(problem.xi_bar)) r.status = ConditionStatus::fail;
            r.detail = "window (" + std::to_string(w.lo) + ", " + std::to_string(w.hi) + ")";
        } catch (const std::exception& e) {
            r.status = ConditionStatus::fail;
            r.margin = -std::numeric_limits<double>::infinity();
            r.detail = e.what();
        }
        out.push_back(r);
    }

    {
        const auto sc = problem.stability();
        rep.C1 = sc.C1();
        auto r = sampled(condition::dissipation, "C1 > 0 and C2(t) > 0", times, [&](double t) {
            return std::min(sc.C1(), sc.C2(delay.dtau(t)));
        });
        rep.C2_min = std::numeric_limits<double>::infinity();
        for (double t : times) rep.C2_min = std::min(rep.C2_min, sc.C2(delay.dtau(t)));
        if (r.status == ConditionStatus::pass && !(r.margin > 0.0)) r.status = ConditionStatus::fail;
        out.push_back(r);
    }

    return rep;
}

void print_report(std::ostream& os, const AdmissibilityReport& report) {
    os << "admissibility over [0, " << report.horizon << "] with " << report.samples << " samples\n";
    for (const auto& c : report.conditions) {
        os << "  " << std::left << std::setw(12) << to_string(c.status) << std::setw(30) << c.id
           << " margin=" << std::setprecision(6) << c.margin << " at t=" << c.worst_t;
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << "  -- " << c.description << "\n";
    }
    os << "  C1 = " << report.C1 << ", C2_min = " << report.C2_min << "\n";
    if (const auto* f = report.first_failure()) {
        os << "verdict: inadmissible (first failing condition: " << f->id << ")\n";
    } else {
        os << "verdict: admissible\n";
    }
}

}  // namespace piezo
