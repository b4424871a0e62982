#include "piezo/functionals.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "piezo/operators.hpp"

namespace piezo {

double energy(double t, const BeamState& state, const Problem& problem) {
    return 0.5 * weighted_inner(t, state, state, problem);
}

namespace {
double outflow_sq(const BeamState& s) {
    const auto out = s.outflow();
    return trapezoid_dot(out, out, s.grid.hx());
}
}  // namespace

DissipationBound dissipation_bound(double t, const BeamState& s, const Problem& pb) {
    const auto sc = pb.stability();
    const double mu1 = pb.damping.mu1(t);
    const double c1 = sc.C1();
    const double c2 = sc.C2(pb.delay.dtau(t));
    const double usq = trapezoid_dot(s.u, s.u, s.grid.hx());
    return {-mu1 * c1 * usq - mu1 * c2 * outflow_sq(s), c1, c2};
}

LyapunovWeights LyapunovWeights::defaults(const PhysicalParams& phys) {
    return LyapunovWeights{1.0, 1.0, 8.0 / phys.gamma, 1.0};
}

double multiplier_I1(const BeamState& s, const PhysicalParams& ph) {
    const double hx = s.grid.hx();
    return ph.rho * trapezoid_dot(s.v, s.u, hx) + ph.gamma * ph.mu * trapezoid_dot(s.v, s.q, hx);
}

double multiplier_I2(const BeamState& s, const PhysicalParams& ph) {
    const double hx = s.grid.hx();
    std::vector<double> shear(s.v.size());
    for (std::size_t i = 0; i < shear.size(); ++i) shear[i] = ph.gamma * s.v[i] - s.p[i];
    return ph.rho * trapezoid_dot(s.u, shear, hx) + ph.gamma * ph.mu * trapezoid_dot(s.q, shear, hx);
}

double multiplier_I3(const BeamState& s, const PhysicalParams& ph) {
    const double hx = s.grid.hx();
    return ph.rho * trapezoid_dot(s.u, s.v, hx) + ph.mu * trapezoid_dot(s.q, s.p, hx);
}

double delay_functional(double t, const BeamState& s, const Problem& pb) {
    const auto& g = s.grid;
    const double tau = pb.delay.tau(t);
    std::vector<double> w(g.ny());
    for (int j = 1; j < g.ny(); ++j) w[j] = std::exp(-2.0 * tau * g.y(j));
    double total = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        const double wx = (i == 0 || i == g.nx() - 1) ? 0.5 * g.hx() : g.hx();
        double row = 0.0;
        for (int j = 1; j < g.ny(); ++j) row += w[j] * s.z_at(i, j) * s.z_at(i, j);
        total += wx * row;
    }
    return pb.xi_bar * tau * total * g.hy();
}

FunctionalSample lyapunov_suite(double t, const BeamState& s, const Problem& pb, const LyapunovWeights& w) {
    FunctionalSample f;
    f.t = t;
    f.E = energy(t, s, pb);
    f.I1 = multiplier_I1(s, pb.phys);
    f.I2 = multiplier_I2(s, pb.phys);
    f.I3 = multiplier_I3(s, pb.phys);
    f.J = delay_functional(t, s, pb);
    f.Lyap = w.N * f.E + w.N1 * f.I1 + w.N2 * f.I2 + w.N3 * f.I3 + f.J;
    f.velocity_sq = trapezoid_dot(s.u, s.u, s.grid.hx());
    f.outflow_sq = outflow_sq(s);
    f.dE_bound = dissipation_bound(t, s, pb).dE_bound;
    return f;
}

std::vector<double> centered_derivative(std::span<const double> t, std::span<const double> f) {
    if (t.size() != f.size()) throw std::invalid_argument("centered_derivative: length mismatch");
    const std::size_t n = t.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    if (n == 2) {
        d[0] = d[1] = (f[1] - f[0]) / (t[1] - t[0]);
        return d;
    }
    // three-point Lagrange derivative at x of the points (a, b, c)
    auto lagrange = [](double x, double a, double b, double c, double fa, double fb, double fc) {
        return fa * (2 * x - b - c) / ((a - b) * (a - c)) + fb * (2 * x - a - c) / ((b - a) * (b - c)) +
               fc * (2 * x - a - b) / ((c - a) * (c - b));
    };
    for (std::size_t k = 1; k + 1 < n; ++k)
        d[k] = lagrange(t[k], t[k - 1], t[k], t[k + 1], f[k - 1], f[k], f[k + 1]);
    d[0] = lagrange(t[0], t[0], t[1], t[2], f[0], f[1], f[2]);
    d[n - 1] = lagrange(t[n - 1], t[n - 3], t[n - 2], t[n - 1], f[n - 3], f[n - 2], f[n - 1]);
    return d;
}

std::vector<double> j_inequality_residual(std::span<const FunctionalSample> samples, const Problem& pb) {
    std::vector<double> t(samples.size()), J(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        t[k] = samples[k].t;
        J[k] = samples[k].J;
    }
    const auto dJ = centered_derivative(t, J);
    std::vector<double> r(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k)
        r[k] = dJ[k] - (-2.0 * J[k] + pb.xi_bar * samples[k].velocity_sq);
    return r;
}

Calibration calibrate_weights(std::span<const BeamState> probes, const Problem& pb, LyapunovWeights base,
                              double n_factor) {
    if (probes.empty()) throw std::invalid_argument("calibrate_weights: probe set is empty");
    if (!(n_factor > 1.0)) throw std::invalid_argument("calibrate_weights: n_factor must exceed 1");
    double g3 = 0.0;
    for (const auto& s : probes) {
        const double E = energy(s.t, s, pb);
        if (!(E > 0.0)) continue;
        const double rest = base.N1 * multiplier_I1(s, pb.phys) + base.N2 * multiplier_I2(s, pb.phys) +
                            base.N3 * multiplier_I3(s, pb.phys) + delay_functional(s.t, s, pb);
        g3 = std::max(g3, std::abs(rest) / E);
    }
    // relative slack absorbs roundoff at the extremal probes themselves
    g3 *= 1.0 + 1e-9;
    Calibration c;
    c.weights = base;
    c.gamma3 = g3;
    c.weights.N = g3 > 0.0 ? n_factor * g3 : 1.0;
    c.gamma1 = c.weights.N - g3;
    c.gamma2 = c.weights.N + g3;
    return c;
}

std::vector<BeamState> random_states(const Grid& g, int count, std::mt19937_64& rng, double t) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    constexpr int kModes = 4;
    const double L = g.length();
    std::vector<BeamState> out;
    out.reserve(count);
    for (int n = 0; n < count; ++n) {
        BeamState s(g);
        s.t = t;
        const bool smooth = (n % 2 == 0);
        for (auto* f : {&s.v, &s.u, &s.p, &s.q}) {
            if (smooth) {
                double a[kModes];
                for (double& c : a) c = uni(rng);
                for (int i = 0; i < g.nx(); ++i) {
                    double val = 0.0;
                    for (int m = 0; m < kModes; ++m)
                        val += a[m] / (m + 1) * std::sin((2 * m + 1) * std::numbers::pi * g.x(i) / (2 * L));
                    (*f)[i] = val;
                }
            } else {
                for (int i = 0; i < g.nx(); ++i) (*f)[i] = uni(rng);
            }
            (*f)[0] = 0.0;
        }
        for (int i = 0; i < g.nx(); ++i) {
            if (smooth) {
                const double slope = uni(rng);
                for (int j = 1; j < g.ny(); ++j) s.z_at(i, j) = s.u[i] + slope * g.y(j);
            } else {
                for (int j = 1; j < g.ny(); ++j) s.z_at(i, j) = uni(rng);
            }
        }
        s.impose_inflow();
        out.push_back(std::move(s));
    }
    return out;
}

void normalize(BeamState& s, const Problem& pb) {
    const double n2 = weighted_inner(s.t, s, s, pb);
    if (n2 > 0.0) s *= 1.0 / std::sqrt(n2);
}

std::vector<BeamState> extremal_probes(const Grid& g, const Problem& pb, const LyapunovWeights& w,
                                       std::span<const double> times) {
    const auto& ph = pb.phys;
    const int m = g.nx() - 1;  // free nodes 1..nx-1
    const double hx = g.hx();
    const Eigen::Index n = 4 * m;
    auto V = [](int k) { return k; };
    auto U = [m](int k) { return m + k; };
    auto P = [m](int k) { return 2 * m + k; };
    auto Q = [m](int k) { return 3 * m + k; };

    // trapezoid mass on free nodes and cell stiffness with the clamped node removed
    Eigen::VectorXd mass = Eigen::VectorXd::Constant(m, hx);
    mass[m - 1] = 0.5 * hx;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
    for (int c = 0; c < m; ++c) {  // cell between nodes c and c+1
        const int a = c - 1, b = c;  // free indices; a = -1 is the clamped node
        K(b, b) += 1.0 / hx;
        if (a >= 0) {
            K(a, a) += 1.0 / hx;
            K(a, b) -= 1.0 / hx;
            K(b, a) -= 1.0 / hx;
        }
    }

    Eigen::MatrixXd Ew = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    const double g2 = ph.gamma * ph.gamma;
    for (int a = 0; a < m; ++a) {
        Ew(U(a), U(a)) = 0.5 * ph.rho * mass[a];
        Ew(Q(a), Q(a)) = 0.5 * ph.mu * mass[a];
        for (int b = 0; b < m; ++b) {
            if (K(a, b) == 0.0) continue;
            Ew(V(a), V(b)) += 0.5 * (ph.alpha1 + ph.beta * g2) * K(a, b);
            Ew(V(a), P(b)) += -0.5 * ph.beta * ph.gamma * K(a, b);
            Ew(P(a), V(b)) += -0.5 * ph.beta * ph.gamma * K(a, b);
            Ew(P(a), P(b)) += 0.5 * ph.beta * K(a, b);
        }
    }
    // bilinear coefficient c * x_r * y_s split symmetrically
    auto add = [&S](Eigen::Index r, Eigen::Index s, double c) {
        S(r, s) += 0.5 * c;
        S(s, r) += 0.5 * c;
    };
    for (int a = 0; a < m; ++a) {
        const double wgt = mass[a];
        add(V(a), U(a), w.N1 * ph.rho * wgt);
        add(V(a), Q(a), w.N1 * ph.gamma * ph.mu * wgt);
        add(U(a), V(a), w.N2 * ph.rho * ph.gamma * wgt);
        add(U(a), P(a), -w.N2 * ph.rho * wgt);
        add(Q(a), V(a), w.N2 * ph.gamma * ph.mu * ph.gamma * wgt);
        add(Q(a), P(a), -w.N2 * ph.gamma * ph.mu * wgt);
        add(U(a), V(a), w.N3 * ph.rho * wgt);
        add(Q(a), P(a), w.N3 * ph.mu * wgt);
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Ew);
    if (es.info() != Eigen::Success) throw std::runtime_error("extremal_probes: eigen solver failed");

    const double t0 = times.empty() ? 0.0 : times.front();
    auto to_state = [&](const Eigen::VectorXd& y) {
        BeamState s(g);
        s.t = t0;
        for (int a = 0; a < m; ++a) {
            s.v[a + 1] = y[V(a)];
            s.u[a + 1] = y[U(a)];
            s.p[a + 1] = y[P(a)];
            s.q[a + 1] = y[Q(a)];
        }
        s.impose_inflow();
        return s;
    };
    std::vector<BeamState> out;
    out.push_back(to_state(es.eigenvectors().col(0)));
    out.push_back(to_state(es.eigenvectors().col(n - 1)));

    // channel: J / E_z is largest for mass next to the inflow when
    // mu1(t) exp(2 tau(t) hy) is smallest
    double best_t = t0;
    double best = std::numeric_limits<double>::infinity();
    for (double t : times) {
        const double key = pb.damping.mu1(t) * std::exp(2.0 * pb.delay.tau(t) * g.hy());
        if (key < best) {
            best = key;
            best_t = t;
        }
    }
    BeamState zs(g);
    zs.t = best_t;
    for (int i = 0; i < g.nx(); ++i) zs.z_at(i, 1) = 1.0;
    out.push_back(std::move(zs));
    return out;
}

}  // namespace piezo
