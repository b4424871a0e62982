#include "piezo/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace piezo {

void second_difference(std::span<const double> f, double hx, std::span<double> out) {
    const std::size_t n = f.size();
    if (n < 3) throw std::invalid_argument("second_difference: need at least 3 nodes");
    if (out.size() != n) throw std::invalid_argument("second_difference: length mismatch");
    const double inv = 1.0 / (hx * hx);
    out[0] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv;
    out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv;
}

std::vector<double> second_difference(std::span<const double> field, double hx) {
    std::vector<double> out(field.size());
    second_difference(field, hx, out);
    return out;
}

double trapezoid_dot(std::span<const double> a, std::span<const double> b, double hx) {
    if (a.size() != b.size()) throw std::invalid_argument("trapezoid_dot: length mismatch");
    const std::size_t n = a.size();
    double s = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) s += a[i] * b[i];
    return s * hx;
}

double stiffness_dot(std::span<const double> a, std::span<const double> b, double hx) {
    if (a.size() != b.size()) throw std::invalid_argument("stiffness_dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) s += (a[i + 1] - a[i]) * (b[i + 1] - b[i]);
    return s / hx;
}

double channel_dot(const BeamState& a, const BeamState& b) {
    require_same_grid(a, b, "channel_dot");
    const auto& g = a.grid;
    const int nx = g.nx();
    const int ny = g.ny();
    double total = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 * g.hx() : g.hx();
        double row = 0.0;
        for (int j = 1; j < ny; ++j) row += a.z_at(i, j) * b.z_at(i, j);
        total += wx * row;
    }
    return total * g.hy();
}

double transport_speed(double tau, double dtau, double y) { return (1.0 - dtau * y) / tau; }

BeamState apply_generator(double t, const BeamState& s, const Problem& pb) {
    const auto& g = s.grid;
    const int nx = g.nx();
    const int ny = g.ny();
    const auto& ph = pb.phys;

    const double tau = pb.delay.tau(t);
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InadmissibleError("apply_generator: tau(" + std::to_string(t) + ") is not positive");
    }
    const double dtau = pb.delay.dtau(t);
    const double mu1 = pb.damping.mu1(t);
    const double mu2 = pb.damping.mu2(t);

    const auto d2v = second_difference(s.v, g.hx());
    const auto d2p = second_difference(s.p, g.hx());

    BeamState r(g);
    r.t = t;
    const double gb = ph.gamma * ph.beta;
    for (int i = 1; i < nx; ++i) {
        r.v[i] = s.u[i];
        r.p[i] = s.q[i];
        r.u[i] = (ph.alpha() * d2v[i] - gb * d2p[i] - mu1 * s.u[i] - mu2 * s.z_at(i, ny - 1)) / ph.rho;
        r.q[i] = (ph.beta * d2p[i] - gb * d2v[i]) / ph.mu;
    }

    const double inv_hy = 1.0 / g.hy();
    for (int i = 0; i < nx; ++i) {
        r.z_at(i, 0) = r.u[i];
        for (int j = 1; j < ny; ++j) {
            const double c = transport_speed(tau, dtau, g.y(j));
            r.z_at(i, j) = -c * (s.z_at(i, j) - s.z_at(i, j - 1)) * inv_hy;
        }
    }
    return r;
}

double weighted_inner(double t, const BeamState& a, const BeamState& b, const Problem& pb) {
    require_same_grid(a, b, "weighted_inner");
    const auto& ph = pb.phys;
    const double hx = a.grid.hx();
    const int nx = a.grid.nx();

    // gamma v_x - p_x is linear in the state, so form it nodally first.
    std::vector<double> sa(nx), sb(nx);
    for (int i = 0; i < nx; ++i) {
        sa[i] = ph.gamma * a.v[i] - a.p[i];
        sb[i] = ph.gamma * b.v[i] - b.p[i];
    }

    double s = ph.rho * trapezoid_dot(a.u, b.u, hx) + ph.mu * trapezoid_dot(a.q, b.q, hx) +
               ph.alpha1 * stiffness_dot(a.v, b.v, hx) + ph.beta * stiffness_dot(sa, sb, hx);
    s += pb.xi(t) * pb.delay.tau(t) * channel_dot(a, b);
    return s;
}

double dissipativity_residual(double t, const BeamState& state, const Problem& pb) {
    const auto rate = apply_generator(t, state, pb);
    return weighted_inner(t, rate, state, pb) - kappa(t, pb.delay) * weighted_inner(t, state, state, pb);
}

}  // namespace piezo
