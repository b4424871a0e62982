#include "piezo/stepper.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "piezo/operators.hpp"

namespace piezo {

std::string to_string(Scheme s) { return s == Scheme::trapezoid ? "trapezoid" : "rk4"; }

Scheme scheme_from_string(const std::string& name) {
    if (name == "trapezoid" || name == "semi-implicit-trapezoid") return Scheme::trapezoid;
    if (name == "rk4" || name == "explicit-rk4") return Scheme::rk4;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected trapezoid or rk4)");
}

double max_transport_speed(const DelaySpec& delay) {
    return std::max(1.0, 1.0 - delay.dtau_min()) / delay.tau0();
}

double cfl_number(double dt, const Grid& grid, const DelaySpec& delay) {
    return dt * max_transport_speed(delay) / grid.hy();
}

double default_dt(const Grid& grid, const Problem& pb) {
    const double transport = 0.5 * grid.hy() / max_transport_speed(pb.delay);
    const double wave = 0.25 * grid.hx() * std::sqrt(pb.phys.rho / pb.phys.alpha());
    return std::min(transport, wave);
}

long step_count(double dt, double t_end) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_count: dt must be positive");
    if (t_end < 0.0) throw std::invalid_argument("step_count: t_end must be non-negative");
    return static_cast<long>(std::ceil(t_end / dt - 1e-9));
}

void channel_affine_map(const BeamState& s, double tau_mid, double dtau_mid, double dt, std::span<double> a,
                        std::span<double> b) {
    const auto& g = s.grid;
    const int nx = g.nx();
    const int ny = g.ny();
    b[0] = 1.0;
    for (int j = 1; j < ny; ++j) {
        const double lam = 0.5 * dt * transport_speed(tau_mid, dtau_mid, g.y(j)) / g.hy();
        b[j] = lam * b[j - 1] / (1.0 + lam);
    }
    for (int i = 0; i < nx; ++i) {
        const auto zr = s.z_row(i);
        double* ar = a.data() + static_cast<std::size_t>(i) * ny;
        ar[0] = 0.0;
        for (int j = 1; j < ny; ++j) {
            const double lam = 0.5 * dt * transport_speed(tau_mid, dtau_mid, g.y(j)) / g.hy();
            ar[j] = (lam * ar[j - 1] + (1.0 - lam) * zr[j] + lam * zr[j - 1]) / (1.0 + lam);
        }
    }
}

TimeStepper::TimeStepper(const Problem& problem, const Grid& grid, double dt, Scheme scheme)
    : problem_(problem),
      grid_(grid),
      dt_(dt),
      scheme_(scheme),
      a_(static_cast<std::size_t>(grid.nx()) * grid.ny()),
      b_(grid.ny()),
      rhs_(2 * static_cast<std::size_t>(grid.nx())) {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeStepper: dt must be positive");
}

void TimeStepper::advance(BeamState& s) {
    if (!(s.grid == grid_)) throw std::invalid_argument("TimeStepper: grid mismatch");
    const double cfl = cfl_number(dt_, grid_, problem_.delay);
    if (!(cfl <= 1.0)) {
        throw CflViolation("transport CFL number " + std::to_string(cfl) + " exceeds 1 (dt = " +
                           std::to_string(dt_) + ")");
    }
    if (scheme_ == Scheme::trapezoid)
        advance_trapezoid(s);
    else
        advance_rk4(s);
}

// Crank-Nicolson on the full system at t + dt/2. The channel update is an
// affine function of the new velocity, so only the (v, p) pair needs a solve:
// a block-tridiagonal system with 2x2 blocks on nodes 1..nx-1.
void TimeStepper::advance_trapezoid(BeamState& s) {
    const auto& ph = problem_.phys;
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    const double h = 0.5 * dt_;
    const double tm = s.t + h;

    const double tau = problem_.delay.tau(tm);
    if (!(tau > 0.0)) throw InadmissibleError("trapezoid step: tau is not positive at t = " + std::to_string(tm));
    const double dtau = problem_.delay.dtau(tm);
    const double mu1 = problem_.damping.mu1(tm);
    const double mu2 = problem_.damping.mu2(tm);

    channel_affine_map(s, tau, dtau, dt_, a_, b_);
    const double bN = b_[ny - 1];

    const double hx2 = grid_.hx() * grid_.hx();
    const double ka = h * ph.alpha() / hx2;
    const double kb = h * ph.gamma * ph.beta / hx2;
    const double kc = h * ph.beta / hx2;
    const double damp = mu1 + mu2 * bN;

    const auto d2v = second_difference(s.v, grid_.hx());
    const auto d2p = second_difference(s.p, grid_.hx());

    using Mat2 = Eigen::Matrix2d;
    using Vec2 = Eigen::Vector2d;
    const int m = nx - 1;  // unknown blocks, node i <-> block i-1

    Mat2 diag;
    diag << ph.rho / h + damp + 2 * ka, -2 * kb, -2 * kb, ph.mu / h + 2 * kc;
    Mat2 off;
    off << -ka, kb, kb, -kc;

    auto rhs_at = [&](int i) {
        const double aN = a_[static_cast<std::size_t>(i) * ny + ny - 1];
        const double zN = s.z_at(i, ny - 1);
        Vec2 r;
        r[0] = (ph.rho / h) * s.v[i] + 2 * ph.rho * s.u[i] + h * ph.alpha() * d2v[i] -
               h * ph.gamma * ph.beta * d2p[i] + damp * s.v[i] - h * mu2 * (zN + aN - bN * s.u[i]);
        r[1] = (ph.mu / h) * s.p[i] + 2 * ph.mu * s.q[i] + h * ph.beta * d2p[i] - h * ph.gamma * ph.beta * d2v[i];
        return r;
    };

    // forward elimination; row k couples to k-1 via `off` (doubled on the
    // mirrored last row) and to k+1 via `off`
    std::vector<Mat2> dinv(m);
    std::vector<Vec2> rp(m);
    Mat2 dk = diag;
    Vec2 rk = rhs_at(1);
    for (int k = 0; k < m; ++k) {
        if (k > 0) {
            const Mat2 lower = (k == m - 1) ? Mat2(2.0 * off) : off;
            const Mat2 lfac = lower * dinv[k - 1];
            dk = diag - lfac * off;
            rk = rhs_at(k + 1) - lfac * rp[k - 1];
        }
        dinv[k] = dk.inverse();
        rp[k] = rk;
    }
    std::vector<Vec2> x(m);
    x[m - 1] = dinv[m - 1] * rp[m - 1];
    for (int k = m - 2; k >= 0; --k) x[k] = dinv[k] * (rp[k] - off * x[k + 1]);

    for (int i = 1; i < nx; ++i) {
        const double w = x[i - 1][0];
        const double sp = x[i - 1][1];
        const double u_new = (w - s.v[i]) / h - s.u[i];
        const double q_new = (sp - s.p[i]) / h - s.q[i];
        s.v[i] = w;
        s.p[i] = sp;
        s.u[i] = u_new;
        s.q[i] = q_new;
    }
    s.v[0] = s.p[0] = s.u[0] = s.q[0] = 0.0;

    for (int i = 0; i < nx; ++i) {
        double* zr = s.z.data() + static_cast<std::size_t>(i) * ny;
        const double* ar = a_.data() + static_cast<std::size_t>(i) * ny;
        for (int j = 0; j < ny; ++j) zr[j] = ar[j] + b_[j] * s.u[i];
    }
    s.t += dt_;
}

void TimeStepper::advance_rk4(BeamState& s) {
    const double t = s.t;
    const double h = dt_;
    auto stage = [&](double a, const BeamState& k) {
        BeamState y = s;
        y.axpy(a, k);
        y.impose_inflow();
        return y;
    };
    const BeamState k1 = apply_generator(t, s, problem_);
    const BeamState k2 = apply_generator(t + h / 2, stage(h / 2, k1), problem_);
    const BeamState k3 = apply_generator(t + h / 2, stage(h / 2, k2), problem_);
    const BeamState k4 = apply_generator(t + h, stage(h, k3), problem_);
    s.axpy(h / 6, k1);
    s.axpy(h / 3, k2);
    s.axpy(h / 3, k3);
    s.axpy(h / 6, k4);
    s.impose_inflow();
    s.t = t + h;
}

BeamState step(const BeamState& state, const SchemeConfig& cfg, const Problem& problem) {
    TimeStepper stepper(problem, state.grid, cfg.dt, cfg.scheme);
    BeamState next = state;
    stepper.advance(next);
    return next;
}

TransportOnly::TransportOnly(const Grid& grid, const DelaySpec& delay, BeamState initial)
    : delay_(delay), state_(std::move(initial)), a_(static_cast<std::size_t>(grid.nx()) * grid.ny()), b_(grid.ny()) {
    if (!(state_.grid == grid)) throw std::invalid_argument("TransportOnly: grid mismatch");
}

void TransportOnly::advance(double dt, std::span<const double> inflow_new) {
    const auto& g = state_.grid;
    if (inflow_new.size() != static_cast<std::size_t>(g.nx()))
        throw std::invalid_argument("TransportOnly::advance: inflow length mismatch");
    const double tm = state_.t + 0.5 * dt;
    channel_affine_map(state_, delay_.tau(tm), delay_.dtau(tm), dt, a_, b_);
    for (int i = 0; i < g.nx(); ++i) {
        state_.u[i] = inflow_new[i];
        for (int j = 0; j < g.ny(); ++j)
            state_.z_at(i, j) = a_[static_cast<std::size_t>(i) * g.ny() + j] + b_[j] * inflow_new[i];
    }
    state_.t += dt;
}

}  // namespace piezo
