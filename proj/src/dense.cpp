#include "piezo/dense.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "piezo/format.hpp"

namespace piezo {

namespace {
struct Layout {
    Eigen::Index nx, ny;
    Eigen::Index v(Eigen::Index i) const { return i; }
    Eigen::Index u(Eigen::Index i) const { return nx + i; }
    Eigen::Index p(Eigen::Index i) const { return 2 * nx + i; }
    Eigen::Index q(Eigen::Index i) const { return 3 * nx + i; }
    Eigen::Index z(Eigen::Index i, Eigen::Index j) const { return 4 * nx + i * ny + j; }
};
}  // namespace

Eigen::Index state_dimension(const Grid& g) {
    return 4 * static_cast<Eigen::Index>(g.nx()) + static_cast<Eigen::Index>(g.nx()) * g.ny();
}

Eigen::VectorXd flatten(const BeamState& s) {
    const Layout L{s.grid.nx(), s.grid.ny()};
    Eigen::VectorXd x(state_dimension(s.grid));
    for (Eigen::Index i = 0; i < L.nx; ++i) {
        x[L.v(i)] = s.v[i];
        x[L.u(i)] = s.u[i];
        x[L.p(i)] = s.p[i];
        x[L.q(i)] = s.q[i];
        for (Eigen::Index j = 0; j < L.ny; ++j) x[L.z(i, j)] = s.z_at(int(i), int(j));
    }
    return x;
}

BeamState unflatten(const Eigen::VectorXd& x, const Grid& g, double t) {
    if (x.size() != state_dimension(g)) throw std::invalid_argument("unflatten: dimension mismatch");
    const Layout L{g.nx(), g.ny()};
    BeamState s(g);
    s.t = t;
    for (Eigen::Index i = 0; i < L.nx; ++i) {
        s.v[i] = x[L.v(i)];
        s.u[i] = x[L.u(i)];
        s.p[i] = x[L.p(i)];
        s.q[i] = x[L.q(i)];
        for (Eigen::Index j = 0; j < L.ny; ++j) s.z_at(int(i), int(j)) = x[L.z(i, j)];
    }
    return s;
}

Eigen::MatrixXd generator_matrix(double t, const Grid& g, const Problem& pb) {
    const Layout L{g.nx(), g.ny()};
    const Eigen::Index n = state_dimension(g);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);

    const auto& ph = pb.phys;
    const double h2 = g.hx() * g.hx();
    const double tau = pb.delay.tau(t);
    const double dtau = pb.delay.dtau(t);
    const double mu1 = pb.damping.mu1(t);
    const double mu2 = pb.damping.mu2(t);

    // D2 as an (nx x nx) matrix with zero clamped row and mirrored free end.
    Eigen::MatrixXd D2 = Eigen::MatrixXd::Zero(L.nx, L.nx);
    for (Eigen::Index i = 1; i < L.nx - 1; ++i) {
        D2(i, i - 1) = 1.0 / h2;
        D2(i, i) = -2.0 / h2;
        D2(i, i + 1) = 1.0 / h2;
    }
    D2(L.nx - 1, L.nx - 2) = 2.0 / h2;
    D2(L.nx - 1, L.nx - 1) = -2.0 / h2;

    const double gb = ph.gamma * ph.beta;
    for (Eigen::Index i = 1; i < L.nx; ++i) {
        A(L.v(i), L.u(i)) = 1.0;
        A(L.p(i), L.q(i)) = 1.0;
        for (Eigen::Index k = 0; k < L.nx; ++k) {
            A(L.u(i), L.v(k)) += ph.alpha() * D2(i, k) / ph.rho;
            A(L.u(i), L.p(k)) += -gb * D2(i, k) / ph.rho;
            A(L.q(i), L.p(k)) += ph.beta * D2(i, k) / ph.mu;
            A(L.q(i), L.v(k)) += -gb * D2(i, k) / ph.mu;
        }
        A(L.u(i), L.u(i)) += -mu1 / ph.rho;
        A(L.u(i), L.z(i, L.ny - 1)) += -mu2 / ph.rho;
    }
    for (Eigen::Index i = 0; i < L.nx; ++i) {
        A.row(L.z(i, 0)) = A.row(L.u(i));
        for (Eigen::Index j = 1; j < L.ny; ++j) {
            const double y = static_cast<double>(j) / (L.ny - 1);
            const double c = (1.0 - dtau * y) / tau * (L.ny - 1);
            A(L.z(i, j), L.z(i, j)) += -c;
            A(L.z(i, j), L.z(i, j - 1)) += c;
        }
    }
    return A;
}

void write_matrix_text(std::ostream& os, const Eigen::MatrixXd& m) {
    os << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << format_double(m(r, c));
        }
        os << '\n';
    }
}

void write_matrix_text(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_matrix_text(os, m);
}

Eigen::MatrixXd read_matrix_text(std::istream& is) {
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw std::runtime_error("read_matrix_text: bad header");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!(is >> m(r, c))) throw std::runtime_error("read_matrix_text: truncated data");
    return m;
}

}  // namespace piezo
