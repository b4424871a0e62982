#include "piezo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace piezo {

Grid::Grid(int nx, int ny, double length) : nx_(nx), ny_(ny), length_(length) {
    if (nx < 3) throw std::invalid_argument("Grid: nx must be >= 3, got " + std::to_string(nx));
    if (ny < 2) throw std::invalid_argument("Grid: ny must be >= 2, got " + std::to_string(ny));
    if (!(length > 0.0)) throw std::invalid_argument("Grid: length must be positive");
}

BeamState::BeamState(const Grid& g)
    : grid(g),
      v(g.nx(), 0.0),
      u(g.nx(), 0.0),
      p(g.nx(), 0.0),
      q(g.nx(), 0.0),
      z(static_cast<std::size_t>(g.nx()) * g.ny(), 0.0) {}

std::vector<double> BeamState::outflow() const {
    std::vector<double> out(grid.nx());
    for (int i = 0; i < grid.nx(); ++i) out[i] = z_at(i, grid.ny() - 1);
    return out;
}

void BeamState::impose_inflow() {
    for (int i = 0; i < grid.nx(); ++i) z_at(i, 0) = u[i];
}

double BeamState::constraint_violation() const {
    double worst = std::max(std::abs(v[0]), std::abs(p[0]));
    for (int i = 0; i < grid.nx(); ++i) worst = std::max(worst, std::abs(z_at(i, 0) - u[i]));
    return worst;
}

namespace {
template <class F>
void for_each_field(BeamState& a, const BeamState& b, F&& f) {
    f(a.v, b.v);
    f(a.u, b.u);
    f(a.p, b.p);
    f(a.q, b.q);
    f(a.z, b.z);
}
}  // namespace

BeamState& BeamState::operator+=(const BeamState& o) { return axpy(1.0, o); }

BeamState& BeamState::axpy(double a, const BeamState& o) {
    require_same_grid(*this, o, "BeamState::axpy");
    for_each_field(*this, o, [a](std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += a * y[k];
    });
    return *this;
}

BeamState& BeamState::operator*=(double a) {
    for (auto* f : {&v, &u, &p, &q, &z})
        for (double& x : *f) x *= a;
    return *this;
}

double BeamState::max_abs() const {
    double m = 0.0;
    for (const auto* f : {&v, &u, &p, &q, &z})
        for (double x : *f) m = std::max(m, std::abs(x));
    return m;
}

BeamState operator+(BeamState a, const BeamState& b) { return a += b; }
BeamState operator*(double a, BeamState s) { return s *= a; }

void require_same_grid(const BeamState& a, const BeamState& b, const char* where) {
    if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace piezo
