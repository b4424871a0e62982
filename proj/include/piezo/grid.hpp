#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace piezo {

/// Uniform nodes on [0, L] x [0, 1]. Node 0 sits at x = 0 (clamped end) and
/// node nx-1 at x = L (free end); y-node 0 is the inflow of the delay channel.
class Grid {
public:
    Grid(int nx, int ny, double length);

    [[nodiscard]] int nx() const { return nx_; }
    [[nodiscard]] int ny() const { return ny_; }
    [[nodiscard]] double length() const { return length_; }
    [[nodiscard]] double hx() const { return length_ / (nx_ - 1); }
    [[nodiscard]] double hy() const { return 1.0 / (ny_ - 1); }
    [[nodiscard]] double x(int i) const { return length_ * i / (nx_ - 1); }
    [[nodiscard]] double y(int j) const { return static_cast<double>(j) / (ny_ - 1); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int nx_;
    int ny_;
    double length_;
};

/// Discrete fields at one time. z is stored x-major: z[i * ny + j].
/// The same type carries time derivatives ("rates") of a state.
struct BeamState {
    explicit BeamState(const Grid& g);

    Grid grid;
    std::vector<double> v;  // longitudinal displacement
    std::vector<double> u;  // v_t
    std::vector<double> p;  // electric charge
    std::vector<double> q;  // p_t
    std::vector<double> z;  // delay channel
    double t = 0.0;

    [[nodiscard]] double& z_at(int i, int j) { return z[static_cast<std::size_t>(i) * grid.ny() + j]; }
    [[nodiscard]] double z_at(int i, int j) const { return z[static_cast<std::size_t>(i) * grid.ny() + j]; }
    [[nodiscard]] std::span<double> z_row(int i) {
        return {z.data() + static_cast<std::size_t>(i) * grid.ny(), static_cast<std::size_t>(grid.ny())};
    }
    [[nodiscard]] std::span<const double> z_row(int i) const {
        return {z.data() + static_cast<std::size_t>(i) * grid.ny(), static_cast<std::size_t>(grid.ny())};
    }
    /// z(., 1): the delayed velocity entering the displacement equation.
    [[nodiscard]] std::vector<double> outflow() const;

    /// Re-imposes z(., 0) = u.
    void impose_inflow();
    /// Largest deviation from v[0] = p[0] = 0 and z(., 0) = u.
    [[nodiscard]] double constraint_violation() const;

    BeamState& operator+=(const BeamState& o);
    BeamState& operator*=(double a);
    /// this += a * o
    BeamState& axpy(double a, const BeamState& o);

    [[nodiscard]] double max_abs() const;
};

BeamState operator+(BeamState a, const BeamState& b);
BeamState operator*(double a, BeamState s);

void require_same_grid(const BeamState& a, const BeamState& b, const char* where);

}  // namespace piezo
