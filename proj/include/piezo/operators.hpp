#pragma once

// Semi-discrete operators on a Grid.
//
// Quadrature conventions shared by every functional:
//   * x-integrals of nodal fields use the trapezoid rule;
//   * x-derivatives in stiffness terms are forward differences on cells;
//   * y-integrals of the delay channel weight nodes j = 1..ny-1 by hy and
//     skip the inflow node, which is the quadrature under which first-order
//     upwind transport is exactly dissipative.

#include <span>
#include <vector>

#include "piezo/grid.hpp"
#include "piezo/model.hpp"

namespace piezo {

/// Three-point second difference with the clamped row (node 0) set to zero
/// and the free end closed by the mirror ghost node f[nx] = f[nx-2].
std::vector<double> second_difference(std::span<const double> field, double hx);
void second_difference(std::span<const double> field, double hx, std::span<double> out);

/// Trapezoid-rule x-integral of a * b.
double trapezoid_dot(std::span<const double> a, std::span<const double> b, double hx);
/// Cell-midpoint x-integral of a_x * b_x.
double stiffness_dot(std::span<const double> a, std::span<const double> b, double hx);
/// Double integral of zA * zB over the delay channel.
double channel_dot(const BeamState& a, const BeamState& b);

/// Transport speed (1 - tau'(t) y) / tau(t) in the delay channel.
double transport_speed(double tau, double dtau, double y);

/// Time derivative of the semi-discrete system at time t. The inflow row of
/// the channel carries u_t, so z(., 0) = u is preserved by the flow.
BeamState apply_generator(double t, const BeamState& state, const Problem& problem);

/// Discrete time-dependent inner product; the channel is weighted by
/// xi(t) tau(t).
double weighted_inner(double t, const BeamState& a, const BeamState& b, const Problem& problem);

/// <A(t)U, U>_t - kappa(t) <U, U>_t.
double dissipativity_residual(double t, const BeamState& state, const Problem& problem);

}  // namespace piezo
