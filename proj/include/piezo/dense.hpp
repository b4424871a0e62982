#pragma once

// Dense-matrix form of the semi-discrete generator. Assembled entry by entry
// from the stencils so it can cross-check the matrix-free apply_generator.
// Flattened layout: [v(nx) | u(nx) | p(nx) | q(nx) | z(nx*ny, x-major)].

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "piezo/grid.hpp"
#include "piezo/model.hpp"

namespace piezo {

[[nodiscard]] Eigen::Index state_dimension(const Grid& g);
[[nodiscard]] Eigen::VectorXd flatten(const BeamState& s);
[[nodiscard]] BeamState unflatten(const Eigen::VectorXd& x, const Grid& g, double t = 0.0);

/// Matrix A(t) with d/dt flatten(U) = A(t) flatten(U).
[[nodiscard]] Eigen::MatrixXd generator_matrix(double t, const Grid& g, const Problem& problem);

/// Plain-text dump: first line "rows cols", then one row per line with
/// entries in shortest round-trip decimal form.
void write_matrix_text(std::ostream& os, const Eigen::MatrixXd& m);
void write_matrix_text(const std::string& path, const Eigen::MatrixXd& m);
[[nodiscard]] Eigen::MatrixXd read_matrix_text(std::istream& is);

}  // namespace piezo
