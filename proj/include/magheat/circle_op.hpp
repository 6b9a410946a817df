#pragma once

#include <Eigen/Dense>

#include "magheat/gauge.hpp"

namespace magheat {

/// Discretization of (-i d/dtheta - A_theta)^2 on the uniform periodic grid.
/// The covariant derivative D is the centered difference minus i A_theta at
/// the nodes; the operator is assembled as D^* D, Hermitian and
/// nonnegative by construction.
class CircleOperator {
  public:
    explicit CircleOperator(Eigen::VectorXd potential_theta);

    int n_theta() const { return static_cast<int>(potential_.size()); }
    const Eigen::VectorXd& potential() const { return potential_; }

    /// Dense Hermitian matrix D^* D.
    Eigen::MatrixXcd matrix() const;

    /// Smallest eigenvalue: shifted inverse power iteration (shift -0.1,
    /// residual tolerance 1e-10); dense eigensolver for n <= 512.
    double smallest_eigenvalue() const;

    /// Smallest eigenvalue via the dense eigensolver regardless of size.
    double smallest_eigenvalue_dense() const;

  private:
    Eigen::VectorXd potential_;
};

/// d=2 closed form: nu = dist(flux, Z)^2.
double nu_circle_exact(double flux_at_r);

/// Assemble the circle operator from the pulled-back potential at radius r
/// and return its smallest eigenvalue.
double nu_circle_numeric(const SphericalPotential& potential, double r, int n_theta);

}  // namespace magheat
