#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <utility>
#include <vector>

#include "magheat/gauge.hpp"

namespace magheat {

/// Sparse Hermitian discretization of the covariant magnetic Dirichlet form
/// on S^2 over a latitude-longitude grid. Pole nodes are excluded; the
/// nearest rings couple through the regular phi-edges only (natural
/// boundary, the constant function stays in the kernel for A = 0).
/// Each grid edge contributes w_e |e^{-i b/2} u_b - e^{i b/2} u_a|^2 / h_e^2
/// with b the midpoint line integral of the covariant potential along the
/// edge, so the form is nonnegative by construction and the assembled
/// matrix Hermitian.
class SphereOperator {
  public:
    SphereOperator(const SphericalPotential& potential, double r, int n_phi, int n_theta);

    int n_phi() const { return n_phi_; }
    int n_theta() const { return n_theta_; }
    int size() const { return n_phi_ * n_theta_; }

    const Eigen::SparseMatrix<std::complex<double>>& form_matrix() const { return K_; }
    const Eigen::VectorXd& mass() const { return mass_; }

    /// Value of the quadratic form on a vector (real nonnegative).
    double form_value(const Eigen::VectorXcd& u) const;
    double mass_value(const Eigen::VectorXcd& u) const;

    /// k lowest eigenvalues of the generalized pair (form, mass) via shifted
    /// inverse power iteration with deflation (shift -0.1, residual 1e-10).
    std::vector<double> lowest_eigenvalues(int k) const;

  private:
    int n_phi_, n_theta_;
    Eigen::SparseMatrix<std::complex<double>> K_;
    Eigen::VectorXd mass_;
};

/// Smallest eigenvalue of the magnetic Laplace-Beltrami operator on S^2
/// with the pulled-back potential at radius r.
double nu_sphere_numeric(const SphericalPotential& potential, double r,
                         std::pair<int, int> grid);

/// Max finite-difference residual |dA_theta/dphi - dA_phi/dtheta| of the
/// pulled-back potential at radius r (d=3). Small residual beyond the field
/// support predicts nu_B(r) ~ 0. On S^1 every 1-form is closed as a top
/// form, so d=2 returns 0 identically (exactness, not closedness, decides
/// there).
double exactness_check(const SphericalPotential& potential, double r, double h);

}  // namespace magheat
