#include "magheat/circle_op.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <complex>
#include <stdexcept>

namespace magheat {

using cd = std::complex<double>;

CircleOperator::CircleOperator(Eigen::VectorXd potential_theta)
    : potential_(std::move(potential_theta)) {
    if (potential_.size() < 32)
        throw std::invalid_argument("CircleOperator: n_theta must be >= 32");
}

Eigen::MatrixXcd CircleOperator::matrix() const {
    const int n = n_theta();
    const double h = 2.0 * M_PI / n;
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        D(j, (j + 1) % n) += 1.0 / (2.0 * h);
        D(j, (j - 1 + n) % n) -= 1.0 / (2.0 * h);
        D(j, j) -= cd(0.0, potential_[j]);
    }
    return D.adjoint() * D;
}

double CircleOperator::smallest_eigenvalue_dense() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

double CircleOperator::smallest_eigenvalue() const {
    const int n = n_theta();
    if (n <= 512) return smallest_eigenvalue_dense();

    const Eigen::MatrixXcd H = matrix();
    const double shift = -0.1;
    Eigen::MatrixXcd Hs = H;
    Hs.diagonal().array() -= shift;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Hs);

    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        v = lu.solve(v);
        v.normalize();
        lambda = std::real(v.dot(H * v));
        const double resid = (H * v - lambda * v).norm();
        if (resid < 1e-10) return lambda;
    }
    throw std::runtime_error("CircleOperator: inverse iteration did not converge");
}

double nu_circle_exact(double flux_at_r) {
    const double d = dist_to_integers(flux_at_r);
    return d * d;
}

double nu_circle_numeric(const SphericalPotential& potential, double r, int n_theta) {
    Eigen::VectorXd a(n_theta);
    for (int j = 0; j < n_theta; ++j)
        a[j] = potential.theta_component(2.0 * M_PI * j / n_theta, r);
    return CircleOperator(std::move(a)).smallest_eigenvalue();
}

}  // namespace magheat
