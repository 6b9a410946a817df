#include "magheat/sphere_op.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace magheat {

using cd = std::complex<double>;

SphereOperator::SphereOperator(const SphericalPotential& potential, double r, int n_phi,
                               int n_theta)
    : n_phi_(n_phi), n_theta_(n_theta) {
    if (n_phi < 16 || n_theta < 32)
        throw std::invalid_argument("SphereOperator: grid must be at least (16,32)");
    if (potential.dimension() != 3)
        throw std::invalid_argument("SphereOperator: d=3 potential required");
    if (r <= 0.0) throw std::invalid_argument("SphereOperator: r must be positive");

    const double dphi = M_PI / (n_phi + 1);
    const double dth = 2.0 * M_PI / n_theta;
    auto idx = [&](int p, int q) { return (p - 1) * n_theta + ((q % n_theta + n_theta) % n_theta); };

    mass_.resize(size());
    for (int p = 1; p <= n_phi; ++p) {
        const double w = std::sin(p * dphi) * dphi * dth;
        for (int q = 0; q < n_theta; ++q) mass_[idx(p, q)] = w;
    }

    std::vector<Eigen::Triplet<cd>> trips;
    trips.reserve(8 * static_cast<std::size_t>(size()));
    auto add_edge = [&](int i, int j, double beta, double coef) {
        trips.emplace_back(i, i, cd(coef, 0.0));
        trips.emplace_back(j, j, cd(coef, 0.0));
        trips.emplace_back(i, j, -coef * std::exp(cd(0.0, -beta)));
        trips.emplace_back(j, i, -coef * std::exp(cd(0.0, beta)));
    };

    // colatitude edges between consecutive rings
    for (int p = 1; p < n_phi; ++p) {
        const double phim = (p + 0.5) * dphi;
        const double w = std::sin(phim) * dphi * dth;
        for (int q = 0; q < n_theta; ++q) {
            const auto [aphi, ath] = potential.components(phim, q * dth, r);
            (void)ath;
            add_edge(idx(p, q), idx(p + 1, q), aphi * dphi, w / (dphi * dphi));
        }
    }
    // azimuthal edges around each ring
    for (int p = 1; p <= n_phi; ++p) {
        const double phi = p * dphi;
        const double sp = std::sin(phi);
        const double w = sp * dphi * dth;
        const double coef = w / (sp * dth * sp * dth);
        for (int q = 0; q < n_theta; ++q) {
            const auto [aphi, ath] = potential.components(phi, (q + 0.5) * dth, r);
            (void)aphi;
            add_edge(idx(p, q), idx(p, q + 1), ath * dth, coef);
        }
    }
    K_.resize(size(), size());
    K_.setFromTriplets(trips.begin(), trips.end());
    K_.makeCompressed();
}

double SphereOperator::form_value(const Eigen::VectorXcd& u) const {
    return std::real(u.dot(K_ * u));
}

double SphereOperator::mass_value(const Eigen::VectorXcd& u) const {
    return (u.array().abs2() * mass_.array()).sum();
}

std::vector<double> SphereOperator::lowest_eigenvalues(int k) const {
    const int n = size();
    const double shift = -0.1;
    Eigen::SparseMatrix<cd> Ks = K_;
    for (int i = 0; i < n; ++i) Ks.coeffRef(i, i) -= shift * mass_[i];
    Ks.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<cd>> lu;
    lu.compute(Ks);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("SphereOperator: factorization failed");

    std::vector<double> out;
    std::vector<Eigen::VectorXcd> found;
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, cd(1.0, 0.0));
        for (int i = 0; i < n; ++i)
            v[i] += cd(0.37 * std::cos(2.1 * i + 0.3 * j), 0.19 * std::sin(1.3 * i - 0.7 * j));
        double lambda = 0.0;
        bool done = false;
        for (int it = 0; it < 10000 && !done; ++it) {
            // shifted inverse generalized iteration with M-orthogonal deflation
            Eigen::VectorXcd rhs(n);
            for (int i = 0; i < n; ++i) rhs[i] = mass_[i] * v[i];
            v = lu.solve(rhs);
            for (const auto& w : found) {
                cd proj = 0.0;
                for (int i = 0; i < n; ++i) proj += std::conj(w[i]) * mass_[i] * v[i];
                v -= proj * w;
            }
            const double nv = std::sqrt(mass_value(v));
            if (nv == 0.0) throw std::runtime_error("SphereOperator: breakdown");
            v /= nv;
            lambda = form_value(v);
            Eigen::VectorXcd resid = K_ * v;
            for (int i = 0; i < n; ++i) resid[i] -= lambda * mass_[i] * v[i];
            if (resid.norm() < 1e-10 * std::max(1.0, std::abs(lambda))) done = true;
        }
        if (!done) throw std::runtime_error("SphereOperator: inverse iteration did not converge");
        out.push_back(lambda);
        found.push_back(v);
    }
    return out;
}

double nu_sphere_numeric(const SphericalPotential& potential, double r,
                         std::pair<int, int> grid) {
    SphereOperator op(potential, r, grid.first, grid.second);
    return op.lowest_eigenvalues(1)[0];
}

double exactness_check(const SphericalPotential& potential, double r, double h) {
    if (potential.dimension() == 2) return 0.0;
    // FD curl residual sampled on an interior lat-long probe grid
    const int np = 14, nt = 24;
    double worst = 0.0;
    for (int p = 1; p <= np; ++p) {
        const double phi = M_PI * p / (np + 1);
        if (phi < 4.0 * h || phi > M_PI - 4.0 * h) continue;
        for (int q = 0; q < nt; ++q) {
            const double th = 2.0 * M_PI * q / nt;
            const double dth_of_aphi =
                (potential.components(phi, th + h, r).first -
                 potential.components(phi, th - h, r).first) /
                (2.0 * h);
            const double dphi_of_ath =
                (potential.components(phi + h, th, r).second -
                 potential.components(phi - h, th, r).second) /
                (2.0 * h);
            worst = std::max(worst, std::abs(dphi_of_ath - dth_of_aphi));
        }
    }
    return worst;
}

}  // namespace magheat
