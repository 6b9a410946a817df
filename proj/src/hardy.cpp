#include "magheat/hardy.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

#include "magheat/quadrature.hpp"

namespace magheat {

using cd = std::complex<double>;

namespace {

double weight_value(HardyWeight w, double r) {
    switch (w) {
        case HardyWeight::None:
            return 1.0;
        case HardyWeight::Log: {
            const double lr = std::log(r);
            return 1.0 / (1.0 + r * r * lr * lr);
        }
        case HardyWeight::LaptevWeidl:
            return 1.0 / (1.0 + r * r);
    }
    return 1.0;
}

}  // namespace

FormAssembly::FormAssembly(const MagneticField& field, double r_max, int n_r, int n_theta,
                           HardyWeight weight, bool dirichlet_outer,
                           std::function<double(double, double)> gauge_shift)
    : n_r_(n_r), n_theta_(n_theta) {
    if (field.dimension() != 2)
        throw std::invalid_argument("FormAssembly: polar assembly is d=2");
    if (n_r < 16 || n_theta < 16) throw std::invalid_argument("FormAssembly: mesh too coarse");

    const SphericalPotential pot(field, 64);
    const double dr = r_max / n_r;
    const double dth = 2.0 * M_PI / n_theta;
    std::vector<double> r(n_r);
    for (int i = 0; i < n_r; ++i) r[i] = (i + 0.5) * dr;  // staggered off the origin
    auto idx = [&](int i, int q) { return i * n_theta_ + ((q % n_theta_ + n_theta_) % n_theta_); };

    W_.resize(size());
    for (int i = 0; i < n_r; ++i) {
        const double w = weight_value(weight, r[i]) * r[i] * dr * dth;
        for (int q = 0; q < n_theta; ++q) W_[idx(i, q)] = w;
    }

    std::vector<Eigen::Triplet<cd>> trips;
    trips.reserve(8 * static_cast<std::size_t>(size()));
    auto add_edge = [&](int i, int j, double beta, double coef) {
        trips.emplace_back(i, i, cd(coef, 0.0));
        trips.emplace_back(j, j, cd(coef, 0.0));
        trips.emplace_back(i, j, -coef * std::exp(cd(0.0, -beta)));
        trips.emplace_back(j, i, -coef * std::exp(cd(0.0, beta)));
    };

    // radial edges (transverse gauge: no radial potential component)
    for (int i = 0; i + 1 < n_r; ++i) {
        const double rm = (i + 1) * dr;
        const double coef = rm * dth / dr;
        for (int q = 0; q < n_theta; ++q)
            add_edge(idx(i, q), idx(i + 1, q), 0.0, coef);
    }
    if (dirichlet_outer) {
        // edge from the last ring to the zero boundary value
        const double rm = n_r * dr;
        const double coef = rm * dth / dr;
        for (int q = 0; q < n_theta; ++q)
            trips.emplace_back(idx(n_r - 1, q), idx(n_r - 1, q), cd(coef, 0.0));
    }
    // angular edges with the covariant midpoint phase
    const bool theta_independent = (field.radial() || field.zero()) && !gauge_shift;
    for (int i = 0; i < n_r; ++i) {
        // |D_theta u|^2 / r^2 integrated over the cell: measure r dr dth,
        // covariant difference scaled by the arc length r dth
        const double edge_coef = r[i] * dr * dth / (r[i] * dth * r[i] * dth);
        double beta_cached = 0.0;
        if (theta_independent) beta_cached = pot.theta_component(0.0, r[i]) * dth;
        for (int q = 0; q < n_theta; ++q) {
            const double th_mid = (q + 0.5) * dth;
            double a_theta = theta_independent ? beta_cached / dth
                                               : pot.theta_component(th_mid, r[i]);
            if (gauge_shift) a_theta += gauge_shift(r[i], th_mid);
            add_edge(idx(i, q), idx(i, q + 1), a_theta * dth, edge_coef);
        }
    }
    K_.resize(size(), size());
    K_.setFromTriplets(trips.begin(), trips.end());
    K_.makeCompressed();
}

double FormAssembly::smallest_eigenvalue() const {
    const int n = size();
    const double shift = -0.01;
    Eigen::SparseMatrix<cd> Ks = K_;
    for (int i = 0; i < n; ++i) Ks.coeffRef(i, i) -= shift * W_[i];
    Ks.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<cd>> lu;
    lu.compute(Ks);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("FormAssembly: factorization failed");
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, cd(1.0, 0.0));
    for (int i = 0; i < n; ++i) v[i] += cd(0.31 * std::cos(1.7 * i), 0.17 * std::sin(0.9 * i));
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXcd rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = W_[i] * v[i];
        v = lu.solve(rhs);
        double nv = 0.0;
        for (int i = 0; i < n; ++i) nv += W_[i] * std::norm(v[i]);
        nv = std::sqrt(nv);
        v /= nv;
        lambda = std::real(v.dot(K_ * v));
        Eigen::VectorXcd resid = K_ * v;
        for (int i = 0; i < n; ++i) resid[i] -= lambda * W_[i] * v[i];
        if (resid.norm() < 1e-10 * std::max(1.0, std::abs(lambda))) return lambda;
    }
    throw std::runtime_error("FormAssembly: inverse iteration did not converge");
}

HardyEstimate mu_B(const MagneticField& field, double R, int n_r, int n_theta) {
    if (R <= 0.0) throw std::invalid_argument("mu_B: R must be positive");
    FormAssembly fa(field, R, n_r, n_theta, HardyWeight::None, false);
    HardyEstimate est;
    est.constant = fa.smallest_eigenvalue();
    est.weight_kind = "none";
    est.n_r = n_r;
    est.n_theta = n_theta;
    return est;
}

HardyEstimate hardy_constant(const MagneticField& field, HardyWeight weight, double r_out,
                             int n_r, int n_theta) {
    if (weight == HardyWeight::None)
        throw std::invalid_argument("hardy_constant: pick the log or LW weight (mu_B is local)");
    if (r_out < 10.0 * field.support_radius())
        throw std::invalid_argument("hardy_constant: truncation must satisfy r_out >= 10 R");
    if (weight == HardyWeight::LaptevWeidl) {
        const double beta = total_flux(field, 64).beta();
        if (beta == 0.0)
            throw std::invalid_argument(
                "hardy_constant: the LW weight needs non-integer total flux "
                "(the bound degenerates when the sphere eigenvalue at infinity vanishes)");
    }
    HardyEstimate est;
    est.weight_kind = (weight == HardyWeight::Log) ? "log" : "lw";
    est.truncation = r_out;
    est.n_r = n_r;
    est.n_theta = n_theta;
    FormAssembly fa(field, r_out, n_r, n_theta, weight, true);
    est.constant = fa.smallest_eigenvalue();
    FormAssembly fa2(field, 2.0 * r_out, 2 * n_r, n_theta, weight, true);
    const double c2 = fa2.smallest_eigenvalue();
    est.sensitivity = std::abs(c2 - est.constant) / std::max(est.constant, 1e-300);
    return est;
}

double bessel_j0_first_zero() {
    // bisection on the J0 power/asymptotic series via std::cyl_bessel_j
    double lo = 2.0, hi = 3.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::cyl_bessel_j(0.0, lo) * std::cyl_bessel_j(0.0, mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

AuxRatios aux_inequality_check(double r0, int trial_count, std::mt19937_64& rng) {
    if (r0 <= 0.0) throw std::invalid_argument("aux_inequality_check: r0 must be positive");
    AuxRatios out;
    const double j01 = bessel_j0_first_zero();
    out.gamma_interior = (j01 / r0) * (j01 / r0);
    out.worst_interior = std::numeric_limits<double>::infinity();
    out.worst_exterior = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const auto& rule = gauss_legendre(200);

    for (int t = 0; t < trial_count; ++t) {
        // interior trials: cosine modes vanishing at r0 but free at 0
        std::array<double, 5> c{};
        for (auto& v : c) v = unif(rng);
        auto f = [&](double r) {
            double acc = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                acc += c[k] * std::cos((k + 0.5) * M_PI * r / r0);
            return acc;
        };
        auto fp = [&](double r) {
            double acc = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                acc -= c[k] * (k + 0.5) * M_PI / r0 * std::sin((k + 0.5) * M_PI * r / r0);
            return acc;
        };
        const double num = rule.integrate([&](double r) { return fp(r) * fp(r) * r; }, 0.0, r0);
        const double den = rule.integrate([&](double r) { return f(r) * f(r) * r; }, 0.0, r0);
        if (den > 1e-14) out.worst_interior = std::min(out.worst_interior, num / den);

        // exterior trials: C^1 bumps supported in (r0, r1)
        const double r1 = r0 * (2.0 + 6.0 * std::abs(unif(rng)));
        const double c1 = unif(rng), c2 = unif(rng);
        auto g = [&](double r) {
            const double u = (r - r0) * (r1 - r);
            return u * u * (c1 + c2 * (r - r0));
        };
        auto gp = [&](double r) {
            const double u = (r - r0) * (r1 - r);
            const double up = (r1 - r) - (r - r0);
            return 2.0 * u * up * (c1 + c2 * (r - r0)) + u * u * c2;
        };
        const double num2 =
            rule.integrate([&](double r) { return gp(r) * gp(r) * r; }, r0, r1);
        const double den2 = rule.integrate(
            [&](double r) {
                const double lg = std::log(r / r0);
                return g(r) * g(r) / (r * r * lg * lg) * r;
            },
            r0, r1);
        if (den2 > 1e-14) out.worst_exterior = std::min(out.worst_exterior, num2 / den2);
    }
    return out;
}

double diamagnetic_check(const GaugePotential& gauge, int trial_count, int sample_count,
                         std::mt19937_64& rng) {
    const int d = gauge.dimension();
    const double R = gauge.field().support_radius();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double h = 1e-5;
    double worst = 0.0;
    for (int t = 0; t < trial_count; ++t) {
        const double a = 0.3 + 0.7 * std::abs(unif(rng));
        Eigen::Vector3d x0 = Eigen::Vector3d::Zero(), k = Eigen::Vector3d::Zero();
        for (int j = 0; j < d; ++j) {
            x0[j] = R * unif(rng);
            k[j] = 3.0 * unif(rng);
        }
        const double phase0 = M_PI * unif(rng);
        auto psi = [&](const Eigen::Vector3d& x) -> cd {
            const double g = std::exp(-a * (x - x0).squaredNorm());
            return g * std::exp(cd(0.0, k.dot(x) + phase0));
        };
        for (int p = 0; p < sample_count; ++p) {
            Eigen::Vector3d x = Eigen::Vector3d::Zero();
            for (int j = 0; j < d; ++j) x[j] = 1.5 * R * unif(rng);
            const Eigen::Vector3d A = gauge.evaluate(x);
            const cd pv = psi(x);
            double lhs2 = 0.0, rhs2 = 0.0;
            for (int j = 0; j < d; ++j) {
                Eigen::Vector3d xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                const cd grad_j = (psi(xp) - psi(xm)) / (2.0 * h);
                lhs2 += std::norm(grad_j - cd(0.0, A[j]) * pv);
                const double gmod = (std::abs(psi(xp)) - std::abs(psi(xm))) / (2.0 * h);
                rhs2 += gmod * gmod;
            }
            worst = std::max(worst, std::sqrt(rhs2) - std::sqrt(lhs2));
        }
    }
    return worst;
}

FreeHardyResult free_hardy_baseline_d3(int trial_count, std::mt19937_64& rng) {
    FreeHardyResult out;
    out.worst_quotient = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const auto& rule = gauss_legendre(200);
    for (int t = 0; t < trial_count; ++t) {
        const double a = 0.4 + 1.6 * std::abs(unif(rng));
        const double c1 = unif(rng), c2 = unif(rng), c3 = 0.5 * unif(rng);
        auto f = [&](double r) { return (c1 + c2 * r + c3 * r * r) * std::exp(-a * r); };
        auto fp = [&](double r) {
            return (c2 + 2.0 * c3 * r) * std::exp(-a * r) - a * f(r);
        };
        const double up = 40.0 / a;
        const double num =
            rule.integrate([&](double r) { return fp(r) * fp(r) * r * r; }, 0.0, up);
        const double den = rule.integrate([&](double r) { return f(r) * f(r); }, 0.0, up);
        if (den > 1e-12) out.worst_quotient = std::min(out.worst_quotient, num / den);
    }
    // near-optimizer r^{-1/2} f(log r) with a wide tent f: in the log
    // variable the quotient is exactly 1/4 + int f'^2 / int f^2
    const double L = 40.0;
    const auto& rl = gauss_legendre(64);
    auto tent = [&](double t) { return 1.0 - std::abs(t) / L; };
    const double num_t = 2.0 / L;  // int of (1/L)^2 over [-L, L]
    const double den_t = rl.integrate([&](double t) { return tent(t) * tent(t); }, -L, L);
    out.minimizing_sequence = 0.25 + num_t / den_t;
    return out;
}

}  // namespace magheat
