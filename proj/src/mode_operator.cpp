#include "magheat/mode_operator.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magheat/parallel.hpp"

namespace magheat {

namespace {

// Both d=2 and d=3 reduce to the weighted-line pair with coupling
// nu_eff + (c_2 - c_d) + (d-1)(d-3)/4 = nu_eff (the corrections cancel),
// so the assembly below takes nu_eff as given.
ModeOperator build(int d, const RadialGrid& grid, std::function<double(double)> nu_eff,
                   bool origin_free) {
    if (d != 2 && d != 3) throw std::invalid_argument("ModeOperator: d must be 2 or 3");
    ModeOperator op;
    op.d = d;
    op.grid = grid;
    op.origin_free = origin_free;
    op.nu_eff = std::move(nu_eff);
    op.matrices = assemble_radial_form(op.grid, op.nu_eff, origin_free);
    return op;
}

}  // namespace

ModeOperator make_mode_operator(int d, const RadialGrid& grid, double nu) {
    if (nu < 0.0) throw std::invalid_argument("ModeOperator: nu must be >= 0");
    return build(d, grid, [nu](double) { return nu; }, nu == 0.0);
}

ModeOperator make_mode_operator(int d, const RadialGrid& grid, const FluxProfile& flux,
                                int m, double s) {
    const double scale = std::exp(0.5 * s);
    auto nu_eff = [&flux, m, scale](double rho) {
        const double v = m - flux(scale * rho);
        return v * v;
    };
    return build(d, grid, nu_eff, m == 0);
}

double mode_eigenvalue(const ModeOperator& op, int k) {
    return kth_eigenvalue(op.matrices, k);
}

SpectrumResult sigma_L_exact(int d, int n_max, int l_max) {
    if (n_max < 0 || l_max < 0)
        throw std::invalid_argument("sigma_L_exact: n_max, l_max must be >= 0");
    SpectrumResult out;
    out.method = "exact";
    for (int n = 0; n <= n_max; ++n)
        for (int l = 0; l <= l_max; ++l) {
            const double nu = static_cast<double>(l) * (l + d - 2);
            out.entries.push_back({n + 0.5 * (1.0 + std::sqrt(nu)), n, l});
        }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const auto& a, const auto& b) { return a.value < b.value; });
    return out;
}

SpectrumResult sigma_L_infinity_exact(const std::vector<double>& nu_list, int n_max) {
    SpectrumResult out;
    out.method = "exact";
    for (int n = 0; n <= n_max; ++n)
        for (std::size_t l = 0; l < nu_list.size(); ++l) {
            if (nu_list[l] < 0.0)
                throw std::invalid_argument("sigma_L_infinity_exact: negative nu");
            out.entries.push_back(
                {n + 0.5 * (1.0 + std::sqrt(nu_list[l])), n, static_cast<int>(l)});
        }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const auto& a, const auto& b) { return a.value < b.value; });
    return out;
}

double laguerre_eval(int n, double alpha, double x) {
    if (n < 0) throw std::invalid_argument("laguerre_eval: n must be >= 0");
    if (alpha <= -1.0) throw std::invalid_argument("laguerre_eval: alpha must be > -1");
    if (n == 0) return 1.0;
    double p0 = 1.0;
    double p1 = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0 + alpha - x) * p1 - (k + alpha) * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double eigenfunction_radial(int n, double nu, int d, double rho) {
    if (nu < 0.0 || rho <= 0.0)
        throw std::invalid_argument("eigenfunction_radial: need nu >= 0, rho > 0");
    const double root = std::sqrt(nu);
    return std::pow(rho, -(d - 2) / 2.0 + root) * std::exp(-rho * rho / 8.0) *
           laguerre_eval(n, root, rho * rho / 4.0);
}

LambdaResult lambda_B_of_s(const FluxProfile& flux, double s, int m_range,
                           const RadialGrid& grid) {
    const int needed = static_cast<int>(std::ceil(std::abs(flux.total_flux()))) + 2;
    if (m_range < needed)
        throw std::invalid_argument("lambda_B_of_s: m_range too small for this flux");
    std::vector<double> vals(2 * m_range + 1);
    parallel_for(vals.size(), [&](std::size_t i) {
        const int m = static_cast<int>(i) - m_range;
        ModeOperator op = make_mode_operator(2, grid, flux, m, s);
        vals[i] = kth_eigenvalue(op.matrices, 1);
    });
    const auto it = std::min_element(vals.begin(), vals.end());
    const int m_star = static_cast<int>(it - vals.begin()) - m_range;
    if (std::abs(m_star) == m_range)
        throw std::runtime_error("lambda_B_of_s: minimizing mode hit the range boundary");
    return {*it, m_star};
}

namespace {

// ||T_s^{-1} - T_inf^{-1}|| in the M inner product: power iteration on
// A x = (K_s^{-1} - K_inf^{-1}) M x, Rayleigh value sqrt(<Ax,Ax>_M/<x,x>_M).
double gap_power_iteration(const TridiagPair& Ps, const TridiagPair& Pi) {
    const TridiagSolver Ls(Ps, 0.0, 1.0);
    const TridiagSolver Li(Pi, 0.0, 1.0);
    const int n = Ps.size();
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = std::sin(1.0 + 0.7318 * i);
    x /= std::sqrt(Ps.mass_value(x));
    double lam = 0.0, lam_prev = -1.0;
    for (int it = 0; it < 2000; ++it) {
        const Eigen::VectorXd mx = Ps.apply_M(x);
        const Eigen::VectorXd z = Ls.solve(mx) - Li.solve(mx);
        const double nz = std::sqrt(Ps.mass_value(z));
        lam = nz;  // x was M-normalized
        if (nz == 0.0) return 0.0;
        x = z / nz;
        if (std::abs(lam - lam_prev) < 1e-9 * std::max(lam, 1e-300)) break;
        lam_prev = lam;
    }
    return lam;
}

std::pair<TridiagPair, TridiagPair> mode_pairs(const FluxProfile& flux, double s,
                                               const RadialGrid& grid, int m) {
    ModeOperator os = make_mode_operator(2, grid, flux, m, s);
    // the limit operator carries the full flux concentrated at the origin;
    // DOF layout must match the finite-s operator for the difference
    const double phi = flux.total_flux();
    const double nu_inf = (m - phi) * (m - phi);
    TridiagPair Pi = assemble_radial_form(
        grid, [nu_inf](double) { return nu_inf; }, os.origin_free);
    return {os.matrices, Pi};
}

}  // namespace

double resolvent_gap_mode(const FluxProfile& flux, double s, const RadialGrid& grid, int m) {
    auto [Ps, Pi] = mode_pairs(flux, s, grid, m);
    return gap_power_iteration(Ps, Pi);
}

std::vector<double> resolvent_convergence(const FluxProfile& flux,
                                          const std::vector<double>& s_list,
                                          const RadialGrid& grid, int m_range) {
    std::vector<double> out(s_list.size(), 0.0);
    parallel_for(s_list.size(), [&](std::size_t i) {
        double worst = 0.0;
        for (int m = -m_range; m <= m_range; ++m)
            worst = std::max(worst, resolvent_gap_mode(flux, s_list[i], grid, m));
        out[i] = worst;
    });
    return out;
}

double resolvent_gap_dense(const FluxProfile& flux, double s, const RadialGrid& grid, int m) {
    auto [Ps, Pi] = mode_pairs(flux, s, grid, m);
    const int n = Ps.size();
    if (n > 1200) throw std::invalid_argument("resolvent_gap_dense: oracle path, small grids only");
    auto dense = [&](const TridiagPair& P) {
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            K(i, i) = P.Kd[i];
            M(i, i) = P.Md[i];
        }
        for (int i = 0; i + 1 < n; ++i) {
            K(i, i + 1) = K(i + 1, i) = P.Ke[i];
            M(i, i + 1) = M(i + 1, i) = P.Me[i];
        }
        return std::make_pair(K, M);
    };
    auto [Ks, Ms] = dense(Ps);
    auto [Ki, Mi] = dense(Pi);
    (void)Mi;  // identical mass by construction
    // symmetrize with M^{1/2} so the M-operator norm is a plain spectral norm
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> msolve(Ms);
    const Eigen::MatrixXd Mh = msolve.operatorSqrt();
    const Eigen::MatrixXd A =
        Mh * (Ks.inverse() - Ki.inverse()) * Mh;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace magheat
