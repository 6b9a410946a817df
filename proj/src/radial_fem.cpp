#include "magheat/radial_fem.hpp"

#include <cmath>
#include <stdexcept>

namespace magheat {

RadialGrid RadialGrid::graded(double rho_min, double rho_max, int n, double rho_switch) {
    if (rho_min <= 0.0 || rho_max <= rho_switch || rho_switch <= rho_min || n < 16)
        throw std::invalid_argument("RadialGrid::graded: bad parameters");
    RadialGrid g;
    g.rho_min = rho_min;
    g.rho_max = rho_max;
    const int n_geo = n / 4;
    const int n_uni = n - n_geo;
    g.nodes.reserve(n);
    const double step = std::log(rho_switch / rho_min) / (n_geo - 1);
    for (int i = 0; i < n_geo; ++i) g.nodes.push_back(rho_min * std::exp(step * i));
    g.nodes[n_geo - 1] = rho_switch;
    const double h = (rho_max - rho_switch) / n_uni;
    for (int i = 1; i <= n_uni; ++i) g.nodes.push_back(rho_switch + h * i);
    g.nodes.back() = rho_max;
    g.weights.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double lo = (i == 0) ? 0.0 : 0.5 * (g.nodes[i - 1] + g.nodes[i]);
        const double hi =
            (i + 1 == g.nodes.size()) ? g.nodes[i] : 0.5 * (g.nodes[i] + g.nodes[i + 1]);
        g.weights[i] = 0.5 * (hi * hi - lo * lo);  // int_cell rho drho
    }
    return g;
}

RadialGrid RadialGrid::uniform(double rho_min, double rho_max, int n) {
    if (rho_min <= 0.0 || rho_max <= rho_min || n < 4)
        throw std::invalid_argument("RadialGrid::uniform: bad parameters");
    RadialGrid g;
    g.rho_min = rho_min;
    g.rho_max = rho_max;
    g.nodes.resize(n);
    for (int i = 0; i < n; ++i)
        g.nodes[i] = rho_min + (rho_max - rho_min) * i / (n - 1.0);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double lo = (i == 0) ? 0.0 : 0.5 * (g.nodes[i - 1] + g.nodes[i]);
        const double hi = (i + 1 == n) ? g.nodes[i] : 0.5 * (g.nodes[i] + g.nodes[i + 1]);
        g.weights[i] = 0.5 * (hi * hi - lo * lo);
    }
    return g;
}

Eigen::VectorXd TridiagPair::apply_K(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Kd.cwiseProduct(x);
    for (int i = 0; i + 1 < size(); ++i) {
        y[i] += Ke[i] * x[i + 1];
        y[i + 1] += Ke[i] * x[i];
    }
    return y;
}

Eigen::VectorXd TridiagPair::apply_M(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Md.cwiseProduct(x);
    for (int i = 0; i + 1 < size(); ++i) {
        y[i] += Me[i] * x[i + 1];
        y[i + 1] += Me[i] * x[i];
    }
    return y;
}

TridiagPair assemble_radial_form(const RadialGrid& grid,
                                 const std::function<double(double)>& nu_eff,
                                 bool origin_free) {
    static const double gx[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

    const int n_pos = grid.n();
    // DOFs run over [origin?] + interior positive nodes; the node at
    // rho_max is Dirichlet, the origin enters only when origin_free
    const int lo = origin_free ? 0 : 1;
    const int ndof = origin_free ? n_pos : n_pos - 1;
    if (ndof < 2) throw std::invalid_argument("assemble_radial_form: grid too small");

    TridiagPair P;
    P.Kd = Eigen::VectorXd::Zero(ndof);
    P.Ke = Eigen::VectorXd::Zero(ndof - 1);
    P.Md = Eigen::VectorXd::Zero(ndof);
    P.Me = Eigen::VectorXd::Zero(ndof - 1);

    for (int seg = 0; seg < n_pos; ++seg) {
        const double a = (seg == 0) ? 0.0 : grid.nodes[seg - 1];
        const double b = grid.nodes[seg];
        const double h = b - a;
        const int ia = seg - lo;      // left-node DOF (may be -1: pinned origin)
        const int ib = seg + 1 - lo;  // right-node DOF (== ndof at rho_max)

        const double ks = (b * b - a * a) / (2.0 * h * h);
        const double m_aa = h * (3.0 * a + b) / 12.0;
        const double m_ab = h * (a + b) / 12.0;
        const double m_bb = h * (a + 3.0 * b) / 12.0;

        double p_aa = 0.0, p_ab = 0.0, p_bb = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double r = 0.5 * (a + b) + 0.5 * h * gx[q];
            const double w = 0.5 * h * gw[q];
            const double V = nu_eff(r) / (r * r) + r * r / 16.0;
            const double la = (b - r) / h, lb = (r - a) / h;
            p_aa += w * V * la * la * r;
            p_ab += w * V * la * lb * r;
            p_bb += w * V * lb * lb * r;
        }

        if (ia >= 0 && ia < ndof) {
            P.Kd[ia] += ks + p_aa;
            P.Md[ia] += m_aa;
        }
        if (ib >= 0 && ib < ndof) {
            P.Kd[ib] += ks + p_bb;
            P.Md[ib] += m_bb;
        }
        if (ia >= 0 && ib < ndof) {
            P.Ke[ia] += -ks + p_ab;
            P.Me[ia] += m_ab;
        }
    }
    return P;
}

int eigenvalue_count_below(const TridiagPair& pair, double lambda) {
    const int n = pair.size();
    int count = 0;
    double d_prev = 1.0;
    for (int i = 0; i < n; ++i) {
        double d = pair.Kd[i] - lambda * pair.Md[i];
        if (i > 0) {
            const double e = pair.Ke[i - 1] - lambda * pair.Me[i - 1];
            d -= e * e / d_prev;
        }
        if (d == 0.0) d = -1e-300;  // Sturm-sequence safeguard
        if (d < 0.0) ++count;
        d_prev = d;
    }
    return count;
}

double kth_eigenvalue(const TridiagPair& pair, int k, double rel_tol) {
    if (k < 1) throw std::invalid_argument("kth_eigenvalue: k must be >= 1");
    double lo = 0.0, hi = 1.0;
    while (eigenvalue_count_below(pair, hi) < k) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("kth_eigenvalue: bracket not found");
    }
    for (int it = 0; it < 200 && (hi - lo) > rel_tol * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eigenvalue_count_below(pair, mid) >= k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

Eigen::VectorXd eigenvector(const TridiagPair& pair, double lambda) {
    const int n = pair.size();
    const double sigma = lambda - 1e-8 * std::max(1.0, std::abs(lambda));
    Eigen::VectorXd dl(n - 1), d(n), du(n - 1);
    for (int i = 0; i < n; ++i) d[i] = pair.Kd[i] - sigma * pair.Md[i];
    for (int i = 0; i + 1 < n; ++i) dl[i] = du[i] = pair.Ke[i] - sigma * pair.Me[i];
    TridiagSolver solver(dl, d, du);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    v /= std::sqrt(pair.mass_value(v));
    for (int it = 0; it < 6; ++it) {
        v = solver.solve(v);
        const double nv = std::sqrt(pair.mass_value(v));
        if (!(nv > 0.0)) throw std::runtime_error("eigenvector: inverse iteration breakdown");
        v /= nv;
    }
    if (v[std::max(0, n / 8)] < 0.0) v = -v;  // fix an overall sign
    return v;
}

TridiagSolver::TridiagSolver(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag,
                             const Eigen::VectorXd& upper)
    : n_(static_cast<int>(diag.size())) {
    // gttrf-style LU with partial pivoting between adjacent rows
    dl_ = lower;
    d_ = diag;
    du_ = upper;
    du2_ = Eigen::VectorXd::Zero(std::max(0, n_ - 2));
    swapped_.assign(std::max(0, n_ - 1), false);
    for (int i = 0; i + 1 < n_; ++i) {
        if (std::abs(d_[i]) >= std::abs(dl_[i])) {
            if (d_[i] == 0.0) d_[i] = 1e-300;
            const double fact = dl_[i] / d_[i];
            dl_[i] = fact;
            d_[i + 1] -= fact * du_[i];
            if (i + 2 < n_) du2_[i] = 0.0;
        } else {
            const double fact = d_[i] / dl_[i];
            d_[i] = dl_[i];
            dl_[i] = fact;
            const double temp = du_[i];
            du_[i] = d_[i + 1];
            d_[i + 1] = temp - fact * d_[i + 1];
            if (i + 2 < n_) {
                du2_[i] = du_[i + 1];
                du_[i + 1] = -fact * du_[i + 1];
            }
            swapped_[i] = true;
        }
    }
    if (d_[n_ - 1] == 0.0) d_[n_ - 1] = 1e-300;
}

TridiagSolver::TridiagSolver(const TridiagPair& pair, double a, double b)
    : TridiagSolver(a * pair.Me + b * pair.Ke, a * pair.Md + b * pair.Kd,
                    a * pair.Me + b * pair.Ke) {}

template <typename Vec>
Vec TridiagSolver::solve_impl(const Vec& rhs) const {
    Vec b = rhs;
    for (int i = 0; i + 1 < n_; ++i) {
        if (!swapped_[i]) {
            b[i + 1] -= dl_[i] * b[i];
        } else {
            const auto temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - dl_[i] * b[i + 1];
        }
    }
    b[n_ - 1] /= d_[n_ - 1];
    if (n_ >= 2) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
    for (int i = n_ - 3; i >= 0; --i)
        b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    return b;
}

Eigen::VectorXd TridiagSolver::solve(const Eigen::VectorXd& rhs) const {
    return solve_impl(rhs);
}
Eigen::VectorXcd TridiagSolver::solve(const Eigen::VectorXcd& rhs) const {
    return solve_impl(rhs);
}

}  // namespace magheat
