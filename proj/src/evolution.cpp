#include "magheat/evolution.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace magheat {

namespace {

int dof_count(const RadialGrid& grid, bool origin_free) {
    return origin_free ? grid.n() : grid.n() - 1;
}

}  // namespace

EvolutionState::EvolutionState(RadialGrid grid, int m_range)
    : m_range_(m_range), grid_(std::move(grid)) {
    if (m_range_ < 0) throw std::invalid_argument("EvolutionState: m_range must be >= 0");
    modes_.resize(2 * m_range_ + 1);
    active_.assign(2 * m_range_ + 1, 0);
    auto zero_nu = [](double) { return 0.0; };
    mass_free_ = assemble_radial_form(grid_, zero_nu, true);
    mass_pinned_ = assemble_radial_form(grid_, zero_nu, false);
    for (int m = -m_range_; m <= m_range_; ++m)
        modes_[m + m_range_] = Eigen::VectorXcd::Zero(dof_count(grid_, m == 0));
}

Eigen::VectorXcd& EvolutionState::mode(int m) { return modes_.at(m + m_range_); }
const Eigen::VectorXcd& EvolutionState::mode(int m) const { return modes_.at(m + m_range_); }
bool EvolutionState::mode_active(int m) const { return active_.at(m + m_range_) != 0; }

void EvolutionState::set_mode(int m, Eigen::VectorXcd values) {
    if (values.size() != dof_count(grid_, m == 0))
        throw std::invalid_argument("EvolutionState::set_mode: size mismatch");
    modes_.at(m + m_range_) = std::move(values);
    active_.at(m + m_range_) = 1;
    refresh_norm_cache();
}

std::vector<double> EvolutionState::dof_radii(int m) const {
    std::vector<double> r;
    if (m == 0) r.push_back(0.0);
    for (int i = 0; i + 1 < grid_.n(); ++i) r.push_back(grid_.nodes[i]);
    return r;
}

const TridiagPair& EvolutionState::mass_pair(int m) const {
    return (m == 0) ? mass_free_ : mass_pinned_;
}

namespace {

double mass_norm2(const TridiagPair& P, const Eigen::VectorXcd& v) {
    const int n = P.size();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += P.Md[i] * std::norm(v[i]);
    for (int i = 0; i + 1 < n; ++i)
        acc += 2.0 * P.Me[i] * std::real(std::conj(v[i]) * v[i + 1]);
    return acc;
}

}  // namespace

double EvolutionState::weight_norm2() const {
    double acc = 0.0;
    for (int m = -m_range_; m <= m_range_; ++m)
        if (mode_active(m)) acc += mass_norm2(mass_pair(m), mode(m));
    return acc;
}

double EvolutionState::u_norm() const {
    double acc = 0.0;
    for (int m = -m_range_; m <= m_range_; ++m) {
        if (!mode_active(m)) continue;
        const auto radii = dof_radii(m);
        Eigen::VectorXcd w = mode(m);
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w[i] *= std::exp(-radii[i] * radii[i] / 8.0);
        acc += mass_norm2(mass_pair(m), w);
    }
    return std::sqrt(acc);
}

double EvolutionState::u_norm_physical() const {
    // sample u(r) = e^{-sd/4} utilde(e^{-s/2} r, s) on the mapped grid
    // r_i = e^{s/2} rho_i and integrate |u|^2 r dr there
    const double scale = std::exp(0.5 * s_);
    RadialGrid phys = grid_;
    for (auto& x : phys.nodes) x *= scale;
    for (auto& w : phys.weights) w *= scale * scale;
    auto zero_nu = [](double) { return 0.0; };
    const TridiagPair mp_free = assemble_radial_form(phys, zero_nu, true);
    const TridiagPair mp_pin = assemble_radial_form(phys, zero_nu, false);
    const double amp = std::exp(-0.25 * 2.0 * s_);  // e^{-sd/4}, d = 2
    double acc = 0.0;
    for (int m = -m_range_; m <= m_range_; ++m) {
        if (!mode_active(m)) continue;
        const auto radii = dof_radii(m);
        Eigen::VectorXcd w = mode(m);
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w[i] *= amp * std::exp(-radii[i] * radii[i] / 8.0);
        acc += mass_norm2((m == 0) ? mp_free : mp_pin, w);
    }
    return std::sqrt(acc);
}

EvolutionState initial_mode_projection(const InitialDatum& u0, const RadialGrid& grid,
                                       int m_range) {
    EvolutionState state(grid, m_range);
    if (u0.kind == "zero") {
        state.refresh_norm_cache();
        return state;
    }
    if (u0.kind == "eigenfunction") {
        // u0 = w^{-1/2} psi_1, so the weighted profile is e^{-rho^2/8} in mode 0
        const auto radii = state.dof_radii(0);
        Eigen::VectorXcd v(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i)
            v[i] = std::exp(-radii[i] * radii[i] / 8.0);
        state.set_mode(0, std::move(v));
        return state;
    }
    if (u0.kind == "gaussian") {
        if (u0.width <= 0.125)
            throw std::invalid_argument(
                "initial_mode_projection: gaussian width <= 1/8 has infinite weighted norm");
        if (std::abs(u0.mode) > m_range)
            throw std::invalid_argument("initial_mode_projection: mode outside range");
        // smooth sector datum: u0 carries the rho^{|m|} factor of a regular
        // m-sector function, so the weighted profile is rho^{|m|} e^{(1/8-w)rho^2}
        const auto radii = state.dof_radii(u0.mode);
        Eigen::VectorXcd v(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double r2 = radii[i] * radii[i];
            v[i] = std::pow(radii[i], std::abs(u0.mode)) * std::exp(r2 / 8.0 - u0.width * r2);
        }
        state.set_mode(u0.mode, std::move(v));
        if (!std::isfinite(state.weight_norm2()))
            throw std::invalid_argument("initial_mode_projection: weighted norm overflow");
        return state;
    }
    throw std::invalid_argument("initial_mode_projection: unknown datum '" + u0.kind + "'");
}

namespace {

TridiagPair mode_form(const RadialGrid& grid, const FluxProfile& flux, int m, double s) {
    const double scale = std::exp(0.5 * s);
    auto nu_eff = [&flux, m, scale](double rho) {
        const double v = m - flux(scale * rho);
        return v * v;
    };
    return assemble_radial_form(grid, nu_eff, m == 0);
}

double form_norm(const TridiagPair& P, const Eigen::VectorXcd& v) {
    const int n = P.size();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += P.Kd[i] * std::norm(v[i]);
    for (int i = 0; i + 1 < n; ++i)
        acc += 2.0 * P.Ke[i] * std::real(std::conj(v[i]) * v[i + 1]);
    return acc;
}

}  // namespace

void step(EvolutionState& state, const FluxProfile& flux, double ds) {
    if (!(ds > 0.0) || ds > 0.1)
        throw std::invalid_argument("step: ds must lie in (0, 0.1]");
    const double s_mid = state.s() + 0.5 * ds;
    for (int m = -state.m_range(); m <= state.m_range(); ++m) {
        if (!state.mode_active(m)) continue;
        const TridiagPair P = mode_form(state.grid(), flux, m, s_mid);
        // (M + ds/2 K) v+ = (M - ds/2 K) v-
        const TridiagSolver solver(P, 1.0, 0.5 * ds);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(P.size());
        const Eigen::VectorXcd& v = state.mode(m);
        for (int i = 0; i < P.size(); ++i)
            rhs[i] = (P.Md[i] - 0.5 * ds * P.Kd[i]) * v[i];
        for (int i = 0; i + 1 < P.size(); ++i) {
            rhs[i] += (P.Me[i] - 0.5 * ds * P.Ke[i]) * v[i + 1];
            rhs[i + 1] += (P.Me[i] - 0.5 * ds * P.Ke[i]) * v[i];
        }
        state.mode(m) = solver.solve(rhs);
    }
    state.set_time(state.s() + ds);
    state.refresh_norm_cache();
}

double energy_identity_check(const EvolutionState& before, const EvolutionState& after,
                             const FluxProfile& flux, double ds) {
    const double n2b = before.weight_norm2();
    const double n2a = after.weight_norm2();
    if (n2b == 0.0 && n2a == 0.0) return 0.0;
    double form_b = 0.0, form_a = 0.0;
    for (int m = -before.m_range(); m <= before.m_range(); ++m) {
        if (before.mode_active(m))
            form_b += form_norm(mode_form(before.grid(), flux, m, before.s()), before.mode(m));
        if (after.mode_active(m))
            form_a += form_norm(mode_form(after.grid(), flux, m, after.s()), after.mode(m));
    }
    const double mean_form = 0.5 * (form_b + form_a);
    if (mean_form == 0.0) return 0.0;
    const double defect = 0.5 * (n2a - n2b) / ds + mean_form;
    return std::abs(defect) / mean_form;
}

EvolutionReport evolve_and_fit(const FluxProfile& flux, const InitialDatum& u0,
                               double s_max, double ds,
                               std::pair<double, double> fit_window,
                               const RadialGrid& grid, int m_range, int record_every) {
    if (s_max < 8.0) throw std::invalid_argument("evolve_and_fit: s_max must be >= 8");
    if (fit_window.first < 0.5 * s_max || fit_window.second > s_max ||
        fit_window.first >= fit_window.second)
        throw std::invalid_argument("evolve_and_fit: fit window must lie in [s_max/2, s_max]");

    EvolutionState state = initial_mode_projection(u0, grid, m_range);
    EvolutionReport rep;
    rep.gamma_theory = 0.5 * (1.0 + flux.beta());

    const double n0 = std::sqrt(state.weight_norm2());
    double prev_norm = n0;
    const long n_steps = std::lround(s_max / ds);
    for (long k = 0; k < n_steps; ++k) {
        step(state, flux, ds);
        const double nv = std::sqrt(state.cached_weight_norm2());
        if (nv > prev_norm) rep.monotone_ok = false;
        prev_norm = nv;
        const double bound = n0 * std::exp(-0.5 * state.s());
        if (nv > bound * (1.0 + 1e-6)) {
            rep.gronwall_ok = false;
            rep.worst_gronwall_excess = std::max(rep.worst_gronwall_excess, nv / bound - 1.0);
        }
        if ((k + 1) % record_every == 0 || k + 1 == n_steps) {
            const double s = state.s();
            const double nu_ = state.u_norm();
            rep.series.push_back(
                {SelfSimilarMap::t_of_s(s), s, nu_, nv, bound});
            if (s >= fit_window.first && s <= fit_window.second && nu_ > 0.0) {
                rep.fit.sample_s.push_back(s);
                rep.fit.sample_log_norm_u.push_back(std::log(nu_));
            }
        }
    }

    // least squares for log||u|| = intercept - slope * s
    const auto& xs = rep.fit.sample_s;
    const auto& ys = rep.fit.sample_log_norm_u;
    if (xs.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const double denom = n * sxx - sx * sx;
        const double a = (n * sxy - sx * sy) / denom;
        rep.fit.intercept = (sy - a * sx) / n;
        rep.fit.slope = -a;
        for (std::size_t i = 0; i < xs.size(); ++i)
            rep.fit.residual = std::max(
                rep.fit.residual, std::abs(ys[i] - (rep.fit.intercept + a * xs[i])));
    }
    return rep;
}

double exact_reference_value(ReferenceKind kind, const FluxProfile& flux, double s,
                             double rho) {
    if (kind == ReferenceKind::FreeEigenmode)
        return std::exp(-0.5 * s) * std::exp(-rho * rho / 8.0);
    const double shrunk = std::exp(-0.5 * s) * flux.support_radius();
    if (rho <= shrunk)
        throw std::invalid_argument(
            "exact_reference_value: Aharonov-Bohm mode is defined outside the shrinking ball");
    const double beta = flux.beta();
    const double lambda = 0.5 * (1.0 + beta);
    return std::exp(-s * lambda) * std::pow(rho, beta) * std::exp(-rho * rho / 8.0);
}

EvolutionState exact_reference_state(ReferenceKind kind, const FluxProfile& flux, double s,
                                     const RadialGrid& grid, int m_range) {
    if (kind != ReferenceKind::FreeEigenmode)
        throw std::invalid_argument(
            "exact_reference_state: only the free mode extends to the whole grid");
    EvolutionState state(grid, m_range);
    state.set_time(s);
    const auto radii = state.dof_radii(0);
    Eigen::VectorXcd v(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i)
        v[i] = exact_reference_value(kind, flux, s, std::max(radii[i], 1e-300));
    state.set_mode(0, std::move(v));
    return state;
}

}  // namespace magheat
