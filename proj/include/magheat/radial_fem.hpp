#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace magheat {

/// Radial mesh on (0, rho_max]. Nodes are strictly increasing and positive;
/// the origin itself is handled by the assembly (every mesh implicitly owns
/// the segment (0, nodes[0])). The default layout refines geometrically
/// from rho_min up to the matching radius and continues uniformly, which
/// resolves both the fractional-power behaviour of the eigenfunctions at
/// the origin and the oscillator region.
struct RadialGrid {
    double rho_min = 1e-4;
    double rho_max = 20.0;
    std::vector<double> nodes;    // positive, ascending, nodes.back() == rho_max
    std::vector<double> weights;  // lumped rho-measure of the dual cells

    int n() const { return static_cast<int>(nodes.size()); }

    static RadialGrid graded(double rho_min, double rho_max, int n, double rho_switch = 1.0);
    static RadialGrid uniform(double rho_min, double rho_max, int n);
};

/// Symmetric tridiagonal generalized pair (K, M): K the stiffness+potential
/// form, M the consistent mass, both from P1 elements.
struct TridiagPair {
    Eigen::VectorXd Kd, Ke;  // form diagonal / off-diagonal
    Eigen::VectorXd Md, Me;  // mass diagonal / off-diagonal

    int size() const { return static_cast<int>(Kd.size()); }

    Eigen::VectorXd apply_K(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_M(const Eigen::VectorXd& x) const;
    double form_value(const Eigen::VectorXd& x) const { return x.dot(apply_K(x)); }
    double mass_value(const Eigen::VectorXd& x) const { return x.dot(apply_M(x)); }
};

/// P1 Galerkin assembly of the radial mode form
///   q[g] = int_0^rho_max ( |g'|^2 + [nu_eff(rho)/rho^2 + rho^2/16] |g|^2 ) rho drho
/// with Dirichlet at rho_max. When origin_free the value at rho = 0 is a
/// degree of freedom (admissible only when nu_eff(0) = 0); otherwise the
/// first element interpolates down to g(0) = 0. Stiffness and mass use
/// exact element integrals, the potential a per-segment 3-point Gauss rule
/// (exact for the oscillator term), so the discrete eigenvalues inherit the
/// variational upper-bound property of the continuous problem.
TridiagPair assemble_radial_form(const RadialGrid& grid,
                                 const std::function<double(double)>& nu_eff,
                                 bool origin_free);

/// Number of generalized eigenvalues of (K, M) strictly below lambda
/// (inertia of K - lambda M).
int eigenvalue_count_below(const TridiagPair& pair, double lambda);

/// k-th smallest generalized eigenvalue (k >= 1) by Sturm bisection.
double kth_eigenvalue(const TridiagPair& pair, int k, double rel_tol = 1e-13);

/// Eigenvector for an already-computed eigenvalue, by inverse iteration.
Eigen::VectorXd eigenvector(const TridiagPair& pair, double lambda);

/// Factorized solver for a general tridiagonal system (LU with partial
/// pivoting between adjacent rows).
class TridiagSolver {
  public:
    TridiagSolver(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag,
                  const Eigen::VectorXd& upper);

    /// Factor a*M + b*K of a symmetric pair.
    TridiagSolver(const TridiagPair& pair, double a, double b);

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

  private:
    template <typename Vec>
    Vec solve_impl(const Vec& rhs) const;

    int n_;
    Eigen::VectorXd dl_, d_, du_, du2_;  // multipliers and U diagonals
    std::vector<bool> swapped_;
};

}  // namespace magheat
