#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <functional>
#include <random>
#include <string>

#include "magheat/gauge.hpp"

namespace magheat {

enum class HardyWeight { None, Log, LaptevWeidl };

/// Polar-mesh assembly of the d=2 magnetic Dirichlet form together with a
/// diagonal Gram matrix of a target weight. Radial edges are plain
/// differences (transverse gauge has no radial component); angular edges
/// carry the midpoint phase of the covariant potential so the form is
/// Hermitian nonnegative by construction. The inner boundary is natural;
/// the outer one natural (spectral-threshold problems on the disk) or
/// Dirichlet (truncations of the whole plane).
class FormAssembly {
  public:
    /// gauge_shift, when given, adds f'(r, theta) to the covariant angular
    /// potential (a pure gauge term for periodic f; used to probe the
    /// gauge invariance of the estimated constants).
    FormAssembly(const MagneticField& field, double r_max, int n_r, int n_theta,
                 HardyWeight weight, bool dirichlet_outer,
                 std::function<double(double, double)> gauge_shift = nullptr);

    const Eigen::SparseMatrix<std::complex<double>>& form_matrix() const { return K_; }
    const Eigen::VectorXd& weight_matrix() const { return W_; }
    int size() const { return n_r_ * n_theta_; }

    /// Smallest generalized eigenvalue of (form, weight Gram) by shifted
    /// inverse power iteration.
    double smallest_eigenvalue() const;

  private:
    int n_r_, n_theta_;
    Eigen::SparseMatrix<std::complex<double>> K_;
    Eigen::VectorXd W_;
};

struct HardyEstimate {
    double constant = 0.0;
    std::string weight_kind;      // "none" | "log" | "lw"
    double truncation = 0.0;      // r_out (0 for the local constant)
    double sensitivity = 0.0;     // relative change under r_out doubling
    int n_r = 0, n_theta = 0;
};

/// Local gauge-free constant: spectral threshold of the magnetic form on
/// the disk D_R with the measure |x|^{-(d-2)} dx and no boundary condition.
/// Zero iff the field vanishes on the disk.
HardyEstimate mu_B(const MagneticField& field, double R, int n_r = 64, int n_theta = 64);

/// Global weighted constants (d=2): smallest generalized eigenvalue of the
/// magnetic form against the log weight 1/(1+r^2 log^2 r) or the
/// Laptev-Weidl weight 1/(1+r^2), truncated with a Dirichlet cut at r_out.
/// The LW weight requires non-integer total flux.
HardyEstimate hardy_constant(const MagneticField& field, HardyWeight weight, double r_out,
                             int n_r = 512, int n_theta = 32);

struct AuxRatios {
    double worst_interior = 0.0;  // LHS/RHS over (0, r0), Dirichlet at r0
    double worst_exterior = 0.0;  // LHS/RHS over (r0, inf) with the log weight
    double gamma_interior = 0.0;  // (j01 / r0)^2
    double gamma_exterior = 0.25;
};

/// Random-trial verification of the two one-dimensional inequalities behind
/// the global Hardy bounds: int |f'|^2 r dr >= gamma int |f|^2 r dr on
/// (0, r0) and >= (1/4) int |f|^2 / (r log(r/r0))^2 r dr beyond r0.
AuxRatios aux_inequality_check(double r0, int trial_count, std::mt19937_64& rng);

/// Pointwise diamagnetic comparison |(grad - iA) psi| >= |grad |psi|| on
/// random smooth complex trials by central differences; returns the largest
/// violation max(RHS - LHS) over all samples (<= differencing tolerance for
/// a correct gauge).
double diamagnetic_check(const GaugePotential& gauge, int trial_count, int sample_count,
                         std::mt19937_64& rng);

/// First positive zero of the Bessel function J0 (the disk ground state
/// enters the interior inequality constant).
double bessel_j0_first_zero();

struct FreeHardyResult {
    double worst_quotient = 0.0;       // min over random trials
    double minimizing_sequence = 0.0;  // quotient of the near-optimal trial
};

/// d=3 baseline: Rayleigh quotient int |psi'|^2 r^2 dr / int |psi|^2 dr over
/// radial trials is bounded below by 1/4; a logarithmically stretched
/// near-optimizer approaches the constant.
FreeHardyResult free_hardy_baseline_d3(int trial_count, std::mt19937_64& rng);

}  // namespace magheat
