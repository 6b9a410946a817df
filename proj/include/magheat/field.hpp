#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace magheat {

/// Smooth cutoff profile exp(-1/(1-t^2)) on |t|<1, zero outside.
double bump_profile(double t);

/// int_0^1 exp(-1/(1-t^2)) t dt  (normalization of the radial bump flux).
double bump_flux_moment();

/// Parameters for make_field. Unused entries are ignored by each preset.
struct FieldSpec {
    std::string preset;                    // "radial-bump" | "two-bump" | "bump-form-3d" | "zero"
    double flux = 0.0;                     // d=2 total flux (flux quanta)
    double radius = 1.0;                   // support radius scale R
    double amplitude = 1.0;                // d=3 preset amplitude
    std::vector<Eigen::Vector2d> centers;  // d=2 two-bump centers
};

/// A closed, compactly supported magnetic 2-form on R^d (d = 2 or 3),
/// given by its skew-symmetric coefficient matrix B_jk(x).
/// Ball (center, radius) carrying part of the field support; presets are
/// unions of such balls, which lets line integrals place their quadrature
/// nodes exactly on the support.
struct SupportBall {
    Eigen::Vector3d center;
    double radius;
};

class MagneticField {
  public:
    using Evaluator = std::function<void(const Eigen::Vector3d&, Eigen::Matrix3d&)>;

    MagneticField() = default;
    MagneticField(int dimension, double support_radius, double sup_norm, bool radial,
                  Evaluator eval, std::function<double(double)> radial_dual = nullptr,
                  std::vector<SupportBall> balls = {})
        : dim_(dimension), support_radius_(support_radius), sup_norm_(sup_norm),
          radial_(radial), eval_(std::move(eval)), radial_dual_(std::move(radial_dual)),
          balls_(std::move(balls)) {}

    int dimension() const { return dim_; }
    double support_radius() const { return support_radius_; }
    double sup_norm() const { return sup_norm_; }
    bool radial() const { return radial_; }
    bool zero() const { return sup_norm_ == 0.0; }

    /// Full skew coefficient matrix at x (third row/col zero in d=2).
    Eigen::Matrix3d coefficients(const Eigen::Vector3d& x) const {
        Eigen::Matrix3d B;
        eval_(x, B);
        return B;
    }

    double component(int j, int k, const Eigen::Vector3d& x) const {
        return coefficients(x)(j, k);
    }

    /// d=2 radial fields only: the scalar dual *B as a function of |x|.
    double radial_dual(double r) const { return radial_dual_ ? radial_dual_(r) : 0.0; }
    bool has_radial_dual() const { return static_cast<bool>(radial_dual_); }

    const std::vector<SupportBall>& support_balls() const { return balls_; }

    /// Sub-intervals of [0, v_max] where the ray v -> origin + v*dir meets
    /// the support (merged, ascending). Falls back to the whole interval
    /// when no ball decomposition is known.
    std::vector<std::pair<double, double>> ray_support(const Eigen::Vector3d& dir,
                                                       double v_max) const;

  private:
    int dim_ = 2;
    double support_radius_ = 1.0;
    double sup_norm_ = 0.0;
    bool radial_ = false;
    Evaluator eval_;
    std::function<double(double)> radial_dual_;
    std::vector<SupportBall> balls_;
};

/// Build one of the analytic presets. Throws std::invalid_argument on an
/// unknown preset, nonpositive radius, or unsupported dimension.
MagneticField make_field(int dimension, const FieldSpec& spec);

/// Superposition of two fields of equal dimension (support radius = max).
MagneticField superpose(const MagneticField& a, const MagneticField& b);

/// Hodge dual *B at x: size-1 vector (the scalar B_12) in d=2,
/// size-3 vector (1/2) eps^{ljk} B_jk in d=3.
Eigen::VectorXd hodge_dual(const MagneticField& field, const Eigen::Vector3d& x);

/// Max over sample points and index triples of the central-difference
/// approximation of |C_jkl| = |B_kl,j + B_lj,k + B_jk,l|.
double closedness_residual(const MagneticField& field,
                           const std::vector<Eigen::Vector3d>& points, double h);

/// d=3: max |(*B)(x) . x| over n quasi-uniform samples of the sphere |x| = r.
/// Zero (up to sampling) iff the pulled-back potential at radius r is closed.
double radial_projection_check(const MagneticField& field, double r, int n_samples);

}  // namespace magheat
