#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "magheat/field.hpp"

namespace magheat {

/// Transverse-gauge vector potential A_j(x) = int_0^1 x^l B_lj(x u) u du,
/// evaluated by Gauss-Legendre quadrature. Satisfies x.A(x) = 0 exactly
/// (the quadrature sum inherits the skew-symmetry cancellation) and
/// dA = B up to quadrature error.
class GaugePotential {
  public:
    GaugePotential(MagneticField field, int n_quad);

    Eigen::Vector3d evaluate(const Eigen::Vector3d& x) const;

    const MagneticField& field() const { return field_; }
    int dimension() const { return field_.dimension(); }
    int n_quad() const { return n_quad_; }

  private:
    MagneticField field_;
    int n_quad_;
};

GaugePotential poincare_gauge(const MagneticField& field, int n_quad = 128);

/// Covariant components of the gauge potential pulled back to the sphere
/// chart: A_mu(sigma, r) = int_0^r [sigma . B(sigma v) . (grad' sigma)^T]_mu v dv.
/// The integrand vanishes beyond the support, so the components saturate at
/// r = support radius and the r -> infinity limit is evaluated there.
class SphericalPotential {
  public:
    SphericalPotential(MagneticField field, int n_quad);

    int dimension() const { return field_.dimension(); }
    double saturation_radius() const { return field_.support_radius(); }
    const MagneticField& field() const { return field_; }

    /// d=2: covariant angular component A_theta(theta, r).
    double theta_component(double theta, double r) const;

    /// d=3: covariant components (A_phi, A_theta) in colatitude/azimuth.
    std::pair<double, double> components(double phi, double theta, double r) const;

    /// Limit components (r beyond the support).
    double limit_theta(double theta) const { return theta_component(theta, saturation_radius()); }
    std::pair<double, double> limit_components(double phi, double theta) const {
        return components(phi, theta, saturation_radius());
    }

    /// Sphere-metric norm |A(sigma, r)|_{S^{d-1}}.
    double sphere_norm(double phi, double theta, double r) const;

  private:
    MagneticField field_;
    int n_quad_;
};

SphericalPotential spherical_pullback(const GaugePotential& gauge);

/// d=2 partial flux r -> Phi_B(r), total flux and beta = dist(Phi_B, Z).
class FluxProfile {
  public:
    FluxProfile() = default;
    FluxProfile(MagneticField field, int n_quad);

    double operator()(double r) const;  // Phi_B(r), fast tabulated path
    double total_flux() const { return total_flux_; }
    double beta() const { return beta_; }
    double support_radius() const { return support_radius_; }

  private:
    double support_radius_ = 1.0;
    double total_flux_ = 0.0;
    double beta_ = 0.0;
    std::vector<double> table_;  // Phi_B on a uniform grid of [0, R]
};

FluxProfile total_flux(const MagneticField& field, int n_quad = 128);

double dist_to_integers(double x);

}  // namespace magheat
