#include "magheat/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magheat/quadrature.hpp"

namespace magheat {

GaugePotential::GaugePotential(MagneticField field, int n_quad)
    : field_(std::move(field)), n_quad_(n_quad) {
    if (n_quad_ < 8) throw std::invalid_argument("GaugePotential: n_quad must be >= 8");
}

Eigen::Vector3d GaugePotential::evaluate(const Eigen::Vector3d& x) const {
    const auto& rule = gauss_legendre(n_quad_);
    Eigen::Vector3d A = Eigen::Vector3d::Zero();
    // nodes concentrated on the ray's intersection with the field support
    for (const auto& [lo, hi] : field_.ray_support(x, 1.0)) {
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double u = 0.5 * (hi - lo) * (rule.nodes[q] + 1.0) + lo;
            const double w = 0.5 * (hi - lo) * rule.weights[q];
            const Eigen::Matrix3d B = field_.coefficients(x * u);
            A += (w * u) * (B.transpose() * x);  // A_j += w u x^l B_lj
        }
    }
    return A;
}

GaugePotential poincare_gauge(const MagneticField& field, int n_quad) {
    return GaugePotential(field, n_quad);
}

SphericalPotential::SphericalPotential(MagneticField field, int n_quad)
    : field_(std::move(field)), n_quad_(n_quad) {}

namespace {

Eigen::Vector3d sphere_point(double phi, double theta) {
    return {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)};
}
Eigen::Vector3d tangent_phi(double phi, double theta) {
    return {std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta), -std::sin(phi)};
}
Eigen::Vector3d tangent_theta(double phi, double theta) {
    return {-std::sin(phi) * std::sin(theta), std::sin(phi) * std::cos(theta), 0.0};
}

}  // namespace

double SphericalPotential::theta_component(double theta, double r) const {
    if (dimension() != 2)
        throw std::invalid_argument("theta_component: d=2 accessor");
    const double up = std::min(r, saturation_radius());
    if (up <= 0.0) return 0.0;
    const Eigen::Vector3d sigma(std::cos(theta), std::sin(theta), 0.0);
    // sigma . B(sigma v) . dsigma/dtheta reduces to the scalar dual *B
    double acc = 0.0;
    for (const auto& [lo, hi] : field_.ray_support(sigma, up))
        acc += gauss_legendre(n_quad_).integrate(
            [&](double v) { return field_.coefficients(sigma * v)(0, 1) * v; }, lo, hi);
    return acc;
}

std::pair<double, double> SphericalPotential::components(double phi, double theta,
                                                         double r) const {
    if (dimension() != 3)
        throw std::invalid_argument("components: d=3 accessor");
    const double up = std::min(r, saturation_radius());
    if (up <= 0.0) return {0.0, 0.0};
    const Eigen::Vector3d sigma = sphere_point(phi, theta);
    const Eigen::Vector3d tp = tangent_phi(phi, theta);
    const Eigen::Vector3d tt = tangent_theta(phi, theta);
    const auto& rule = gauss_legendre(n_quad_);
    double ap = 0.0, at = 0.0;
    for (const auto& [lo, hi] : field_.ray_support(sigma, up)) {
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double v = 0.5 * (hi - lo) * (rule.nodes[q] + 1.0) + lo;
            const double w = 0.5 * (hi - lo) * rule.weights[q];
            const Eigen::Matrix3d B = field_.coefficients(sigma * v);
            const Eigen::Vector3d row = B.transpose() * sigma;  // row_k = sigma^j B_jk
            ap += w * v * row.dot(tp);
            at += w * v * row.dot(tt);
        }
    }
    return {ap, at};
}

double SphericalPotential::sphere_norm(double phi, double theta, double r) const {
    if (dimension() == 2) return std::abs(theta_component(theta, r));
    const auto [ap, at] = components(phi, theta, r);
    const double s = std::sin(phi);
    return std::sqrt(ap * ap + (at / s) * (at / s));
}

SphericalPotential spherical_pullback(const GaugePotential& gauge) {
    return SphericalPotential(gauge.field(), gauge.n_quad());
}

double dist_to_integers(double x) {
    return std::abs(x - std::nearbyint(x));
}

FluxProfile::FluxProfile(MagneticField field, int n_quad) {
    if (field.dimension() != 2)
        throw std::invalid_argument("FluxProfile: flux profile is a d=2 notion");
    support_radius_ = field.support_radius();
    // per-segment rule; segments are so short that 8 nodes are already
    // well past machine accuracy, more buys nothing
    const auto& seg_rule = gauss_legendre(std::clamp(n_quad / 16, 8, 16));

    // Phi_B(r) = (1/2pi) int_{D_r} *B dx, tabulated cumulatively on a dense
    // uniform grid of [0, R]. Radial fields reduce to a 1D quadrature per
    // segment; otherwise the angular direction is averaged with the periodic
    // trapezoid rule (spectrally accurate for smooth fields).
    const bool radial = field.has_radial_dual() && field.radial();
    const int n_tab = radial ? 8192 : 2048;
    const int n_theta = 128;
    table_.assign(n_tab + 1, 0.0);
    if (!field.zero()) {
        for (int i = 1; i <= n_tab; ++i) {
            const double a = support_radius_ * (i - 1) / n_tab;
            const double b = support_radius_ * i / n_tab;
            double seg;
            if (radial) {
                seg = seg_rule.integrate([&](double v) { return field.radial_dual(v) * v; }, a, b);
            } else {
                seg = 0.0;
                for (int q = 0; q < n_theta; ++q) {
                    const double th = 2.0 * M_PI * q / n_theta;
                    const Eigen::Vector3d sigma(std::cos(th), std::sin(th), 0.0);
                    seg += seg_rule.integrate(
                        [&](double v) { return field.coefficients(sigma * v)(0, 1) * v; }, a, b);
                }
                seg /= n_theta;
            }
            table_[i] = table_[i - 1] + seg;
        }
    }
    total_flux_ = table_.back();
    beta_ = dist_to_integers(total_flux_);
}

double FluxProfile::operator()(double r) const {
    if (r <= 0.0) return 0.0;
    if (r >= support_radius_) return total_flux_;
    // Catmull-Rom through the dense table: C^1 in r, so the scaled
    // potential stays smooth along the self-similar time as well
    const double t = r / support_radius_ * (table_.size() - 1);
    const auto i = static_cast<std::size_t>(t);
    const double f = t - static_cast<double>(i);
    const double p1 = table_[i];
    const double p2 = table_[i + 1];
    const double p0 = (i > 0) ? table_[i - 1] : 2.0 * p1 - p2;
    const double p3 = (i + 2 < table_.size()) ? table_[i + 2] : 2.0 * p2 - p1;
    const double a = 2.0 * p1;
    const double b = p2 - p0;
    const double c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
    const double d = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
    return 0.5 * (a + b * f + c * f * f + d * f * f * f);
}

FluxProfile total_flux(const MagneticField& field, int n_quad) {
    return FluxProfile(field, n_quad);
}

}  // namespace magheat
