#include "magheat/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magheat/quadrature.hpp"

namespace magheat {

double bump_profile(double t) {
    const double t2 = t * t;
    if (t2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t2));
}

double bump_flux_moment() {
    static const double value =
        gauss_legendre(96).integrate([](double t) { return bump_profile(t) * t; }, 0.0, 1.0);
    return value;
}

namespace {

// d=2 radial bump with prescribed total flux: *B(x) = c exp(-1/(1-|x|^2/R^2)).
MagneticField make_radial_bump(double flux, double R) {
    const double c = flux / (R * R * bump_flux_moment());
    auto dual = [c, R](double r) { return c * bump_profile(r / R); };
    auto eval = [dual](const Eigen::Vector3d& x, Eigen::Matrix3d& B) {
        const double b = dual(std::hypot(x[0], x[1]));
        B.setZero();
        B(0, 1) = b;
        B(1, 0) = -b;
    };
    // max of the profile is exp(-1) at the center
    const double sup = std::abs(c) * std::exp(-1.0);
    return MagneticField(2, R, sup, true, eval, dual, {{Eigen::Vector3d::Zero(), R}});
}

MagneticField make_off_axis_bump(double flux, double rb, const Eigen::Vector2d& center) {
    const double c = flux / (rb * rb * bump_flux_moment());
    auto eval = [c, rb, center](const Eigen::Vector3d& x, Eigen::Matrix3d& B) {
        const double r = std::hypot(x[0] - center[0], x[1] - center[1]);
        const double b = c * bump_profile(r / rb);
        B.setZero();
        B(0, 1) = b;
        B(1, 0) = -b;
    };
    const double sup = std::abs(c) * std::exp(-1.0);
    const double R = center.norm() + rb;
    return MagneticField(2, R, sup, false, eval, nullptr,
                         {{Eigen::Vector3d(center[0], center[1], 0.0), rb}});
}

// d=3 preset: B = da with a(x) = amp * (-(y_2), y_1, 0) * g(|y|^2/rb^2),
// y = x - x0. Closed by construction; the bump sits off-centre so the
// pulled-back potential beyond the support is a nontrivial exact form.
MagneticField make_bump_form_3d(double R, double amp) {
    const Eigen::Vector3d x0(0.2 * R, 0.0, 0.12 * R);
    const double rb = 0.55 * R;
    const double rb2 = rb * rb;
    auto g = [rb2](double q) {
        const double w = 1.0 - q / rb2;
        return (w > 0.0) ? std::exp(-1.0 / w) : 0.0;
    };
    auto gp = [g, rb2](double q) {
        const double w = 1.0 - q / rb2;
        return (w > 0.0) ? -g(q) / (rb2 * w * w) : 0.0;
    };
    auto eval = [x0, g, gp, amp](const Eigen::Vector3d& x, Eigen::Matrix3d& B) {
        const Eigen::Vector3d y = x - x0;
        const double q = y.squaredNorm();
        const double gv = g(q), gd = gp(q);
        B.setZero();
        const double B12 = amp * (2.0 * gv + 2.0 * (y[0] * y[0] + y[1] * y[1]) * gd);
        const double B13 = amp * (2.0 * y[1] * y[2] * gd);
        const double B23 = amp * (-2.0 * y[0] * y[2] * gd);
        B(0, 1) = B12;
        B(1, 0) = -B12;
        B(0, 2) = B13;
        B(2, 0) = -B13;
        B(1, 2) = B23;
        B(2, 1) = -B23;
    };
    // |B(x)|_op equals the Euclidean norm of the dual vector; estimate the
    // sup by dense sampling of the bump ball (smooth integrand, the bound
    // only enters tests through the slack inequality |A| <= R^2 sup / |x|).
    double sup = 0.0;
    const int N = 48;
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            for (int k = 0; k <= N; ++k) {
                Eigen::Vector3d y(-rb + 2.0 * rb * i / N, -rb + 2.0 * rb * j / N,
                                  -rb + 2.0 * rb * k / N);
                Eigen::Matrix3d B;
                eval(x0 + y, B);
                const Eigen::Vector3d dual(B(1, 2), B(2, 0), B(0, 1));
                sup = std::max(sup, dual.norm());
            }
    const double support = x0.norm() + rb;
    return MagneticField(3, support, sup, false, eval, nullptr, {{x0, rb}});
}

}  // namespace

MagneticField make_field(int dimension, const FieldSpec& spec) {
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("make_field: dimension must be 2 or 3");
    if (spec.radius <= 0.0) throw std::invalid_argument("make_field: radius must be positive");
    if (!std::isfinite(spec.flux)) throw std::invalid_argument("make_field: flux must be finite");

    if (spec.preset == "zero") {
        auto eval = [](const Eigen::Vector3d&, Eigen::Matrix3d& B) { B.setZero(); };
        auto dual = [](double) { return 0.0; };
        return MagneticField(dimension, spec.radius, 0.0, dimension == 2, eval, dual);
    }
    if (spec.preset == "radial-bump") {
        if (dimension != 2) throw std::invalid_argument("radial-bump preset is d=2 only");
        if (spec.flux == 0.0) {
            auto eval = [](const Eigen::Vector3d&, Eigen::Matrix3d& B) { B.setZero(); };
            auto dual = [](double) { return 0.0; };
            return MagneticField(2, spec.radius, 0.0, true, eval, dual);
        }
        return make_radial_bump(spec.flux, spec.radius);
    }
    if (spec.preset == "two-bump") {
        if (dimension != 2) throw std::invalid_argument("two-bump preset is d=2 only");
        std::vector<Eigen::Vector2d> centers = spec.centers;
        if (centers.empty()) {
            centers.push_back(Eigen::Vector2d(0.4 * spec.radius, 0.0));
            centers.push_back(Eigen::Vector2d(-0.4 * spec.radius, 0.0));
        }
        if (centers.size() != 2) throw std::invalid_argument("two-bump needs exactly 2 centers");
        double cmax = std::max(centers[0].norm(), centers[1].norm());
        if (cmax >= spec.radius)
            throw std::invalid_argument("two-bump centers must lie inside the support radius");
        const double rb = spec.radius - cmax;
        MagneticField f = superpose(make_off_axis_bump(0.5 * spec.flux, rb, centers[0]),
                                    make_off_axis_bump(0.5 * spec.flux, rb, centers[1]));
        return f;
    }
    if (spec.preset == "bump-form-3d") {
        if (dimension != 3) throw std::invalid_argument("bump-form-3d preset is d=3 only");
        return make_bump_form_3d(spec.radius, spec.amplitude);
    }
    throw std::invalid_argument("make_field: unknown preset '" + spec.preset + "'");
}

MagneticField superpose(const MagneticField& a, const MagneticField& b) {
    if (a.dimension() != b.dimension())
        throw std::invalid_argument("superpose: dimension mismatch");
    auto eval = [a, b](const Eigen::Vector3d& x, Eigen::Matrix3d& B) {
        B = a.coefficients(x) + b.coefficients(x);
    };
    std::function<double(double)> dual;
    if (a.has_radial_dual() && b.has_radial_dual())
        dual = [a, b](double r) { return a.radial_dual(r) + b.radial_dual(r); };
    const bool radial = a.radial() && b.radial();
    std::vector<SupportBall> balls = a.support_balls();
    balls.insert(balls.end(), b.support_balls().begin(), b.support_balls().end());
    if (a.support_balls().empty() || b.support_balls().empty()) balls.clear();
    return MagneticField(a.dimension(), std::max(a.support_radius(), b.support_radius()),
                         a.sup_norm() + b.sup_norm(), radial, eval, dual, std::move(balls));
}

std::vector<std::pair<double, double>> MagneticField::ray_support(const Eigen::Vector3d& dir,
                                                                  double v_max) const {
    if (balls_.empty()) {
        if (sup_norm_ == 0.0) return {};
        return {{0.0, v_max}};
    }
    std::vector<std::pair<double, double>> segs;
    const double a = dir.squaredNorm();
    if (a <= 0.0) return {};
    for (const auto& ball : balls_) {
        const double b = -2.0 * dir.dot(ball.center);
        const double c = ball.center.squaredNorm() - ball.radius * ball.radius;
        const double disc = b * b - 4.0 * a * c;
        if (disc <= 0.0) continue;
        const double root = std::sqrt(disc);
        const double lo = std::max(0.0, (-b - root) / (2.0 * a));
        const double hi = std::min(v_max, (-b + root) / (2.0 * a));
        if (hi > lo) segs.emplace_back(lo, hi);
    }
    std::sort(segs.begin(), segs.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& s : segs) {
        if (!merged.empty() && s.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, s.second);
        else
            merged.push_back(s);
    }
    return merged;
}

Eigen::VectorXd hodge_dual(const MagneticField& field, const Eigen::Vector3d& x) {
    const Eigen::Matrix3d B = field.coefficients(x);
    if (field.dimension() == 2) {
        // (1/2!) eps^{jk} B_jk = B_12
        Eigen::VectorXd out(1);
        out[0] = B(0, 1);
        return out;
    }
    // (*B)^l = (1/2) eps^{ljk} B_jk, eps from the explicit d=3 table
    static const int eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                                     {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                                     {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
    Eigen::VectorXd out = Eigen::VectorXd::Zero(3);
    for (int l = 0; l < 3; ++l)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) out[l] += 0.5 * eps[l][j][k] * B(j, k);
    return out;
}

double closedness_residual(const MagneticField& field,
                           const std::vector<Eigen::Vector3d>& points, double h) {
    if (points.empty()) throw std::invalid_argument("closedness_residual: empty sample set");
    if (h <= 0.0) throw std::invalid_argument("closedness_residual: step must be positive");
    const int d = field.dimension();
    double worst = 0.0;
    for (const auto& x : points) {
        for (int j = 0; j < d; ++j)
            for (int k = j + 1; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    if (l == j || l == k) continue;
                    auto deriv = [&](int a, int b, int dir) {
                        Eigen::Vector3d xp = x, xm = x;
                        xp[dir] += h;
                        xm[dir] -= h;
                        return (field.component(a, b, xp) - field.component(a, b, xm)) /
                               (2.0 * h);
                    };
                    const double C = deriv(k, l, j) + deriv(l, j, k) + deriv(j, k, l);
                    worst = std::max(worst, std::abs(C));
                }
        // triples with a repeated index vanish identically by skew-symmetry,
        // so in d=2 there is nothing to difference and the residual stays 0
    }
    return worst;
}

double radial_projection_check(const MagneticField& field, double r, int n_samples) {
    if (field.dimension() != 3)
        throw std::invalid_argument("radial_projection_check: d=3 only");
    if (r <= 0.0) throw std::invalid_argument("radial_projection_check: r must be positive");
    // Fibonacci sphere sampling
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n_samples;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = golden * i;
        Eigen::Vector3d x(r * rho * std::cos(th), r * rho * std::sin(th), r * z);
        const Eigen::VectorXd dual = hodge_dual(field, x);
        worst = std::max(worst, std::abs(dual.dot(x)));
    }
    return worst;
}

}  // namespace magheat
