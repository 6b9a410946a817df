#pragma once

// Test-only reference implementations, kept independent of the library
// code paths they are used to check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Composite Simpson quadrature (independent of the Gauss-Legendre rule in
/// the library).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Generalized Laguerre polynomial by direct series summation,
/// L_n^a(x) = sum_k (-1)^k C(n+a, n-k) x^k / k!.
inline double laguerre_series(int n, double alpha, double x) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        // C(n+a, n-k) = Gamma(n+a+1) / (Gamma(a+k+1) Gamma(n-k+1))
        const double logc = std::lgamma(n + alpha + 1.0) - std::lgamma(alpha + k + 1.0) -
                            std::lgamma(n - k + 1.0);
        double term = std::exp(logc);
        for (int j = 0; j < k; ++j) term *= x / (j + 1.0);
        acc += (k % 2 ? -term : term);
    }
    return acc;
}

/// Bessel J0 by its power series (x small enough for the tests).
inline double j0_series(double x) {
    const double q = -0.25 * x * x;
    double term = 1.0, acc = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= q / (k * k);
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
}

/// First positive root of J0 via bisection on the series.
inline double j0_first_zero_series() {
    double lo = 2.0, hi = 3.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (j0_series(lo) * j0_series(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
