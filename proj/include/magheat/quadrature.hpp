#pragma once

#include <vector>

namespace magheat {

/// Gauss-Legendre rule on [-1,1]. Nodes/weights computed once by Newton
/// iteration on the Legendre recurrence and cached per order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int order);

    /// Integrate f over [a,b].
    template <typename F>
    double integrate(F&& f, double a, double b) const {
        const double c = 0.5 * (b - a), m = 0.5 * (a + b);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(m + c * nodes[i]);
        return c * acc;
    }
};

/// Shared cached rule (orders used repeatedly all over the code).
const GaussLegendre& gauss_legendre(int order);

}  // namespace magheat
