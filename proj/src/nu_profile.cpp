#include "magheat/nu_profile.hpp"

#include <algorithm>
#include <stdexcept>

#include "magheat/circle_op.hpp"
#include "magheat/gauge.hpp"
#include "magheat/parallel.hpp"
#include "magheat/sphere_op.hpp"

namespace magheat {

NuProfile nu_profile(const MagneticField& field, std::vector<double> radii,
                     const NuResolution& res) {
    if (!std::is_sorted(radii.begin(), radii.end()))
        throw std::invalid_argument("nu_profile: radii must be sorted");
    if (!radii.empty() && radii.front() <= 0.0)
        throw std::invalid_argument("nu_profile: radii must be positive");

    const double R = field.support_radius();
    bool appended = false;
    if (radii.empty() || radii.back() < R) {
        radii.push_back(2.0 * R);
        appended = true;
    }

    NuProfile out;
    out.radii = radii;
    out.values.assign(radii.size(), 0.0);

    if (field.dimension() == 2) {
        const FluxProfile flux = total_flux(field, res.n_quad);
        for (std::size_t i = 0; i < radii.size(); ++i)
            out.values[i] = nu_circle_exact(flux(radii[i]));
    } else {
        const SphericalPotential pot(field, res.n_quad);
        parallel_for(radii.size(), [&](std::size_t i) {
            out.values[i] =
                nu_sphere_numeric(pot, radii[i], {res.sphere_phi, res.sphere_theta});
        });
    }

    out.nu_infinity = out.values.back();
    if (appended) {
        out.radii.pop_back();
        // keep the appended evaluation only as the reported limit
        const double vi = out.values.back();
        out.values.pop_back();
        out.nu_infinity = vi;
    }
    return out;
}

}  // namespace magheat
