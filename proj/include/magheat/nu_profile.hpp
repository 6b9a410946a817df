#pragma once

#include <vector>

#include "magheat/field.hpp"

namespace magheat {

struct NuResolution {
    int n_theta = 512;     // d=2 circle grid (numeric cross-check path)
    int sphere_phi = 24;   // d=3 lat-long grid
    int sphere_theta = 48;
    int n_quad = 64;
};

struct NuProfile {
    std::vector<double> radii;
    std::vector<double> values;
    double nu_infinity = 0.0;
};

/// nu_B(r) per radius: the d=2 values use the closed form dist(Phi_B(r),Z)^2,
/// d=3 values the sphere eigensolver. nu_infinity is taken at the largest
/// radius at or beyond the support (2R appended when the list has none);
/// radii are solved concurrently.
NuProfile nu_profile(const MagneticField& field, std::vector<double> radii,
                     const NuResolution& res = {});

}  // namespace magheat
