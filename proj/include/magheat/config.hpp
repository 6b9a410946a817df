#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magheat/field.hpp"

namespace magheat {

/// Range sweep written lo:hi:n in the configuration.
struct RangeSpec {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    std::vector<double> values() const;
};

/// Experiment configuration, parsed from key = value text. Unknown keys are
/// rejected with the offending line; all numeric parameters are validated
/// against their documented admissible ranges.
struct ExperimentConfig {
    std::string experiment = "evolve";

    // field
    int dimension = 2;
    std::string preset = "radial-bump";
    double flux = 0.5;
    double radius = 1.0;
    double amplitude = 1.0;
    std::vector<Eigen::Vector2d> centers;

    // discretizations
    int n_quad = 128;
    int n_theta = 512;
    int sphere_phi = 24;
    int sphere_theta = 48;
    RangeSpec radii{0.1, 3.0, 30};
    int n_radial = 4000;
    double rho_min = 1e-4;
    double rho_max = 20.0;
    int m_range = 4;
    std::vector<double> s_list{4.0, 8.0, 12.0, 16.0};
    RangeSpec s_grid{0.0, 16.0, 9};

    // evolution
    double ds = 1e-3;
    double s_max = 16.0;
    double fit_lo = 10.0, fit_hi = 16.0;
    std::string datum = "gaussian";
    double datum_width = 0.25;
    std::string datum_mode = "auto";  // integer literal or "auto"

    // hardy
    std::string weight = "none";
    double hardy_R = 2.0;
    double r_out = 40.0;
    int mesh_r = 64;
    int mesh_theta = 64;
    int trials = 1000;

    // bookkeeping
    std::string out_dir = "runs";
    std::uint64_t seed = 1;

    FieldSpec field_spec() const;
    MagneticField build_field() const;
    int resolve_datum_mode() const;

    /// Canonical text rendering (stable key order) used for hashing.
    std::string canonical() const;
    std::uint64_t hash() const;

    void validate() const;  // throws std::invalid_argument naming the key
};

/// Parse configuration text; messages carry the line number and key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Apply one "key=value" override (CLI sweep / flag path).
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

const std::vector<std::string>& known_experiments();

}  // namespace magheat
