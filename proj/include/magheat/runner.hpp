#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "magheat/config.hpp"

namespace magheat {

/// One acceptance-style assertion attached to a run: pass is recomputable
/// from value, threshold and the comparison direction alone.
struct Assertion {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string cmp;  // "<" | "<=" | ">" | ">=" | "bool"
    bool pass = false;
};

struct RunRecord {
    std::string experiment;
    std::uint64_t config_hash = 0;
    std::string started;
    std::string finished;
    std::string payload_json;  // per-experiment result payload (JSON text)
    std::vector<Assertion> assertions;
    bool pass = true;

    /// Headline scalar of the run (slope, eigenvalue, ...), used by sweeps.
    double primary_value = 0.0;
    std::string primary_name;
};

/// Execute the configured experiment, write CSVs, plot script and
/// record.json into out_dir (created if absent), and return the record.
RunRecord run(const ExperimentConfig& config, const std::string& out_dir);
RunRecord run(const ExperimentConfig& config);  // uses config.out_dir

/// Independent runs over values of one sweepable axis ("flux", "radius",
/// "ds", "s_max", "n_radial"), fanned out to a worker pool capped by
/// MAGHEAT_THREADS. Failed runs are marked and do not stop the sweep; the
/// combined CSV is keyed by the axis.
std::vector<RunRecord> sweep(const ExperimentConfig& config, const std::string& axis,
                             const std::vector<double>& values);

}  // namespace magheat
