#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <sstream>

#include "magheat/config.hpp"
#include "magheat/runner.hpp"

using namespace magheat;

int main(int argc, char** argv) {
    CLI::App app{"magheat - numerical laboratory for magnetic heat-semigroup decay"};

    std::string experiment;
    app.add_option("experiment", experiment,
                   "gauge-check | nu-profile | spectrum | lambda-curve | resolvent-check | "
                   "evolve | hardy | full-report")
        ->required();

    std::string config_path, out_dir, sweep_spec, radii, s_grid, fit_window, weight, datum;
    double flux = std::nan(""), radius = std::nan(""), s_max = std::nan(""), ds = std::nan("");
    double hardy_R = std::nan("");
    std::int64_t seed = -1;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--out", out_dir, "output directory (per-run artifacts)");
    app.add_option("--seed", seed, "seed for randomized trials");
    app.add_option("--sweep", sweep_spec, "axis=v1,v2,... independent runs per value");
    app.add_option("--flux", flux, "total flux of the d=2 preset");
    app.add_option("--radius", radius, "field support radius");
    app.add_option("--radii", radii, "nu-profile radii as lo:hi:n");
    app.add_option("--s", s_grid, "lambda-curve s grid as lo:hi:n");
    app.add_option("--s-max", s_max, "evolution horizon");
    app.add_option("--ds", ds, "evolution step");
    app.add_option("--fit-window", fit_window, "decay fit window a:b");
    app.add_option("--weight", weight, "hardy weight: none | log | lw");
    app.add_option("--R", hardy_R, "hardy disk radius");
    app.add_option("--datum", datum, "evolve datum: gaussian | eigenfunction");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg =
            config_path.empty() ? ExperimentConfig{} : parse_config_file(config_path);
        apply_override(cfg, "experiment", experiment);
        if (!std::isnan(flux)) apply_override(cfg, "flux", std::to_string(flux));
        if (!std::isnan(radius)) apply_override(cfg, "radius", std::to_string(radius));
        if (!std::isnan(s_max)) apply_override(cfg, "s_max", std::to_string(s_max));
        if (!std::isnan(ds)) {
            std::ostringstream ss;
            ss.precision(17);
            ss << ds;
            apply_override(cfg, "ds", ss.str());
        }
        if (!std::isnan(hardy_R)) apply_override(cfg, "hardy_R", std::to_string(hardy_R));
        if (!radii.empty()) apply_override(cfg, "radii", radii);
        if (!s_grid.empty()) apply_override(cfg, "s_grid", s_grid);
        if (!fit_window.empty()) apply_override(cfg, "fit_window", fit_window);
        if (!weight.empty()) apply_override(cfg, "weight", weight);
        if (!datum.empty()) apply_override(cfg, "datum", datum);
        if (!out_dir.empty()) apply_override(cfg, "out_dir", out_dir);
        if (seed >= 0) apply_override(cfg, "seed", std::to_string(seed));
        cfg.validate();

        if (!sweep_spec.empty()) {
            const auto eq = sweep_spec.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--sweep expects axis=v1,v2,...");
            const std::string axis = sweep_spec.substr(0, eq);
            std::vector<double> values;
            std::istringstream ss(sweep_spec.substr(eq + 1));
            std::string item;
            while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
            const auto records = sweep(cfg, axis, values);
            bool all = true;
            for (std::size_t i = 0; i < records.size(); ++i) {
                std::cout << axis << "=" << values[i] << "  " << records[i].primary_name << "="
                          << records[i].primary_value
                          << (records[i].pass ? "  [pass]" : "  [FAIL]") << "\n";
                all = all && records[i].pass;
            }
            return all ? 0 : 1;
        }

        const RunRecord rec = run(cfg);
        for (const auto& a : rec.assertions)
            std::cout << (a.pass ? "[pass] " : "[FAIL] ") << a.name << ": " << a.value << " "
                      << a.cmp << " " << a.threshold << "\n";
        const auto payload = nlohmann::json::parse(rec.payload_json);
        if (payload.contains("error"))
            std::cout << "run failed: " << payload["error"].get<std::string>() << "\n";
        else
            std::cout << rec.primary_name << " = " << rec.primary_value << "\n";
        std::cout << "record written to " << cfg.out_dir << "/record.json\n";
        return rec.pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
