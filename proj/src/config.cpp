#include "magheat/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace magheat {

std::vector<double> RangeSpec::values() const {
    std::vector<double> out;
    if (n <= 0) return out;
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1.0));
    return out;
}

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> v = {"gauge-check", "nu-profile",     "spectrum",
                                               "lambda-curve", "resolvent-check", "evolve",
                                               "hardy",        "full-report"};
    return v;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (...) {
        throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: trailing junk in value of '" + key + "': '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d != std::floor(d))
        throw std::invalid_argument("config: key '" + key + "' expects an integer");
    return static_cast<int>(d);
}

RangeSpec parse_range(const std::string& key, const std::string& v) {
    RangeSpec r;
    std::istringstream ss(v);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
        throw std::invalid_argument("config: key '" + key + "' expects lo:hi:n");
    r.lo = parse_double(key, trim(a));
    r.hi = parse_double(key, trim(b));
    r.n = parse_int(key, trim(c));
    return r;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

std::vector<Eigen::Vector2d> parse_centers(const std::string& key, const std::string& v) {
    std::vector<Eigen::Vector2d> out;
    std::istringstream ss(v);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        const auto nums = parse_list(key, trim(pair));
        if (nums.size() != 2)
            throw std::invalid_argument("config: each center in '" + key + "' needs x,y");
        out.emplace_back(nums[0], nums[1]);
    }
    return out;
}

}  // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "experiment") cfg.experiment = v;
    else if (key == "dimension") cfg.dimension = parse_int(key, v);
    else if (key == "preset") cfg.preset = v;
    else if (key == "flux") cfg.flux = parse_double(key, v);
    else if (key == "radius") cfg.radius = parse_double(key, v);
    else if (key == "amplitude") cfg.amplitude = parse_double(key, v);
    else if (key == "centers") cfg.centers = parse_centers(key, v);
    else if (key == "n_quad") cfg.n_quad = parse_int(key, v);
    else if (key == "n_theta") cfg.n_theta = parse_int(key, v);
    else if (key == "sphere_phi") cfg.sphere_phi = parse_int(key, v);
    else if (key == "sphere_theta") cfg.sphere_theta = parse_int(key, v);
    else if (key == "radii") cfg.radii = parse_range(key, v);
    else if (key == "n_radial") cfg.n_radial = parse_int(key, v);
    else if (key == "rho_min") cfg.rho_min = parse_double(key, v);
    else if (key == "rho_max") cfg.rho_max = parse_double(key, v);
    else if (key == "m_range") cfg.m_range = parse_int(key, v);
    else if (key == "s_list") cfg.s_list = parse_list(key, v);
    else if (key == "s_grid") cfg.s_grid = parse_range(key, v);
    else if (key == "ds") cfg.ds = parse_double(key, v);
    else if (key == "s_max") cfg.s_max = parse_double(key, v);
    else if (key == "fit_window") {
        const RangeSpec r = parse_range(key, v + ":2");
        cfg.fit_lo = r.lo;
        cfg.fit_hi = r.hi;
    } else if (key == "datum") cfg.datum = v;
    else if (key == "datum_width") cfg.datum_width = parse_double(key, v);
    else if (key == "datum_mode") cfg.datum_mode = v;
    else if (key == "weight") cfg.weight = v;
    else if (key == "hardy_R") cfg.hardy_R = parse_double(key, v);
    else if (key == "r_out") cfg.r_out = parse_double(key, v);
    else if (key == "mesh_r") cfg.mesh_r = parse_int(key, v);
    else if (key == "mesh_theta") cfg.mesh_theta = parse_int(key, v);
    else if (key == "trials") cfg.trials = parse_int(key, v);
    else if (key == "out_dir") cfg.out_dir = v;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_double(key, v));
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            apply_override(cfg, key, val);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (std::find(known_experiments().begin(), known_experiments().end(), experiment) ==
        known_experiments().end())
        fail("unknown experiment '" + experiment + "'");
    if (dimension != 2 && dimension != 3) fail("dimension must be 2 or 3");
    if (radius <= 0.0) fail("radius must be positive");
    if (!std::isfinite(flux)) fail("flux must be finite");
    if (n_quad < 8) fail("n_quad must be >= 8");
    if (n_theta < 32) fail("n_theta must be >= 32");
    if (sphere_phi < 16 || sphere_theta < 32) fail("sphere grid must be at least 16x32");
    if (n_radial < 100 || n_radial > 200000) fail("n_radial out of range [100, 200000]");
    if (rho_min <= 0.0 || rho_min >= 0.5) fail("rho_min out of range (0, 0.5)");
    if (rho_max < 10.0 || rho_max > 100.0) fail("rho_max out of range [10, 100]");
    if (m_range < 1 || m_range > 64) fail("m_range out of range [1, 64]");
    if (!(ds > 0.0) || ds > 0.1) fail("ds must lie in (0, 0.1]");
    if (experiment == "evolve" || experiment == "full-report") {
        if (s_max < 8.0) fail("s_max must be >= 8");
        if (fit_lo < 0.5 * s_max || fit_hi > s_max || fit_lo >= fit_hi)
            fail("fit_window must lie inside [s_max/2, s_max]");
        if (datum != "gaussian" && datum != "eigenfunction" && datum != "zero")
            fail("datum must be gaussian | eigenfunction | zero");
        if (datum_mode != "auto") (void)parse_int("datum_mode", datum_mode);
    }
    if (weight != "none" && weight != "log" && weight != "lw")
        fail("weight must be none | log | lw");
    if (hardy_R <= 0.0) fail("hardy_R must be positive");
    if (mesh_r < 16 || mesh_theta < 16) fail("hardy mesh must be at least 16x16");
    if (trials < 1) fail("trials must be >= 1");
    if (radii.n < 0 || s_grid.n < 0) fail("range counts must be nonnegative");
}

FieldSpec ExperimentConfig::field_spec() const {
    FieldSpec spec;
    spec.preset = preset;
    spec.flux = flux;
    spec.radius = radius;
    spec.amplitude = amplitude;
    spec.centers = centers;
    return spec;
}

MagneticField ExperimentConfig::build_field() const {
    return make_field(dimension, field_spec());
}

int ExperimentConfig::resolve_datum_mode() const {
    if (datum_mode != "auto") return parse_int("datum_mode", datum_mode);
    // nearest integer to the flux, ties toward zero: the slowest-decaying
    // angular sector, which realizes the semigroup decay rate
    const double f = flux;
    double m = std::floor(f);
    if (f - m > 0.5) m += 1.0;
    if (f < 0.0) {
        m = std::ceil(f);
        if (m - f > 0.5) m -= 1.0;
    }
    return static_cast<int>(m);
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream ss;
    ss.precision(17);
    ss << "experiment=" << experiment << "\ndimension=" << dimension << "\npreset=" << preset
       << "\nflux=" << flux << "\nradius=" << radius << "\namplitude=" << amplitude
       << "\ncenters=";
    for (const auto& c : centers) ss << c[0] << "," << c[1] << ";";
    ss << "\nn_quad=" << n_quad << "\nn_theta=" << n_theta << "\nsphere_phi=" << sphere_phi
       << "\nsphere_theta=" << sphere_theta << "\nradii=" << radii.lo << ":" << radii.hi << ":"
       << radii.n << "\nn_radial=" << n_radial << "\nrho_min=" << rho_min
       << "\nrho_max=" << rho_max << "\nm_range=" << m_range << "\ns_list=";
    for (double s : s_list) ss << s << ",";
    ss << "\ns_grid=" << s_grid.lo << ":" << s_grid.hi << ":" << s_grid.n << "\nds=" << ds
       << "\ns_max=" << s_max << "\nfit_window=" << fit_lo << ":" << fit_hi
       << "\ndatum=" << datum << "\ndatum_width=" << datum_width
       << "\ndatum_mode=" << datum_mode << "\nweight=" << weight << "\nhardy_R=" << hardy_R
       << "\nr_out=" << r_out << "\nmesh_r=" << mesh_r << "\nmesh_theta=" << mesh_theta
       << "\ntrials=" << trials << "\nseed=" << seed << "\n";
    return ss.str();
}

std::uint64_t ExperimentConfig::hash() const {
    // FNV-1a over the canonical rendering
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace magheat
