#include "intrinsic/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace intrinsic {

CsfConfig PipelineConfig::csf() const {
    CsfConfig c;
    c.alpha1 = alpha1;
    c.alpha2_init = alpha2;
    c.tau = tau;
    c.omega_min = omega_min;
    c.rho = rho;
    c.eta1 = eta1;
    c.eta2 = eta2;
    c.eta3 = eta3;
    c.admm_max_iter = admm_max_iter;
    c.admm_weight_tol_scale = admm_weight_tol_scale;
    c.admm_degree_tol_scale = admm_degree_tol_scale;
    c.eig_tol = eig_tol;
    c.eig_max_iter = eig_max_iter;
    c.choose_m_sweeps = choose_m_sweeps;
    c.dual_step = dual_step;
    c.decode_bins = decode_bins;
    c.equal_weight_mode = equal_weight_mode;
    c.method_enabled = {!disable_bo, !disable_bob, !disable_fs, !disable_ss};
    c.threads = threads;
    return c;
}

namespace {

struct Binding {
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const std::string&)> set;
};

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

double parse_double(const std::string& s) {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InvalidSpec("malformed number '" + s + "'");
    return v;
}

int parse_int(const std::string& s) {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw InvalidSpec("malformed integer '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw InvalidSpec("malformed boolean '" + s + "'");
}

const std::map<std::string, Binding>& bindings() {
    static const std::map<std::string, Binding> table = [] {
        std::map<std::string, Binding> t;
        const auto dbl = [&t](const std::string& key, double PipelineConfig::* field) {
            t[key] = {[field](const PipelineConfig& c) { return format_double(c.*field); },
                      [field](PipelineConfig& c, const std::string& v) { c.*field = parse_double(v); }};
        };
        const auto integer = [&t](const std::string& key, int PipelineConfig::* field) {
            t[key] = {[field](const PipelineConfig& c) { return std::to_string(c.*field); },
                      [field](PipelineConfig& c, const std::string& v) { c.*field = parse_int(v); }};
        };
        const auto boolean = [&t](const std::string& key, bool PipelineConfig::* field) {
            t[key] = {[field](const PipelineConfig& c) { return c.*field ? "true" : "false"; },
                      [field](PipelineConfig& c, const std::string& v) { c.*field = parse_bool(v); }};
        };
        dbl("channel_floor", &PipelineConfig::channel_floor);
        dbl("direction_grid_step_deg", &PipelineConfig::direction_grid_step_deg);
        dbl("direction_refine_step_deg", &PipelineConfig::direction_refine_step_deg);
        dbl("entropy_bin", &PipelineConfig::entropy_bin);
        dbl("cluster_hist_bin", &PipelineConfig::cluster_hist_bin);
        integer("cluster_min_bin_count", &PipelineConfig::cluster_min_bin_count);
        dbl("cluster_min_bin_fraction", &PipelineConfig::cluster_min_bin_fraction);
        integer("kmeans_max_iterations", &PipelineConfig::kmeans_max_iterations);
        dbl("kmeans_tolerance", &PipelineConfig::kmeans_tolerance);
        dbl("covariance_floor", &PipelineConfig::covariance_floor);
        integer("patch_size", &PipelineConfig::patch_size);
        integer("patch_min_pixels", &PipelineConfig::patch_min_pixels);
        dbl("bias_bin", &PipelineConfig::bias_bin);
        integer("window_radius", &PipelineConfig::window_radius);
        integer("stride", &PipelineConfig::stride);
        dbl("w1", &PipelineConfig::w1);
        dbl("w2", &PipelineConfig::w2);
        dbl("w3", &PipelineConfig::w3);
        dbl("w4", &PipelineConfig::w4);
        dbl("w5", &PipelineConfig::w5);
        dbl("w6", &PipelineConfig::w6);
        dbl("w7_fs", &PipelineConfig::w7_fs);
        dbl("w7_ss", &PipelineConfig::w7_ss);
        dbl("alpha1", &PipelineConfig::alpha1);
        dbl("alpha2", &PipelineConfig::alpha2);
        dbl("tau", &PipelineConfig::tau);
        dbl("omega_min", &PipelineConfig::omega_min);
        dbl("rho", &PipelineConfig::rho);
        dbl("eta1", &PipelineConfig::eta1);
        dbl("eta2", &PipelineConfig::eta2);
        dbl("eta3", &PipelineConfig::eta3);
        integer("admm_max_iter", &PipelineConfig::admm_max_iter);
        dbl("admm_weight_tol_scale", &PipelineConfig::admm_weight_tol_scale);
        dbl("admm_degree_tol_scale", &PipelineConfig::admm_degree_tol_scale);
        dbl("eig_tol", &PipelineConfig::eig_tol);
        integer("eig_max_iter", &PipelineConfig::eig_max_iter);
        integer("choose_m_sweeps", &PipelineConfig::choose_m_sweeps);
        dbl("dual_step", &PipelineConfig::dual_step);
        integer("decode_bins", &PipelineConfig::decode_bins);
        dbl("angle_margin", &PipelineConfig::angle_margin);
        integer("illuminant_samples", &PipelineConfig::illuminant_samples);
        dbl("sim_threshold", &PipelineConfig::sim_threshold);
        boolean("cast_shadows", &PipelineConfig::cast_shadows);
        integer("lmse_window", &PipelineConfig::lmse_window);
        integer("lmse_step", &PipelineConfig::lmse_step);
        dbl("whdr_delta", &PipelineConfig::whdr_delta);
        boolean("mse_scale_invariant", &PipelineConfig::mse_scale_invariant);
        integer("max_dimension", &PipelineConfig::max_dimension);
        t["seed"] = {[](const PipelineConfig& c) { return std::to_string(c.seed); },
                     [](PipelineConfig& c, const std::string& v) { c.seed = std::stoull(v); }};
        integer("threads", &PipelineConfig::threads);
        boolean("equal_weight_mode", &PipelineConfig::equal_weight_mode);
        boolean("disable_bo", &PipelineConfig::disable_bo);
        boolean("disable_bob", &PipelineConfig::disable_bob);
        boolean("disable_fs", &PipelineConfig::disable_fs);
        boolean("disable_ss", &PipelineConfig::disable_ss);
        boolean("use_depth", &PipelineConfig::use_depth);
        return t;
    }();
    return table;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

}  // namespace

std::string serialize_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    for (const auto& [key, binding] : bindings()) out << key << " = " << binding.get(cfg) << "\n";
    return out.str();
}

void save_config(const std::string& path, const PipelineConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << serialize_config(cfg);
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    PipelineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidSpec(path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = bindings().find(key);
        if (it == bindings().end())
            throw InvalidSpec(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        it->second.set(cfg, value);
    }
    return cfg;
}

}  // namespace intrinsic
