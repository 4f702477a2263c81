#pragma once

#include "intrinsic/fusion.hpp"

#include <cstdint>
#include <string>

namespace intrinsic {

/// Every tunable of the pipeline with its default. Zero means "derive at
/// runtime" for the sigmoid weights w1..w7 (w = ln3 / x0 calibration, w7
/// from the median pair distance).
struct PipelineConfig {
    // color space
    double channel_floor = 1e-4;
    double direction_grid_step_deg = 1.0;
    double direction_refine_step_deg = 0.1;
    double entropy_bin = 0.03;

    // clustering
    double cluster_hist_bin = 0.03;
    int cluster_min_bin_count = 5;
    double cluster_min_bin_fraction = 1e-3;
    int kmeans_max_iterations = 300;
    double kmeans_tolerance = 1e-7;
    double covariance_floor = 1e-6;

    // cluster-bias estimation
    int patch_size = 10;
    int patch_min_pixels = 10;
    double bias_bin = 0.02;

    // pair neighborhood
    int window_radius = 15;
    int stride = 0;  // 0 = resolution-dependent default

    // reliability sigmoid weights; 0 = calibrated default
    double w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 0.0, w5 = 0.0, w6 = 0.0;
    double w7_fs = 0.0, w7_ss = 0.0;

    // fusion
    double alpha1 = 1.0;
    double alpha2 = 2.0;
    double tau = 0.2;
    double omega_min = 1.0 / 3.0;
    double rho = 5.0;
    double eta1 = 0.05, eta2 = 1.0, eta3 = 1.0;
    int admm_max_iter = 500;
    double admm_weight_tol_scale = 1e-3;
    double admm_degree_tol_scale = 1e-3;
    double eig_tol = 1e-8;
    int eig_max_iter = 20000;
    int choose_m_sweeps = 5;
    double dual_step = 0.1;
    int decode_bins = 256;
    double angle_margin = 0.1;  // brightness pre-scale targets a span of pi - margin

    // depth features
    int illuminant_samples = 64;
    double sim_threshold = 0.2;
    bool cast_shadows = false;

    // metrics
    int lmse_window = 20;
    int lmse_step = 10;
    double whdr_delta = 0.10;
    bool mse_scale_invariant = true;

    // pipeline
    int max_dimension = 256;
    uint64_t seed = 0;
    int threads = 0;
    bool equal_weight_mode = false;
    bool disable_bo = false, disable_bob = false, disable_fs = false, disable_ss = false;
    bool use_depth = true;

    CsfConfig csf() const;
};

PipelineConfig load_config(const std::string& path);
void save_config(const std::string& path, const PipelineConfig& cfg);
std::string serialize_config(const PipelineConfig& cfg);

}  // namespace intrinsic
