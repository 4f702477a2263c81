#pragma once

#include "intrinsic/orders.hpp"

#include <complex>
#include <optional>

namespace intrinsic {

struct CsfConfig {
    double alpha1 = 1.0;        // lasso weight of the elastic net
    double alpha2_init = 2.0;   // initial ridge weight, lowered by tau each iteration
    double tau = 0.2;
    double omega_min = 1.0 / 3.0;  // stop when the nonzero-weight density drops below this

    // ADMM parameters for the per-pixel weight update.
    double rho = 5.0;
    double eta1 = 0.05, eta2 = 1.0, eta3 = 1.0;
    int admm_max_iter = 500;
    double admm_weight_tol_scale = 1e-3;  // T_W = scale * (pairs of the pixel)
    double admm_degree_tol_scale = 1e-3;  // T_d = scale * D_p

    // Spectral solve of the normalized Laplacian.
    double eig_tol = 1e-8;
    int eig_max_iter = 20000;

    // Method-selection dual ascent.
    int choose_m_sweeps = 5;
    double dual_step = 0.1;

    int decode_bins = 256;

    bool equal_weight_mode = false;  // ablation: one embedding pass, unit confidences
    std::array<bool, kMethodCount> method_enabled{true, true, true, true};

    int threads = 0;  // 0 = library default; output is independent of this
};

struct FusionIterationStats {
    int iteration = 0;
    double alpha2 = 0.0;
    double energy = 0.0;          // weighted embedding error after the spectral solve
    double weight_density = 1.0;  // nonzero fraction of the directional weights
    std::array<size_t, kMethodCount> method_histogram{};
    int eig_iterations = 0;
};

/// Joint optimizer state. Each stored pair (p, q) owns two directional
/// slots: slot 2i belongs to row p, slot 2i+1 to row q.
struct FusionState {
    int n_pixels = 0;
    size_t pair_count = 0;

    std::vector<uint8_t> method;    // per slot: selected estimation method
    std::vector<double> weight;     // per slot: nonnegative pair weight
    std::vector<float> sel_conf;    // per slot: confidence of the selected method
    std::vector<double> degree;     // per pixel: D_p = sum of best per-pair confidences
    std::vector<double> nu;         // per pixel: method-selection multiplier
    std::vector<double> lambda;     // per pixel: ADMM equality multiplier (last value)
    std::vector<std::complex<double>> z;  // per pixel: unit-modulus embedding

    double alpha2 = 0.0;
    int last_eig_iterations = 0;
    std::vector<double> initial_angle_hint;  // optional warm start for the first solve

    // Incidence structure: slots of each pixel's row, CSR layout.
    std::vector<int64_t> adj_offset;
    std::vector<int32_t> adj_slot;

    std::vector<FusionIterationStats> iterations;

    bool active(int pixel) const { return degree[pixel] > 0.0; }
};

/// W = 1 everywhere, M = per-pair confidence argmax, D from the
/// max-confidence degree formula. Throws EmptyGraph when no pairs exist.
FusionState initialize(const PairOrderTable& table, const CsfConfig& cfg);

/// Solves the generalized eigenproblem (L, D) for the smallest eigenpair on
/// the symmetrized operator and stores the per-pixel unit-modulus embedding.
/// Throws SolverDiverged when the residual stays above tolerance at the cap.
void solve_embedding(FusionState& state, const PairOrderTable& table, const CsfConfig& cfg);

/// Per-slot method selection under the degree constraint, with a fixed
/// number of dual-ascent sweeps on the per-pixel multipliers.
void choose_methods(FusionState& state, const PairOrderTable& table, const CsfConfig& cfg);

/// Per-pixel ADMM on the elastic-net weight subproblem. Uses state.alpha2.
void update_weights(FusionState& state, const PairOrderTable& table, const CsfConfig& cfg);

/// Full optimization loop: embed, select, sparsify until the ridge weight is
/// exhausted or the weights become too sparse.
FusionState run_csf(const PairOrderTable& table, const CsfConfig& cfg,
                    const std::vector<double>* initial_angle_hint = nullptr);

/// Weighted embedding error of the current state (both slot directions).
double embedding_energy(const FusionState& state, const PairOrderTable& table);

/// Decodes embedding angles into shading brightness: finds the largest
/// circular gap of the angle histogram, unwraps across it, anchors the
/// darkest pixel at zero and undoes the brightness pre-scaling. Pixels with
/// valid == 0 receive the median decoded value. Throws NoGap when every
/// histogram bin is occupied.
std::vector<double> decode_angles(const std::vector<std::complex<double>>& z, double scale,
                                  int bins = 256, const std::vector<uint8_t>* valid = nullptr);

}  // namespace intrinsic
