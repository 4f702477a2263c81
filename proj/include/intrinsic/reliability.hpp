#pragma once

#include "intrinsic/bias.hpp"
#include "intrinsic/clustering.hpp"
#include "intrinsic/core.hpp"
#include "intrinsic/depth.hpp"
#include "intrinsic/orders.hpp"

#include <array>
#include <optional>

namespace intrinsic {

/// sigm(x; w) = 2 / (1 + e^{-wx}) - 1, mapping distances in [0, inf) to [0, 1).
double sigm(double x, double w);

/// Sigmoid weights. Defaults follow the calibration w = ln3 / x0 so each
/// feature maps its characteristic distance x0 to probability 1/2.
struct FeatureWeights {
    double w1 = 0.0;  // step edge on the shifted shading brightness (x0 = 0.1)
    double w2 = 0.0;  // local color variance (x0 = 0.2)
    double w3 = 0.0;  // shadow-edge render difference (x0 = 0.01)
    double w4 = 0.0;  // chromaticity distance (x0 = 0.08)
    double w5 = 0.0;  // brightness step edge (x0 = 0.1)
    double w6 = 0.0;  // surface normal angle (x0 = 0.2)
    double w7_fs = 0.0;  // spatial distance, FS method (x0 = median pair distance)
    double w7_ss = 0.0;  // spatial distance, SS method (half the FS weight)

    /// median_pair_distance is the median d_s over all stored pairs. For
    /// RGB-only input w7 is raised 6x to offset the missing depth features.
    static FeatureWeights defaults(double median_pair_distance, bool rgb_only);
};

enum class Perturbation : int { CE = 0, LCV = 1, SE = 2, RC = 3, SNC = 4, SD = 5 };
inline constexpr int kPerturbationCount = 6;

/// Which methods are sensitive to which perturbations. The SS/SD entry is
/// "moderate": SS keeps the SD factor but at half the FS sigmoid weight.
struct RobustnessMatrix {
    std::array<std::array<bool, kPerturbationCount>, kMethodCount> sensitive{};

    bool is_sensitive(Method m, Perturbation f) const {
        return sensitive[static_cast<int>(m)][static_cast<int>(f)];
    }
    static RobustnessMatrix standard();
};

/// Precomputed per-pixel fields shared by the per-pair features.
struct ReliabilityContext {
    const UvbImage* uvb = nullptr;
    const ReflectanceClustering* clustering = nullptr;
    ScalarField smoothed_b;        // 3x3 mean of I^b
    ScalarField smoothed_shifted;  // 3x3 mean of the shifted shading brightness
    ScalarField sigma_uv;          // local chromaticity scatter
    FeatureWeights weights;
    bool rgb_only = true;
    // Optional depth-derived inputs.
    const std::vector<Vec3>* positions = nullptr;
    const Field2D<uint8_t>* position_valid = nullptr;
    const NormalMap* normals = nullptr;
    const std::vector<ShadingRender>* promising = nullptr;
};

ReliabilityContext make_reliability_context(const UvbImage& uvb,
                                            const ReflectanceClustering& clustering,
                                            const ScalarField& shifted_sb,
                                            const FeatureWeights& weights);

/// Local chromaticity scatter sqrt(var(u) + var(v)) over 3x3 windows.
ScalarField chromaticity_scatter(const UvbImage& uvb);

/// Largest absolute step between consecutive samples of the smoothed field
/// along the Bresenham segment from p to q.
double step_edge(const ScalarField& smoothed, int width, int p, int q);

/// Spatial distance between the pair: 3D camera-space when both positions
/// are valid, 2D pixel distance otherwise.
double pair_distance(const ReliabilityContext& ctx, int p, int q);

/// Median pair distance over the stored neighborhood (the calibration
/// distance for the SD feature).
double median_pair_distance(const PairNeighborhood& nbhd, const std::vector<Vec3>* positions,
                            const Field2D<uint8_t>* position_valid);

double p_ce(const ReliabilityContext& ctx, int p, int q);
double p_lcv(const ReliabilityContext& ctx, int p, int q);
double p_rc(const ReliabilityContext& ctx, int p, int q);
double p_sd(const ReliabilityContext& ctx, int p, int q, Method m);

/// Noisy-Or combination over the perturbations the method is sensitive to.
/// SE and SNC are dropped entirely for RGB-only input.
double confidence(const ReliabilityContext& ctx, const RobustnessMatrix& rm, int p, int q,
                  Method m);

/// Fills table.confidence for every stored pair and method.
void fill_confidences(PairOrderTable& table, const ReliabilityContext& ctx,
                      const RobustnessMatrix& rm);

}  // namespace intrinsic
