#pragma once

#include "intrinsic/clustering.hpp"
#include "intrinsic/core.hpp"

namespace intrinsic {

/// Pairwise reflectance-brightness biases between clusters, votes attached.
struct BiasGraph {
    int k = 0;
    Eigen::MatrixXd bias;         // antisymmetric where defined, log units
    Eigen::MatrixXd reliability;  // F: symmetric vote counts
    std::vector<uint8_t> defined; // k*k row-major adjacency (F > 0)

    bool is_defined(int j, int l) const { return defined[static_cast<size_t>(j) * k + l] != 0; }
};

struct MstEdge {
    int a = 0, b = 0;
    double weight = 0.0;  // 1 / F
};

/// Per-cluster relative reflectance brightness, anchored per component.
struct ClusterBrightness {
    std::vector<double> rb;
    std::vector<MstEdge> tree;
    std::vector<int> component;  // per-cluster component id (anchor = lowest index)
};

struct BiasConfig {
    int patch_size = 10;
    int min_pixels_per_cluster = 10;
    double histogram_bin = 0.02;
};

/// Scans 10x10 patches, histograms the per-patch median-brightness
/// differences per cluster pair, and keeps each histogram's peak.
BiasGraph build_bias_graph(const UvbImage& uvb, const ReflectanceClustering& clustering,
                           const BiasConfig& cfg = {});

/// Kruskal MST under weights 1/F; biases propagated from each component's
/// lowest-index cluster, which is anchored at zero.
ClusterBrightness solve_cluster_brightness(const BiasGraph& graph);

/// Median-filtered I^b minus the per-cluster relative reflectance brightness.
ScalarField shifted_shading_brightness(const UvbImage& uvb,
                                       const ReflectanceClustering& clustering,
                                       const ClusterBrightness& cb);

}  // namespace intrinsic
