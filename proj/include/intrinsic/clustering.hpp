#pragma once

#include "intrinsic/colorspace.hpp"
#include "intrinsic/core.hpp"

#include <cstdint>

namespace intrinsic {

/// Pixels grouped by body reflectance on the shadow-free UV plane.
struct ReflectanceClustering {
    int k = 0;
    std::vector<int> labels;          // per pixel, in [0, k)
    std::vector<Vec2> means;          // per cluster
    std::vector<Mat2> covariances;    // per cluster, floored to stay positive definite
    std::vector<double> pc;           // per pixel: posterior of the assigned cluster
    std::vector<double> objective_trace;  // k-means objective after each iteration
};

struct ClusterCountConfig {
    double bin_width = 0.03;
    int min_bin_count = 5;          // absolute part of the noise floor
    double min_bin_fraction = 1e-3; // relative part of the noise floor
};

/// Number of strict 8-neighborhood local maxima in the (u, v) histogram,
/// ignoring bins below max(min_bin_count, min_bin_fraction * pixels).
/// Always returns at least 1.
int count_clusters(const UvbImage& uvb, const ClusterCountConfig& cfg = {});

struct KMeansConfig {
    int max_iterations = 300;
    double movement_tolerance = 1e-7;
    double covariance_floor = 1e-6;
};

/// Seeded k-means++ on (u, v) followed by a Gaussian fit per cluster.
/// pc is the uniform-prior mixture posterior of each pixel's own label.
ReflectanceClustering cluster_reflectance(const UvbImage& uvb, int k, uint64_t seed,
                                          const KMeansConfig& cfg = {});

}  // namespace intrinsic
