#pragma once

#include "intrinsic/bias.hpp"
#include "intrinsic/clustering.hpp"
#include "intrinsic/core.hpp"

#include <array>
#include <cstdint>

namespace intrinsic {

enum class Method : uint8_t { BO = 0, BOB = 1, FS = 2, SS = 3 };
inline constexpr int kMethodCount = 4;
inline constexpr std::array<const char*, kMethodCount> kMethodNames{"BO", "BOB", "FS", "SS"};

/// Sparse pixel-pair graph: q lies in the 30-pixel square window of p, p < q.
/// Neighbor offsets are subsampled by `stride` in both axes.
struct PairNeighborhood {
    int width = 0, height = 0, stride = 1, window_radius = 15;
    std::vector<int32_t> p, q;

    size_t pair_count() const { return p.size(); }
    /// Displacement (p - q) in pixels: (dx, dy).
    std::pair<int, int> offset(size_t i) const {
        const int px = p[i] % width, py = p[i] / width;
        const int qx = q[i] % width, qy = q[i] / width;
        return {px - qx, py - qy};
    }
};

PairNeighborhood build_neighborhood(int width, int height, int stride,
                                    int window_radius = 15);

/// Default stride rule: full offsets up to 128x128, every other offset above.
int default_stride(int width, int height);

/// Per-pair orders and confidences for the four estimation methods,
/// stored once per pair with the sign convention O(p,q), p < q.
struct PairOrderTable {
    PairNeighborhood nbhd;
    std::array<std::vector<double>, kMethodCount> order;
    std::array<std::vector<float>, kMethodCount> confidence;

    size_t pair_count() const { return nbhd.pair_count(); }
};

// Single-pair estimators. Pixels are flat indices into the UVB image.
double estimate_bo(const UvbImage& uvb, int p, int q);
double estimate_bob(const UvbImage& uvb, const ReflectanceClustering& clustering,
                    const ClusterBrightness& cb, int p, int q);
double estimate_fs();
double estimate_ss(const UvbImage& uvb, int p, int q);

/// Central-difference derivatives of the brightness field (one-sided at borders).
void brightness_derivatives(const UvbImage& uvb, ScalarField& dbdx, ScalarField& dbdy);

/// Fills the order table for every stored pair; confidences start at zero
/// and are assigned by the reliability pass.
PairOrderTable build_order_table(const UvbImage& uvb, const ReflectanceClustering& clustering,
                                 const ClusterBrightness& cb, PairNeighborhood nbhd);

}  // namespace intrinsic
