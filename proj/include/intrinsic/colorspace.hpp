#pragma once

#include "intrinsic/core.hpp"

namespace intrinsic {

/// Observed image with positive per-pixel RGB intensities in (0, 1].
struct LinearRgbImage {
    int width = 0;
    int height = 0;
    std::vector<Vec3> data;  // row-major

    size_t pixel_count() const { return data.size(); }
    Vec3& at(int x, int y) { return data[idx(x, y)]; }
    const Vec3& at(int x, int y) const { return data[idx(x, y)]; }
    size_t idx(int x, int y) const {
        return static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x);
    }

    /// Throws NonPositiveChannel / DimensionMismatch on a malformed image.
    void validate() const;
};

/// Orthonormal frame of the rotated log-RGB space: two shadow-free axes
/// u, v and the brightening direction n. H has columns [u, v, n].
struct UvbBasis {
    Vec3 u = Vec3::UnitX();
    Vec3 v = Vec3::UnitY();
    Vec3 n = Vec3::UnitZ();
    Mat3 H = Mat3::Identity();
};

/// Per-pixel (u, v, b) coordinates, log-intensity units.
struct UvbImage {
    int width = 0;
    int height = 0;
    ScalarField u, v, b;

    size_t pixel_count() const { return u.size(); }
};

/// Decomposition output: shading brightness plus the RGB shading and
/// reflectance maps, with shading(p) * reflectance(p) == image(p).
struct ShadingResult {
    int width = 0;
    int height = 0;
    ScalarField sb;
    std::vector<Vec3> shading;
    std::vector<Vec3> reflectance;
};

struct DirectionSearchConfig {
    double grid_step_deg = 1.0;    // coarse polar/azimuth step over the octant
    double refine_step_deg = 0.1;  // local refinement pass around the best cell
    double histogram_bin = 0.03;   // bin width of the (u,v) entropy histogram
};

/// Searches the hemisphere octant for the unit direction whose orthogonal
/// plane minimizes the entropy of the projected log-RGB pixel histogram.
/// Throws DegenerateImage when all pixels are identical.
Vec3 estimate_brightening_direction(const LinearRgbImage& img, const DirectionSearchConfig& cfg);

/// Deterministic orthonormal completion of n: u = normalize(n x e) where e
/// is the standard basis vector least aligned with n, v = n x u.
/// Throws NotUnit if n is not unit length within 1e-8.
UvbBasis build_uvb_basis(const Vec3& n);

/// [u, v, b](p) = log I(p) * H. Throws NonPositiveChannel on invalid input.
UvbImage to_uvb(const LinearRgbImage& img, const UvbBasis& basis);

/// shading(p) = exp([0, 0, sb(p)] * H^-1); reflectance = img / shading.
ShadingResult recover_shading(const ScalarField& sb, const UvbBasis& basis,
                              const LinearRgbImage& img);

/// Entropy of the 2D histogram of (u, v) samples, bins anchored at the
/// sample minima so the value is invariant to a common translation.
double projection_entropy(const std::vector<double>& u, const std::vector<double>& v,
                          double bin_width);

}  // namespace intrinsic
