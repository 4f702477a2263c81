#pragma once

#include "intrinsic/colorspace.hpp"
#include "intrinsic/core.hpp"

#include <cstdint>
#include <string>

namespace intrinsic {

/// Multiplicative occluder applied to the direct-shading field.
struct ShadowShape {
    enum class Kind { Disc, HalfPlane };
    Kind kind = Kind::Disc;
    // Disc: center and radius in pixels. HalfPlane: shadow where
    // nx*x + ny*y < offset.
    double cx = 0.0, cy = 0.0, radius = 0.0;
    double nx = 1.0, ny = 0.0, offset = 0.0;
    double inner = 0.0;    // direct-shading multiplier inside the shadow
    double feather = 0.0;  // transition width in pixels; 0 gives a hard edge
};

struct SceneSpec {
    int width = 64;
    int height = 64;
    std::vector<Vec3> colors;        // body reflectance per region, channels in (0,1]
    std::string layout = "blocks";   // "stripes" | "blocks" | "voronoi"
    int voronoi_sites_per_color = 1;
    Vec3 light_direct = Vec3(1.0, 1.0, 1.0);
    Vec3 light_ambient = Vec3(0.15, 0.15, 0.15);
    double gamma_base = 1.0;
    double gamma_ramp_x = 0.0;  // linear ramp over [0,1] of normalized x
    double gamma_ramp_y = 0.0;
    std::vector<ShadowShape> shadows;
};

/// Forward-rendered scene with exact ground truth.
struct SyntheticScene {
    int width = 0;
    int height = 0;
    std::vector<Vec3> reflectance_colors;
    Field2D<int> region;   // per-pixel color region
    ScalarField gamma;     // direct shading in [0,1]
    Vec3 light_direct, light_ambient;
    double normalization = 1.0;  // rendered image was divided by this

    LinearRgbImage image;
    std::vector<Vec3> shading;      // ground truth, independent of normalization
    std::vector<Vec3> reflectance;  // ground truth divided by the normalization

    /// Closed-form brightening direction; requires a strictly positive ambient.
    Vec3 true_brightening_direction() const;
    /// Ground-truth shading brightness along direction n.
    ScalarField shading_brightness(const Vec3& n) const;
    /// Ground-truth reflectance brightness along direction n.
    ScalarField reflectance_brightness(const Vec3& n) const;
};

/// Renders the scene. The seed drives the voronoi layout only; stripe and
/// block layouts are seed-independent. Throws InvalidSpec on a spec that
/// cannot produce a strictly positive image.
SyntheticScene generate_scene(const SceneSpec& spec, uint64_t seed);

}  // namespace intrinsic
