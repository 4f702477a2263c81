#pragma once

#include "intrinsic/clustering.hpp"
#include "intrinsic/colorspace.hpp"
#include "intrinsic/core.hpp"

namespace intrinsic {

struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;

    bool valid() const { return fx > 0.0 && fy > 0.0; }
};

/// Per-pixel depth in meters; zero/negative readings are flagged invalid.
struct DepthMap {
    int width = 0, height = 0;
    ScalarField depth;           // meters
    Field2D<uint8_t> valid;
    CameraIntrinsics intrinsics;
};

struct NormalMap {
    int width = 0, height = 0;
    std::vector<Vec3> normal;    // unit, oriented toward the camera (z < 0)
    Field2D<uint8_t> valid;
};

/// Lambertian render of the scene under a point light, gamma in [0, 1].
struct ShadingRender {
    Vec3 light = Vec3::Zero();   // camera coordinates, meters
    ScalarField gamma;
};

/// Back-projects pixels into camera coordinates. Invalid pixels get (0,0,0)
/// and must be masked by depth.valid.
std::vector<Vec3> backproject(const DepthMap& depth);

/// Cross product of central-difference tangents; one-sided at borders and
/// next to invalid pixels. Pixels whose stencil is entirely invalid stay
/// flagged invalid.
NormalMap compute_normals(const DepthMap& depth);

/// Diffuse point-light term max(0, n . normalize(light - x)); no falloff.
/// With cast_shadows a screen-space depth march toward the light zeroes
/// occluded pixels.
ShadingRender render_direct_shading(const DepthMap& depth, const NormalMap& normals,
                                    const Vec3& light, bool cast_shadows = false);

/// Uniform grid over the bounding box of the back-projected points with the
/// z range extended to [-z_max, z_max]. `count` is rounded to a cube.
std::vector<Vec3> sample_illuminants(const DepthMap& depth, int count);

/// Category-wise correlation between a render and exp(I^b).
double category_similarity(const ShadingRender& render, const UvbImage& uvb,
                           const ReflectanceClustering& clustering,
                           const Field2D<uint8_t>& valid);

/// Keeps the renders whose category-wise similarity exceeds the threshold.
std::vector<ShadingRender> select_promising(const std::vector<ShadingRender>& renders,
                                            const UvbImage& uvb,
                                            const ReflectanceClustering& clustering,
                                            const Field2D<uint8_t>& valid,
                                            double threshold = 0.2);

/// Shadow-edge probability from the promising renders; 0 when the set is empty.
double p_se(int p, int q, const std::vector<ShadingRender>& promising, double w3);

/// Surface-normal-change probability; 0 when either normal is invalid.
double p_snc(int p, int q, const NormalMap& normals, double w6);

}  // namespace intrinsic
