#include "intrinsic/depth.hpp"

#include "intrinsic/reliability.hpp"

#include <cmath>

namespace intrinsic {

std::vector<Vec3> backproject(const DepthMap& depth) {
    if (!depth.intrinsics.valid()) throw InvalidSpec("camera intrinsics are not usable");
    std::vector<Vec3> positions(static_cast<size_t>(depth.width) * depth.height, Vec3::Zero());
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const size_t p = depth.depth.idx(x, y);
            if (!depth.valid[p]) continue;
            const double z = depth.depth[p];
            positions[p] = Vec3((x - depth.intrinsics.cx) * z / depth.intrinsics.fx,
                                (y - depth.intrinsics.cy) * z / depth.intrinsics.fy, z);
        }
    }
    return positions;
}

namespace {

// Difference of back-projected positions along one axis, central when both
// neighbors are valid, one-sided otherwise. Returns false if no valid pair.
bool tangent(const std::vector<Vec3>& pos, const Field2D<uint8_t>& valid, int x, int y,
             int dx, int dy, Vec3& out) {
    const int w = valid.width(), h = valid.height();
    const auto ok = [&](int xx, int yy) {
        return xx >= 0 && xx < w && yy >= 0 && yy < h && valid(xx, yy);
    };
    const bool fwd = ok(x + dx, y + dy);
    const bool bwd = ok(x - dx, y - dy);
    if (fwd && bwd) {
        out = pos[valid.idx(x + dx, y + dy)] - pos[valid.idx(x - dx, y - dy)];
        return true;
    }
    if (!ok(x, y)) return false;
    if (fwd) {
        out = pos[valid.idx(x + dx, y + dy)] - pos[valid.idx(x, y)];
        return true;
    }
    if (bwd) {
        out = pos[valid.idx(x, y)] - pos[valid.idx(x - dx, y - dy)];
        return true;
    }
    return false;
}

}  // namespace

NormalMap compute_normals(const DepthMap& depth) {
    const std::vector<Vec3> pos = backproject(depth);
    NormalMap normals;
    normals.width = depth.width;
    normals.height = depth.height;
    normals.normal.assign(pos.size(), Vec3::Zero());
    normals.valid = Field2D<uint8_t>(depth.width, depth.height, 0);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const size_t p = depth.valid.idx(x, y);
            if (!depth.valid[p]) continue;
            Vec3 tx, ty;
            if (!tangent(pos, depth.valid, x, y, 1, 0, tx) ||
                !tangent(pos, depth.valid, x, y, 0, 1, ty))
                continue;
            Vec3 n = tx.cross(ty);
            const double len = n.norm();
            if (len < 1e-12) continue;
            n /= len;
            if (n.z() > 0.0) n = -n;
            normals.normal[p] = n;
            normals.valid[p] = 1;
        }
    }
    return normals;
}

namespace {

// Screen-space occlusion test: march from the surface point toward the
// light and compare against the depth buffer.
bool occluded(const DepthMap& depth, const std::vector<Vec3>& pos, const Vec3& surface,
              const Vec3& light) {
    const int steps = 48;
    for (int s = 1; s < steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        const Vec3 sample = surface + t * (light - surface);
        if (sample.z() < 1e-3) break;  // beyond the camera plane, no buffer info
        const int x = static_cast<int>(std::lround(
            depth.intrinsics.fx * sample.x() / sample.z() + depth.intrinsics.cx));
        const int y = static_cast<int>(std::lround(
            depth.intrinsics.fy * sample.y() / sample.z() + depth.intrinsics.cy));
        if (!depth.valid.in_bounds(x, y) || !depth.valid(x, y)) continue;
        const double scene_z = depth.depth(x, y);
        if (scene_z < sample.z() * 0.98 - 0.01) {
            // Ignore self-occlusion right at the start of the march.
            const Vec3 blocker = pos[depth.valid.idx(x, y)];
            if ((blocker - surface).norm() > 0.05) return true;
        }
    }
    return false;
}

}  // namespace

ShadingRender render_direct_shading(const DepthMap& depth, const NormalMap& normals,
                                    const Vec3& light, bool cast_shadows) {
    const std::vector<Vec3> pos = backproject(depth);
    ShadingRender render;
    render.light = light;
    render.gamma = ScalarField(depth.width, depth.height, 0.0);
    for (size_t p = 0; p < pos.size(); ++p) {
        if (!depth.valid[p] || !normals.valid[p]) continue;
        const Vec3 to_light = light - pos[p];
        const double len = to_light.norm();
        if (len < 1e-12) continue;
        const double cosine = std::max(0.0, normals.normal[p].dot(to_light / len));
        if (cosine > 0.0 && cast_shadows && occluded(depth, pos, pos[p], light)) continue;
        render.gamma[p] = cosine;
    }
    return render;
}

std::vector<Vec3> sample_illuminants(const DepthMap& depth, int count) {
    const std::vector<Vec3> pos = backproject(depth);
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    bool any = false;
    for (size_t p = 0; p < pos.size(); ++p) {
        if (!depth.valid[p]) continue;
        lo = lo.cwiseMin(pos[p]);
        hi = hi.cwiseMax(pos[p]);
        any = true;
    }
    if (!any) throw InvalidRegion("no valid depth pixels");
    // Lights may sit behind the camera: extend z to the negative side.
    lo.z() = -hi.z();

    const int g = std::max(1, static_cast<int>(std::llround(std::cbrt(static_cast<double>(count)))));
    std::vector<Vec3> lights;
    lights.reserve(static_cast<size_t>(g) * g * g);
    for (int ix = 0; ix < g; ++ix) {
        for (int iy = 0; iy < g; ++iy) {
            for (int iz = 0; iz < g; ++iz) {
                lights.emplace_back(lo.x() + (ix + 0.5) * (hi.x() - lo.x()) / g,
                                    lo.y() + (iy + 0.5) * (hi.y() - lo.y()) / g,
                                    lo.z() + (iz + 0.5) * (hi.z() - lo.z()) / g);
            }
        }
    }
    return lights;
}

double category_similarity(const ShadingRender& render, const UvbImage& uvb,
                           const ReflectanceClustering& clustering,
                           const Field2D<uint8_t>& valid) {
    const size_t count = uvb.pixel_count();
    size_t total_valid = 0;
    for (size_t p = 0; p < count; ++p)
        if (valid[p]) ++total_valid;
    if (total_valid == 0) return 0.0;

    double sim = 0.0;
    for (int g = 0; g < clustering.k; ++g) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        size_t n = 0;
        for (size_t p = 0; p < count; ++p) {
            if (!valid[p] || clustering.labels[p] != g) continue;
            const double x = render.gamma[p];
            const double y = std::exp(uvb.b[p]);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            ++n;
        }
        if (n < 2) continue;
        const double nd = static_cast<double>(n);
        const double cov = sxy / nd - (sx / nd) * (sy / nd);
        const double vx = sxx / nd - (sx / nd) * (sx / nd);
        const double vy = syy / nd - (sy / nd) * (sy / nd);
        if (vx <= 0.0 || vy <= 0.0) continue;
        sim += (nd / static_cast<double>(total_valid)) * (cov / std::sqrt(vx * vy));
    }
    return sim;
}

std::vector<ShadingRender> select_promising(const std::vector<ShadingRender>& renders,
                                            const UvbImage& uvb,
                                            const ReflectanceClustering& clustering,
                                            const Field2D<uint8_t>& valid, double threshold) {
    std::vector<ShadingRender> promising;
    for (const ShadingRender& r : renders) {
        if (category_similarity(r, uvb, clustering, valid) > threshold) promising.push_back(r);
    }
    return promising;
}

double p_se(int p, int q, const std::vector<ShadingRender>& promising, double w3) {
    if (promising.empty()) return 0.0;
    double acc = 0.0;
    for (const ShadingRender& r : promising) acc += std::abs(r.gamma[p] - r.gamma[q]);
    return sigm(acc / static_cast<double>(promising.size()), w3);
}

double p_snc(int p, int q, const NormalMap& normals, double w6) {
    if (!normals.valid[p] || !normals.valid[q]) return 0.0;
    const double c = std::clamp(normals.normal[p].dot(normals.normal[q]), -1.0, 1.0);
    return sigm(std::acos(c), w6);
}

}  // namespace intrinsic
