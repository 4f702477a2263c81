#include "intrinsic/synth.hpp"

#include <cmath>
#include <random>

namespace intrinsic {

namespace {

double shadow_multiplier(const ShadowShape& s, double x, double y) {
    double signed_dist;  // > 0 outside the shadow
    if (s.kind == ShadowShape::Kind::Disc) {
        const double dx = x - s.cx;
        const double dy = y - s.cy;
        signed_dist = std::sqrt(dx * dx + dy * dy) - s.radius;
    } else {
        signed_dist = s.nx * x + s.ny * y - s.offset;
    }
    if (s.feather <= 0.0) return signed_dist < 0.0 ? s.inner : 1.0;
    const double t = std::clamp((signed_dist / s.feather + 1.0) * 0.5, 0.0, 1.0);
    const double smooth = t * t * (3.0 - 2.0 * t);
    return s.inner + (1.0 - s.inner) * smooth;
}

Field2D<int> assign_regions(const SceneSpec& spec, uint64_t seed) {
    const int k = static_cast<int>(spec.colors.size());
    Field2D<int> region(spec.width, spec.height, 0);
    if (spec.layout == "stripes") {
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x)
                region(x, y) = std::min(k - 1, x * k / spec.width);
    } else if (spec.layout == "blocks") {
        const int kx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
        const int ky = (k + kx - 1) / kx;
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                const int bx = std::min(kx - 1, x * kx / spec.width);
                const int by = std::min(ky - 1, y * ky / spec.height);
                region(x, y) = (by * kx + bx) % k;
            }
        }
    } else if (spec.layout == "voronoi") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ux(0.0, spec.width);
        std::uniform_real_distribution<double> uy(0.0, spec.height);
        std::vector<double> sx, sy;
        std::vector<int> site_color;
        for (int c = 0; c < k; ++c) {
            for (int s = 0; s < std::max(1, spec.voronoi_sites_per_color); ++s) {
                sx.push_back(ux(rng));
                sy.push_back(uy(rng));
                site_color.push_back(c);
            }
        }
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                double best = std::numeric_limits<double>::infinity();
                int best_site = 0;
                for (size_t s = 0; s < sx.size(); ++s) {
                    const double d = (x - sx[s]) * (x - sx[s]) + (y - sy[s]) * (y - sy[s]);
                    if (d < best) {
                        best = d;
                        best_site = static_cast<int>(s);
                    }
                }
                region(x, y) = site_color[best_site];
            }
        }
    } else {
        throw InvalidSpec("unknown layout '" + spec.layout + "'");
    }
    return region;
}

}  // namespace

SyntheticScene generate_scene(const SceneSpec& spec, uint64_t seed) {
    if (spec.width < 1 || spec.height < 1) throw InvalidSpec("empty scene");
    if (spec.colors.empty()) throw InvalidSpec("at least one reflectance color required");
    for (const Vec3& c : spec.colors) {
        for (int i = 0; i < 3; ++i) {
            if (!(c[i] > 0.0) || c[i] > 1.0) throw InvalidSpec("colors must lie in (0, 1]");
        }
    }
    for (int i = 0; i < 3; ++i) {
        if (spec.light_direct[i] < 0.0 || spec.light_ambient[i] < 0.0)
            throw InvalidSpec("illuminants must be nonnegative");
    }

    SyntheticScene scene;
    scene.width = spec.width;
    scene.height = spec.height;
    scene.reflectance_colors = spec.colors;
    scene.light_direct = spec.light_direct;
    scene.light_ambient = spec.light_ambient;
    scene.region = assign_regions(spec, seed);
    scene.gamma = ScalarField(spec.width, spec.height);

    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const double fx = spec.width > 1 ? static_cast<double>(x) / (spec.width - 1) : 0.0;
            const double fy = spec.height > 1 ? static_cast<double>(y) / (spec.height - 1) : 0.0;
            double g = spec.gamma_base + spec.gamma_ramp_x * fx + spec.gamma_ramp_y * fy;
            for (const ShadowShape& s : spec.shadows) g *= shadow_multiplier(s, x, y);
            scene.gamma(x, y) = std::clamp(g, 0.0, 1.0);
        }
    }

    const size_t count = static_cast<size_t>(spec.width) * static_cast<size_t>(spec.height);
    std::vector<Vec3> raw(count);
    double max_channel = 0.0;
    for (size_t p = 0; p < count; ++p) {
        const Vec3& rb = spec.colors[scene.region[p]];
        const Vec3 illum = scene.gamma[p] * spec.light_direct + spec.light_ambient;
        raw[p] = rb.cwiseProduct(illum);
        for (int i = 0; i < 3; ++i) {
            if (!(raw[p][i] > 0.0))
                throw InvalidSpec("scene renders a non-positive channel; "
                                  "use a positive ambient or positive direct shading");
            max_channel = std::max(max_channel, raw[p][i]);
        }
    }

    scene.normalization = max_channel;
    scene.image.width = spec.width;
    scene.image.height = spec.height;
    scene.image.data.resize(count);
    scene.shading.resize(count);
    scene.reflectance.resize(count);
    const Vec3 full = spec.light_direct + spec.light_ambient;
    for (size_t p = 0; p < count; ++p) {
        scene.image.data[p] = raw[p] / max_channel;
        const Vec3 illum = scene.gamma[p] * spec.light_direct + spec.light_ambient;
        scene.shading[p] = illum.cwiseQuotient(full);
        scene.reflectance[p] = scene.image.data[p].cwiseQuotient(scene.shading[p]);
    }
    return scene;
}

Vec3 SyntheticScene::true_brightening_direction() const {
    for (int i = 0; i < 3; ++i) {
        if (!(light_ambient[i] > 0.0))
            throw InvalidSpec("closed-form direction requires a strictly positive ambient");
    }
    const Vec3 ratio = light_direct.cwiseQuotient(light_ambient) + Vec3::Ones();
    return Vec3(ratio.array().log()).normalized();
}

ScalarField SyntheticScene::shading_brightness(const Vec3& n) const {
    ScalarField sb(width, height);
    for (size_t p = 0; p < shading.size(); ++p) sb[p] = Vec3(shading[p].array().log()).dot(n);
    return sb;
}

ScalarField SyntheticScene::reflectance_brightness(const Vec3& n) const {
    ScalarField rb(width, height);
    for (size_t p = 0; p < reflectance.size(); ++p)
        rb[p] = Vec3(reflectance[p].array().log()).dot(n);
    return rb;
}

}  // namespace intrinsic
