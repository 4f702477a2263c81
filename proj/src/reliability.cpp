#include "intrinsic/reliability.hpp"

#include <cmath>

namespace intrinsic {

double sigm(double x, double w) { return 2.0 / (1.0 + std::exp(-w * x)) - 1.0; }

FeatureWeights FeatureWeights::defaults(double median_pair_distance, bool rgb_only) {
    const double ln3 = std::log(3.0);
    FeatureWeights w;
    w.w1 = ln3 / 0.1;
    w.w2 = ln3 / 0.2;
    w.w3 = ln3 / 0.01;
    w.w4 = ln3 / 0.08;
    w.w5 = ln3 / 0.1;
    w.w6 = ln3 / 0.2;
    const double base = ln3 / std::max(median_pair_distance, 1e-12);
    const double boost = rgb_only ? 6.0 : 1.0;
    w.w7_fs = base * boost;
    w.w7_ss = 0.5 * w.w7_fs;
    return w;
}

RobustnessMatrix RobustnessMatrix::standard() {
    RobustnessMatrix rm;
    const auto set = [&rm](Method m, Perturbation f) {
        rm.sensitive[static_cast<int>(m)][static_cast<int>(f)] = true;
    };
    set(Method::BO, Perturbation::LCV);
    set(Method::BO, Perturbation::RC);
    set(Method::BOB, Perturbation::CE);
    set(Method::BOB, Perturbation::LCV);
    set(Method::BOB, Perturbation::RC);
    set(Method::FS, Perturbation::SE);
    set(Method::FS, Perturbation::SNC);
    set(Method::FS, Perturbation::SD);
    set(Method::SS, Perturbation::LCV);
    set(Method::SS, Perturbation::SE);
    set(Method::SS, Perturbation::SD);
    return rm;
}

ScalarField chromaticity_scatter(const UvbImage& uvb) {
    ScalarField sigma(uvb.width, uvb.height);
    for (int y = 0; y < uvb.height; ++y) {
        for (int x = 0; x < uvb.width; ++x) {
            double su = 0, sv = 0, suu = 0, svv = 0;
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (!uvb.u.in_bounds(x + dx, y + dy)) continue;
                    const double uu = uvb.u(x + dx, y + dy);
                    const double vv = uvb.v(x + dx, y + dy);
                    su += uu;
                    sv += vv;
                    suu += uu * uu;
                    svv += vv * vv;
                    ++n;
                }
            }
            const double nd = static_cast<double>(n);
            const double var_u = std::max(0.0, suu / nd - (su / nd) * (su / nd));
            const double var_v = std::max(0.0, svv / nd - (sv / nd) * (sv / nd));
            sigma(x, y) = std::sqrt(var_u + var_v);
        }
    }
    return sigma;
}

ReliabilityContext make_reliability_context(const UvbImage& uvb,
                                            const ReflectanceClustering& clustering,
                                            const ScalarField& shifted_sb,
                                            const FeatureWeights& weights) {
    ReliabilityContext ctx;
    ctx.uvb = &uvb;
    ctx.clustering = &clustering;
    ctx.smoothed_b = box_mean_3x3(uvb.b);
    ctx.smoothed_shifted = box_mean_3x3(shifted_sb);
    ctx.sigma_uv = chromaticity_scatter(uvb);
    ctx.weights = weights;
    return ctx;
}

double step_edge(const ScalarField& smoothed, int width, int p, int q) {
    const int px = p % width, py = p / width;
    const int qx = q % width, qy = q / width;
    const auto chain = bresenham_segment(px, py, qx, qy);
    double edge = 0.0;
    for (size_t i = 1; i < chain.size(); ++i) {
        const double a = smoothed(chain[i - 1].first, chain[i - 1].second);
        const double b = smoothed(chain[i].first, chain[i].second);
        edge = std::max(edge, std::abs(b - a));
    }
    return edge;
}

double pair_distance(const ReliabilityContext& ctx, int p, int q) {
    if (ctx.positions && ctx.position_valid && (*ctx.position_valid)[p] &&
        (*ctx.position_valid)[q]) {
        return ((*ctx.positions)[p] - (*ctx.positions)[q]).norm();
    }
    const int w = ctx.uvb->width;
    const double dx = static_cast<double>(p % w - q % w);
    const double dy = static_cast<double>(p / w - q / w);
    return std::sqrt(dx * dx + dy * dy);
}

double median_pair_distance(const PairNeighborhood& nbhd, const std::vector<Vec3>* positions,
                            const Field2D<uint8_t>* position_valid) {
    if (nbhd.pair_count() == 0) throw EmptyGraph("no pairs to measure");
    std::vector<double> distances(nbhd.pair_count());
    for (size_t i = 0; i < nbhd.pair_count(); ++i) {
        const int p = nbhd.p[i], q = nbhd.q[i];
        if (positions && position_valid && (*position_valid)[p] && (*position_valid)[q]) {
            distances[i] = ((*positions)[p] - (*positions)[q]).norm();
        } else {
            const auto [dx, dy] = nbhd.offset(i);
            distances[i] = std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
        }
    }
    return median_inplace(distances);
}

double p_ce(const ReliabilityContext& ctx, int p, int q) {
    const double pc = ctx.clustering->pc[p] * ctx.clustering->pc[q];
    return (1.0 - pc) * sigm(step_edge(ctx.smoothed_shifted, ctx.uvb->width, p, q),
                             ctx.weights.w1);
}

double p_lcv(const ReliabilityContext& ctx, int p, int q) {
    return sigm(std::max(ctx.sigma_uv[p], ctx.sigma_uv[q]), ctx.weights.w2);
}

double p_rc(const ReliabilityContext& ctx, int p, int q) {
    const double du = ctx.uvb->u[p] - ctx.uvb->u[q];
    const double dv = ctx.uvb->v[p] - ctx.uvb->v[q];
    const double d_uv = std::sqrt(du * du + dv * dv);
    const double e_b = step_edge(ctx.smoothed_b, ctx.uvb->width, p, q);
    return sigm(d_uv, ctx.weights.w4) * sigm(e_b, ctx.weights.w5);
}

double p_sd(const ReliabilityContext& ctx, int p, int q, Method m) {
    const double w = (m == Method::SS) ? ctx.weights.w7_ss : ctx.weights.w7_fs;
    return sigm(pair_distance(ctx, p, q), w);
}

double confidence(const ReliabilityContext& ctx, const RobustnessMatrix& rm, int p, int q,
                  Method m) {
    double c = 1.0;
    if (rm.is_sensitive(m, Perturbation::CE)) c *= 1.0 - p_ce(ctx, p, q);
    if (rm.is_sensitive(m, Perturbation::LCV)) c *= 1.0 - p_lcv(ctx, p, q);
    if (rm.is_sensitive(m, Perturbation::RC)) c *= 1.0 - p_rc(ctx, p, q);
    if (rm.is_sensitive(m, Perturbation::SD)) c *= 1.0 - p_sd(ctx, p, q, m);
    if (!ctx.rgb_only) {
        if (rm.is_sensitive(m, Perturbation::SE) && ctx.promising)
            c *= 1.0 - p_se(p, q, *ctx.promising, ctx.weights.w3);
        if (rm.is_sensitive(m, Perturbation::SNC) && ctx.normals)
            c *= 1.0 - p_snc(p, q, *ctx.normals, ctx.weights.w6);
    }
    return c;
}

void fill_confidences(PairOrderTable& table, const ReliabilityContext& ctx,
                      const RobustnessMatrix& rm) {
    const size_t count = table.pair_count();
    for (int m = 0; m < kMethodCount; ++m) {
        if (table.confidence[m].size() != count) table.confidence[m].assign(count, 0.0f);
    }
    for (size_t i = 0; i < count; ++i) {
        const int p = table.nbhd.p[i];
        const int q = table.nbhd.q[i];
        // Shared features computed once per pair.
        const double ce = p_ce(ctx, p, q);
        const double lcv = p_lcv(ctx, p, q);
        const double rc = p_rc(ctx, p, q);
        double se = 0.0, snc = 0.0;
        if (!ctx.rgb_only) {
            if (ctx.promising) se = p_se(p, q, *ctx.promising, ctx.weights.w3);
            if (ctx.normals) snc = p_snc(p, q, *ctx.normals, ctx.weights.w6);
        }
        for (int mi = 0; mi < kMethodCount; ++mi) {
            const Method m = static_cast<Method>(mi);
            double c = 1.0;
            if (rm.is_sensitive(m, Perturbation::CE)) c *= 1.0 - ce;
            if (rm.is_sensitive(m, Perturbation::LCV)) c *= 1.0 - lcv;
            if (rm.is_sensitive(m, Perturbation::RC)) c *= 1.0 - rc;
            if (rm.is_sensitive(m, Perturbation::SD)) c *= 1.0 - p_sd(ctx, p, q, m);
            if (!ctx.rgb_only) {
                if (rm.is_sensitive(m, Perturbation::SE)) c *= 1.0 - se;
                if (rm.is_sensitive(m, Perturbation::SNC)) c *= 1.0 - snc;
            }
            table.confidence[mi][i] = static_cast<float>(c);
        }
    }
}

}  // namespace intrinsic
