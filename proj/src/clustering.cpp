#include "intrinsic/clustering.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace intrinsic {

int count_clusters(const UvbImage& uvb, const ClusterCountConfig& cfg) {
    const size_t count = uvb.pixel_count();
    if (count == 0) throw DimensionMismatch("empty image");
    double umin = uvb.u[0], umax = uvb.u[0], vmin = uvb.v[0], vmax = uvb.v[0];
    for (size_t p = 0; p < count; ++p) {
        umin = std::min(umin, uvb.u[p]);
        umax = std::max(umax, uvb.u[p]);
        vmin = std::min(vmin, uvb.v[p]);
        vmax = std::max(vmax, uvb.v[p]);
    }
    const int ucells = static_cast<int>(std::floor((umax - umin) / cfg.bin_width)) + 1;
    const int vcells = static_cast<int>(std::floor((vmax - vmin) / cfg.bin_width)) + 1;
    Field2D<int> hist(ucells, vcells, 0);
    for (size_t p = 0; p < count; ++p) {
        const int bu = static_cast<int>(std::floor((uvb.u[p] - umin) / cfg.bin_width));
        const int bv = static_cast<int>(std::floor((uvb.v[p] - vmin) / cfg.bin_width));
        ++hist(bu, bv);
    }
    const int floor_count = std::max(
        cfg.min_bin_count,
        static_cast<int>(std::ceil(cfg.min_bin_fraction * static_cast<double>(count))));
    int maxima = 0;
    for (int bv = 0; bv < vcells; ++bv) {
        for (int bu = 0; bu < ucells; ++bu) {
            const int c = hist(bu, bv);
            if (c < floor_count) continue;
            bool strict_max = true;
            for (int dv = -1; dv <= 1 && strict_max; ++dv) {
                for (int du = -1; du <= 1; ++du) {
                    if (du == 0 && dv == 0) continue;
                    const int nb = hist.in_bounds(bu + du, bv + dv) ? hist(bu + du, bv + dv) : 0;
                    if (nb >= c) {
                        strict_max = false;
                        break;
                    }
                }
            }
            if (strict_max) ++maxima;
        }
    }
    return std::max(1, maxima);
}

namespace {

size_t nearest_center(const Vec2& x, const std::vector<Vec2>& centers) {
    size_t best = 0;
    double best_d = (x - centers[0]).squaredNorm();
    for (size_t j = 1; j < centers.size(); ++j) {
        const double d = (x - centers[j]).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

std::vector<Vec2> kmeanspp_init(const std::vector<Vec2>& points, int k, std::mt19937_64& rng) {
    std::vector<Vec2> centers;
    centers.reserve(k);
    std::uniform_int_distribution<size_t> first(0, points.size() - 1);
    centers.push_back(points[first(rng)]);
    std::vector<double> dist2(points.size());
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (size_t i = 0; i < points.size(); ++i) {
            dist2[i] = (points[i] - centers[0]).squaredNorm();
            for (size_t j = 1; j < centers.size(); ++j)
                dist2[i] = std::min(dist2[i], (points[i] - centers[j]).squaredNorm());
            total += dist2[i];
        }
        size_t chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            const double r = u(rng);
            double acc = 0.0;
            chosen = points.size() - 1;
            for (size_t i = 0; i < points.size(); ++i) {
                acc += dist2[i];
                if (acc >= r) {
                    chosen = i;
                    break;
                }
            }
        } else {
            // All points coincide with existing centers; any pick works.
            chosen = first(rng);
        }
        centers.push_back(points[chosen]);
    }
    return centers;
}

double log_gaussian2(const Vec2& x, const Vec2& mean, const Mat2& cov) {
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
    const Vec2 d = x - mean;
    const double quad =
        (d[0] * (cov(1, 1) * d[0] - cov(0, 1) * d[1]) +
         d[1] * (cov(0, 0) * d[1] - cov(1, 0) * d[0])) /
        det;
    return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
}

}  // namespace

ReflectanceClustering cluster_reflectance(const UvbImage& uvb, int k, uint64_t seed,
                                          const KMeansConfig& cfg) {
    const size_t count = uvb.pixel_count();
    if (k < 1) throw InvalidSpec("cluster count must be positive");
    if (count < static_cast<size_t>(k)) throw InvalidSpec("fewer pixels than clusters");

    std::vector<Vec2> points(count);
    for (size_t p = 0; p < count; ++p) points[p] = Vec2(uvb.u[p], uvb.v[p]);

    ReflectanceClustering out;
    out.k = k;
    out.labels.assign(count, 0);
    out.pc.assign(count, 1.0);

    std::mt19937_64 rng(seed);
    std::vector<Vec2> centers = kmeanspp_init(points, k, rng);

    std::vector<Vec2> sums(k);
    std::vector<size_t> sizes(k);
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        double objective = 0.0;
        for (size_t p = 0; p < count; ++p) {
            out.labels[p] = static_cast<int>(nearest_center(points[p], centers));
            objective += (points[p] - centers[out.labels[p]]).squaredNorm();
        }
        out.objective_trace.push_back(objective);

        for (int j = 0; j < k; ++j) {
            sums[j].setZero();
            sizes[j] = 0;
        }
        for (size_t p = 0; p < count; ++p) {
            sums[out.labels[p]] += points[p];
            ++sizes[out.labels[p]];
        }
        // Empty clusters grab the point farthest from its current center.
        for (int j = 0; j < k; ++j) {
            if (sizes[j] > 0) continue;
            double far_d = -1.0;
            size_t far_p = 0;
            for (size_t p = 0; p < count; ++p) {
                if (sizes[out.labels[p]] <= 1) continue;  // do not orphan another cluster
                const double d = (points[p] - centers[out.labels[p]]).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far_p = p;
                }
            }
            if (far_d < 0.0) continue;  // degenerate: fewer distinct points than clusters
            sums[out.labels[far_p]] -= points[far_p];
            --sizes[out.labels[far_p]];
            out.labels[far_p] = j;
            sums[j] = points[far_p];
            sizes[j] = 1;
        }

        double movement = 0.0;
        for (int j = 0; j < k; ++j) {
            if (sizes[j] == 0) continue;
            const Vec2 next = sums[j] / static_cast<double>(sizes[j]);
            movement = std::max(movement, (next - centers[j]).norm());
            centers[j] = next;
        }
        if (movement < cfg.movement_tolerance) break;
    }

    // Final assignment consistent with the converged centers.
    for (size_t p = 0; p < count; ++p)
        out.labels[p] = static_cast<int>(nearest_center(points[p], centers));

    out.means.assign(k, Vec2::Zero());
    out.covariances.assign(k, Mat2::Zero());
    std::vector<size_t> n(k, 0);
    for (size_t p = 0; p < count; ++p) {
        out.means[out.labels[p]] += points[p];
        ++n[out.labels[p]];
    }
    for (int j = 0; j < k; ++j) {
        if (n[j] > 0) out.means[j] /= static_cast<double>(n[j]);
        else out.means[j] = centers[j];
    }
    for (size_t p = 0; p < count; ++p) {
        const Vec2 d = points[p] - out.means[out.labels[p]];
        out.covariances[out.labels[p]] += d * d.transpose();
    }
    for (int j = 0; j < k; ++j) {
        if (n[j] > 0) out.covariances[j] /= static_cast<double>(n[j]);
        out.covariances[j] += cfg.covariance_floor * Mat2::Identity();
    }

    if (k == 1) {
        std::fill(out.pc.begin(), out.pc.end(), 1.0);
        return out;
    }
    std::vector<double> logp(k);
    for (size_t p = 0; p < count; ++p) {
        double maxlog = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
            logp[j] = log_gaussian2(points[p], out.means[j], out.covariances[j]);
            maxlog = std::max(maxlog, logp[j]);
        }
        double denom = 0.0;
        for (int j = 0; j < k; ++j) denom += std::exp(logp[j] - maxlog);
        out.pc[p] = std::exp(logp[out.labels[p]] - maxlog) / denom;
    }
    return out;
}

}  // namespace intrinsic
