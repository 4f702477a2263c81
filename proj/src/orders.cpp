#include "intrinsic/orders.hpp"

namespace intrinsic {

PairNeighborhood build_neighborhood(int width, int height, int stride, int window_radius) {
    if (width < 1 || height < 1) throw DimensionMismatch("empty image");
    if (stride < 1) throw InvalidSpec("stride must be positive");
    PairNeighborhood nbhd;
    nbhd.width = width;
    nbhd.height = height;
    nbhd.stride = stride;
    nbhd.window_radius = window_radius;

    // Offsets with q > p: dy > 0, or dy == 0 and dx > 0.
    std::vector<std::pair<int, int>> offsets;
    for (int dy = 0; dy <= window_radius; ++dy) {
        if (dy % stride != 0) continue;
        const int dx_begin = (dy == 0) ? 1 : -window_radius;
        for (int dx = dx_begin; dx <= window_radius; ++dx) {
            if (dx % stride != 0) continue;
            offsets.emplace_back(dx, dy);
        }
    }

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int32_t p = y * width + x;
            for (const auto& [dx, dy] : offsets) {
                const int qx = x + dx;
                const int qy = y + dy;
                if (qx < 0 || qx >= width || qy >= height) continue;
                nbhd.p.push_back(p);
                nbhd.q.push_back(qy * width + qx);
            }
        }
    }
    return nbhd;
}

int default_stride(int width, int height) { return std::max(width, height) > 128 ? 2 : 1; }

double estimate_bo(const UvbImage& uvb, int p, int q) { return uvb.b[p] - uvb.b[q]; }

double estimate_bob(const UvbImage& uvb, const ReflectanceClustering& clustering,
                    const ClusterBrightness& cb, int p, int q) {
    return uvb.b[p] - uvb.b[q] - (cb.rb[clustering.labels[p]] - cb.rb[clustering.labels[q]]);
}

double estimate_fs() { return 0.0; }

namespace {

double derivative_x(const ScalarField& f, int x, int y) {
    if (f.width() == 1) return 0.0;
    if (x == 0) return f(1, y) - f(0, y);
    if (x == f.width() - 1) return f(x, y) - f(x - 1, y);
    return 0.5 * (f(x + 1, y) - f(x - 1, y));
}

double derivative_y(const ScalarField& f, int x, int y) {
    if (f.height() == 1) return 0.0;
    if (y == 0) return f(x, 1) - f(x, 0);
    if (y == f.height() - 1) return f(x, y) - f(x, y - 1);
    return 0.5 * (f(x, y + 1) - f(x, y - 1));
}

}  // namespace

void brightness_derivatives(const UvbImage& uvb, ScalarField& dbdx, ScalarField& dbdy) {
    dbdx = ScalarField(uvb.width, uvb.height);
    dbdy = ScalarField(uvb.width, uvb.height);
    for (int y = 0; y < uvb.height; ++y) {
        for (int x = 0; x < uvb.width; ++x) {
            dbdx(x, y) = derivative_x(uvb.b, x, y);
            dbdy(x, y) = derivative_y(uvb.b, x, y);
        }
    }
}

double estimate_ss(const UvbImage& uvb, int p, int q) {
    const int px = p % uvb.width, py = p / uvb.width;
    const int qx = q % uvb.width, qy = q / uvb.width;
    const double dx = derivative_x(uvb.b, px, py);
    const double dy = derivative_y(uvb.b, px, py);
    return dx * static_cast<double>(px - qx) + dy * static_cast<double>(py - qy);
}

PairOrderTable build_order_table(const UvbImage& uvb, const ReflectanceClustering& clustering,
                                 const ClusterBrightness& cb, PairNeighborhood nbhd) {
    PairOrderTable table;
    table.nbhd = std::move(nbhd);
    const size_t count = table.nbhd.pair_count();
    for (int m = 0; m < kMethodCount; ++m) {
        table.order[m].assign(count, 0.0);
        table.confidence[m].assign(count, 0.0f);
    }

    ScalarField dbdx, dbdy;
    brightness_derivatives(uvb, dbdx, dbdy);

    for (size_t i = 0; i < count; ++i) {
        const int p = table.nbhd.p[i];
        const int q = table.nbhd.q[i];
        const double bo = uvb.b[p] - uvb.b[q];
        table.order[static_cast<int>(Method::BO)][i] = bo;
        table.order[static_cast<int>(Method::BOB)][i] =
            bo - (cb.rb[clustering.labels[p]] - cb.rb[clustering.labels[q]]);
        // FS stays zero.
        const int px = p % uvb.width, py = p / uvb.width;
        const int qx = q % uvb.width, qy = q / uvb.width;
        table.order[static_cast<int>(Method::SS)][i] =
            dbdx(px, py) * static_cast<double>(px - qx) +
            dbdy(px, py) * static_cast<double>(py - qy);
    }
    return table;
}

}  // namespace intrinsic
