#include "intrinsic/bias.hpp"

#include <cmath>
#include <map>
#include <numeric>

namespace intrinsic {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

}  // namespace

BiasGraph build_bias_graph(const UvbImage& uvb, const ReflectanceClustering& clustering,
                           const BiasConfig& cfg) {
    if (clustering.labels.size() != uvb.pixel_count())
        throw DimensionMismatch("clustering does not cover the image");
    const int k = clustering.k;
    BiasGraph graph;
    graph.k = k;
    graph.bias = Eigen::MatrixXd::Zero(k, k);
    graph.reliability = Eigen::MatrixXd::Zero(k, k);
    graph.defined.assign(static_cast<size_t>(k) * k, 0);

    // Per ordered cluster pair (j < l): histogram of patch measures, keyed by bin index.
    std::map<std::pair<int, int>, std::map<long long, int>> histograms;
    std::vector<std::vector<double>> members(k);

    for (int py = 0; py < uvb.height; py += cfg.patch_size) {
        for (int px = 0; px < uvb.width; px += cfg.patch_size) {
            for (auto& m : members) m.clear();
            const int x1 = std::min(uvb.width, px + cfg.patch_size);
            const int y1 = std::min(uvb.height, py + cfg.patch_size);
            for (int y = py; y < y1; ++y) {
                for (int x = px; x < x1; ++x) {
                    const size_t p = uvb.b.idx(x, y);
                    members[clustering.labels[p]].push_back(uvb.b[p]);
                }
            }
            std::vector<int> present;
            std::vector<double> med(k, 0.0);
            for (int j = 0; j < k; ++j) {
                if (static_cast<int>(members[j].size()) < cfg.min_pixels_per_cluster) continue;
                med[j] = median_inplace(members[j]);
                present.push_back(j);
            }
            for (size_t a = 0; a < present.size(); ++a) {
                for (size_t b = a + 1; b < present.size(); ++b) {
                    const int j = present[a];
                    const int l = present[b];
                    const double measure = med[j] - med[l];
                    const long long bin =
                        static_cast<long long>(std::floor(measure / cfg.histogram_bin));
                    ++histograms[{j, l}][bin];
                }
            }
        }
    }

    for (const auto& [pair, hist] : histograms) {
        // Peak bin; ties prefer the center of smallest magnitude, then the smaller center.
        int best_count = 0;
        double best_center = 0.0;
        bool first = true;
        for (const auto& [bin, count] : hist) {
            const double center = (static_cast<double>(bin) + 0.5) * cfg.histogram_bin;
            const bool better =
                count > best_count ||
                (count == best_count &&
                 (std::abs(center) < std::abs(best_center) ||
                  (std::abs(center) == std::abs(best_center) && center < best_center)));
            if (first || better) {
                best_count = count;
                best_center = center;
                first = false;
            }
        }
        const auto [j, l] = pair;
        graph.bias(j, l) = best_center;
        graph.bias(l, j) = -best_center;
        graph.reliability(j, l) = graph.reliability(l, j) = static_cast<double>(best_count);
        graph.defined[static_cast<size_t>(j) * k + l] = 1;
        graph.defined[static_cast<size_t>(l) * k + j] = 1;
    }
    return graph;
}

ClusterBrightness solve_cluster_brightness(const BiasGraph& graph) {
    const int k = graph.k;
    if (k < 1) throw InvalidSpec("bias graph must cover at least one cluster");
    ClusterBrightness out;
    out.rb.assign(k, 0.0);
    out.component.assign(k, -1);

    std::vector<MstEdge> edges;
    for (int j = 0; j < k; ++j) {
        for (int l = j + 1; l < k; ++l) {
            if (!graph.is_defined(j, l)) continue;
            edges.push_back({j, l, 1.0 / graph.reliability(j, l)});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        if (a.a != b.a) return a.a < b.a;
        return a.b < b.b;
    });

    UnionFind uf(k);
    std::vector<std::vector<int>> adjacency(k);
    for (const MstEdge& e : edges) {
        if (!uf.unite(e.a, e.b)) continue;
        out.tree.push_back(e);
        adjacency[e.a].push_back(e.b);
        adjacency[e.b].push_back(e.a);
    }

    // Propagate biases from each component's lowest-index cluster.
    for (int root = 0; root < k; ++root) {
        if (out.component[root] >= 0) continue;
        out.rb[root] = 0.0;
        out.component[root] = root;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            const int j = stack.back();
            stack.pop_back();
            for (int l : adjacency[j]) {
                if (out.component[l] >= 0) continue;
                out.component[l] = root;
                // Tree edge (l, j): rb(l) - rb(j) = bias(l, j).
                out.rb[l] = out.rb[j] + graph.bias(l, j);
                stack.push_back(l);
            }
        }
    }
    return out;
}

ScalarField shifted_shading_brightness(const UvbImage& uvb,
                                       const ReflectanceClustering& clustering,
                                       const ClusterBrightness& cb) {
    if (clustering.labels.size() != uvb.pixel_count() ||
        static_cast<int>(cb.rb.size()) != clustering.k)
        throw DimensionMismatch("inconsistent clustering / cluster brightness");
    ScalarField shifted(uvb.width, uvb.height);
    for (size_t p = 0; p < uvb.pixel_count(); ++p)
        shifted[p] = uvb.b[p] - cb.rb[clustering.labels[p]];
    return median_filter_3x3(shifted);
}

}  // namespace intrinsic
