#include "intrinsic/core.hpp"

#include <cmath>
#include <cstdlib>

namespace intrinsic {

double median_inplace(std::vector<double>& values) {
    if (values.empty()) return 0.0;
    const size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double med = values[mid];
    if ((values.size() & 1U) == 0U) {
        std::nth_element(values.begin(), values.begin() + (mid - 1), values.end());
        med = 0.5 * (med + values[mid - 1]);
    }
    return med;
}

ScalarField box_mean_3x3(const ScalarField& f) {
    ScalarField out(f.width(), f.height());
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            double sum = 0.0;
            int count = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (!f.in_bounds(x + dx, y + dy)) continue;
                    sum += f(x + dx, y + dy);
                    ++count;
                }
            }
            out(x, y) = sum / static_cast<double>(count);
        }
    }
    return out;
}

ScalarField median_filter_3x3(const ScalarField& f) {
    ScalarField out(f.width(), f.height());
    std::vector<double> window;
    window.reserve(9);
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            window.clear();
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (!f.in_bounds(x + dx, y + dy)) continue;
                    window.push_back(f(x + dx, y + dy));
                }
            }
            out(x, y) = median_inplace(window);
        }
    }
    return out;
}

std::vector<std::pair<int, int>> bresenham_segment(int x0, int y0, int x1, int y1) {
    std::vector<std::pair<int, int>> chain;
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int x = x0, y = y0;
    while (true) {
        chain.emplace_back(x, y);
        if (x == x1 && y == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return chain;
}

}  // namespace intrinsic
