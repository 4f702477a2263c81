#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace intrinsic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define INTRINSIC_DEFINE_ERROR(NAME)                                   \
    class NAME : public Error {                                        \
    public:                                                            \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
    }

INTRINSIC_DEFINE_ERROR(DegenerateImage);
INTRINSIC_DEFINE_ERROR(NotUnit);
INTRINSIC_DEFINE_ERROR(NonPositiveChannel);
INTRINSIC_DEFINE_ERROR(DimensionMismatch);
INTRINSIC_DEFINE_ERROR(ZeroVariance);
INTRINSIC_DEFINE_ERROR(SolverDiverged);
INTRINSIC_DEFINE_ERROR(AdmmDiverged);
INTRINSIC_DEFINE_ERROR(NoGap);
INTRINSIC_DEFINE_ERROR(EmptyGraph);
INTRINSIC_DEFINE_ERROR(InvalidSpec);
INTRINSIC_DEFINE_ERROR(InvalidRegion);
INTRINSIC_DEFINE_ERROR(IoError);

#undef INTRINSIC_DEFINE_ERROR

/// Row-major 2D grid of T. Pixel index p = y * width + x.
template <typename T>
class Field2D {
public:
    Field2D() = default;
    Field2D(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<size_t>(width) * static_cast<size_t>(height), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int x, int y) { return data_[idx(x, y)]; }
    const T& operator()(int x, int y) const { return data_[idx(x, y)]; }
    T& operator[](size_t p) { return data_[p]; }
    const T& operator[](size_t p) const { return data_[p]; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }
    size_t idx(int x, int y) const {
        return static_cast<size_t>(y) * static_cast<size_t>(width_) + static_cast<size_t>(x);
    }
    int x_of(size_t p) const { return static_cast<int>(p % static_cast<size_t>(width_)); }
    int y_of(size_t p) const { return static_cast<int>(p / static_cast<size_t>(width_)); }

    bool same_shape(int w, int h) const { return width_ == w && height_ == h; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using ScalarField = Field2D<double>;

/// Median of a sequence; even sizes average the two central elements.
/// The input is consumed (partially sorted in place).
double median_inplace(std::vector<double>& values);

/// Box-mean smoothing with a 3x3 window, borders truncated.
ScalarField box_mean_3x3(const ScalarField& f);

/// Median filter with a 3x3 window, borders truncated.
ScalarField median_filter_3x3(const ScalarField& f);

/// Pixel chain of the Bresenham segment from (x0,y0) to (x1,y1), inclusive.
std::vector<std::pair<int, int>> bresenham_segment(int x0, int y0, int x1, int y1);

}  // namespace intrinsic
