#include "intrinsic/colorspace.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace intrinsic {

void LinearRgbImage::validate() const {
    if (width < 1 || height < 1) throw DimensionMismatch("image must have at least one pixel");
    if (data.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
        throw DimensionMismatch("pixel buffer does not match width*height");
    for (const Vec3& px : data) {
        for (int c = 0; c < 3; ++c) {
            if (!(px[c] > 0.0) || px[c] > 1.0 || !std::isfinite(px[c]))
                throw NonPositiveChannel("channel values must lie in (0, 1]");
        }
    }
}

namespace {

// Dense 2D histogram with epoch stamping so it can be reused across many
// candidate directions without clearing.
class StampedHistogram {
public:
    void reset(int cells) {
        if (static_cast<int>(count_.size()) < cells) {
            count_.assign(cells, 0);
            epoch_.assign(cells, 0);
        }
        ++current_;
        occupied_.clear();
    }
    void add(int cell) {
        if (epoch_[cell] != current_) {
            epoch_[cell] = current_;
            count_[cell] = 0;
            occupied_.push_back(cell);
        }
        ++count_[cell];
    }
    double entropy(double total) const {
        double h = 0.0;
        for (int cell : occupied_) {
            const double p = static_cast<double>(count_[cell]) / total;
            h -= p * std::log(p);
        }
        return h;
    }

private:
    std::vector<int> count_;
    std::vector<uint64_t> epoch_;
    std::vector<int> occupied_;
    uint64_t current_ = 0;
};

Vec3 direction_from_angles(double theta_rad, double phi_rad) {
    return Vec3(std::sin(theta_rad) * std::cos(phi_rad),
                std::sin(theta_rad) * std::sin(phi_rad),
                std::cos(theta_rad));
}

double entropy_for_direction(const std::vector<Vec3>& log_pixels, const Vec3& n,
                             double bin_width, StampedHistogram& hist,
                             std::vector<double>& ubuf, std::vector<double>& vbuf) {
    const UvbBasis basis = build_uvb_basis(n);
    const size_t count = log_pixels.size();
    ubuf.resize(count);
    vbuf.resize(count);
    double umin = std::numeric_limits<double>::infinity();
    double umax = -umin, vmin = umin, vmax = -umin;
    for (size_t i = 0; i < count; ++i) {
        const double du = log_pixels[i].dot(basis.u);
        const double dv = log_pixels[i].dot(basis.v);
        ubuf[i] = du;
        vbuf[i] = dv;
        umin = std::min(umin, du);
        umax = std::max(umax, du);
        vmin = std::min(vmin, dv);
        vmax = std::max(vmax, dv);
    }
    const int ucells = static_cast<int>(std::floor((umax - umin) / bin_width)) + 1;
    const int vcells = static_cast<int>(std::floor((vmax - vmin) / bin_width)) + 1;
    hist.reset(ucells * vcells);
    for (size_t i = 0; i < count; ++i) {
        const int bu = static_cast<int>(std::floor((ubuf[i] - umin) / bin_width));
        const int bv = static_cast<int>(std::floor((vbuf[i] - vmin) / bin_width));
        hist.add(bu * vcells + bv);
    }
    return hist.entropy(static_cast<double>(count));
}

}  // namespace

double projection_entropy(const std::vector<double>& u, const std::vector<double>& v,
                          double bin_width) {
    if (u.empty() || u.size() != v.size()) throw DimensionMismatch("u/v sample mismatch");
    double umin = *std::min_element(u.begin(), u.end());
    double vmin = *std::min_element(v.begin(), v.end());
    std::vector<std::pair<int, int>> cells(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        cells[i] = {static_cast<int>(std::floor((u[i] - umin) / bin_width)),
                    static_cast<int>(std::floor((v[i] - vmin) / bin_width))};
    }
    std::sort(cells.begin(), cells.end());
    const double total = static_cast<double>(cells.size());
    double h = 0.0;
    size_t i = 0;
    while (i < cells.size()) {
        size_t j = i;
        while (j < cells.size() && cells[j] == cells[i]) ++j;
        const double p = static_cast<double>(j - i) / total;
        h -= p * std::log(p);
        i = j;
    }
    return h;
}

Vec3 estimate_brightening_direction(const LinearRgbImage& img, const DirectionSearchConfig& cfg) {
    img.validate();
    bool constant = true;
    for (const Vec3& px : img.data) {
        if (px != img.data.front()) {
            constant = false;
            break;
        }
    }
    if (constant) throw DegenerateImage("projection entropy is independent of the direction");

    std::vector<Vec3> log_pixels(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) log_pixels[i] = img.data[i].array().log();

    constexpr double kDegToRad = std::numbers::pi / 180.0;
    StampedHistogram hist;
    std::vector<double> ubuf, vbuf;

    double best_entropy = std::numeric_limits<double>::infinity();
    double best_theta = 0.0, best_phi = 0.0;
    const int coarse_steps = static_cast<int>(std::round(90.0 / cfg.grid_step_deg));
    for (int it = 0; it <= coarse_steps; ++it) {
        const double theta = it * cfg.grid_step_deg;
        for (int ip = 0; ip <= coarse_steps; ++ip) {
            const double phi = ip * cfg.grid_step_deg;
            const Vec3 n = direction_from_angles(theta * kDegToRad, phi * kDegToRad);
            const double h =
                entropy_for_direction(log_pixels, n, cfg.histogram_bin, hist, ubuf, vbuf);
            if (h < best_entropy) {
                best_entropy = h;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }

    // Local refinement around the winning cell, same tie rule (scan order).
    const int refine_steps = static_cast<int>(std::round(cfg.grid_step_deg / cfg.refine_step_deg));
    double refined_theta = best_theta, refined_phi = best_phi;
    for (int it = -refine_steps; it <= refine_steps; ++it) {
        const double theta = std::clamp(best_theta + it * cfg.refine_step_deg, 0.0, 90.0);
        for (int ip = -refine_steps; ip <= refine_steps; ++ip) {
            const double phi = std::clamp(best_phi + ip * cfg.refine_step_deg, 0.0, 90.0);
            const Vec3 n = direction_from_angles(theta * kDegToRad, phi * kDegToRad);
            const double h =
                entropy_for_direction(log_pixels, n, cfg.histogram_bin, hist, ubuf, vbuf);
            if (h < best_entropy) {
                best_entropy = h;
                refined_theta = theta;
                refined_phi = phi;
            }
        }
    }
    return direction_from_angles(refined_theta * kDegToRad, refined_phi * kDegToRad);
}

UvbBasis build_uvb_basis(const Vec3& n) {
    if (std::abs(n.norm() - 1.0) > 1e-8) throw NotUnit("direction must be unit length");
    int least = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(n[i]) < std::abs(n[least])) least = i;
    }
    const Vec3 e = Vec3::Unit(least);
    UvbBasis basis;
    basis.n = n;
    basis.u = n.cross(e).normalized();
    basis.v = n.cross(basis.u);
    basis.H.col(0) = basis.u;
    basis.H.col(1) = basis.v;
    basis.H.col(2) = basis.n;
    return basis;
}

UvbImage to_uvb(const LinearRgbImage& img, const UvbBasis& basis) {
    img.validate();
    UvbImage out;
    out.width = img.width;
    out.height = img.height;
    out.u = ScalarField(img.width, img.height);
    out.v = ScalarField(img.width, img.height);
    out.b = ScalarField(img.width, img.height);
    for (size_t p = 0; p < img.data.size(); ++p) {
        const Vec3 l = img.data[p].array().log();
        out.u[p] = l.dot(basis.u);
        out.v[p] = l.dot(basis.v);
        out.b[p] = l.dot(basis.n);
    }
    return out;
}

ShadingResult recover_shading(const ScalarField& sb, const UvbBasis& basis,
                              const LinearRgbImage& img) {
    if (!sb.same_shape(img.width, img.height))
        throw DimensionMismatch("shading brightness does not match image dimensions");
    for (size_t p = 0; p < sb.size(); ++p) {
        if (!std::isfinite(sb[p])) throw Error("shading brightness must be finite");
    }
    const Mat3 h_inv = basis.H.inverse();
    const Eigen::RowVector3d b_row = h_inv.row(2);
    ShadingResult out;
    out.width = img.width;
    out.height = img.height;
    out.sb = sb;
    out.shading.resize(img.data.size());
    out.reflectance.resize(img.data.size());
    for (size_t p = 0; p < img.data.size(); ++p) {
        const Eigen::RowVector3d log_s = sb[p] * b_row;
        const Vec3 s = log_s.transpose().array().exp();
        out.shading[p] = s;
        out.reflectance[p] = img.data[p].array() / s.array();
    }
    return out;
}

}  // namespace intrinsic
