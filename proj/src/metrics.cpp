#include "intrinsic/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace intrinsic {

namespace {

void check_shapes(const ScalarField& a, const ScalarField& b) {
    if (a.width() != b.width() || a.height() != b.height() || a.empty())
        throw DimensionMismatch("fields must share a nonempty shape");
}

// Scale-invariant squared error of one window; optionally mean-subtracted.
double window_sse(const ScalarField& est, const ScalarField& truth, int x0, int y0, int w,
                  int h, bool subtract_mean, double& truth_energy) {
    double se = 0.0, st = 0.0;
    const int count = w * h;
    if (subtract_mean) {
        for (int y = y0; y < y0 + h; ++y) {
            for (int x = x0; x < x0 + w; ++x) {
                se += est(x, y);
                st += truth(x, y);
            }
        }
        se /= count;
        st /= count;
    }
    double tt = 0.0, ee = 0.0, te = 0.0;
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            const double e = est(x, y) - (subtract_mean ? se : 0.0);
            const double t = truth(x, y) - (subtract_mean ? st : 0.0);
            tt += t * t;
            ee += e * e;
            te += t * e;
        }
    }
    truth_energy = tt;
    const double a = ee > 0.0 ? te / ee : 0.0;
    return tt - 2.0 * a * te + a * a * ee;
}

template <typename Fn>
void for_each_window(const ScalarField& f, int window, int step, Fn&& fn) {
    if (window < 1 || step < 1) throw InvalidSpec("window and step must be positive");
    if (window > f.width() || window > f.height())
        throw DimensionMismatch("window exceeds the image");
    for (int y0 = 0; y0 + window <= f.height(); y0 += step)
        for (int x0 = 0; x0 + window <= f.width(); x0 += step) fn(x0, y0);
}

}  // namespace

double mse(const ScalarField& est, const ScalarField& truth, bool scale_invariant) {
    check_shapes(est, truth);
    const size_t n = truth.size();
    double a = 1.0;
    if (scale_invariant) {
        double te = 0.0, ee = 0.0;
        for (size_t p = 0; p < n; ++p) {
            te += truth[p] * est[p];
            ee += est[p] * est[p];
        }
        a = ee > 0.0 ? te / ee : 0.0;
    }
    double sse = 0.0;
    for (size_t p = 0; p < n; ++p) {
        const double d = truth[p] - a * est[p];
        sse += d * d;
    }
    return sse / static_cast<double>(n);
}

double lmse(const ScalarField& est, const ScalarField& truth, int window, int step) {
    check_shapes(est, truth);
    double total_sse = 0.0, total_energy = 0.0;
    for_each_window(truth, window, step, [&](int x0, int y0) {
        double energy = 0.0;
        total_sse += window_sse(est, truth, x0, y0, window, window, false, energy);
        total_energy += energy;
    });
    return total_energy > 0.0 ? total_sse / total_energy : 0.0;
}

double almse(const ScalarField& est, const ScalarField& truth, int window, int step) {
    check_shapes(est, truth);
    double total_sse = 0.0, total_energy = 0.0;
    for_each_window(truth, window, step, [&](int x0, int y0) {
        double energy = 0.0;
        total_sse += window_sse(est, truth, x0, y0, window, window, true, energy);
        total_energy += energy;
    });
    return total_energy > 0.0 ? total_sse / total_energy : 0.0;
}

double correlation(const ScalarField& est, const ScalarField& truth) {
    check_shapes(est, truth);
    const double n = static_cast<double>(truth.size());
    double se = 0.0, st = 0.0;
    for (size_t p = 0; p < truth.size(); ++p) {
        se += est[p];
        st += truth[p];
    }
    const double me = se / n, mt = st / n;
    double vee = 0.0, vtt = 0.0, vte = 0.0;
    for (size_t p = 0; p < truth.size(); ++p) {
        const double de = est[p] - me;
        const double dt = truth[p] - mt;
        vee += de * de;
        vtt += dt * dt;
        vte += de * dt;
    }
    if (vee <= 0.0 || vtt <= 0.0) throw ZeroVariance("correlation of a constant field");
    return vte / std::sqrt(vee * vtt);
}

char whdr_answer(double r1, double r2, double delta) {
    const double ratio_cut = 1.0 / (1.0 + delta);
    const double safe1 = std::max(r1, 1e-12);
    const double safe2 = std::max(r2, 1e-12);
    if (safe1 / safe2 < ratio_cut) return '1';
    if (safe2 / safe1 < ratio_cut) return '2';
    return 'E';
}

double whdr(const std::vector<Vec3>& reflectance, int width, int height,
            const JudgmentSet& judgments, double delta) {
    if (reflectance.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
        throw DimensionMismatch("reflectance buffer does not match dimensions");
    const auto luminance = [&](double xn, double yn) {
        const int x = std::clamp(static_cast<int>(std::lround(xn * (width - 1))), 0, width - 1);
        const int y = std::clamp(static_cast<int>(std::lround(yn * (height - 1))), 0, height - 1);
        const Vec3& px = reflectance[static_cast<size_t>(y) * width + x];
        return (px[0] + px[1] + px[2]) / 3.0;
    };
    double total = 0.0, disagree = 0.0;
    for (const Judgment& j : judgments) {
        if (j.x1 < 0.0 || j.x1 > 1.0 || j.y1 < 0.0 || j.y1 > 1.0 || j.x2 < 0.0 || j.x2 > 1.0 ||
            j.y2 < 0.0 || j.y2 > 1.0)
            throw DimensionMismatch("judgment coordinates must be normalized to [0, 1]");
        const char answer = whdr_answer(luminance(j.x1, j.y1), luminance(j.x2, j.y2), delta);
        total += j.weight;
        if (answer != j.darker) disagree += j.weight;
    }
    return total > 0.0 ? disagree / total : 0.0;
}

JudgmentSet load_judgments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open judgment file " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_array()) throw IoError("judgment file must hold a JSON array");
    JudgmentSet set;
    set.reserve(doc.size());
    for (const auto& item : doc) {
        Judgment j;
        j.x1 = item.at("x1").get<double>();
        j.y1 = item.at("y1").get<double>();
        j.x2 = item.at("x2").get<double>();
        j.y2 = item.at("y2").get<double>();
        j.weight = item.value("weight", 1.0);
        const auto& darker = item.at("darker");
        if (darker.is_string()) {
            const std::string s = darker.get<std::string>();
            if (s != "1" && s != "2" && s != "E") throw IoError("darker must be 1, 2 or E");
            j.darker = s[0];
        } else {
            const int v = darker.get<int>();
            if (v != 1 && v != 2) throw IoError("numeric darker must be 1 or 2");
            j.darker = v == 1 ? '1' : '2';
        }
        set.push_back(j);
    }
    return set;
}

}  // namespace intrinsic
