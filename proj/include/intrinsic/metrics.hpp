#pragma once

#include "intrinsic/core.hpp"

#include <string>

namespace intrinsic {

/// One human reflectance comparison: which of two points looks darker.
struct Judgment {
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;  // normalized [0,1] coordinates
    char darker = 'E';                              // '1', '2' or 'E'
    double weight = 1.0;
};

using JudgmentSet = std::vector<Judgment>;

/// Mean squared error after fitting the single scale a that minimizes
/// ||truth - a*est||^2. Set scale_invariant = false for the plain MSE.
double mse(const ScalarField& est, const ScalarField& truth, bool scale_invariant = true);

/// Windowed scale-invariant squared error, normalized so the all-zero
/// estimate scores 1.
double lmse(const ScalarField& est, const ScalarField& truth, int window = 20, int step = 10);

/// Like lmse but with per-window mean subtraction on both sides before the
/// scale fit, so per-window affine copies score 0.
double almse(const ScalarField& est, const ScalarField& truth, int window = 20, int step = 10);

/// Pearson correlation. Throws ZeroVariance when either field is constant.
double correlation(const ScalarField& est, const ScalarField& truth);

/// Weighted human disagreement rate of the ratio test r_dark/r_bright <
/// 1/(1+delta) against the judgment labels. Reflectance luminance is the
/// mean of the RGB channels.
double whdr(const std::vector<Vec3>& reflectance, int width, int height,
            const JudgmentSet& judgments, double delta = 0.10);

/// The algorithm's answer for one judgment: '1', '2' or 'E'.
char whdr_answer(double r1, double r2, double delta);

/// Parses a JSON array of {x1, y1, x2, y2, darker, weight} records.
JudgmentSet load_judgments(const std::string& path);

}  // namespace intrinsic
