#pragma once

#include "intrinsic/colorspace.hpp"
#include "intrinsic/core.hpp"
#include "intrinsic/depth.hpp"

#include <string>

namespace intrinsic {

/// Reads an 8- or 16-bit PNG or PPM/PGM image, divides by the max code
/// value and clamps channels up to `floor` so the logarithm stays finite.
LinearRgbImage load_image(const std::string& path, double floor = 1e-4);

/// 16-bit grayscale PNG of the field normalized to its [min, max] range.
void save_png_gray16(const std::string& path, const ScalarField& field);

/// 16-bit RGB PNG; channel values are clamped to [0, 1].
void save_png_rgb16(const std::string& path, const std::vector<Vec3>& data, int width,
                    int height);

/// Grayscale (Pf) / color (PF) portable float maps, little endian.
void save_pfm(const std::string& path, const ScalarField& field);
void save_pfm_rgb(const std::string& path, const std::vector<Vec3>& data, int width, int height);
ScalarField load_pfm(const std::string& path);
std::vector<Vec3> load_pfm_rgb(const std::string& path, int& width, int& height);

/// 16-bit PNG depth in millimeters (0 = invalid) plus a whitespace-separated
/// `fx fy cx cy` side-car file.
DepthMap load_depth(const std::string& png_path, const std::string& intrinsics_path);
CameraIntrinsics load_intrinsics(const std::string& path);

/// Raw 16-bit grayscale PNG samples (no normalization).
Field2D<uint16_t> load_png_gray16_raw(const std::string& path);
void save_png_gray16_raw(const std::string& path, const Field2D<uint16_t>& raw);

}  // namespace intrinsic
