#include "intrinsic/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace intrinsic {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

struct PngSamples {
    int width = 0, height = 0;
    int channels = 0;   // 1 or 3
    int max_value = 0;  // 255 or 65535
    std::vector<uint16_t> data;  // row-major, interleaved
};

PngSamples read_png(const std::string& path, bool force_rgb) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open " + path);
    png_byte header[8];
    if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw IoError(path + " is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng failed reading " + path);
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (force_rgb) png_set_gray_to_rgb(png);
    if (bit_depth == 16) png_set_swap(png);  // stored big endian
    png_read_update_info(png, info);

    PngSamples out;
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = static_cast<int>(png_get_channels(png, info));
    const int depth = png_get_bit_depth(png, info);
    out.max_value = depth == 16 ? 65535 : 255;
    if (out.channels != 1 && out.channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": unsupported channel layout");
    }

    const size_t samples = static_cast<size_t>(out.width) * out.height * out.channels;
    out.data.resize(samples);
    std::vector<png_bytep> rows(out.height);
    std::vector<uint8_t> raw;
    if (depth == 16) {
        for (int y = 0; y < out.height; ++y)
            rows[y] = reinterpret_cast<png_bytep>(out.data.data() +
                                                  static_cast<size_t>(y) * out.width * out.channels);
        png_read_image(png, rows.data());
    } else {
        raw.resize(samples);
        for (int y = 0; y < out.height; ++y)
            rows[y] = raw.data() + static_cast<size_t>(y) * out.width * out.channels;
        png_read_image(png, rows.data());
        for (size_t i = 0; i < samples; ++i) out.data[i] = raw[i];
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const std::string& path, int width, int height, int channels,
               const std::vector<uint16_t>& data) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw IoError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed writing " + path);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, 16,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(const_cast<uint16_t*>(
            data.data() + static_cast<size_t>(y) * width * channels));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Reads one PPM/PGM token, skipping whitespace and '#' comments.
std::string ppm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
    if (tok.empty()) throw IoError("truncated PPM header");
    return tok;
}

PngSamples read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    const std::string magic = ppm_token(in);
    const bool binary = magic == "P6" || magic == "P5";
    const bool gray = magic == "P5" || magic == "P2";
    if (magic != "P6" && magic != "P3" && magic != "P5" && magic != "P2")
        throw IoError(path + ": unsupported PPM magic " + magic);
    PngSamples out;
    out.width = std::stoi(ppm_token(in));
    out.height = std::stoi(ppm_token(in));
    out.max_value = std::stoi(ppm_token(in));
    out.channels = gray ? 1 : 3;
    if (out.width < 1 || out.height < 1 || out.max_value < 1 || out.max_value > 65535)
        throw IoError(path + ": malformed PPM header");
    const size_t samples = static_cast<size_t>(out.width) * out.height * out.channels;
    out.data.resize(samples);
    if (binary) {
        const bool wide = out.max_value > 255;
        std::vector<uint8_t> raw(samples * (wide ? 2 : 1));
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<size_t>(in.gcount()) != raw.size()) throw IoError(path + ": truncated PPM");
        for (size_t i = 0; i < samples; ++i)
            out.data[i] = wide ? static_cast<uint16_t>(raw[2 * i] << 8 | raw[2 * i + 1])
                               : raw[i];
    } else {
        for (size_t i = 0; i < samples; ++i) out.data[i] = static_cast<uint16_t>(std::stoi(ppm_token(in)));
    }
    return out;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                      [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

}  // namespace

LinearRgbImage load_image(const std::string& path, double floor) {
    PngSamples samples;
    if (has_suffix(path, ".ppm") || has_suffix(path, ".pgm") || has_suffix(path, ".pnm"))
        samples = read_ppm(path);
    else
        samples = read_png(path, /*force_rgb=*/true);

    LinearRgbImage img;
    img.width = samples.width;
    img.height = samples.height;
    img.data.resize(static_cast<size_t>(samples.width) * samples.height);
    const double scale = 1.0 / static_cast<double>(samples.max_value);
    for (size_t p = 0; p < img.data.size(); ++p) {
        Vec3 v;
        if (samples.channels == 1) {
            v.setConstant(samples.data[p] * scale);
        } else {
            v = Vec3(samples.data[3 * p] * scale, samples.data[3 * p + 1] * scale,
                     samples.data[3 * p + 2] * scale);
        }
        for (int c = 0; c < 3; ++c) v[c] = std::min(1.0, std::max(v[c], floor));
        img.data[p] = v;
    }
    return img;
}

void save_png_gray16(const std::string& path, const ScalarField& field) {
    double lo = field[0], hi = field[0];
    for (size_t p = 0; p < field.size(); ++p) {
        lo = std::min(lo, field[p]);
        hi = std::max(hi, field[p]);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::vector<uint16_t> data(field.size());
    for (size_t p = 0; p < field.size(); ++p)
        data[p] = static_cast<uint16_t>(std::lround((field[p] - lo) / span * 65535.0));
    write_png(path, field.width(), field.height(), 1, data);
}

void save_png_rgb16(const std::string& path, const std::vector<Vec3>& rgb, int width,
                    int height) {
    std::vector<uint16_t> data(rgb.size() * 3);
    for (size_t p = 0; p < rgb.size(); ++p) {
        for (int c = 0; c < 3; ++c) {
            const double v = std::clamp(rgb[p][c], 0.0, 1.0);
            data[3 * p + c] = static_cast<uint16_t>(std::lround(v * 65535.0));
        }
    }
    write_png(path, width, height, 3, data);
}

namespace {

void write_pfm_impl(const std::string& path, const float* data, int width, int height,
                    int channels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << (channels == 1 ? "Pf" : "PF") << "\n" << width << " " << height << "\n-1.0\n";
    // PFM stores rows bottom to top.
    for (int y = height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(data + static_cast<size_t>(y) * width * channels),
                  static_cast<std::streamsize>(sizeof(float) * width * channels));
    if (!out) throw IoError("short write to " + path);
}

std::vector<float> read_pfm_impl(const std::string& path, int& width, int& height,
                                 int expected_channels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string magic;
    double scale;
    in >> magic >> width >> height >> scale;
    in.get();
    const int channels = magic == "PF" ? 3 : (magic == "Pf" ? 1 : 0);
    if (channels == 0 || width < 1 || height < 1) throw IoError(path + ": malformed PFM");
    if (channels != expected_channels)
        throw IoError(path + ": expected " + std::to_string(expected_channels) + " channels");
    if (scale > 0.0) throw IoError(path + ": big-endian PFM is not supported");
    std::vector<float> data(static_cast<size_t>(width) * height * channels);
    for (int y = height - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(data.data() + static_cast<size_t>(y) * width * channels),
                static_cast<std::streamsize>(sizeof(float) * width * channels));
    }
    if (!in) throw IoError(path + ": truncated PFM");
    return data;
}

}  // namespace

void save_pfm(const std::string& path, const ScalarField& field) {
    std::vector<float> data(field.size());
    for (size_t p = 0; p < field.size(); ++p) data[p] = static_cast<float>(field[p]);
    write_pfm_impl(path, data.data(), field.width(), field.height(), 1);
}

void save_pfm_rgb(const std::string& path, const std::vector<Vec3>& rgb, int width, int height) {
    std::vector<float> data(rgb.size() * 3);
    for (size_t p = 0; p < rgb.size(); ++p)
        for (int c = 0; c < 3; ++c) data[3 * p + c] = static_cast<float>(rgb[p][c]);
    write_pfm_impl(path, data.data(), width, height, 3);
}

ScalarField load_pfm(const std::string& path) {
    int width = 0, height = 0;
    const std::vector<float> data = read_pfm_impl(path, width, height, 1);
    ScalarField field(width, height);
    for (size_t p = 0; p < field.size(); ++p) field[p] = data[p];
    return field;
}

std::vector<Vec3> load_pfm_rgb(const std::string& path, int& width, int& height) {
    const std::vector<float> data = read_pfm_impl(path, width, height, 3);
    std::vector<Vec3> rgb(static_cast<size_t>(width) * height);
    for (size_t p = 0; p < rgb.size(); ++p)
        rgb[p] = Vec3(data[3 * p], data[3 * p + 1], data[3 * p + 2]);
    return rgb;
}

CameraIntrinsics load_intrinsics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open intrinsics file " + path);
    CameraIntrinsics k;
    if (!(in >> k.fx >> k.fy >> k.cx >> k.cy)) throw IoError(path + ": expected 'fx fy cx cy'");
    if (!k.valid()) throw IoError(path + ": focal lengths must be positive");
    return k;
}

Field2D<uint16_t> load_png_gray16_raw(const std::string& path) {
    const PngSamples samples = read_png(path, /*force_rgb=*/false);
    if (samples.channels != 1) throw IoError(path + ": expected a grayscale PNG");
    Field2D<uint16_t> raw(samples.width, samples.height);
    for (size_t p = 0; p < raw.size(); ++p) raw[p] = samples.data[p];
    return raw;
}

void save_png_gray16_raw(const std::string& path, const Field2D<uint16_t>& raw) {
    write_png(path, raw.width(), raw.height(), 1, raw.data());
}

DepthMap load_depth(const std::string& png_path, const std::string& intrinsics_path) {
    const Field2D<uint16_t> raw = load_png_gray16_raw(png_path);
    DepthMap depth;
    depth.width = raw.width();
    depth.height = raw.height();
    depth.depth = ScalarField(raw.width(), raw.height(), 0.0);
    depth.valid = Field2D<uint8_t>(raw.width(), raw.height(), 0);
    for (size_t p = 0; p < raw.size(); ++p) {
        if (raw[p] == 0) continue;  // zero millimeters marks a missing reading
        depth.depth[p] = raw[p] / 1000.0;
        depth.valid[p] = 1;
    }
    depth.intrinsics = load_intrinsics(intrinsics_path);
    return depth;
}

}  // namespace intrinsic
