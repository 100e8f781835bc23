#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cgvm {

/// Single-plane floating raster; the substrate of every pixel metric.
/// Samples are row-major, finite, and bounded by [0, dynamic_range].
struct ImagePlane {
    int width = 0;
    int height = 0;
    double dynamic_range = 255.0;
    std::vector<double> samples;  // width * height, row-major

    double at(int row, int col) const { return samples[size_t(row) * width + col]; }
    double& at(int row, int col) { return samples[size_t(row) * width + col]; }
    size_t pixel_count() const { return size_t(width) * height; }
};

/// Interleaved 8-bit RGB raster as decoded from disk.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> samples;  // 3 * width * height, RGB interleaved

    size_t pixel_count() const { return size_t(width) * height; }
    bool operator==(const RgbImage&) const = default;
};

/// Decodes a PNG or JPEG file. Alpha is composited over white,
/// 16-bit samples are rescaled to 8-bit. Throws DecodeError.
RgbImage decode(const std::string& path);

/// Decodes from an in-memory buffer (same conventions as decode()).
RgbImage decode_bytes(const std::vector<uint8_t>& bytes, const std::string& origin);

/// Encodes to PNG. Lossless for 8-bit content.
void encode_png(const RgbImage& img, const std::string& path);
std::vector<uint8_t> encode_png_bytes(const RgbImage& img);

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B, range [0, 255].
ImagePlane to_luma(const RgbImage& img);

/// Bilinear resize with half-pixel sample centers. Aspect is not preserved.
RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h);
ImagePlane resize_bilinear(const ImagePlane& img, int out_w, int out_h);

/// Square resize to side x side so reference and generated images are
/// pixel-aligned for the full-reference metrics. Throws InvalidSide for side < 8.
RgbImage standardize(const RgbImage& img, int side);

}  // namespace cgvm
