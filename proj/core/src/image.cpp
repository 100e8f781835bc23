#include "cgvm/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cgvm/errors.hpp"

namespace cgvm {

namespace {

RgbImage from_mat(const cv::Mat& raw, const std::string& origin) {
    if (raw.empty()) {
        throw DecodeError(origin, "unreadable or unsupported image data");
    }

    // Normalize bit depth first: 16-bit scales so 65535 -> 255.
    cv::Mat m8;
    if (raw.depth() == CV_16U) {
        raw.convertTo(m8, CV_8U, 255.0 / 65535.0);
    } else if (raw.depth() == CV_8U) {
        m8 = raw;
    } else {
        throw DecodeError(origin, "unsupported sample depth");
    }

    cv::Mat rgb;
    switch (m8.channels()) {
        case 1:
            cv::cvtColor(m8, rgb, cv::COLOR_GRAY2RGB);
            break;
        case 3:
            cv::cvtColor(m8, rgb, cv::COLOR_BGR2RGB);
            break;
        case 4: {
            // Composite over white using the alpha channel.
            cv::Mat bgra;
            m8.convertTo(bgra, CV_32FC4);
            std::vector<cv::Mat> ch;
            cv::split(bgra, ch);
            cv::Mat alpha = ch[3] / 255.0f;
            cv::Mat out(m8.rows, m8.cols, CV_8UC3);
            for (int r = 0; r < m8.rows; ++r) {
                for (int c = 0; c < m8.cols; ++c) {
                    float a = alpha.at<float>(r, c);
                    auto* dst = out.ptr<uint8_t>(r) + 3 * c;
                    // BGR order from OpenCV, emit RGB.
                    dst[0] = uint8_t(std::lround(ch[2].at<float>(r, c) * a + 255.0f * (1 - a)));
                    dst[1] = uint8_t(std::lround(ch[1].at<float>(r, c) * a + 255.0f * (1 - a)));
                    dst[2] = uint8_t(std::lround(ch[0].at<float>(r, c) * a + 255.0f * (1 - a)));
                }
            }
            rgb = out;
            break;
        }
        default:
            throw DecodeError(origin, "unsupported channel count " + std::to_string(m8.channels()));
    }

    RgbImage img;
    img.width = rgb.cols;
    img.height = rgb.rows;
    img.samples.resize(img.pixel_count() * 3);
    for (int r = 0; r < rgb.rows; ++r) {
        std::copy_n(rgb.ptr<uint8_t>(r), size_t(rgb.cols) * 3,
                    img.samples.begin() + size_t(r) * rgb.cols * 3);
    }
    return img;
}

}  // namespace

RgbImage decode(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
        throw DecodeError(path, "file not readable");
    }
    cv::Mat raw = cv::imread(path, cv::IMREAD_UNCHANGED);
    return from_mat(raw, path);
}

RgbImage decode_bytes(const std::vector<uint8_t>& bytes, const std::string& origin) {
    cv::Mat raw = cv::imdecode(bytes, cv::IMREAD_UNCHANGED);
    return from_mat(raw, origin);
}

static cv::Mat to_bgr_mat(const RgbImage& img) {
    cv::Mat rgb(img.height, img.width, CV_8UC3, const_cast<uint8_t*>(img.samples.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    return bgr;
}

void encode_png(const RgbImage& img, const std::string& path) {
    if (!cv::imwrite(path, to_bgr_mat(img))) {
        throw Error("PNG encode failed for " + path);
    }
}

std::vector<uint8_t> encode_png_bytes(const RgbImage& img) {
    std::vector<uint8_t> out;
    if (!cv::imencode(".png", to_bgr_mat(img), out)) {
        throw Error("PNG encode failed");
    }
    return out;
}

ImagePlane to_luma(const RgbImage& img) {
    ImagePlane plane;
    plane.width = img.width;
    plane.height = img.height;
    plane.samples.resize(plane.pixel_count());
    for (size_t i = 0; i < plane.pixel_count(); ++i) {
        const uint8_t* px = img.samples.data() + 3 * i;
        plane.samples[i] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
    }
    return plane;
}

namespace {

// Shared bilinear kernel over a generic sampler. Half-pixel centers,
// clamped at the borders, so resizing to the same size is the identity.
template <typename GetFn, typename SetFn>
void bilinear(int in_w, int in_h, int out_w, int out_h, GetFn get, SetFn set) {
    const double sx = double(in_w) / out_w;
    const double sy = double(in_h) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        double fy = (oy + 0.5) * sy - 0.5;
        int y0 = int(std::floor(fy));
        double wy = fy - y0;
        int y1 = std::clamp(y0 + 1, 0, in_h - 1);
        y0 = std::clamp(y0, 0, in_h - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            int x0 = int(std::floor(fx));
            double wx = fx - x0;
            int x1 = std::clamp(x0 + 1, 0, in_w - 1);
            x0 = std::clamp(x0, 0, in_w - 1);
            double v = (1 - wy) * ((1 - wx) * get(y0, x0) + wx * get(y0, x1)) +
                       wy * ((1 - wx) * get(y1, x0) + wx * get(y1, x1));
            set(oy, ox, v);
        }
    }
}

}  // namespace

RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h) {
    RgbImage out;
    out.width = out_w;
    out.height = out_h;
    out.samples.resize(size_t(out_w) * out_h * 3);
    for (int c = 0; c < 3; ++c) {
        bilinear(
            img.width, img.height, out_w, out_h,
            [&](int y, int x) { return double(img.samples[(size_t(y) * img.width + x) * 3 + c]); },
            [&](int y, int x, double v) {
                out.samples[(size_t(y) * out_w + x) * 3 + c] =
                    uint8_t(std::clamp(std::lround(v), 0L, 255L));
            });
    }
    return out;
}

ImagePlane resize_bilinear(const ImagePlane& img, int out_w, int out_h) {
    ImagePlane out;
    out.width = out_w;
    out.height = out_h;
    out.dynamic_range = img.dynamic_range;
    out.samples.resize(size_t(out_w) * out_h);
    bilinear(
        img.width, img.height, out_w, out_h, [&](int y, int x) { return img.at(y, x); },
        [&](int y, int x, double v) { out.at(y, x) = v; });
    return out;
}

RgbImage standardize(const RgbImage& img, int side) {
    if (side < 8) {
        throw InvalidSide(side);
    }
    return resize_bilinear(img, side, side);
}

}  // namespace cgvm
