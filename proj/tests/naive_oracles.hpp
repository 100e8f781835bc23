#pragma once

// Deliberately naive re-implementations of the pixel metrics, written as
// direct double loops with none of the running-sum/separable-filter
// machinery of the library. Used only to cross-check the fast versions.

#include <algorithm>
#include <cmath>
#include <vector>

#include "cgvm/image.hpp"

namespace naive {

inline double mse(const cgvm::ImagePlane& a, const cgvm::ImagePlane& b) {
    double acc = 0.0;
    for (int r = 0; r < a.height; ++r) {
        for (int c = 0; c < a.width; ++c) {
            const double d = a.at(r, c) - b.at(r, c);
            acc += d * d;
        }
    }
    return acc / (double(a.width) * a.height);
}

struct Moments {
    double mean_x = 0, mean_y = 0, var_x = 0, var_y = 0, cov = 0;
};

/// Weighted first/second moments over a window anchored at (r0, c0).
inline Moments window_moments(const cgvm::ImagePlane& x, const cgvm::ImagePlane& y, int r0,
                              int c0, const std::vector<std::vector<double>>& weights) {
    Moments m;
    const int n = int(weights.size());
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            m.mean_x += weights[r][c] * x.at(r0 + r, c0 + c);
            m.mean_y += weights[r][c] * y.at(r0 + r, c0 + c);
        }
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const double dx = x.at(r0 + r, c0 + c) - m.mean_x;
            const double dy = y.at(r0 + r, c0 + c) - m.mean_y;
            m.var_x += weights[r][c] * dx * dx;
            m.var_y += weights[r][c] * dy * dy;
            m.cov += weights[r][c] * dx * dy;
        }
    }
    return m;
}

inline std::vector<std::vector<double>> gaussian_window(int size, double sigma) {
    std::vector<double> k(size);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - size / 2;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    std::vector<std::vector<double>> w(size, std::vector<double>(size));
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) w[r][c] = k[r] * k[c];
    }
    return w;
}

inline std::vector<std::vector<double>> uniform_window(int size) {
    return std::vector<std::vector<double>>(
        size, std::vector<double>(size, 1.0 / (double(size) * size)));
}

/// Per-window SSIM (l * c * s) averaged over every valid window position.
inline double ssim_windowed(const cgvm::ImagePlane& x, const cgvm::ImagePlane& y,
                            const std::vector<std::vector<double>>& weights, double c1,
                            double c2) {
    const int n = int(weights.size());
    const double c3 = c2 / 2.0;
    double total = 0.0;
    int count = 0;
    for (int r0 = 0; r0 + n <= x.height; ++r0) {
        for (int c0 = 0; c0 + n <= x.width; ++c0) {
            const Moments m = window_moments(x, y, r0, c0, weights);
            const double sx = std::sqrt(std::max(m.var_x, 0.0));
            const double sy = std::sqrt(std::max(m.var_y, 0.0));
            const double l = (2.0 * m.mean_x * m.mean_y + c1) /
                             (m.mean_x * m.mean_x + m.mean_y * m.mean_y + c1);
            const double c = (2.0 * sx * sy + c2) / (sx * sx + sy * sy + c2);
            const double s = (m.cov + c3) / (sx * sy + c3);
            total += l * c * s;
            ++count;
        }
    }
    return total / count;
}

inline double ssim_global(const cgvm::ImagePlane& x, const cgvm::ImagePlane& y, double c1,
                          double c2) {
    std::vector<std::vector<double>> w(
        x.height, std::vector<double>(x.width, 1.0 / (double(x.width) * x.height)));
    // Reuse the windowed path with one full-image window.
    const double c3 = c2 / 2.0;
    Moments m;
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c) {
            m.mean_x += w[r][c] * x.at(r, c);
            m.mean_y += w[r][c] * y.at(r, c);
        }
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c) {
            const double dx = x.at(r, c) - m.mean_x;
            const double dy = y.at(r, c) - m.mean_y;
            m.var_x += w[r][c] * dx * dx;
            m.var_y += w[r][c] * dy * dy;
            m.cov += w[r][c] * dx * dy;
        }
    const double sx = std::sqrt(std::max(m.var_x, 0.0));
    const double sy = std::sqrt(std::max(m.var_y, 0.0));
    const double l =
        (2.0 * m.mean_x * m.mean_y + c1) / (m.mean_x * m.mean_x + m.mean_y * m.mean_y + c1);
    const double c = (2.0 * sx * sy + c2) / (sx * sx + sy * sy + c2);
    const double s = (m.cov + c3) / (sx * sy + c3);
    return l * c * s;
}

/// Plain-formula UQI for one window; valid only away from degenerate stats.
inline double uqi_window(const cgvm::ImagePlane& x, const cgvm::ImagePlane& y, int r0, int c0,
                         int n) {
    double sx = 0, sy = 0;
    const double count = double(n) * n;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            sx += x.at(r0 + r, c0 + c);
            sy += y.at(r0 + r, c0 + c);
        }
    const double mx = sx / count, my = sy / count;
    double vx = 0, vy = 0, cov = 0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double dx = x.at(r0 + r, c0 + c) - mx;
            const double dy = y.at(r0 + r, c0 + c) - my;
            vx += dx * dx;
            vy += dy * dy;
            cov += dx * dy;
        }
    vx /= count;
    vy /= count;
    cov /= count;
    return 4.0 * cov * mx * my / ((vx + vy) * (mx * mx + my * my));
}

inline double uqi_global(const cgvm::ImagePlane& x, const cgvm::ImagePlane& y) {
    double sx = 0, sy = 0;
    const double count = double(x.width) * x.height;
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c) {
            sx += x.at(r, c);
            sy += y.at(r, c);
        }
    const double mx = sx / count, my = sy / count;
    double vx = 0, vy = 0, cov = 0;
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c) {
            const double dx = x.at(r, c) - mx;
            const double dy = y.at(r, c) - my;
            vx += dx * dx;
            vy += dy * dy;
            cov += dx * dy;
        }
    vx /= count;
    vy /= count;
    cov /= count;
    return 4.0 * cov * mx * my / ((vx + vy) * (mx * mx + my * my));
}

inline double uqi_windowed8(const cgvm::ImagePlane& x, const cgvm::ImagePlane& y) {
    double total = 0.0;
    int count = 0;
    for (int r0 = 0; r0 + 8 <= x.height; ++r0) {
        for (int c0 = 0; c0 + 8 <= x.width; ++c0) {
            total += uqi_window(x, y, r0, c0, 8);
            ++count;
        }
    }
    return total / count;
}

}  // namespace naive
