#include "cgvm/brisque.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cgvm/errors.hpp"

namespace cgvm {

namespace {

// 7x7 Gaussian weights, sigma 7/6, normalized to sum 1.
const std::vector<double>& mscn_kernel_1d() {
    static const std::vector<double> k = [] {
        std::vector<double> v(7);
        const double sigma = 7.0 / 6.0;
        double sum = 0.0;
        for (int i = 0; i < 7; ++i) {
            double d = i - 3;
            v[i] = std::exp(-d * d / (2.0 * sigma * sigma));
            sum += v[i];
        }
        for (double& x : v) x /= sum;
        return v;
    }();
    return k;
}

// Symmetric border index: ...(2)(1)(0) | 0 1 2 ... n-1 | (n-1)(n-2)...
int reflect(int i, int n) {
    if (i < 0) return -i - 1;
    if (i >= n) return 2 * n - 1 - i;
    return i;
}

// Same-size separable convolution with symmetric borders.
std::vector<double> filter_symmetric(const std::vector<double>& img, int w, int h) {
    const auto& k = mscn_kernel_1d();
    const int half = 3;
    std::vector<double> tmp(img.size()), out(img.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i) {
                acc += k[i + half] * img[size_t(r) * w + reflect(c + i, w)];
            }
            tmp[size_t(r) * w + c] = acc;
        }
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i) {
                acc += k[i + half] * tmp[size_t(reflect(r + i, h)) * w + c];
            }
            out[size_t(r) * w + c] = acc;
        }
    }
    return out;
}

// r(alpha) = gamma(2/a)^2 / (gamma(1/a) gamma(3/a)), monotone increasing
// over [0.2, 10]; inverted by table lookup with linear interpolation.
double gamma_ratio(double a) {
    return std::exp(2.0 * std::lgamma(2.0 / a) - std::lgamma(1.0 / a) - std::lgamma(3.0 / a));
}

double solve_shape(double target) {
    static const std::vector<std::pair<double, double>> table = [] {
        std::vector<std::pair<double, double>> t;
        for (double a = 0.2; a <= 10.0 + 1e-9; a += 1e-3) {
            t.emplace_back(gamma_ratio(a), a);
        }
        return t;
    }();
    if (target <= table.front().first) return table.front().second;
    if (target >= table.back().first) return table.back().second;
    auto it = std::lower_bound(table.begin(), table.end(), target,
                               [](const auto& p, double v) { return p.first < v; });
    const auto& [r1, a1] = *it;
    const auto& [r0, a0] = *(it - 1);
    const double t = (target - r0) / (r1 - r0);
    return a0 + t * (a1 - a0);
}

// GGD moment-matching fit: returns (shape alpha, variance sigma^2).
std::pair<double, double> fit_ggd(const std::vector<double>& x) {
    double abs_sum = 0.0, sq_sum = 0.0;
    for (double v : x) {
        abs_sum += std::fabs(v);
        sq_sum += v * v;
    }
    const double n = double(x.size());
    const double e_abs = abs_sum / n;
    const double e_sq = sq_sum / n;
    if (e_sq == 0.0) {
        throw DegenerateFit("all-zero MSCN field");
    }
    const double rho = e_abs * e_abs / e_sq;
    return {solve_shape(rho), e_sq};
}

// AGGD fit of a pairwise-product field: (alpha, eta, sigma_l^2, sigma_r^2).
std::array<double, 4> fit_aggd(const std::vector<double>& x) {
    double left_sq = 0.0, right_sq = 0.0, abs_sum = 0.0, sq_sum = 0.0;
    size_t nl = 0, nr = 0;
    for (double v : x) {
        if (v < 0) {
            left_sq += v * v;
            ++nl;
        } else if (v > 0) {
            right_sq += v * v;
            ++nr;
        }
        abs_sum += std::fabs(v);
        sq_sum += v * v;
    }
    if (sq_sum == 0.0 || nl == 0 || nr == 0) {
        throw DegenerateFit("one-sided or all-zero product field");
    }
    const double n = double(x.size());
    const double sigma_l = std::sqrt(left_sq / double(nl));
    const double sigma_r = std::sqrt(right_sq / double(nr));
    const double gamma_hat = sigma_l / sigma_r;
    const double r_hat = (abs_sum / n) * (abs_sum / n) / (sq_sum / n);
    const double g2 = gamma_hat * gamma_hat;
    const double r_norm = r_hat * (gamma_hat * g2 + 1.0) * (gamma_hat + 1.0) /
                          ((g2 + 1.0) * (g2 + 1.0));
    const double alpha = solve_shape(r_norm);
    const double g1 = std::exp(std::lgamma(1.0 / alpha));
    const double g2a = std::exp(std::lgamma(2.0 / alpha));
    const double g3 = std::exp(std::lgamma(3.0 / alpha));
    const double eta = (sigma_r - sigma_l) * (g2a / g1) * std::sqrt(g1 / g3);
    return {alpha, eta, sigma_l * sigma_l, sigma_r * sigma_r};
}

// 18 features for one scale: GGD of MSCN, then AGGD of H, V, D1, D2 products.
void scale_features(const ImagePlane& plane, double* out) {
    ImagePlane coeffs = mscn(plane);
    const int w = coeffs.width, h = coeffs.height;

    auto [alpha, sigma_sq] = fit_ggd(coeffs.samples);
    out[0] = alpha;
    out[1] = sigma_sq;

    // Neighbor offsets: horizontal, vertical, main diagonal, anti-diagonal.
    const int dr[4] = {0, 1, 1, 1};
    const int dc[4] = {1, 0, 1, -1};
    for (int o = 0; o < 4; ++o) {
        std::vector<double> prod;
        prod.reserve(size_t(w) * h);
        for (int r = 0; r + dr[o] < h; ++r) {
            const int c_lo = std::max(0, -dc[o]);
            const int c_hi = std::min(w, w - dc[o]);
            for (int c = c_lo; c < c_hi; ++c) {
                prod.push_back(coeffs.at(r, c) * coeffs.at(r + dr[o], c + dc[o]));
            }
        }
        auto f = fit_aggd(prod);
        std::copy(f.begin(), f.end(), out + 2 + 4 * o);
    }
}

}  // namespace

ImagePlane mscn(const ImagePlane& plane) {
    if (plane.width < 7 || plane.height < 7) {
        throw TooSmallForWindow(std::min(plane.width, plane.height), 7);
    }
    const size_t n = plane.pixel_count();
    std::vector<double> sq(n);
    for (size_t i = 0; i < n; ++i) sq[i] = plane.samples[i] * plane.samples[i];

    auto mu = filter_symmetric(plane.samples, plane.width, plane.height);
    auto mu_sq = filter_symmetric(sq, plane.width, plane.height);

    ImagePlane out;
    out.width = plane.width;
    out.height = plane.height;
    out.dynamic_range = plane.dynamic_range;
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double sigma = std::sqrt(std::max(mu_sq[i] - mu[i] * mu[i], 0.0));
        out.samples[i] = (plane.samples[i] - mu[i]) / (sigma + 1.0);
    }
    return out;
}

BrisqueFeatures brisque_features(const ImagePlane& plane) {
    if (plane.width < 16 || plane.height < 16) {
        throw TooSmallForWindow(std::min(plane.width, plane.height), 16);
    }
    BrisqueFeatures f;
    scale_features(plane, f.values.data());
    ImagePlane half = resize_bilinear(plane, plane.width / 2, plane.height / 2);
    scale_features(half, f.values.data() + 18);
    for (double v : f.values) {
        if (!std::isfinite(v)) {
            throw DegenerateFit("non-finite feature value");
        }
    }
    return f;
}

double brisque_score(const ImagePlane& plane, const SvrModel& model) {
    BrisqueFeatures f = brisque_features(plane);
    double raw = svr_predict(model, f);
    return std::clamp(raw, 0.0, 150.0);
}

}  // namespace cgvm
