#include "cgvm/fr_metrics.hpp"

#include <cmath>
#include <vector>

#include "cgvm/errors.hpp"

namespace cgvm {

namespace {

void require_same_shape(const ImagePlane& a, const ImagePlane& b) {
    if (a.width != b.width || a.height != b.height) {
        throw DimensionMismatch(a.width, a.height, b.width, b.height);
    }
}

struct Moments {
    double mean_x, mean_y, var_x, var_y, cov;
};

Moments global_moments(const ImagePlane& x, const ImagePlane& y) {
    const size_t n = x.pixel_count();
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double a = x.samples[i], b = y.samples[i];
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    Moments m;
    m.mean_x = sx / n;
    m.mean_y = sy / n;
    m.var_x = std::max(sxx / n - m.mean_x * m.mean_x, 0.0);
    m.var_y = std::max(syy / n - m.mean_y * m.mean_y, 0.0);
    m.cov = sxy / n - m.mean_x * m.mean_y;
    return m;
}

// Eq-by-term UQI with the degenerate convention: a 0/0 term is 1 when both
// operand statistics vanish, 0 otherwise.
double uqi_from_moments(const Moments& m) {
    double sdx = std::sqrt(m.var_x);
    double sdy = std::sqrt(m.var_y);

    double corr;
    if (sdx == 0.0 && sdy == 0.0) {
        corr = 1.0;
    } else if (sdx == 0.0 || sdy == 0.0) {
        corr = 0.0;
    } else {
        corr = m.cov / (sdx * sdy);
    }

    double lum;
    double mden = m.mean_x * m.mean_x + m.mean_y * m.mean_y;
    if (mden == 0.0) {
        lum = 1.0;
    } else {
        lum = 2.0 * m.mean_x * m.mean_y / mden;
    }

    double con;
    double vden = m.var_x + m.var_y;
    if (vden == 0.0) {
        con = 1.0;
    } else {
        con = 2.0 * sdx * sdy / vden;
    }

    return corr * lum * con;
}

// Gaussian kernel normalized to sum 1.
std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(size);
    double sum = 0.0;
    int half = size / 2;
    for (int i = 0; i < size; ++i) {
        double d = i - half;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable valid convolution with a symmetric 1-D kernel.
std::vector<double> convolve_valid(const std::vector<double>& img, int w, int h,
                                   const std::vector<double>& k, int& out_w, int& out_h) {
    const int ks = int(k.size());
    out_w = w - ks + 1;
    out_h = h - ks + 1;
    std::vector<double> horiz(size_t(out_w) * h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int i = 0; i < ks; ++i) acc += k[i] * img[size_t(r) * w + c + i];
            horiz[size_t(r) * out_w + c] = acc;
        }
    }
    std::vector<double> out(size_t(out_w) * out_h);
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int i = 0; i < ks; ++i) acc += k[i] * horiz[size_t(r + i) * out_w + c];
            out[size_t(r) * out_w + c] = acc;
        }
    }
    return out;
}

double pow_component(double v, double e) {
    if (e == 1.0) return v;
    return std::pow(std::max(v, 0.0), e);
}

}  // namespace

double mse(const ImagePlane& y, const ImagePlane& yhat, FormulaMode mode) {
    require_same_shape(y, yhat);
    const size_t n = y.pixel_count();
    double acc = 0.0;
    if (mode == FormulaMode::Standard) {
        for (size_t i = 0; i < n; ++i) {
            double d = y.samples[i] - yhat.samples[i];
            acc += d * d;
        }
    } else {
        // Literal printed form: signed differences, no squaring.
        for (size_t i = 0; i < n; ++i) {
            acc += y.samples[i] - yhat.samples[i];
        }
    }
    return acc / double(n);
}

PsnrValue psnr(const ImagePlane& y, const ImagePlane& yhat, FormulaMode mode) {
    require_same_shape(y, yhat);
    double e = mse(y, yhat, FormulaMode::Standard);
    if (e == 0.0) {
        return {.infinite = true};
    }
    double r = y.dynamic_range;
    double v = std::log10(r * r / e);
    if (mode == FormulaMode::Standard) v *= 10.0;
    return {.infinite = false, .db = v};
}

double uqi(const ImagePlane& y, const ImagePlane& yhat, UqiMode mode) {
    require_same_shape(y, yhat);
    if (mode == UqiMode::Global) {
        return uqi_from_moments(global_moments(y, yhat));
    }

    const int win = 8;
    if (y.width < win || y.height < win) {
        throw TooSmallForWindow(std::min(y.width, y.height), win);
    }

    // Sliding 8x8 windows via running column sums.
    const int w = y.width, h = y.height;
    const int ow = w - win + 1, oh = h - win + 1;
    const double n = double(win) * win;
    double total = 0.0;
    std::vector<double> cx(w), cy(w), cxx(w), cyy(w), cxy(w);
    for (int r0 = 0; r0 < oh; ++r0) {
        if (r0 == 0) {
            std::fill(cx.begin(), cx.end(), 0.0);
            std::fill(cy.begin(), cy.end(), 0.0);
            std::fill(cxx.begin(), cxx.end(), 0.0);
            std::fill(cyy.begin(), cyy.end(), 0.0);
            std::fill(cxy.begin(), cxy.end(), 0.0);
            for (int r = 0; r < win; ++r) {
                for (int c = 0; c < w; ++c) {
                    double a = y.at(r, c), b = yhat.at(r, c);
                    cx[c] += a;
                    cy[c] += b;
                    cxx[c] += a * a;
                    cyy[c] += b * b;
                    cxy[c] += a * b;
                }
            }
        } else {
            for (int c = 0; c < w; ++c) {
                double a0 = y.at(r0 - 1, c), b0 = yhat.at(r0 - 1, c);
                double a1 = y.at(r0 + win - 1, c), b1 = yhat.at(r0 + win - 1, c);
                cx[c] += a1 - a0;
                cy[c] += b1 - b0;
                cxx[c] += a1 * a1 - a0 * a0;
                cyy[c] += b1 * b1 - b0 * b0;
                cxy[c] += a1 * b1 - a0 * b0;
            }
        }
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (int c = 0; c < win; ++c) {
            sx += cx[c];
            sy += cy[c];
            sxx += cxx[c];
            syy += cyy[c];
            sxy += cxy[c];
        }
        for (int c0 = 0; c0 < ow; ++c0) {
            if (c0 > 0) {
                sx += cx[c0 + win - 1] - cx[c0 - 1];
                sy += cy[c0 + win - 1] - cy[c0 - 1];
                sxx += cxx[c0 + win - 1] - cxx[c0 - 1];
                syy += cyy[c0 + win - 1] - cyy[c0 - 1];
                sxy += cxy[c0 + win - 1] - cxy[c0 - 1];
            }
            Moments m;
            m.mean_x = sx / n;
            m.mean_y = sy / n;
            m.var_x = std::max(sxx / n - m.mean_x * m.mean_x, 0.0);
            m.var_y = std::max(syy / n - m.mean_y * m.mean_y, 0.0);
            m.cov = sxy / n - m.mean_x * m.mean_y;
            total += uqi_from_moments(m);
        }
    }
    return total / (double(ow) * oh);
}

SsimBreakdown ssim(const ImagePlane& y, const ImagePlane& yhat, const SsimParams& p) {
    require_same_shape(y, yhat);

    const double L = y.dynamic_range;
    const double c1 = p.c1_override >= 0.0 ? p.c1_override : (p.k1 * L) * (p.k1 * L);
    const double c2 = p.c2_override >= 0.0 ? p.c2_override : (p.k2 * L) * (p.k2 * L);
    const double c3 = c2 / 2.0;

    std::vector<Moments> windows;
    if (p.window == SsimWindow::Global) {
        windows.push_back(global_moments(y, yhat));
    } else {
        const int ks = 11;
        if (y.width < ks || y.height < ks) {
            throw TooSmallForWindow(std::min(y.width, y.height), ks);
        }
        auto kern = gaussian_kernel(ks, 1.5);
        const int w = y.width, h = y.height;
        std::vector<double> xx(y.pixel_count()), yy(y.pixel_count()), xy(y.pixel_count());
        for (size_t i = 0; i < y.pixel_count(); ++i) {
            xx[i] = y.samples[i] * y.samples[i];
            yy[i] = yhat.samples[i] * yhat.samples[i];
            xy[i] = y.samples[i] * yhat.samples[i];
        }
        int ow, oh;
        auto mu_x = convolve_valid(y.samples, w, h, kern, ow, oh);
        auto mu_y = convolve_valid(yhat.samples, w, h, kern, ow, oh);
        auto m_xx = convolve_valid(xx, w, h, kern, ow, oh);
        auto m_yy = convolve_valid(yy, w, h, kern, ow, oh);
        auto m_xy = convolve_valid(xy, w, h, kern, ow, oh);
        windows.resize(mu_x.size());
        for (size_t i = 0; i < mu_x.size(); ++i) {
            Moments m;
            m.mean_x = mu_x[i];
            m.mean_y = mu_y[i];
            m.var_x = std::max(m_xx[i] - mu_x[i] * mu_x[i], 0.0);
            m.var_y = std::max(m_yy[i] - mu_y[i] * mu_y[i], 0.0);
            m.cov = m_xy[i] - mu_x[i] * mu_y[i];
            windows[i] = m;
        }
    }

    double acc_ssim = 0, acc_l = 0, acc_c = 0, acc_s = 0;
    for (const Moments& m : windows) {
        double sdx = std::sqrt(m.var_x);
        double sdy = std::sqrt(m.var_y);
        double l = (2.0 * m.mean_x * m.mean_y + c1) /
                   (m.mean_x * m.mean_x + m.mean_y * m.mean_y + c1);
        double c = (2.0 * sdx * sdy + c2) / (m.var_x + m.var_y + c2);
        double s = (m.cov + c3) / (sdx * sdy + c3);
        acc_l += l;
        acc_c += c;
        acc_s += s;
        acc_ssim += pow_component(l, p.alpha) * pow_component(c, p.beta) * pow_component(s, p.gamma);
    }
    const double n = double(windows.size());
    return {.ssim = acc_ssim / n,
            .luminance = acc_l / n,
            .contrast = acc_c / n,
            .structure = acc_s / n};
}

}  // namespace cgvm
