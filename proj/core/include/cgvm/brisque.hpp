#pragma once

#include <array>
#include <string>
#include <vector>

#include "cgvm/image.hpp"

namespace cgvm {

/// Mean-subtracted contrast-normalized coefficients: (I - mu) / (sigma + 1)
/// with mu/sigma from a 7x7 Gaussian window (sigma 7/6), symmetric borders.
ImagePlane mscn(const ImagePlane& plane);

/// 36-dim BRISQUE feature vector: per scale, 2 GGD parameters of the MSCN
/// field plus 4 AGGD parameters for each of the 4 pairwise-product
/// orientations (H, V, D1, D2); two scales, the second a bilinear
/// half-scale downsample.
struct BrisqueFeatures {
    std::array<double, 36> values{};
};

BrisqueFeatures brisque_features(const ImagePlane& plane);

/// RBF-kernel support-vector regression model: features are range-scaled
/// to [-1, 1], then score = sum_i coef_i * exp(-gamma |x - sv_i|^2) - rho.
struct SvrModel {
    double gamma = 0.0;
    double rho = 0.0;
    std::vector<std::pair<double, double>> ranges;  // 36 (min, max) pairs
    std::vector<double> coefficients;               // one per support vector
    std::vector<std::array<double, 36>> support_vectors;
};

/// Plain-text model file with sections GAMMA, RHO, RANGES (36 "min max"
/// lines) and SV (rows: coefficient then 36 values). Throws ModelLoadError.
SvrModel load_svr_model(const std::string& path);

double svr_predict(const SvrModel& model, const BrisqueFeatures& f);

/// Lower is better; clamped to [0, 150].
double brisque_score(const ImagePlane& plane, const SvrModel& model);

}  // namespace cgvm
