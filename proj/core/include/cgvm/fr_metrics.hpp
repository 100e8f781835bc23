#pragma once

#include "cgvm/image.hpp"

namespace cgvm {

/// Standard formulas vs. the literal (uncorrected) printed ones:
/// LiteralPaper drops the x10 in PSNR and the squaring in MSE.
enum class FormulaMode { Standard, LiteralPaper };

double mse(const ImagePlane& y, const ImagePlane& yhat,
           FormulaMode mode = FormulaMode::Standard);

/// PSNR is infinite when the planes are identical (MSE = 0).
struct PsnrValue {
    bool infinite = false;
    double db = 0.0;  // meaningful only when !infinite
};

PsnrValue psnr(const ImagePlane& y, const ImagePlane& yhat,
               FormulaMode mode = FormulaMode::Standard);

enum class UqiMode { Global, Windowed8x8 };

/// Universal Quality Index: correlation x luminance x contrast.
/// Windowed8x8 slides an 8x8 window with stride 1 and averages.
double uqi(const ImagePlane& y, const ImagePlane& yhat, UqiMode mode = UqiMode::Windowed8x8);

enum class SsimWindow { Gaussian11x11Sigma1_5, Global };

struct SsimParams {
    double k1 = 0.01;
    double k2 = 0.03;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    SsimWindow window = SsimWindow::Gaussian11x11Sigma1_5;
    // c1/c2 are derived from k1/k2 and the plane's dynamic range unless overridden.
    double c1_override = -1.0;
    double c2_override = -1.0;
};

struct SsimBreakdown {
    double ssim = 0.0;
    double luminance = 0.0;
    double contrast = 0.0;
    double structure = 0.0;
};

SsimBreakdown ssim(const ImagePlane& y, const ImagePlane& yhat, const SsimParams& p = {});

}  // namespace cgvm
