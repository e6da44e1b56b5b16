#pragma once

#include "relight/image.hpp"

namespace relight {

struct MetricReport {
    double psnr = 0.0;  // decibels, capped at 100
    double ssim = 0.0;  // in [-1, 1]
};

/// 10*log10(1/MSE) over all 3HW values with peak 1.0; MSE below 1e-10 caps the
/// result at 100 dB. Throws on dimension mismatch.
double psnr(const ImageF& a, const ImageF& b);

/// Single-scale SSIM on luminance: 11x11 Gaussian window (sigma 1.5),
/// K1=0.01, K2=0.03, L=1, averaged over fully interior window positions.
/// Throws if either dimension is below the window size.
double ssim(const ImageF& a, const ImageF& b);

MetricReport evaluate(const ImageF& a, const ImageF& b);

}  // namespace relight
