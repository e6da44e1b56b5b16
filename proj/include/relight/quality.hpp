#pragma once

#include "relight/image.hpp"

namespace relight {

struct QualityConfig {
    int patch_k = 25;        // window for the patch statistics
    double mu_target = 0.5;  // well-exposed intensity level
    double eps_e = 1e-3;     // additive guard on the exposedness denominator
    double eps_s = 1e-6;     // divide guard for saturation of near-black pixels
};

void validate(const QualityConfig& cfg);

/// Per-pixel measures for one candidate image. Lower exposedness is better;
/// higher contrast, saturation, and composite are better.
struct QualityMaps {
    PlaneF exposedness;  // |patch mean - mu_target|
    PlaneF contrast;     // patch population variance
    PlaneF saturation;   // (max - min) / max over RGB
    PlaneF composite;    // contrast * saturation / (exposedness + eps_e)
};

PlaneF well_exposedness(const ImageF& img, const QualityConfig& cfg);
PlaneF local_contrast(const ImageF& img, const QualityConfig& cfg);
PlaneF color_saturation(const ImageF& img, const QualityConfig& cfg);
QualityMaps composite_score(const ImageF& img, const QualityConfig& cfg);

}  // namespace relight
