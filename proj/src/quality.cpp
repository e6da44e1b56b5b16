#include "relight/quality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relight {

void validate(const QualityConfig& cfg) {
    if (cfg.patch_k < 1 || cfg.patch_k % 2 == 0) {
        throw std::invalid_argument("patch_k must be odd and >= 1, got " +
                                    std::to_string(cfg.patch_k));
    }
    if (!(cfg.mu_target > 0.0 && cfg.mu_target < 1.0)) {
        throw std::invalid_argument("mu must lie in (0, 1), got " + std::to_string(cfg.mu_target));
    }
    if (cfg.eps_e < 0.0 || cfg.eps_s < 0.0) {
        throw std::invalid_argument("eps_e and eps_s must be >= 0");
    }
}

PlaneF well_exposedness(const ImageF& img, const QualityConfig& cfg) {
    PlaneF mu = box_mean(luminance(img), cfg.patch_k);
    for (double& v : mu.data) v = std::abs(v - cfg.mu_target);
    return mu;
}

PlaneF local_contrast(const ImageF& img, const QualityConfig& cfg) {
    return box_var(luminance(img), cfg.patch_k);
}

PlaneF color_saturation(const ImageF& img, const QualityConfig& cfg) {
    PlaneF out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double* px = &img.data[i * 3];
        const double hi = std::max({px[0], px[1], px[2]});
        const double lo = std::min({px[0], px[1], px[2]});
        out.data[i] = (hi - lo) / std::max(hi, cfg.eps_s);
    }
    return out;
}

QualityMaps composite_score(const ImageF& img, const QualityConfig& cfg) {
    validate(cfg);
    QualityMaps maps;
    maps.exposedness = well_exposedness(img, cfg);
    maps.contrast = local_contrast(img, cfg);
    maps.saturation = color_saturation(img, cfg);
    maps.composite = PlaneF(img.width, img.height);
    for (std::size_t i = 0; i < maps.composite.data.size(); ++i) {
        maps.composite.data[i] = maps.contrast.data[i] * maps.saturation.data[i] /
                                 (maps.exposedness.data[i] + cfg.eps_e);
    }
    return maps;
}

}  // namespace relight
