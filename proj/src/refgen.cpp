#include "relight/refgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relight {

double clamp_unit_interior(double v) {
    return std::clamp(v, kInputClampEps, 1.0 - kInputClampEps);
}

ImageF clamp_interior(const ImageF& img) {
    ImageF out = img;
    for (double& v : out.data) v = clamp_unit_interior(v);
    return out;
}

double apply_inverted_gamma(double v, double gamma) {
    const double base = 1.0 - clamp_unit_interior(v);
    return 1.0 - std::exp(gamma * std::log(base));
}

ImageF invert_gamma_map(const ImageF& img, double gamma) {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gamma must be > 0, got " + std::to_string(gamma));
    }
    ImageF out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = apply_inverted_gamma(img.data[i], gamma);
    }
    return out;
}

void validate(const RefGenConfig& cfg) {
    if (cfg.n_each_side < 1) {
        throw std::invalid_argument("n_refs must be >= 1, got " + std::to_string(cfg.n_each_side));
    }
    if (cfg.under_lo > cfg.under_hi || cfg.over_lo > cfg.over_hi) {
        throw std::invalid_argument("exponent range is inverted");
    }
    if (cfg.under_lo < 0.0) {
        throw std::invalid_argument("under_lo must be >= 0 (brightening exponents)");
    }
    if (cfg.over_hi > 0.0) {
        throw std::invalid_argument("over_hi must be <= 0 (darkening exponents)");
    }
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    // 53-bit mantissa draw in [0, 1), affinely mapped.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

std::vector<ReferenceImage> sample_references(const ImageF& img, const RefGenConfig& cfg,
                                              std::mt19937_64& rng) {
    validate(cfg);
    const int n = cfg.n_each_side;

    // Draw order is fixed (brightening block, then darkening block) and is part
    // of the determinism contract; output order is darker block first.
    std::vector<double> x_bright(n), x_dark(n);
    for (int i = 0; i < n; ++i) x_bright[i] = uniform_in(rng, cfg.under_lo, cfg.under_hi);
    for (int i = 0; i < n; ++i) x_dark[i] = uniform_in(rng, cfg.over_lo, cfg.over_hi);

    std::vector<ReferenceImage> out;
    out.reserve(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ReferenceImage r;
        r.exponent = x_dark[i];
        r.gamma = std::exp(x_dark[i]);
        r.darker = true;
        r.label = "ref_darker_" + std::to_string(i);
        r.image = invert_gamma_map(img, r.gamma);
        out.push_back(std::move(r));
    }
    for (int i = 0; i < n; ++i) {
        ReferenceImage r;
        r.exponent = x_bright[i];
        r.gamma = std::exp(x_bright[i]);
        r.darker = false;
        r.label = "ref_brighter_" + std::to_string(i);
        r.image = invert_gamma_map(img, r.gamma);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ReferenceImage> sample_references(const ImageF& img, const RefGenConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    return sample_references(img, cfg, rng);
}

}  // namespace relight
