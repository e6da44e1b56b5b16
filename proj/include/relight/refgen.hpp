#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "relight/image.hpp"

namespace relight {

/// Inputs are pulled away from {0, 1} by this margin before the power map so
/// that log(1 - I) stays bounded (|log| <= log(1e4)).
inline constexpr double kInputClampEps = 1e-4;

double clamp_unit_interior(double v);
ImageF clamp_interior(const ImageF& img);

/// Single-value tone curve used by every code path (reference synthesis,
/// rendering, loss evaluation) so their outputs agree bit for bit.
double apply_inverted_gamma(double v, double gamma);

/// Tone curve Y = 1 - (1 - I)^gamma applied per channel on the clamped input.
/// gamma > 1 brightens, gamma < 1 darkens. Throws std::invalid_argument for
/// nonpositive gamma.
ImageF invert_gamma_map(const ImageF& img, double gamma);

/// Exposure-bracket synthesis settings. The two ranges bound the exponent
/// X = log(gamma): exponents drawn from under_range (>= 0) give gamma >= 1 and
/// brighten, compensating under-exposure; over_range (<= 0) gives gamma <= 1
/// and darkens, compensating over-exposure.
struct RefGenConfig {
    int n_each_side = 1;
    double under_lo = 0.0;
    double under_hi = 3.0;
    double over_lo = -2.0;
    double over_hi = 0.0;
    std::uint64_t seed = 0;
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const RefGenConfig& cfg);

struct ReferenceImage {
    ImageF image;
    double exponent = 0.0;  // X = log(gamma) as drawn
    double gamma = 1.0;
    bool darker = false;  // measured direction: gamma <= 1 darkens the input
    std::string label;
};

/// Draw N exponents from under_range then N from over_range (fixed draw order),
/// map each through the tone curve, and return the 2N references ordered darker
/// block first, brighter block second. Deterministic for a fixed generator state.
std::vector<ReferenceImage> sample_references(const ImageF& img, const RefGenConfig& cfg,
                                              std::mt19937_64& rng);

/// Convenience overload owning a generator seeded from cfg.seed.
std::vector<ReferenceImage> sample_references(const ImageF& img, const RefGenConfig& cfg);

/// Uniform draw in [lo, hi) built directly from the raw 64-bit stream so the
/// value sequence is identical across standard library implementations.
double uniform_in(std::mt19937_64& rng, double lo, double hi);

}  // namespace relight
