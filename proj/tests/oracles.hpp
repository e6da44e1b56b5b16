// Independent brute-force reference implementations used to cross-check the
// library. Everything here is deliberately written as plain double loops with
// no shared code paths with src/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "relight/image.hpp"

namespace oracles {

using relight::ImageF;
using relight::PlaneF;

// k x k clamped-window mean, O(HW k^2).
inline PlaneF box_mean(const PlaneF& p, int k) {
    const int w = p.width, h = p.height, r = k / 2;
    PlaneF out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int yy = std::clamp(y + dy, 0, h - 1);
                    const int xx = std::clamp(x + dx, 0, w - 1);
                    s += p.at(xx, yy);
                }
            }
            out.at(x, y) = s / (static_cast<double>(k) * k);
        }
    }
    return out;
}

// Centered population variance (independent formulation from the library's
// E[x^2] - E[x]^2 route).
inline PlaneF box_var(const PlaneF& p, int k) {
    const int w = p.width, h = p.height, r = k / 2;
    const PlaneF mu = oracles::box_mean(p, k);
    PlaneF out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int yy = std::clamp(y + dy, 0, h - 1);
                    const int xx = std::clamp(x + dx, 0, w - 1);
                    const double d = p.at(xx, yy) - mu.at(x, y);
                    s += d * d;
                }
            }
            out.at(x, y) = s / (static_cast<double>(k) * k);
        }
    }
    return out;
}

inline double rec_loss(const ImageF& a, const ImageF& b) {
    double s = 0.0;
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x)
            for (int c = 0; c < 3; ++c) {
                const double d = a.at(x, y, c) - b.at(x, y, c);
                s += d * d;
            }
    return s / (3.0 * a.width * a.height);
}

// L1 total variation of a gamma grid (values, not parameters).
inline double tv_loss(const std::vector<double>& gamma, int w, int h) {
    double s = 0.0;
    auto at = [&](int x, int y, int c) { return gamma[(static_cast<std::size_t>(y) * w + x) * 3 + c]; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                if (x + 1 < w) s += std::abs(at(x + 1, y, c) - at(x, y, c));
                if (y + 1 < h) s += std::abs(at(x, y + 1, c) - at(x, y, c));
            }
    return s / (3.0 * w * h);
}

// Per-pixel composite from separately supplied measure planes.
inline PlaneF composite(const PlaneF& contrast, const PlaneF& saturation,
                        const PlaneF& exposedness, double eps_e) {
    PlaneF out(contrast.width, contrast.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = contrast.data[i] * saturation.data[i] / (exposedness.data[i] + eps_e);
    }
    return out;
}

// Winner indices by scanning precomputed score planes, lowest index on ties.
inline std::vector<int> argmax_winners(const std::vector<PlaneF>& scores) {
    const std::size_t n = scores.front().data.size();
    std::vector<int> out(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 1; j < scores.size(); ++j) {
            if (scores[j].data[i] > scores[out[i]].data[i]) out[i] = static_cast<int>(j);
        }
    }
    return out;
}

// Central-difference gradient of an arbitrary scalar function of a parameter
// vector.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> params, std::size_t index, double h) {
    params[index] += h;
    const double up = f(params);
    params[index] -= 2.0 * h;
    const double down = f(params);
    return (up - down) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Synthetic inputs
// ---------------------------------------------------------------------------

inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline PlaneF random_plane(int w, int h, std::mt19937_64& rng) {
    PlaneF p(w, h);
    for (double& v : p.data) v = unit_draw(rng);
    return p;
}

inline ImageF random_image(int w, int h, std::mt19937_64& rng) {
    ImageF img(w, h);
    for (double& v : img.data) v = unit_draw(rng);
    return img;
}

// Smooth, colorful, roughly mid-exposed test scene: per-channel sinusoid mix
// with random phases, mapped into [0.08, 0.92].
inline ImageF smooth_scene(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double phase[3][4], freq[3][4];
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 4; ++k) {
            phase[c][k] = unit_draw(rng) * 6.283185307179586;
            freq[c][k] = 0.5 + 3.0 * unit_draw(rng);
        }
    ImageF img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u = static_cast<double>(x) / w;
            const double v = static_cast<double>(y) / h;
            for (int c = 0; c < 3; ++c) {
                double s = std::sin(6.283185307179586 * (freq[c][0] * u) + phase[c][0]) +
                           std::sin(6.283185307179586 * (freq[c][1] * v) + phase[c][1]) +
                           std::sin(6.283185307179586 * (freq[c][2] * (u + v)) + phase[c][2]) +
                           std::sin(6.283185307179586 * (freq[c][3] * (u - v)) + phase[c][3]);
                img.at(x, y, c) = 0.5 + 0.42 * (s / 4.0);
            }
        }
    }
    return img;
}

// Spatially varying plain gamma distortion I^g(x,y); brighter_direction pulls
// values up (g < 1), otherwise down (g > 1). Deliberately a different mapping
// family from the library's inverted curve.
inline ImageF gamma_corrupt(const ImageF& img, bool brighter_direction, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double a = unit_draw(rng) * 6.283185307179586;
    const double lo = brighter_direction ? 0.28 : 1.9;
    const double hi = brighter_direction ? 0.55 : 3.2;
    ImageF out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double u = static_cast<double>(x) / img.width;
            const double v = static_cast<double>(y) / img.height;
            const double t = 0.5 + 0.5 * std::sin(6.283185307179586 * (u * 0.7 + v * 0.4) + a);
            const double g = lo + (hi - lo) * t;
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = std::pow(img.at(x, y, c), g);
        }
    }
    return out;
}

// Mixed-exposure convergence corpus image: a tonal ramp times a smoothly
// varying exposure field, tinted per channel so saturation is nonzero.
inline ImageF ramp_exposure_scene(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double a = unit_draw(rng) * 6.283185307179586;
    const double b = unit_draw(rng) * 6.283185307179586;
    ImageF img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u = static_cast<double>(x) / (w - 1);
            const double v = static_cast<double>(y) / (h - 1);
            const double ramp = 0.05 + 0.9 * u;
            const double expo = 0.35 + 0.65 * (0.5 + 0.5 * std::sin(6.283185307179586 * (1.3 * v) + a) *
                                                         std::cos(6.283185307179586 * (0.8 * u) + b));
            const double tint[3] = {1.0, 0.85, 0.7};
            for (int c = 0; c < 3; ++c) {
                img.at(x, y, c) = std::clamp(ramp * expo * tint[c], 0.0, 1.0);
            }
        }
    }
    return img;
}

}  // namespace oracles
