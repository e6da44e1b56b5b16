#include "relight/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relight {

bool is_valid(const ImageF& img) {
    if (img.width <= 0 || img.height <= 0) return false;
    if (img.data.size() != img.pixel_count() * 3) return false;
    for (double v : img.data) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) return false;
    }
    return true;
}

PlaneF luminance(const ImageF& img, LuminanceMode mode) {
    PlaneF out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    if (mode == LuminanceMode::ChannelMean) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* px = &img.data[i * 3];
            out.data[i] = (px[0] + px[1] + px[2]) / 3.0;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double* px = &img.data[i * 3];
            out.data[i] = 0.2126 * px[0] + 0.7152 * px[1] + 0.0722 * px[2];
        }
    }
    return out;
}

namespace {

void check_window(int k) {
    if (k < 1 || k % 2 == 0) {
        throw std::invalid_argument("box filter window must be odd and >= 1, got " +
                                    std::to_string(k));
    }
}

// Horizontal clamped box sum (not normalized), one row at a time via a sliding
// window; the telescoping update stays correct under index clamping because
// the clamp is applied to absolute positions.
void box_sum_rows(const PlaneF& src, PlaneF& dst, int k) {
    const int w = src.width, h = src.height, r = k / 2;
    auto clampx = [w](int x) { return std::clamp(x, 0, w - 1); };
    for (int y = 0; y < h; ++y) {
        const double* in = &src.data[static_cast<std::size_t>(y) * w];
        double* out = &dst.data[static_cast<std::size_t>(y) * w];
        double s = 0.0;
        for (int d = -r; d <= r; ++d) s += in[clampx(d)];
        out[0] = s;
        for (int x = 1; x < w; ++x) {
            s += in[clampx(x + r)] - in[clampx(x - 1 - r)];
            out[x] = s;
        }
    }
}

// Vertical pass over the row sums; same scheme down columns.
void box_sum_cols(const PlaneF& src, PlaneF& dst, int k) {
    const int w = src.width, h = src.height, r = k / 2;
    auto clampy = [h](int y) { return std::clamp(y, 0, h - 1); };
    std::vector<double> s(static_cast<std::size_t>(w), 0.0);
    for (int d = -r; d <= r; ++d) {
        const double* row = &src.data[static_cast<std::size_t>(clampy(d)) * w];
        for (int x = 0; x < w; ++x) s[x] += row[x];
    }
    for (int x = 0; x < w; ++x) dst.data[x] = s[x];
    for (int y = 1; y < h; ++y) {
        const double* add = &src.data[static_cast<std::size_t>(clampy(y + r)) * w];
        const double* sub = &src.data[static_cast<std::size_t>(clampy(y - 1 - r)) * w];
        double* out = &dst.data[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            s[x] += add[x] - sub[x];
            out[x] = s[x];
        }
    }
}

}  // namespace

PlaneF box_mean(const PlaneF& p, int k) {
    check_window(k);
    PlaneF tmp(p.width, p.height), out(p.width, p.height);
    box_sum_rows(p, tmp, k);
    box_sum_cols(tmp, out, k);
    const double inv = 1.0 / (static_cast<double>(k) * k);
    for (double& v : out.data) v *= inv;
    return out;
}

PlaneF box_var(const PlaneF& p, int k) {
    check_window(k);
    PlaneF sq(p.width, p.height);
    for (std::size_t i = 0; i < p.data.size(); ++i) sq.data[i] = p.data[i] * p.data[i];
    PlaneF m = box_mean(p, k);
    PlaneF m2 = box_mean(sq, k);
    PlaneF out(p.width, p.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = std::max(0.0, m2.data[i] - m.data[i] * m.data[i]);
    }
    return out;
}

void resize_bilinear_raw(const double* src, int src_w, int src_h, int channels,
                         double* dst, int dst_w, int dst_h) {
    const double rx = static_cast<double>(src_w) / dst_w;
    const double ry = static_cast<double>(src_h) / dst_h;
    for (int y = 0; y < dst_h; ++y) {
        const double sy = (y + 0.5) * ry - 0.5;
        int y0 = static_cast<int>(std::floor(sy));
        const double fy = sy - y0;
        int y1 = std::clamp(y0 + 1, 0, src_h - 1);
        y0 = std::clamp(y0, 0, src_h - 1);
        for (int x = 0; x < dst_w; ++x) {
            const double sx = (x + 0.5) * rx - 0.5;
            int x0 = static_cast<int>(std::floor(sx));
            const double fx = sx - x0;
            int x1 = std::clamp(x0 + 1, 0, src_w - 1);
            x0 = std::clamp(x0, 0, src_w - 1);
            const double* p00 = src + (static_cast<std::size_t>(y0) * src_w + x0) * channels;
            const double* p01 = src + (static_cast<std::size_t>(y0) * src_w + x1) * channels;
            const double* p10 = src + (static_cast<std::size_t>(y1) * src_w + x0) * channels;
            const double* p11 = src + (static_cast<std::size_t>(y1) * src_w + x1) * channels;
            double* o = dst + (static_cast<std::size_t>(y) * dst_w + x) * channels;
            for (int c = 0; c < channels; ++c) {
                const double top = p00[c] * (1.0 - fx) + p01[c] * fx;
                const double bot = p10[c] * (1.0 - fx) + p11[c] * fx;
                o[c] = top * (1.0 - fy) + bot * fy;
            }
        }
    }
}

ImageF resize_bilinear(const ImageF& img, int w, int h) {
    if (w < 1 || h < 1) throw std::invalid_argument("resize target must be >= 1x1");
    ImageF out(w, h);
    resize_bilinear_raw(img.data.data(), img.width, img.height, 3, out.data.data(), w, h);
    return out;
}

double plane_mean(const PlaneF& p) {
    double s = 0.0;
    for (double v : p.data) s += v;
    return p.data.empty() ? 0.0 : s / static_cast<double>(p.data.size());
}

}  // namespace relight
