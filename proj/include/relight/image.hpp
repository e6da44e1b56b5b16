#pragma once

#include <cstddef>
#include <vector>

namespace relight {

/// Row-major H x W x 3 image, sRGB channel order, values in [0, 1].
struct ImageF {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ImageF() = default;
    ImageF(int w, int h, double fill = 0.0)
        : width(w),
          height(h),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, fill) {}

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    bool same_size(const ImageF& o) const { return width == o.width && height == o.height; }
};

/// Single-channel float plane with the same row-major layout.
struct PlaneF {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    PlaneF() = default;
    PlaneF(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

enum class LuminanceMode {
    ChannelMean,  // (R + G + B) / 3
    Rec709,       // 0.2126 R + 0.7152 G + 0.0722 B
};

/// True if dimensions are consistent and every element is finite and in [0, 1].
bool is_valid(const ImageF& img);

/// Per-pixel intensity plane.
PlaneF luminance(const ImageF& img, LuminanceMode mode = LuminanceMode::ChannelMean);

/// k x k windowed mean with clamp-to-edge borders; every output averages exactly
/// k*k samples. O(HW) independent of k. Throws std::invalid_argument unless k is odd, >= 1.
PlaneF box_mean(const PlaneF& p, int k);

/// k x k windowed population variance, clamped to >= 0 against rounding.
PlaneF box_var(const PlaneF& p, int k);

/// Pixel-center-aligned bilinear resample.
ImageF resize_bilinear(const ImageF& img, int w, int h);

/// Same resampling on a raw interleaved buffer (any channel count); used for
/// gamma-field upsampling where values are not confined to [0, 1].
void resize_bilinear_raw(const double* src, int src_w, int src_h, int channels,
                         double* dst, int dst_w, int dst_h);

/// Sequential mean of a plane (fixed summation order).
double plane_mean(const PlaneF& p);

}  // namespace relight
