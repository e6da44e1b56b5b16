#include "relight/metrics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace relight {

double psnr(const ImageF& a, const ImageF& b) {
    if (!a.same_size(b)) throw std::invalid_argument("psnr: image sizes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.data.size());
    if (mse < 1e-10) return 100.0;
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2 with L = 1
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> g{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

}  // namespace

double ssim(const ImageF& a, const ImageF& b) {
    if (!a.same_size(b)) throw std::invalid_argument("ssim: image sizes differ");
    if (a.width < kWindow || a.height < kWindow) {
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    }

    const PlaneF la = luminance(a);
    const PlaneF lb = luminance(b);
    static const std::array<double, kWindow> taps = gaussian_taps();
    const int r = kWindow / 2;

    double acc = 0.0;
    std::size_t count = 0;
    for (int y = r; y < a.height - r; ++y) {
        for (int x = r; x < a.width - r; ++x) {
            double mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0, mxy = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const double wy = taps[dy + r];
                const double* rowa = &la.data[static_cast<std::size_t>(y + dy) * a.width + x - r];
                const double* rowb = &lb.data[static_cast<std::size_t>(y + dy) * a.width + x - r];
                for (int dx = 0; dx < kWindow; ++dx) {
                    const double w = wy * taps[dx];
                    const double va = rowa[dx];
                    const double vb = rowb[dx];
                    mx += w * va;
                    my += w * vb;
                    mxx += w * (va * va);
                    myy += w * (vb * vb);
                    mxy += w * (va * vb);  // grouping keeps ssim(a,b) == ssim(b,a) bitwise
                }
            }
            const double var_x = mxx - mx * mx;
            const double var_y = myy - my * my;
            const double cov = mxy - mx * my;
            const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
            const double den = (mx * mx + my * my + kC1) * (var_x + var_y + kC2);
            acc += num / den;
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

MetricReport evaluate(const ImageF& a, const ImageF& b) {
    return MetricReport{psnr(a, b), ssim(a, b)};
}

}  // namespace relight
