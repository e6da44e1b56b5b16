#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relight/fusion.hpp"
#include "relight/image.hpp"
#include "relight/quality.hpp"
#include "relight/refgen.hpp"

namespace relight {

/// Log-gamma parameters are kept inside [-kThetaClamp, kThetaClamp].
inline constexpr double kThetaClamp = 8.0;

/// Per-pixel, per-channel tone-curve exponent map, parameterized as
/// theta = log(gamma) so gamma stays strictly positive.
struct GammaField {
    int width = 0;
    int height = 0;
    std::vector<double> theta;  // H*W*3 row-major, like ImageF

    static GammaField zeros(int w, int h) {
        GammaField g;
        g.width = w;
        g.height = h;
        g.theta.assign(static_cast<std::size_t>(w) * h * 3, 0.0);
        return g;
    }

    std::size_t size() const { return theta.size(); }
    std::vector<double> gamma() const;  // elementwise exp(theta)
};

struct LossReport {
    double rec = 0.0;
    double tv = 0.0;
    double total = 0.0;
    double alpha = 0.0;
};

enum class OptimizerKind { Adam, Sgd };
enum class FusionMode { Argmax, WeightedSum };

struct EnhanceConfig {
    RefGenConfig refgen;
    QualityConfig quality;
    double alpha = 5.0;  // TV weight; 5 suits textured scenes, ~500 flat ones
    int epochs = 20;
    int inner_steps = 100;
    double lr = 0.05;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int work_size = 256;  // optimization resolution; 0 = always native
    FusionMode fusion = FusionMode::Argmax;
};

void validate(const EnhanceConfig& cfg);

/// Mean squared error over all 3HW values. Throws on dimension mismatch.
double rec_loss(const ImageF& output, const ImageF& target);

/// Anisotropic L1 total variation of gamma (not theta): forward differences,
/// in-bounds terms only, normalized by 3HW.
double tv_loss(const GammaField& g);

/// Exact loss and full analytic gradient w.r.t. theta for
///   L = rec_loss(1 - (1-I)^gamma, target) + alpha * tv_loss(gamma).
/// The input is clamped away from {0,1} internally, consistent with render.
LossReport loss_and_grad(const ImageF& input, const ImageF& target, const GammaField& g,
                         double alpha, std::vector<double>& grad_theta);

/// First/second moment buffers; persists across epochs of one enhancement job.
struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t steps = 0;
};

/// Run cfg.inner_steps updates on g in place, returning the per-step losses
/// (each evaluated at the pre-update parameters). Theta is re-clamped after
/// every step.
std::vector<LossReport> optimize_epoch(const ImageF& input, const ImageF& target, GammaField& g,
                                       OptimizerState& opt, const EnhanceConfig& cfg);

/// Apply the tone curve. The field must either match the input's dimensions or
/// be upsampled first: mismatched dimensions are resampled bilinearly in
/// theta-space to the input's size.
ImageF render(const ImageF& input, const GammaField& g);

/// Bilinear resample of the field in theta-space.
GammaField resize_field(const GammaField& g, int w, int h);

struct EpochRecord {
    int epoch = 0;             // 1-based
    LossReport loss;           // last inner step of the epoch
    double mse_prev_gt = 0.0;  // MSE between this epoch's pseudo GT and the previous one (0 at epoch 1)
    double mean_score_gt = 0.0;      // mean winning composite of the pseudo GT
    double mean_score_output = 0.0;  // mean composite of the epoch's rendered output
};

struct EpochTrace {
    std::vector<EpochRecord> records;
    void write_csv(std::ostream& out) const;
};

struct EnhanceResult {
    ImageF output;          // native resolution
    GammaField gamma;       // native resolution field actually applied
    EpochTrace trace;
    ImageF last_pseudo_gt;  // final epoch's fusion target, at work resolution
};

/// Full progressive enhancement: per epoch, draw fresh references, fuse the
/// candidate set (input, previous output, references) into a pseudo GT, then
/// descend on the tone-map parameters against it. Deterministic for a fixed
/// seed.
EnhanceResult progressive_enhance(const ImageF& input, const EnhanceConfig& cfg);

}  // namespace relight
