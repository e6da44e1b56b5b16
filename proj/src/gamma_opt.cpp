#include "relight/gamma_opt.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace relight {

std::vector<double> GammaField::gamma() const {
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = std::exp(theta[i]);
    return out;
}

void validate(const EnhanceConfig& cfg) {
    validate(cfg.refgen);
    validate(cfg.quality);
    if (cfg.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
    if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (cfg.inner_steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("lr must be > 0");
    if (cfg.work_size < 0) throw std::invalid_argument("work_size must be >= 0");
}

double rec_loss(const ImageF& output, const ImageF& target) {
    if (!output.same_size(target)) {
        throw std::invalid_argument("rec_loss: image sizes differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < output.data.size(); ++i) {
        const double d = output.data[i] - target.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(output.data.size());
}

double tv_loss(const GammaField& g) {
    const int w = g.width, h = g.height;
    const std::vector<double> gamma = g.gamma();
    double acc = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
            for (int c = 0; c < 3; ++c) {
                if (x + 1 < w) acc += std::abs(gamma[i + 3 + c] - gamma[i + c]);
                if (y + 1 < h) acc += std::abs(gamma[i + 3 * static_cast<std::size_t>(w) + c] - gamma[i + c]);
            }
        }
    }
    return acc / static_cast<double>(g.size());
}

namespace {

double sign_of(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

// Core evaluation on a precomputed log(1 - clamp(I)) grid. grad_theta may be
// null when only the loss is needed.
LossReport eval_loss_grad(const std::vector<double>& log_base, const ImageF& target,
                          const GammaField& g, double alpha, std::vector<double>* grad_theta,
                          std::vector<double>& gamma_buf) {
    const std::size_t n = g.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const int w = g.width, h = g.height;

    gamma_buf.resize(n);
    if (grad_theta) grad_theta->assign(n, 0.0);

    // Reconstruction term: Yhat = 1 - exp(gamma * log_base), so
    // dYhat/dgamma = -exp(gamma * log_base) * log_base.
    double rec_acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double gamma = std::exp(g.theta[i]);
        gamma_buf[i] = gamma;
        const double pow_term = std::exp(gamma * log_base[i]);
        const double diff = (1.0 - pow_term) - target.data[i];
        rec_acc += diff * diff;
        if (grad_theta) {
            const double d_rec_d_gamma = 2.0 * inv_n * diff * (-pow_term * log_base[i]);
            (*grad_theta)[i] = d_rec_d_gamma;  // still d/dgamma; chain rule applied below
        }
    }

    // TV term on gamma with sign(0) = 0 subgradient.
    double tv_acc = 0.0;
    const std::size_t row_stride = static_cast<std::size_t>(w) * 3;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
            for (int c = 0; c < 3; ++c) {
                if (x + 1 < w) {
                    const double d = gamma_buf[i + 3 + c] - gamma_buf[i + c];
                    tv_acc += std::abs(d);
                    if (grad_theta && alpha != 0.0) {
                        const double s = alpha * inv_n * sign_of(d);
                        (*grad_theta)[i + 3 + c] += s;
                        (*grad_theta)[i + c] -= s;
                    }
                }
                if (y + 1 < h) {
                    const double d = gamma_buf[i + row_stride + c] - gamma_buf[i + c];
                    tv_acc += std::abs(d);
                    if (grad_theta && alpha != 0.0) {
                        const double s = alpha * inv_n * sign_of(d);
                        (*grad_theta)[i + row_stride + c] += s;
                        (*grad_theta)[i + c] -= s;
                    }
                }
            }
        }
    }

    if (grad_theta) {
        for (std::size_t i = 0; i < n; ++i) (*grad_theta)[i] *= gamma_buf[i];
    }

    LossReport report;
    report.rec = rec_acc * inv_n;
    report.tv = tv_acc * inv_n;
    report.alpha = alpha;
    report.total = report.rec + alpha * report.tv;
    return report;
}

std::vector<double> log_one_minus_clamped(const ImageF& input) {
    std::vector<double> out(input.data.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::log(1.0 - clamp_unit_interior(input.data[i]));
    }
    return out;
}

}  // namespace

LossReport loss_and_grad(const ImageF& input, const ImageF& target, const GammaField& g,
                         double alpha, std::vector<double>& grad_theta) {
    if (!input.same_size(target) || input.width != g.width || input.height != g.height) {
        throw std::invalid_argument("loss_and_grad: dimensions differ");
    }
    const std::vector<double> log_base = log_one_minus_clamped(input);
    std::vector<double> gamma_buf;
    return eval_loss_grad(log_base, target, g, alpha, &grad_theta, gamma_buf);
}

std::vector<LossReport> optimize_epoch(const ImageF& input, const ImageF& target, GammaField& g,
                                       OptimizerState& opt, const EnhanceConfig& cfg) {
    if (!input.same_size(target) || input.width != g.width || input.height != g.height) {
        throw std::invalid_argument("optimize_epoch: dimensions differ");
    }
    const std::size_t n = g.size();
    if (opt.m.size() != n) {
        opt.m.assign(n, 0.0);
        opt.v.assign(n, 0.0);
        opt.steps = 0;
    }

    const std::vector<double> log_base = log_one_minus_clamped(input);
    std::vector<double> grad(n), gamma_buf;
    std::vector<LossReport> reports;
    reports.reserve(cfg.inner_steps);

    for (int step = 0; step < cfg.inner_steps; ++step) {
        reports.push_back(eval_loss_grad(log_base, target, g, cfg.alpha, &grad, gamma_buf));

        if (cfg.optimizer == OptimizerKind::Adam) {
            opt.steps += 1;
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(opt.steps));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(opt.steps));
            for (std::size_t i = 0; i < n; ++i) {
                opt.m[i] = cfg.adam_beta1 * opt.m[i] + (1.0 - cfg.adam_beta1) * grad[i];
                opt.v[i] = cfg.adam_beta2 * opt.v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
                const double m_hat = opt.m[i] / bc1;
                const double v_hat = opt.v[i] / bc2;
                g.theta[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
                g.theta[i] = std::clamp(g.theta[i], -kThetaClamp, kThetaClamp);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                g.theta[i] -= cfg.lr * grad[i];
                g.theta[i] = std::clamp(g.theta[i], -kThetaClamp, kThetaClamp);
            }
        }
    }
    return reports;
}

ImageF render(const ImageF& input, const GammaField& g) {
    const GammaField* field = &g;
    GammaField resized;
    if (g.width != input.width || g.height != input.height) {
        resized = resize_field(g, input.width, input.height);
        field = &resized;
    }
    ImageF out(input.width, input.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = apply_inverted_gamma(input.data[i], std::exp(field->theta[i]));
    }
    return out;
}

GammaField resize_field(const GammaField& g, int w, int h) {
    if (g.width == w && g.height == h) return g;
    GammaField out = GammaField::zeros(w, h);
    resize_bilinear_raw(g.theta.data(), g.width, g.height, 3, out.theta.data(), w, h);
    return out;
}

void EpochTrace::write_csv(std::ostream& out) const {
    out << "epoch,rec,tv,total,mse_prev_T,mean_score_T,mean_score_Y\n";
    char buf[256];
    for (const EpochRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.epoch,
                      r.loss.rec, r.loss.tv, r.loss.total, r.mse_prev_gt, r.mean_score_gt,
                      r.mean_score_output);
        out << buf;
    }
}

EnhanceResult progressive_enhance(const ImageF& input, const EnhanceConfig& cfg) {
    validate(cfg);

    // Optimization happens at the working resolution; inputs already small
    // enough stay native so nothing is invented by upsampling.
    ImageF work = input;
    if (cfg.work_size > 0 && (input.width > cfg.work_size || input.height > cfg.work_size)) {
        work = resize_bilinear(input, cfg.work_size, cfg.work_size);
    }

    GammaField field = GammaField::zeros(work.width, work.height);
    OptimizerState opt;
    std::mt19937_64 rng(cfg.refgen.seed);

    EnhanceResult result;
    ImageF prev_output;  // epoch outputs at work resolution
    ImageF prev_gt;
    bool have_prev = false;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const std::vector<ReferenceImage> refs = sample_references(work, cfg.refgen, rng);
        const CandidateSet set =
            build_candidate_set(work, have_prev ? &prev_output : nullptr, refs);

        ImageF target;
        double mean_score_gt = 0.0;
        if (cfg.fusion == FusionMode::Argmax) {
            FusionResult fused = fuse(set, cfg.quality);
            mean_score_gt = plane_mean(fused.winning_score);
            target = std::move(fused.pseudo_gt);
        } else {
            target = fuse_weighted(set, cfg.quality);
            mean_score_gt = plane_mean(composite_score(target, cfg.quality).composite);
        }

        const std::vector<LossReport> reports = optimize_epoch(work, target, field, opt, cfg);

        prev_output = render(work, field);
        have_prev = true;

        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss = reports.back();
        rec.mse_prev_gt = (epoch > 1) ? rec_loss(target, prev_gt) : 0.0;
        rec.mean_score_gt = mean_score_gt;
        rec.mean_score_output = plane_mean(composite_score(prev_output, cfg.quality).composite);
        result.trace.records.push_back(rec);

        prev_gt = std::move(target);
    }

    result.gamma = resize_field(field, input.width, input.height);
    result.output = render(input, result.gamma);
    result.last_pseudo_gt = std::move(prev_gt);
    return result;
}

}  // namespace relight
