#ifndef AQUA_TRAINER_HPP
#define AQUA_TRAINER_HPP

#include "aqua/metrics.hpp"
#include "aqua/network.hpp"
#include "aqua/physics.hpp"
#include "aqua/random.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace aqua {

enum class TrainPhase { supervised, unsupervised };

struct TrainConfig {
    TrainPhase phase = TrainPhase::supervised;
    int epochs = 1500;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    int batch_size = 8;
    std::uint64_t seed = 0;
    IqmWeights iqm_weights;
    double epsilon_t = kDefaultEpsilonT;
    double soft_edge_steepness = 50.0;

    static TrainConfig defaults(TrainPhase phase) {
        TrainConfig c;
        c.phase = phase;
        if (phase == TrainPhase::unsupervised) {
            c.epochs = 1180;
            c.learning_rate = 1e-5;
        }
        return c;
    }

    void validate() const {
        if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
        if (learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
        if (momentum < 0 || momentum >= 1) throw std::invalid_argument("momentum must be in [0,1)");
        if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
        if (epsilon_t <= 0 || epsilon_t >= 1) throw std::invalid_argument("epsilon_t must be in (0,1)");
        if (soft_edge_steepness <= 0) throw std::invalid_argument("soft_edge_steepness must be positive");
        iqm_weights.validate();
    }
};

struct TrainSample {
    RgbImage degraded;
    std::optional<TransmissionMap> truth_t; // supervised phase only
};

/// MSE between transmission maps plus its gradient w.r.t. the prediction.
inline std::pair<double, Plane> mse_transmission_loss(const Plane& pred, const Plane& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw std::invalid_argument("mse_transmission_loss: size mismatch");
    const double n = static_cast<double>(pred.size());
    const Plane diff = pred - truth;
    return {diff.square().sum() / n, 2.0 / n * diff};
}

/// Unsupervised objective 1 - IQM(I, J) on the smooth unclamped aggregate,
/// with its analytic gradient w.r.t. every pixel of j.
inline std::pair<double, RgbImage> iqm_loss(const RgbImage& i, const RgbImage& j,
                                            const IqmWeights& w, double steepness) {
    SmoothIqm<double> sm = smooth_iqm(i, j, w, steepness);
    RgbImage grad;
    grad.r = -sm.grad.r;
    grad.g = -sm.grad.g;
    grad.b = -sm.grad.b;
    return {1.0 - sm.score, std::move(grad)};
}

namespace detail {

inline void accumulate(ModelParams& acc, const ModelParams& grads, double scale) {
    auto dst = param_pointers(acc);
    auto src = param_pointers(grads);
    for (std::size_t i = 0; i < dst.size(); ++i) *dst[i] += scale * *src[i];
}

// v <- momentum*v - lr*g;  p <- p + v
inline void sgd_step(ModelParams& params, ModelParams& velocity, const ModelParams& grads,
                     double lr, double momentum) {
    auto p = param_pointers(params);
    auto v = param_pointers(velocity);
    auto g = param_pointers(grads);
    for (std::size_t i = 0; i < p.size(); ++i) {
        *v[i] = momentum * *v[i] - lr * *g[i];
        *p[i] += *v[i];
    }
}

inline std::vector<std::vector<std::size_t>> make_batches(std::size_t n, int batch_size,
                                                          Rng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t end = std::min(n, start + static_cast<std::size_t>(batch_size));
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

} // namespace detail

/// One unsupervised step for a single image: forward, background estimate,
/// restoration, smooth IQM, and the full chain of gradients back to the
/// parameters. Returns the smooth score; used by training and by tests that
/// verify the end-to-end gradient.
inline double unsupervised_step(const ModelParams& model, const RgbImage& img,
                                const TrainConfig& cfg, ModelParams* grads_out) {
    ForwardTrace trace;
    const Plane t = forward(img, model, trace);
    const BackgroundLight bg = estimate_background(img, t);
    const RgbImage restored = restore(img, t, bg, cfg.epsilon_t);
    SmoothIqm<double> sm = smooth_iqm(img, restored, cfg.iqm_weights, cfg.soft_edge_steepness);
    if (grads_out) {
        RgbImage grad_j; // d(1 - score)/dJ
        grad_j.r = -sm.grad.r;
        grad_j.g = -sm.grad.g;
        grad_j.b = -sm.grad.b;
        const Plane grad_t = restore_backward_t(img, t, bg, cfg.epsilon_t, grad_j);
        *grads_out = backward(model, trace, grad_t);
    }
    return sm.score;
}

/// Supervised phase: SGD with momentum on the transmission-map MSE.
/// Returns the per-epoch mean loss. Bit-deterministic for a fixed seed.
inline std::vector<double> train_supervised(ModelParams& model,
                                            const std::vector<TrainSample>& dataset,
                                            const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("train_supervised: empty dataset");
    for (const TrainSample& s : dataset)
        if (!s.truth_t) throw std::invalid_argument("train_supervised: sample missing ground-truth map");

    Rng rng(cfg.seed);
    ModelParams velocity;
    std::vector<double> curve;
    curve.reserve(cfg.epochs);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss_sum = 0;
        for (const auto& batch : detail::make_batches(dataset.size(), cfg.batch_size, rng)) {
            ModelParams grads;
            for (std::size_t idx : batch) {
                const TrainSample& s = dataset[idx];
                ForwardTrace trace;
                forward(s.degraded, model, trace);
                auto [loss, grad] = mse_transmission_loss(trace.tmap, *s.truth_t);
                detail::accumulate(grads, backward(model, trace, grad),
                                   1.0 / static_cast<double>(batch.size()));
                loss_sum += loss;
            }
            detail::sgd_step(model, velocity, grads, cfg.learning_rate, cfg.momentum);
        }
        curve.push_back(loss_sum / static_cast<double>(dataset.size()));
    }
    return curve;
}

/// Unsupervised phase: maximizes the smooth IQM of the restored image by
/// backpropagating 1 - IQM through restoration and the network. Never reads
/// ground-truth maps. Returns the per-epoch mean smooth IQM score.
inline std::vector<double> train_unsupervised(ModelParams& model,
                                              const std::vector<TrainSample>& dataset,
                                              const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("train_unsupervised: empty dataset");

    Rng rng(cfg.seed);
    ModelParams velocity;
    std::vector<double> curve;
    curve.reserve(cfg.epochs);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double score_sum = 0;
        for (const auto& batch : detail::make_batches(dataset.size(), cfg.batch_size, rng)) {
            ModelParams grads;
            for (std::size_t idx : batch) {
                ModelParams sample_grads;
                score_sum += unsupervised_step(model, dataset[idx].degraded, cfg, &sample_grads);
                detail::accumulate(grads, sample_grads,
                                   1.0 / static_cast<double>(batch.size()));
            }
            detail::sgd_step(model, velocity, grads, cfg.learning_rate, cfg.momentum);
        }
        curve.push_back(score_sum / static_cast<double>(dataset.size()));
    }
    return curve;
}

} // namespace aqua

#endif
