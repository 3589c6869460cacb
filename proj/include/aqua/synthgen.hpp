#ifndef AQUA_SYNTHGEN_HPP
#define AQUA_SYNTHGEN_HPP

#include "aqua/filters.hpp"
#include "aqua/image.hpp"
#include "aqua/physics.hpp"
#include "aqua/random.hpp"
#include "aqua/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace aqua {

enum class DepthModel { linear, radial, noise };

/// Recipe for one family of synthetic scenes: a base texture, a depth
/// field, per-channel attenuation, and the veiling light.
struct SceneSpec {
    std::string base = "checkers"; // checkers | gradient | noise | path to a PNG
    DepthModel depth_model = DepthModel::linear;
    double d_min = 0.5;
    double d_max = 8.0;
    AttenuationCoefficients beta{0.4, 0.1, 0.15};
    BackgroundLight background{0.55, 0.75, 0.85};
    std::uint64_t seed = 0;

    void validate() const {
        if (d_min < 0 || d_max <= d_min)
            throw std::invalid_argument("SceneSpec: need 0 <= d_min < d_max");
        if (!beta.nonnegative())
            throw std::invalid_argument("SceneSpec: attenuation coefficients must be nonnegative");
    }
};

/// Named water types; red always attenuates fastest.
inline AttenuationCoefficients beta_preset(const std::string& name) {
    if (name == "clear") return {0.05, 0.02, 0.03};
    if (name == "coastal") return {0.4, 0.1, 0.15};
    if (name == "turbid") return {0.9, 0.35, 0.5};
    throw std::invalid_argument("unknown water preset: " + name);
}

/// One generated triple with full ground truth.
struct GeneratedSample {
    RgbImage clean;
    RgbImage degraded;
    Plane t_r, t_g, t_b;       // per-channel transmissions
    TransmissionMap truth_t;   // the supervised target (green channel)
    BackgroundLight background;
    std::uint64_t seed = 0;
};

namespace detail {

// Coarse random lattice interpolated bilinearly; values in [0,1].
inline Plane value_noise(Rng& rng, Eigen::Index h, Eigen::Index w, Eigen::Index cell) {
    const Eigen::Index gh = h / cell + 2, gw = w / cell + 2;
    Plane lattice(gh, gw);
    for (Eigen::Index y = 0; y < gh; ++y)
        for (Eigen::Index x = 0; x < gw; ++x) lattice(y, x) = rng.uniform();
    Plane out(h, w);
    for (Eigen::Index y = 0; y < h; ++y) {
        const double fy = static_cast<double>(y) / static_cast<double>(cell);
        const Eigen::Index y0 = static_cast<Eigen::Index>(fy);
        const double wy = fy - static_cast<double>(y0);
        for (Eigen::Index x = 0; x < w; ++x) {
            const double fx = static_cast<double>(x) / static_cast<double>(cell);
            const Eigen::Index x0 = static_cast<Eigen::Index>(fx);
            const double wx = fx - static_cast<double>(x0);
            out(y, x) = (1 - wy) * ((1 - wx) * lattice(y0, x0) + wx * lattice(y0, x0 + 1)) +
                        wy * ((1 - wx) * lattice(y0 + 1, x0) + wx * lattice(y0 + 1, x0 + 1));
        }
    }
    return out;
}

inline RgbImage checkers_texture(Rng& rng, Eigen::Index h, Eigen::Index w) {
    const Eigen::Index cell = 2 + static_cast<Eigen::Index>(rng.below(7));
    double ca[3], cb[3];
    for (int c = 0; c < 3; ++c) {
        ca[c] = rng.uniform(0.05, 0.45);
        cb[c] = rng.uniform(0.55, 0.95);
    }
    RgbImage img(h, w);
    for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x) {
            const bool a = ((y / cell) + (x / cell)) % 2 == 0;
            img.r(y, x) = a ? ca[0] : cb[0];
            img.g(y, x) = a ? ca[1] : cb[1];
            img.b(y, x) = a ? ca[2] : cb[2];
        }
    return img;
}

inline RgbImage gradient_texture(Rng& rng, Eigen::Index h, Eigen::Index w) {
    double corner[4][3];
    for (auto& col : corner)
        for (double& v : col) v = rng.uniform(0.05, 0.95);
    RgbImage img(h, w);
    for (Eigen::Index y = 0; y < h; ++y) {
        const double wy = h > 1 ? static_cast<double>(y) / static_cast<double>(h - 1) : 0.0;
        for (Eigen::Index x = 0; x < w; ++x) {
            const double wx = w > 1 ? static_cast<double>(x) / static_cast<double>(w - 1) : 0.0;
            for (int c = 0; c < 3; ++c) {
                img.channel(c)(y, x) = (1 - wy) * ((1 - wx) * corner[0][c] + wx * corner[1][c]) +
                                       wy * ((1 - wx) * corner[2][c] + wx * corner[3][c]);
            }
        }
    }
    return img;
}

inline RgbImage noise_texture(Rng& rng, Eigen::Index h, Eigen::Index w) {
    double ca[3], cb[3];
    for (int c = 0; c < 3; ++c) {
        ca[c] = rng.uniform(0.05, 0.5);
        cb[c] = rng.uniform(0.5, 0.95);
    }
    const Eigen::Index cell = std::max<Eigen::Index>(2, std::min(h, w) / 6);
    const Plane v = value_noise(rng, h, w, cell);
    RgbImage img;
    img.r = ca[0] + (cb[0] - ca[0]) * v;
    img.g = ca[1] + (cb[1] - ca[1]) * v;
    img.b = ca[2] + (cb[2] - ca[2]) * v;
    return img;
}

inline Plane make_depth_impl(Rng& rng, const SceneSpec& spec, Eigen::Index h, Eigen::Index w) {
    const double span = spec.d_max - spec.d_min;
    Plane d(h, w);
    switch (spec.depth_model) {
        case DepthModel::linear:
            for (Eigen::Index y = 0; y < h; ++y)
                for (Eigen::Index x = 0; x < w; ++x)
                    d(y, x) = spec.d_min +
                              (w > 1 ? span * static_cast<double>(x) / static_cast<double>(w - 1)
                                     : 0.0);
            break;
        case DepthModel::radial: {
            const double cy = static_cast<double>(h - 1) / 2.0;
            const double cx = static_cast<double>(w - 1) / 2.0;
            const double rmax = std::max(std::hypot(cy, cx), 1e-12);
            for (Eigen::Index y = 0; y < h; ++y)
                for (Eigen::Index x = 0; x < w; ++x)
                    d(y, x) = spec.d_min +
                              span * std::hypot(static_cast<double>(y) - cy,
                                                static_cast<double>(x) - cx) /
                                  rmax;
            break;
        }
        case DepthModel::noise: {
            const Eigen::Index cell = std::max<Eigen::Index>(2, std::min(h, w) / 4);
            d = spec.d_min + span * value_noise(rng, h, w, cell);
            break;
        }
    }
    return d;
}

inline RgbImage make_base_impl(Rng& rng, const SceneSpec& spec, Eigen::Index h, Eigen::Index w,
                               const RgbImage* file_base) {
    if (spec.base == "checkers") return checkers_texture(rng, h, w);
    if (spec.base == "gradient") return gradient_texture(rng, h, w);
    if (spec.base == "noise") return noise_texture(rng, h, w);
    if (!file_base) throw std::invalid_argument("base image '" + spec.base + "' not loaded");
    RgbImage img;
    img.r = resize_bilinear(file_base->r, h, w);
    img.g = resize_bilinear(file_base->g, h, w);
    img.b = resize_bilinear(file_base->b, h, w);
    return img;
}

} // namespace detail

/// Per-pixel scene depth, deterministic per spec.seed.
inline Plane make_depth(const SceneSpec& spec, Eigen::Index h, Eigen::Index w) {
    spec.validate();
    Rng rng(spec.seed);
    return detail::make_depth_impl(rng, spec, h, w);
}

/// t(x) = exp(-beta * d(x)), floored at epsilon_t.
template <typename Scalar>
PlaneT<Scalar> depth_to_transmission(const PlaneT<Scalar>& depth, Scalar beta,
                                     Scalar epsilon_t = Scalar(kDefaultEpsilonT)) {
    if (beta < Scalar(0)) throw std::invalid_argument("depth_to_transmission: beta must be >= 0");
    return (-beta * depth).exp().max(epsilon_t);
}

/// Build `count` degraded/ground-truth samples. Sample k uses seed
/// spec.seed + k, so corpora are reproducible and samples independent.
/// `file_base` supplies the image when spec.base is a file path.
inline std::vector<GeneratedSample> generate(const SceneSpec& spec, int count, Eigen::Index h,
                                             Eigen::Index w, const RgbImage* file_base = nullptr) {
    spec.validate();
    if (count < 1) throw std::invalid_argument("generate: count must be >= 1");
    std::vector<GeneratedSample> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        GeneratedSample s;
        s.seed = spec.seed + static_cast<std::uint64_t>(k);
        Rng rng(s.seed);
        s.clean = detail::make_base_impl(rng, spec, h, w, file_base);
        const Plane depth = detail::make_depth_impl(rng, spec, h, w);
        s.t_r = depth_to_transmission(depth, spec.beta.beta_r);
        s.t_g = depth_to_transmission(depth, spec.beta.beta_g);
        s.t_b = depth_to_transmission(depth, spec.beta.beta_b);
        s.degraded = degrade(s.clean, s.t_r, s.t_g, s.t_b, spec.background);
        s.truth_t = s.t_g;
        s.background = spec.background;
        out.push_back(std::move(s));
    }
    return out;
}

/// View of a generated corpus as training samples.
inline std::vector<TrainSample> to_train_samples(const std::vector<GeneratedSample>& corpus,
                                                 bool with_truth) {
    std::vector<TrainSample> out;
    out.reserve(corpus.size());
    for (const GeneratedSample& s : corpus) {
        TrainSample t;
        t.degraded = s.degraded;
        if (with_truth) t.truth_t = s.truth_t;
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace aqua

#endif
