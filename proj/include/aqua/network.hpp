#ifndef AQUA_NETWORK_HPP
#define AQUA_NETWORK_HPP

#include "aqua/filters.hpp"
#include "aqua/image.hpp"
#include "aqua/random.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace aqua {

/// Stack of same-sized feature planes, one per channel.
using FeatureStack = std::vector<Plane>;

/// One convolution bank: w[k][c] is the kh x kw kernel from input channel c
/// to output channel k. Same-size outputs via reflect padding; even kernels
/// pad one more on the top/left than on the bottom/right.
struct ConvKernels {
    std::vector<std::vector<Plane>> w;
    Eigen::ArrayXd bias;

    static ConvKernels zeros(int out_ch, int in_ch, Eigen::Index kh, Eigen::Index kw) {
        ConvKernels k;
        k.w.assign(out_ch, std::vector<Plane>(in_ch, Plane::Zero(kh, kw)));
        k.bias = Eigen::ArrayXd::Zero(out_ch);
        return k;
    }

    int out_channels() const { return static_cast<int>(w.size()); }
    int in_channels() const { return static_cast<int>(w.front().size()); }
    Eigen::Index kh() const { return w.front().front().rows(); }
    Eigen::Index kw() const { return w.front().front().cols(); }
    Eigen::Index pad_before() const { return kh() / 2; }
    Eigen::Index pad_after() const { return (kh() - 1) / 2; }
};

/// All learnable parameters of the three-layer transmission network:
/// conv1 16@5x5x3, conv2 three multi-scale banks 16@{3,5,7}^2x4, conv3 1@6x6x48.
struct ModelParams {
    ConvKernels conv1 = ConvKernels::zeros(16, 3, 5, 5);
    ConvKernels conv2_3 = ConvKernels::zeros(16, 4, 3, 3);
    ConvKernels conv2_5 = ConvKernels::zeros(16, 4, 5, 5);
    ConvKernels conv2_7 = ConvKernels::zeros(16, 4, 7, 7);
    ConvKernels conv3 = ConvKernels::zeros(1, 48, 6, 6);

    template <typename F>
    void for_each_bank(F&& f) {
        f(conv1);
        f(conv2_3);
        f(conv2_5);
        f(conv2_7);
        f(conv3);
    }
    template <typename F>
    void for_each_bank(F&& f) const {
        f(conv1);
        f(conv2_3);
        f(conv2_5);
        f(conv2_7);
        f(conv3);
    }
};

inline constexpr int kMaxoutGroup = 4;
inline constexpr Eigen::Index kPoolWindow = 7;
inline constexpr Eigen::Index kMinNetworkInput = 16;

/// Flat view over every parameter scalar, in a fixed canonical order
/// (bank by bank: kernels k-major then channel, row-major taps, then biases).
inline std::vector<double*> param_pointers(ModelParams& p) {
    std::vector<double*> out;
    p.for_each_bank([&](ConvKernels& bank) {
        for (auto& kern : bank.w)
            for (auto& plane : kern)
                for (Eigen::Index y = 0; y < plane.rows(); ++y)
                    for (Eigen::Index x = 0; x < plane.cols(); ++x) out.push_back(&plane(y, x));
        for (Eigen::Index i = 0; i < bank.bias.size(); ++i) out.push_back(&bank.bias(i));
    });
    return out;
}

inline std::vector<const double*> param_pointers(const ModelParams& p) {
    std::vector<const double*> out;
    p.for_each_bank([&](const ConvKernels& bank) {
        for (const auto& kern : bank.w)
            for (const auto& plane : kern)
                for (Eigen::Index y = 0; y < plane.rows(); ++y)
                    for (Eigen::Index x = 0; x < plane.cols(); ++x) out.push_back(&plane(y, x));
        for (Eigen::Index i = 0; i < bank.bias.size(); ++i) out.push_back(&bank.bias(i));
    });
    return out;
}

inline std::size_t param_count(const ModelParams& p) {
    std::size_t n = 0;
    p.for_each_bank([&](const ConvKernels& bank) {
        n += static_cast<std::size_t>(bank.out_channels()) * bank.in_channels() * bank.kh() *
                 bank.kw() +
             bank.out_channels();
    });
    return n;
}

/// Uniform Glorot initialization, biases zero, reproducible per seed.
inline ModelParams glorot_init(std::uint64_t seed) {
    ModelParams p;
    Rng rng(seed);
    p.for_each_bank([&](ConvKernels& bank) {
        const double fan_in = double(bank.in_channels()) * bank.kh() * bank.kw();
        const double fan_out = double(bank.out_channels()) * bank.kh() * bank.kw();
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (auto& kern : bank.w)
            for (auto& plane : kern)
                for (Eigen::Index y = 0; y < plane.rows(); ++y)
                    for (Eigen::Index x = 0; x < plane.cols(); ++x)
                        plane(y, x) = rng.uniform(-limit, limit);
    });
    return p;
}

// ---------------------------------------------------------------------------
// Layer primitives

inline FeatureStack conv2d_forward(const FeatureStack& in, const ConvKernels& k) {
    if (static_cast<int>(in.size()) != k.in_channels())
        throw std::invalid_argument("conv2d_forward: input channel count mismatch");
    const Eigen::Index h = in.front().rows(), w = in.front().cols();
    const Eigen::Index pb = k.pad_before(), pa = k.pad_after();
    std::vector<Plane> padded;
    padded.reserve(in.size());
    for (const Plane& ch : in) padded.push_back(pad_reflect(ch, pb, pa));

    FeatureStack out(k.out_channels());
    for (int o = 0; o < k.out_channels(); ++o) {
        Plane acc = Plane::Constant(h, w, k.bias(o));
        for (int c = 0; c < k.in_channels(); ++c) {
            const Plane& kern = k.w[o][c];
            for (Eigen::Index ky = 0; ky < k.kh(); ++ky)
                for (Eigen::Index kx = 0; kx < k.kw(); ++kx)
                    acc += kern(ky, kx) * padded[c].block(ky, kx, h, w);
        }
        out[o] = std::move(acc);
    }
    return out;
}

/// Gradients of a convolution given the forward input and upstream gradient.
/// Input gradients are folded back through the reflect padding, so the layer
/// is the exact adjoint of conv2d_forward.
inline void conv2d_backward(const FeatureStack& in, const ConvKernels& k,
                            const FeatureStack& grad_out, FeatureStack& grad_in,
                            ConvKernels& grad_k) {
    const Eigen::Index h = in.front().rows(), w = in.front().cols();
    const Eigen::Index pb = k.pad_before(), pa = k.pad_after();
    std::vector<Plane> padded;
    padded.reserve(in.size());
    for (const Plane& ch : in) padded.push_back(pad_reflect(ch, pb, pa));

    grad_k = ConvKernels::zeros(k.out_channels(), k.in_channels(), k.kh(), k.kw());
    std::vector<Plane> pgrad(in.size(), Plane::Zero(h + pb + pa, w + pb + pa));
    for (int o = 0; o < k.out_channels(); ++o) {
        grad_k.bias(o) = grad_out[o].sum();
        for (int c = 0; c < k.in_channels(); ++c) {
            Plane& wg = grad_k.w[o][c];
            const Plane& kern = k.w[o][c];
            for (Eigen::Index ky = 0; ky < k.kh(); ++ky) {
                for (Eigen::Index kx = 0; kx < k.kw(); ++kx) {
                    wg(ky, kx) = (grad_out[o] * padded[c].block(ky, kx, h, w)).sum();
                    pgrad[c].block(ky, kx, h, w) += kern(ky, kx) * grad_out[o];
                }
            }
        }
    }
    grad_in.resize(in.size());
    for (std::size_t c = 0; c < in.size(); ++c) grad_in[c] = fold_reflect(pgrad[c], pb, h, w);
}

/// Element-wise maximum over groups of `group` consecutive channels; records
/// the winning offset per pixel (lowest index wins ties).
inline void maxout_forward(const FeatureStack& in, int group, FeatureStack& out,
                           std::vector<IndexPlane>& argmax) {
    if (in.size() % static_cast<std::size_t>(group) != 0)
        throw std::invalid_argument("maxout_forward: channel count not divisible by group size");
    const Eigen::Index h = in.front().rows(), w = in.front().cols();
    const int groups = static_cast<int>(in.size()) / group;
    out.assign(groups, Plane(h, w));
    argmax.assign(groups, IndexPlane(h, w));
    for (int j = 0; j < groups; ++j) {
        for (Eigen::Index y = 0; y < h; ++y) {
            for (Eigen::Index x = 0; x < w; ++x) {
                double best = in[j * group](y, x);
                Eigen::Index arg = 0;
                for (int c = 1; c < group; ++c) {
                    const double v = in[j * group + c](y, x);
                    if (v > best) {
                        best = v;
                        arg = c;
                    }
                }
                out[j](y, x) = best;
                argmax[j](y, x) = arg;
            }
        }
    }
}

inline FeatureStack maxout_backward(const std::vector<IndexPlane>& argmax, int group,
                                    const FeatureStack& grad_out) {
    const Eigen::Index h = grad_out.front().rows(), w = grad_out.front().cols();
    FeatureStack grad_in(grad_out.size() * group, Plane::Zero(h, w));
    for (std::size_t j = 0; j < grad_out.size(); ++j)
        for (Eigen::Index y = 0; y < h; ++y)
            for (Eigen::Index x = 0; x < w; ++x)
                grad_in[j * group + argmax[j](y, x)](y, x) += grad_out[j](y, x);
    return grad_in;
}

/// Stride-1 max pooling over a window x window reflect-padded neighborhood;
/// spatial size is preserved. Argmax is stored as a flat index into the
/// padded plane so the backward pass can route exactly.
inline void maxpool_forward(const FeatureStack& in, Eigen::Index window, FeatureStack& out,
                            std::vector<IndexPlane>& argmax) {
    const Eigen::Index h = in.front().rows(), w = in.front().cols();
    const Eigen::Index pad = window / 2;
    const Eigen::Index pw = w + 2 * pad;
    out.assign(in.size(), Plane(h, w));
    argmax.assign(in.size(), IndexPlane(h, w));
    for (std::size_t c = 0; c < in.size(); ++c) {
        const Plane padded = pad_reflect(in[c], pad, pad);
        for (Eigen::Index y = 0; y < h; ++y) {
            for (Eigen::Index x = 0; x < w; ++x) {
                double best = padded(y, x);
                Eigen::Index arg = y * pw + x;
                for (Eigen::Index dy = 0; dy < window; ++dy) {
                    for (Eigen::Index dx = 0; dx < window; ++dx) {
                        const double v = padded(y + dy, x + dx);
                        if (v > best) {
                            best = v;
                            arg = (y + dy) * pw + (x + dx);
                        }
                    }
                }
                out[c](y, x) = best;
                argmax[c](y, x) = arg;
            }
        }
    }
}

inline FeatureStack maxpool_backward(const std::vector<IndexPlane>& argmax, Eigen::Index window,
                                     Eigen::Index h, Eigen::Index w,
                                     const FeatureStack& grad_out) {
    const Eigen::Index pad = window / 2;
    const Eigen::Index pw = w + 2 * pad;
    FeatureStack grad_in(grad_out.size());
    for (std::size_t c = 0; c < grad_out.size(); ++c) {
        Plane pgrad = Plane::Zero(h + 2 * pad, pw);
        for (Eigen::Index y = 0; y < h; ++y) {
            for (Eigen::Index x = 0; x < w; ++x) {
                const Eigen::Index flat = argmax[c](y, x);
                pgrad(flat / pw, flat % pw) += grad_out[c](y, x);
            }
        }
        grad_in[c] = fold_reflect(pgrad, pad, h, w);
    }
    return grad_in;
}

// ---------------------------------------------------------------------------
// Full network

/// Every intermediate the backward pass needs: activations plus the argmax
/// routing of maxout and pooling.
struct ForwardTrace {
    FeatureStack input;                  // 3
    FeatureStack act1;                   // 16
    FeatureStack maxout;                 // 4
    std::vector<IndexPlane> maxout_arg;  // 4
    FeatureStack cat2;                   // 48
    FeatureStack pooled;                 // 48
    std::vector<IndexPlane> pool_arg;    // 48
    Plane pre3;
    Plane tmap;
};

/// conv1 -> maxout -> multi-scale conv2 (concatenated) -> max-pool -> conv3
/// -> saturating ramp min(max(x,0),1). Output resolution equals the input.
inline Plane forward(const RgbImage& img, const ModelParams& p, ForwardTrace& trace) {
    if (img.rows() < kMinNetworkInput || img.cols() < kMinNetworkInput)
        throw std::invalid_argument("forward: image must be at least 16x16");
    trace.input = {img.r, img.g, img.b};
    trace.act1 = conv2d_forward(trace.input, p.conv1);
    maxout_forward(trace.act1, kMaxoutGroup, trace.maxout, trace.maxout_arg);

    trace.cat2 = conv2d_forward(trace.maxout, p.conv2_3);
    FeatureStack b5 = conv2d_forward(trace.maxout, p.conv2_5);
    FeatureStack b7 = conv2d_forward(trace.maxout, p.conv2_7);
    trace.cat2.insert(trace.cat2.end(), std::make_move_iterator(b5.begin()),
                      std::make_move_iterator(b5.end()));
    trace.cat2.insert(trace.cat2.end(), std::make_move_iterator(b7.begin()),
                      std::make_move_iterator(b7.end()));

    maxpool_forward(trace.cat2, kPoolWindow, trace.pooled, trace.pool_arg);
    trace.pre3 = conv2d_forward(trace.pooled, p.conv3).front();
    trace.tmap = trace.pre3.min(1.0).max(0.0);
    return trace.tmap;
}

inline Plane forward(const RgbImage& img, const ModelParams& p) {
    ForwardTrace trace;
    return forward(img, p, trace);
}

/// Reverse-mode pass. Returns gradients for every parameter and, through
/// `grad_input`, for the input pixels.
inline ModelParams backward(const ModelParams& p, const ForwardTrace& trace,
                            const Plane& grad_tmap, FeatureStack* grad_input = nullptr) {
    if (grad_tmap.rows() != trace.pre3.rows() || grad_tmap.cols() != trace.pre3.cols())
        throw std::invalid_argument("backward: gradient shape does not match trace");
    const Eigen::Index h = trace.pre3.rows(), w = trace.pre3.cols();
    ModelParams grads;

    // saturating ramp: pass-through strictly inside (0,1)
    const Plane gate = ((trace.pre3 > 0.0) && (trace.pre3 < 1.0)).cast<double>();
    FeatureStack dpre3{gate * grad_tmap};

    FeatureStack grad_pooled;
    conv2d_backward(trace.pooled, p.conv3, dpre3, grad_pooled, grads.conv3);

    FeatureStack grad_cat2 = maxpool_backward(trace.pool_arg, kPoolWindow, h, w, grad_pooled);

    FeatureStack g3(grad_cat2.begin(), grad_cat2.begin() + 16);
    FeatureStack g5(grad_cat2.begin() + 16, grad_cat2.begin() + 32);
    FeatureStack g7(grad_cat2.begin() + 32, grad_cat2.end());
    FeatureStack gm3, gm5, gm7;
    conv2d_backward(trace.maxout, p.conv2_3, g3, gm3, grads.conv2_3);
    conv2d_backward(trace.maxout, p.conv2_5, g5, gm5, grads.conv2_5);
    conv2d_backward(trace.maxout, p.conv2_7, g7, gm7, grads.conv2_7);
    FeatureStack grad_maxout(4);
    for (int c = 0; c < 4; ++c) grad_maxout[c] = gm3[c] + gm5[c] + gm7[c];

    FeatureStack grad_act1 = maxout_backward(trace.maxout_arg, kMaxoutGroup, grad_maxout);

    FeatureStack grad_in;
    conv2d_backward(trace.input, p.conv1, grad_act1, grad_in, grads.conv1);
    if (grad_input) *grad_input = std::move(grad_in);
    return grads;
}

} // namespace aqua

#endif
