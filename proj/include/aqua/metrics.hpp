#ifndef AQUA_METRICS_HPP
#define AQUA_METRICS_HPP

#include "aqua/filters.hpp"
#include "aqua/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace aqua {

/// Weights of the four quality components. Must be nonnegative and sum to 1
/// so the aggregate score stays in [0,1].
struct IqmWeights {
    double lambda_c = 0.25;
    double lambda_a = 0.45;
    double lambda_bi = 0.05;
    double lambda_g = 0.25;

    void validate() const {
        if (lambda_c < 0 || lambda_a < 0 || lambda_bi < 0 || lambda_g < 0)
            throw std::invalid_argument("IqmWeights: weights must be nonnegative");
        const double sum = lambda_c + lambda_a + lambda_bi + lambda_g;
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("IqmWeights: weights must sum to 1");
    }
};

struct UciqeCoefficients {
    double c1 = 0.4680;
    double c2 = 0.2745;
    double c3 = 0.2576;
};

/// Raw component values for one image pair, plus the clamped aggregate and
/// the UCIQE score of the restored image.
struct QualityReport {
    double q_c = 0;
    double q_a = 0;
    double q_bi = 0;
    double q_g = 0;
    double iqm = 0;
    double uciqe = 0;
};

inline constexpr double kEdgeThreshold = 0.1;
inline constexpr Eigen::Index kEdgeDilationRadius = 5;
inline constexpr Eigen::Index kContrastRadius = 2; // 5x5 windows

/// Per-pixel local variance over 5x5 reflect-padded windows.
template <typename Scalar>
PlaneT<Scalar> local_variance(const PlaneT<Scalar>& gray) {
    if (gray.rows() < 5 || gray.cols() < 5)
        throw std::invalid_argument("local contrast needs at least a 5x5 image");
    PlaneT<Scalar> mean, mean_sq;
    window_moments(gray, kContrastRadius, mean, mean_sq);
    return mean_sq - mean.square();
}

/// Per-pixel RMS contrast: standard deviation of the 5x5 neighborhood.
template <typename Scalar>
PlaneT<Scalar> local_contrast(const PlaneT<Scalar>& gray) {
    return local_variance(gray).max(Scalar(0)).sqrt();
}

/// Mean increase in squared local contrast of j over i, on grayscale.
template <typename Scalar>
Scalar contrast_gain(const RgbImageT<Scalar>& i, const RgbImageT<Scalar>& j) {
    require_same_size(i, j);
    return local_variance(to_gray(j)).mean() - local_variance(to_gray(i)).mean();
}

/// d contrast_gain / d gray(j).
template <typename Scalar>
PlaneT<Scalar> contrast_gain_grad_gray(const PlaneT<Scalar>& gray_j) {
    const Eigen::Index h = gray_j.rows(), w = gray_j.cols();
    const Eigen::Index r = kContrastRadius, side = 2 * r + 1;
    PlaneT<Scalar> mean, mean_sq;
    window_moments(gray_j, r, mean, mean_sq);
    const PlaneT<Scalar> padded = pad_reflect(gray_j, r, r);
    const Scalar scale = Scalar(2) / (Scalar(side * side) * Scalar(h * w));
    PlaneT<Scalar> pgrad = PlaneT<Scalar>::Zero(h + 2 * r, w + 2 * r);
    for (Eigen::Index dy = 0; dy < side; ++dy)
        for (Eigen::Index dx = 0; dx < side; ++dx)
            pgrad.block(dy, dx, h, w) += scale * (padded.block(dy, dx, h, w) - mean);
    return fold_reflect(pgrad, r, h, w);
}

/// Mean Sobel gradient strength.
template <typename Scalar>
Scalar acutance(const PlaneT<Scalar>& gray) {
    return sobel_magnitude(gray).mean();
}

template <typename Scalar>
Scalar acutance_gain(const RgbImageT<Scalar>& i, const RgbImageT<Scalar>& j) {
    require_same_size(i, j);
    return acutance(to_gray(j)) - acutance(to_gray(i));
}

/// d acutance / d gray.
template <typename Scalar>
PlaneT<Scalar> acutance_grad_gray(const PlaneT<Scalar>& gray) {
    const Scalar inv_n = Scalar(1) / Scalar(gray.size());
    return sobel_magnitude_backward(
        gray, PlaneT<Scalar>::Constant(gray.rows(), gray.cols(), inv_n));
}

/// Binary edge mask: 1 where Sobel magnitude, normalized by its image
/// maximum, exceeds the threshold. A flat image has no edges.
template <typename Scalar>
PlaneT<Scalar> edge_map_hard(const PlaneT<Scalar>& gray, Scalar threshold) {
    PlaneT<Scalar> mag = sobel_magnitude(gray);
    const Scalar peak = mag.maxCoeff();
    if (peak <= Scalar(0)) return PlaneT<Scalar>::Zero(gray.rows(), gray.cols());
    return (mag / peak > threshold).template cast<Scalar>();
}

/// Dilated edge support of the degraded image; the reference mask both the
/// hard and soft border-integrity ratios are evaluated against.
template <typename Scalar>
PlaneT<Scalar> dilated_edge_support(const RgbImageT<Scalar>& i, Scalar threshold,
                                    Eigen::Index radius) {
    return dilate(edge_map_hard(to_gray(i), threshold), radius);
}

/// Fraction of the (dilated) edge support of i still detected as edges in j.
/// Returns 1 when i has no edges at all.
template <typename Scalar>
Scalar border_integrity(const RgbImageT<Scalar>& i, const RgbImageT<Scalar>& j,
                        Scalar threshold = Scalar(kEdgeThreshold),
                        Eigen::Index radius = kEdgeDilationRadius) {
    require_same_size(i, j);
    const PlaneT<Scalar> ed = dilated_edge_support(i, threshold, radius);
    const Scalar denom = ed.sum();
    if (denom <= Scalar(0)) return Scalar(1);
    return (edge_map_hard(to_gray(j), threshold) * ed).sum() / denom;
}

namespace detail {

template <typename Scalar>
Scalar sigmoid(Scalar x) {
    return Scalar(1) / (Scalar(1) + std::exp(-x));
}

// Soft border integrity on a precomputed dilated support mask; optionally
// accumulates the gradient with respect to gray(j). The gradient flows
// through the normalization maximum as well (routed to the argmax pixel), so
// it matches finite differences exactly.
template <typename Scalar>
Scalar soft_border_integrity_impl(const PlaneT<Scalar>& gray_j, const PlaneT<Scalar>& ed,
                                  Scalar steepness, Scalar threshold,
                                  PlaneT<Scalar>* grad_gray) {
    const Eigen::Index h = gray_j.rows(), w = gray_j.cols();
    const Scalar denom = ed.sum();
    if (grad_gray) *grad_gray = PlaneT<Scalar>::Zero(h, w);
    if (denom <= Scalar(0)) return Scalar(1);

    PlaneT<Scalar> mag = sobel_magnitude(gray_j);
    Eigen::Index peak_y = 0, peak_x = 0;
    const Scalar peak = mag.maxCoeff(&peak_y, &peak_x);

    PlaneT<Scalar> soft(h, w);
    if (peak <= Scalar(0)) {
        soft.setConstant(sigmoid(-steepness * threshold));
        return (soft * ed).sum() / denom; // flat image: constant response, no gradient
    }
    const PlaneT<Scalar> norm = mag / peak;
    for (Eigen::Index y = 0; y < h; ++y)
        for (Eigen::Index x = 0; x < w; ++x)
            soft(y, x) = sigmoid(steepness * (norm(y, x) - threshold));
    const Scalar value = (soft * ed).sum() / denom;

    if (grad_gray) {
        PlaneT<Scalar> dnorm = ed * steepness * soft * (Scalar(1) - soft) / denom;
        PlaneT<Scalar> dmag = dnorm / peak;
        dmag(peak_y, peak_x) -= (dnorm * mag).sum() / (peak * peak);
        *grad_gray = sobel_magnitude_backward(gray_j, dmag);
    }
    return value;
}

} // namespace detail

/// Differentiable relaxation of border_integrity: the restored image's edge
/// detector becomes a sigmoid of the normalized Sobel magnitude, while the
/// degraded image keeps its hard dilated mask.
template <typename Scalar>
Scalar border_integrity_soft(const RgbImageT<Scalar>& i, const RgbImageT<Scalar>& j,
                             Scalar steepness, Scalar threshold = Scalar(kEdgeThreshold),
                             Eigen::Index radius = kEdgeDilationRadius) {
    require_same_size(i, j);
    if (steepness <= Scalar(0)) throw std::invalid_argument("steepness must be positive");
    const PlaneT<Scalar> ed = dilated_edge_support(i, threshold, radius);
    return detail::soft_border_integrity_impl<Scalar>(to_gray(j), ed, steepness, threshold,
                                                      nullptr);
}

/// Conformity to the gray-world hypothesis over all pixel-channel entries:
/// 1 - (2/n) * sum((v - 1/2)^2), in [0.5, 1].
template <typename Scalar>
Scalar gray_world(const RgbImageT<Scalar>& j) {
    const Scalar n = Scalar(3) * Scalar(j.rows() * j.cols());
    const Scalar dev = (j.r - Scalar(0.5)).square().sum() +
                       (j.g - Scalar(0.5)).square().sum() +
                       (j.b - Scalar(0.5)).square().sum();
    return Scalar(1) - Scalar(2) * dev / n;
}

template <typename Scalar>
RgbImageT<Scalar> gray_world_grad(const RgbImageT<Scalar>& j) {
    const Scalar n = Scalar(3) * Scalar(j.rows() * j.cols());
    RgbImageT<Scalar> grad;
    grad.r = -Scalar(4) / n * (j.r - Scalar(0.5));
    grad.g = -Scalar(4) / n * (j.g - Scalar(0.5));
    grad.b = -Scalar(4) / n * (j.b - Scalar(0.5));
    return grad;
}

/// Hard evaluation score: raw component values are reported as-is, but each
/// is clamped to [0,1] before weighting so the aggregate lies in [0,1].
template <typename Scalar>
QualityReport iqm_score(const RgbImageT<Scalar>& i, const RgbImageT<Scalar>& j,
                        const IqmWeights& w = {}) {
    require_same_size(i, j);
    w.validate();
    QualityReport rep;
    rep.q_c = contrast_gain(i, j);
    rep.q_a = acutance_gain(i, j);
    rep.q_bi = border_integrity(i, j);
    rep.q_g = gray_world(j);
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    rep.iqm = w.lambda_c * clamp01(rep.q_c) + w.lambda_a * clamp01(rep.q_a) +
              w.lambda_bi * clamp01(rep.q_bi) + w.lambda_g * clamp01(rep.q_g);
    return rep;
}

/// Smooth training-time aggregate (unclamped components, soft edges) and its
/// gradient with respect to every pixel of j.
template <typename Scalar>
struct SmoothIqm {
    Scalar score;
    RgbImageT<Scalar> grad; // d score / d j, per channel
};

template <typename Scalar>
SmoothIqm<Scalar> smooth_iqm(const RgbImageT<Scalar>& i, const RgbImageT<Scalar>& j,
                             const IqmWeights& w, Scalar steepness) {
    require_same_size(i, j);
    w.validate();
    if (steepness <= Scalar(0)) throw std::invalid_argument("steepness must be positive");
    const PlaneT<Scalar> gray_i = to_gray(i);
    const PlaneT<Scalar> gray_j = to_gray(j);

    const Scalar q_c = local_variance(gray_j).mean() - local_variance(gray_i).mean();
    const Scalar q_a = acutance(gray_j) - acutance(gray_i);
    const PlaneT<Scalar> ed =
        dilated_edge_support(i, Scalar(kEdgeThreshold), kEdgeDilationRadius);
    PlaneT<Scalar> bi_grad;
    const Scalar q_bi = detail::soft_border_integrity_impl<Scalar>(
        gray_j, ed, steepness, Scalar(kEdgeThreshold), &bi_grad);
    const Scalar q_g = gray_world(j);

    SmoothIqm<Scalar> out;
    out.score = Scalar(w.lambda_c) * q_c + Scalar(w.lambda_a) * q_a +
                Scalar(w.lambda_bi) * q_bi + Scalar(w.lambda_g) * q_g;

    PlaneT<Scalar> grad_gray = Scalar(w.lambda_c) * contrast_gain_grad_gray(gray_j) +
                               Scalar(w.lambda_a) * acutance_grad_gray(gray_j) +
                               Scalar(w.lambda_bi) * bi_grad;
    out.grad = gray_world_grad(j);
    out.grad.r = Scalar(w.lambda_g) * out.grad.r + Scalar(kLumaR) * grad_gray;
    out.grad.g = Scalar(w.lambda_g) * out.grad.g + Scalar(kLumaG) * grad_gray;
    out.grad.b = Scalar(w.lambda_g) * out.grad.b + Scalar(kLumaB) * grad_gray;
    return out;
}

namespace detail {

// Linear-interpolation percentile of an unsorted sample, q in [0,1].
template <typename Scalar>
Scalar percentile(std::vector<Scalar> values, double q) {
    if (values.empty()) return Scalar(0);
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return static_cast<Scalar>((1.0 - frac) * values[lo] + frac * values[hi]);
}

} // namespace detail

/// UCIQE = c1 * std of CIELab chroma + c2 * (99th - 1st percentile of L)
///       + c3 * mean HSV saturation. Unnormalized.
template <typename Scalar>
Scalar uciqe(const RgbImageT<Scalar>& img, const UciqeCoefficients& c = {}) {
    const LabImageT<Scalar> lab = srgb_to_lab(img);
    const PlaneT<Scalar> chroma = (lab.a.square() + lab.b.square()).sqrt();
    const Scalar chroma_var = chroma.square().mean() - chroma.mean() * chroma.mean();
    const Scalar sigma_c = std::sqrt(std::max(chroma_var, Scalar(0)));

    std::vector<Scalar> lum(lab.L.data(), lab.L.data() + lab.L.size());
    const Scalar con_l =
        detail::percentile(lum, 0.99) - detail::percentile(std::move(lum), 0.01);

    const Scalar mu_s = hsv_saturation(img).mean();
    return Scalar(c.c1) * sigma_c + Scalar(c.c2) * con_l + Scalar(c.c3) * mu_s;
}

} // namespace aqua

#endif
