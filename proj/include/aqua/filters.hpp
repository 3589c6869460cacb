#ifndef AQUA_FILTERS_HPP
#define AQUA_FILTERS_HPP

#include "aqua/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aqua {

/// Mirror an out-of-range index back into [0, n), repeating the edge sample
/// (…, 1, 0 | 0, 1, …). Folds as often as needed, so any pad width is valid.
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

/// Materialize a reflect-padded copy: `before` extra rows/cols on the
/// top/left, `after` on the bottom/right.
template <typename Scalar>
PlaneT<Scalar> pad_reflect(const PlaneT<Scalar>& src, Eigen::Index before, Eigen::Index after) {
    const Eigen::Index h = src.rows(), w = src.cols();
    PlaneT<Scalar> out(h + before + after, w + before + after);
    for (Eigen::Index y = 0; y < out.rows(); ++y) {
        const Eigen::Index sy = reflect_index(y - before, h);
        for (Eigen::Index x = 0; x < out.cols(); ++x) {
            out(y, x) = src(sy, reflect_index(x - before, w));
        }
    }
    return out;
}

/// Adjoint of pad_reflect: scatter-add every padded cell back to the source
/// pixel it mirrored. Exact transpose of the padding, used by all backward
/// passes that read padded planes.
template <typename Scalar>
PlaneT<Scalar> fold_reflect(const PlaneT<Scalar>& padded, Eigen::Index before,
                            Eigen::Index h, Eigen::Index w) {
    PlaneT<Scalar> out = PlaneT<Scalar>::Zero(h, w);
    for (Eigen::Index y = 0; y < padded.rows(); ++y) {
        const Eigen::Index sy = reflect_index(y - before, h);
        for (Eigen::Index x = 0; x < padded.cols(); ++x) {
            out(sy, reflect_index(x - before, w)) += padded(y, x);
        }
    }
    return out;
}

namespace detail {

// Sobel responses via shifted blocks of a 1-pixel reflect pad.
template <typename Scalar>
void sobel_xy(const PlaneT<Scalar>& img, PlaneT<Scalar>& gx, PlaneT<Scalar>& gy) {
    const Eigen::Index h = img.rows(), w = img.cols();
    const PlaneT<Scalar> p = pad_reflect(img, 1, 1);
    auto blk = [&](Eigen::Index dy, Eigen::Index dx) { return p.block(dy, dx, h, w); };
    gx = (blk(0, 2) - blk(0, 0)) + Scalar(2) * (blk(1, 2) - blk(1, 0)) + (blk(2, 2) - blk(2, 0));
    gy = (blk(2, 0) - blk(0, 0)) + Scalar(2) * (blk(2, 1) - blk(0, 1)) + (blk(2, 2) - blk(0, 2));
}

} // namespace detail

/// Gradient magnitude sqrt(Gx^2 + Gy^2) with the standard 3x3 Sobel kernels,
/// reflect padding at the borders. Output is not clamped.
template <typename Scalar>
PlaneT<Scalar> sobel_magnitude(const PlaneT<Scalar>& img) {
    if (img.rows() < 3 || img.cols() < 3)
        throw std::invalid_argument("sobel_magnitude: image must be at least 3x3");
    PlaneT<Scalar> gx, gy;
    detail::sobel_xy(img, gx, gy);
    return (gx.square() + gy.square()).sqrt();
}

/// Backward of sobel_magnitude: given dL/dmag, return dL/dimg. Pixels with
/// zero magnitude get zero gradient (subgradient convention).
template <typename Scalar>
PlaneT<Scalar> sobel_magnitude_backward(const PlaneT<Scalar>& img, const PlaneT<Scalar>& grad_mag) {
    const Eigen::Index h = img.rows(), w = img.cols();
    PlaneT<Scalar> gx, gy;
    detail::sobel_xy(img, gx, gy);
    PlaneT<Scalar> mag = (gx.square() + gy.square()).sqrt();
    PlaneT<Scalar> scale = (mag > Scalar(0)).select(grad_mag / mag, PlaneT<Scalar>::Zero(h, w));
    PlaneT<Scalar> dgx = scale * gx;
    PlaneT<Scalar> dgy = scale * gy;

    PlaneT<Scalar> pgrad = PlaneT<Scalar>::Zero(h + 2, w + 2);
    const Scalar kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    const Scalar ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    for (Eigen::Index dy = 0; dy < 3; ++dy) {
        for (Eigen::Index dx = 0; dx < 3; ++dx) {
            if (kx[dy][dx] != Scalar(0)) pgrad.block(dy, dx, h, w) += kx[dy][dx] * dgx;
            if (ky[dy][dx] != Scalar(0)) pgrad.block(dy, dx, h, w) += ky[dy][dx] * dgy;
        }
    }
    return fold_reflect(pgrad, 1, h, w);
}

/// Morphological dilation of a {0,1} mask with a square structuring element
/// of side 2*radius+1. Windows are clipped at the image border.
template <typename Scalar>
PlaneT<Scalar> dilate(const PlaneT<Scalar>& mask, Eigen::Index radius) {
    const Eigen::Index h = mask.rows(), w = mask.cols();
    PlaneT<Scalar> out = PlaneT<Scalar>::Zero(h, w);
    for (Eigen::Index y = 0; y < h; ++y) {
        const Eigen::Index y0 = std::max<Eigen::Index>(0, y - radius);
        const Eigen::Index y1 = std::min(h - 1, y + radius);
        for (Eigen::Index x = 0; x < w; ++x) {
            const Eigen::Index x0 = std::max<Eigen::Index>(0, x - radius);
            const Eigen::Index x1 = std::min(w - 1, x + radius);
            out(y, x) = mask.block(y0, x0, y1 - y0 + 1, x1 - x0 + 1).maxCoeff();
        }
    }
    return out;
}

/// Bilinear resize with half-pixel centers and edge clamping. Preserves
/// constants exactly and is the identity when the size does not change.
template <typename Scalar>
PlaneT<Scalar> resize_bilinear(const PlaneT<Scalar>& img, Eigen::Index out_h, Eigen::Index out_w) {
    if (out_h < 1 || out_w < 1)
        throw std::invalid_argument("resize_bilinear: target size must be positive");
    const Eigen::Index h = img.rows(), w = img.cols();
    if (out_h == h && out_w == w) return img;
    PlaneT<Scalar> out(out_h, out_w);
    const double sy = static_cast<double>(h) / static_cast<double>(out_h);
    const double sx = static_cast<double>(w) / static_cast<double>(out_w);
    for (Eigen::Index y = 0; y < out_h; ++y) {
        double fy = (static_cast<double>(y) + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(h - 1));
        const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(fy));
        const Eigen::Index y1 = std::min(y0 + 1, h - 1);
        const double wy = fy - static_cast<double>(y0);
        for (Eigen::Index x = 0; x < out_w; ++x) {
            double fx = (static_cast<double>(x) + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(w - 1));
            const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(fx));
            const Eigen::Index x1 = std::min(x0 + 1, w - 1);
            const double wx = fx - static_cast<double>(x0);
            const double v = (1.0 - wy) * ((1.0 - wx) * img(y0, x0) + wx * img(y0, x1)) +
                             wy * ((1.0 - wx) * img(y1, x0) + wx * img(y1, x1));
            out(y, x) = static_cast<Scalar>(v);
        }
    }
    return out;
}

/// Per-pixel mean and mean-of-squares over a (2*radius+1)^2 reflect-padded
/// window; the building block for local variance.
template <typename Scalar>
void window_moments(const PlaneT<Scalar>& img, Eigen::Index radius,
                    PlaneT<Scalar>& mean, PlaneT<Scalar>& mean_sq) {
    const Eigen::Index h = img.rows(), w = img.cols();
    const Eigen::Index side = 2 * radius + 1;
    const PlaneT<Scalar> p = pad_reflect(img, radius, radius);
    mean = PlaneT<Scalar>::Zero(h, w);
    mean_sq = PlaneT<Scalar>::Zero(h, w);
    for (Eigen::Index dy = 0; dy < side; ++dy) {
        for (Eigen::Index dx = 0; dx < side; ++dx) {
            auto blk = p.block(dy, dx, h, w);
            mean += blk;
            mean_sq += blk.square();
        }
    }
    const Scalar inv = Scalar(1) / Scalar(side * side);
    mean *= inv;
    mean_sq *= inv;
}

} // namespace aqua

#endif
