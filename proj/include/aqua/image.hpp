#ifndef AQUA_IMAGE_HPP
#define AQUA_IMAGE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace aqua {

template <typename Scalar>
using PlaneT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Plane = PlaneT<double>;
using IndexPlane = Eigen::Array<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic>;

/// Three-channel image, intensities in [0,1], one dense plane per channel.
template <typename Scalar>
struct RgbImageT {
    PlaneT<Scalar> r, g, b;

    RgbImageT() = default;
    RgbImageT(Eigen::Index rows, Eigen::Index cols)
        : r(PlaneT<Scalar>::Zero(rows, cols)),
          g(PlaneT<Scalar>::Zero(rows, cols)),
          b(PlaneT<Scalar>::Zero(rows, cols)) {}

    Eigen::Index rows() const { return r.rows(); }
    Eigen::Index cols() const { return r.cols(); }

    const PlaneT<Scalar>& channel(int c) const { return c == 0 ? r : (c == 1 ? g : b); }
    PlaneT<Scalar>& channel(int c) { return c == 0 ? r : (c == 1 ? g : b); }

    static RgbImageT constant(Eigen::Index rows, Eigen::Index cols,
                              Scalar cr, Scalar cg, Scalar cb) {
        RgbImageT out;
        out.r = PlaneT<Scalar>::Constant(rows, cols, cr);
        out.g = PlaneT<Scalar>::Constant(rows, cols, cg);
        out.b = PlaneT<Scalar>::Constant(rows, cols, cb);
        return out;
    }
};

using RgbImage = RgbImageT<double>;

/// CIELab planes under D65; L in [0,100].
template <typename Scalar>
struct LabImageT {
    PlaneT<Scalar> L, a, b;
    Eigen::Index rows() const { return L.rows(); }
    Eigen::Index cols() const { return L.cols(); }
};

using LabImage = LabImageT<double>;

template <typename Scalar>
bool same_size(const RgbImageT<Scalar>& x, const RgbImageT<Scalar>& y) {
    return x.rows() == y.rows() && x.cols() == y.cols();
}

template <typename Scalar>
void require_same_size(const RgbImageT<Scalar>& x, const RgbImageT<Scalar>& y) {
    if (!same_size(x, y)) throw std::invalid_argument("image dimensions do not match");
}

// Rec.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

template <typename Scalar>
PlaneT<Scalar> to_gray(const RgbImageT<Scalar>& img) {
    return Scalar(kLumaR) * img.r + Scalar(kLumaG) * img.g + Scalar(kLumaB) * img.b;
}

namespace detail {

template <typename Scalar>
Scalar srgb_to_linear(Scalar c) {
    return c <= Scalar(0.04045) ? c / Scalar(12.92)
                                : std::pow((c + Scalar(0.055)) / Scalar(1.055), Scalar(2.4));
}

template <typename Scalar>
Scalar lab_f(Scalar t) {
    constexpr double d = 6.0 / 29.0;
    return t > Scalar(d * d * d) ? std::cbrt(t)
                                 : t / Scalar(3.0 * d * d) + Scalar(4.0 / 29.0);
}

} // namespace detail

/// sRGB -> linear -> XYZ(D65) -> CIELab.
template <typename Scalar>
LabImageT<Scalar> srgb_to_lab(const RgbImageT<Scalar>& img) {
    const Eigen::Index h = img.rows(), w = img.cols();
    LabImageT<Scalar> out;
    out.L.resize(h, w);
    out.a.resize(h, w);
    out.b.resize(h, w);
    // sRGB D65 reference primaries; white point (0.95047, 1.0, 1.08883)
    constexpr double M[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                                {0.2126729, 0.7151522, 0.0721750},
                                {0.0193339, 0.1191920, 0.9503041}};
    constexpr double Xn = 0.95047, Yn = 1.0, Zn = 1.08883;
    for (Eigen::Index y = 0; y < h; ++y) {
        for (Eigen::Index x = 0; x < w; ++x) {
            const Scalar r = detail::srgb_to_linear(img.r(y, x));
            const Scalar g = detail::srgb_to_linear(img.g(y, x));
            const Scalar b = detail::srgb_to_linear(img.b(y, x));
            const Scalar X = Scalar(M[0][0]) * r + Scalar(M[0][1]) * g + Scalar(M[0][2]) * b;
            const Scalar Y = Scalar(M[1][0]) * r + Scalar(M[1][1]) * g + Scalar(M[1][2]) * b;
            const Scalar Z = Scalar(M[2][0]) * r + Scalar(M[2][1]) * g + Scalar(M[2][2]) * b;
            const Scalar fx = detail::lab_f(Scalar(X / Xn));
            const Scalar fy = detail::lab_f(Scalar(Y / Yn));
            const Scalar fz = detail::lab_f(Scalar(Z / Zn));
            out.L(y, x) = Scalar(116) * fy - Scalar(16);
            out.a(y, x) = Scalar(500) * (fx - fy);
            out.b(y, x) = Scalar(200) * (fy - fz);
        }
    }
    return out;
}

/// HSV saturation plane: (max - min) / max, zero for black pixels.
template <typename Scalar>
PlaneT<Scalar> hsv_saturation(const RgbImageT<Scalar>& img) {
    PlaneT<Scalar> maxc = img.r.max(img.g).max(img.b);
    PlaneT<Scalar> minc = img.r.min(img.g).min(img.b);
    return (maxc > Scalar(0)).select((maxc - minc) / maxc, PlaneT<Scalar>::Zero(img.rows(), img.cols()));
}

} // namespace aqua

#endif
