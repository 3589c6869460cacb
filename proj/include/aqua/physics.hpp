#ifndef AQUA_PHYSICS_HPP
#define AQUA_PHYSICS_HPP

#include "aqua/image.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace aqua {

/// Per-pixel fraction of unattenuated light, t(x) = exp(-beta * d(x)).
using TransmissionMap = Plane;

/// Veiling light of the water column.
struct BackgroundLight {
    double r = 0, g = 0, b = 0;
    double channel(int c) const { return c == 0 ? r : (c == 1 ? g : b); }
};

/// Per-channel attenuation rate, units 1/distance.
struct AttenuationCoefficients {
    double beta_r = 0, beta_g = 0, beta_b = 0;
    double channel(int c) const { return c == 0 ? beta_r : (c == 1 ? beta_g : beta_b); }
    bool nonnegative() const { return beta_r >= 0 && beta_g >= 0 && beta_b >= 0; }
};

inline constexpr double kDefaultEpsilonT = 0.1;
inline constexpr double kDefaultBackgroundQuantile = 0.001;

/// Forward degradation I = J*t + B*(1-t). A convex combination, so the
/// output needs no clamping.
template <typename Scalar>
RgbImageT<Scalar> degrade(const RgbImageT<Scalar>& j, const PlaneT<Scalar>& t,
                          const BackgroundLight& b) {
    if (j.rows() != t.rows() || j.cols() != t.cols())
        throw std::invalid_argument("degrade: transmission map size mismatch");
    RgbImageT<Scalar> out;
    out.r = j.r * t + Scalar(b.r) * (Scalar(1) - t);
    out.g = j.g * t + Scalar(b.g) * (Scalar(1) - t);
    out.b = j.b * t + Scalar(b.b) * (Scalar(1) - t);
    return out;
}

/// Per-channel degradation with its own transmission map per channel.
template <typename Scalar>
RgbImageT<Scalar> degrade(const RgbImageT<Scalar>& j, const PlaneT<Scalar>& tr,
                          const PlaneT<Scalar>& tg, const PlaneT<Scalar>& tb,
                          const BackgroundLight& b) {
    RgbImageT<Scalar> out;
    out.r = j.r * tr + Scalar(b.r) * (Scalar(1) - tr);
    out.g = j.g * tg + Scalar(b.g) * (Scalar(1) - tg);
    out.b = j.b * tb + Scalar(b.b) * (Scalar(1) - tb);
    return out;
}

/// Inversion J = (I - B) / max(t, epsilon) + B, clamped to [0,1].
template <typename Scalar>
RgbImageT<Scalar> restore(const RgbImageT<Scalar>& i, const PlaneT<Scalar>& t,
                          const BackgroundLight& b, Scalar epsilon_t = Scalar(kDefaultEpsilonT)) {
    if (i.rows() != t.rows() || i.cols() != t.cols())
        throw std::invalid_argument("restore: transmission map size mismatch");
    if (epsilon_t <= Scalar(0) || epsilon_t >= Scalar(1))
        throw std::invalid_argument("restore: epsilon_t must be in (0,1)");
    const PlaneT<Scalar> t_eff = t.max(epsilon_t);
    RgbImageT<Scalar> out;
    out.r = ((i.r - Scalar(b.r)) / t_eff + Scalar(b.r)).min(Scalar(1)).max(Scalar(0));
    out.g = ((i.g - Scalar(b.g)) / t_eff + Scalar(b.g)).min(Scalar(1)).max(Scalar(0));
    out.b = ((i.b - Scalar(b.b)) / t_eff + Scalar(b.b)).min(Scalar(1)).max(Scalar(0));
    return out;
}

/// Chain rule through restore: maps dL/dJ to dL/dt. The transmission floor
/// and the [0,1] output clamp both gate the gradient to zero outside their
/// active regions; the background light is held constant.
template <typename Scalar>
PlaneT<Scalar> restore_backward_t(const RgbImageT<Scalar>& i, const PlaneT<Scalar>& t,
                                  const BackgroundLight& b, Scalar epsilon_t,
                                  const RgbImageT<Scalar>& grad_j) {
    const Eigen::Index h = i.rows(), w = i.cols();
    const PlaneT<Scalar> t_eff = t.max(epsilon_t);
    PlaneT<Scalar> grad_t = PlaneT<Scalar>::Zero(h, w);
    for (int c = 0; c < 3; ++c) {
        const Scalar bc = Scalar(b.channel(c));
        const PlaneT<Scalar>& ic = i.channel(c);
        const PlaneT<Scalar> raw = (ic - bc) / t_eff + bc;
        const PlaneT<Scalar> pass =
            ((raw >= Scalar(0)) && (raw <= Scalar(1))).template cast<Scalar>();
        grad_t += grad_j.channel(c) * pass * (-(ic - bc) / t_eff.square());
    }
    return grad_t * (t > epsilon_t).template cast<Scalar>();
}

/// Background light from the most-attenuated pixels: among the `quantile`
/// fraction with the lowest transmission, pick the pixel with the highest
/// gray intensity and return its full RGB triple (row-major tie-break).
template <typename Scalar>
BackgroundLight estimate_background(const RgbImageT<Scalar>& i, const PlaneT<Scalar>& t,
                                    double quantile = kDefaultBackgroundQuantile) {
    if (i.rows() != t.rows() || i.cols() != t.cols())
        throw std::invalid_argument("estimate_background: transmission map size mismatch");
    if (quantile <= 0 || quantile >= 1)
        throw std::invalid_argument("estimate_background: quantile must be in (0,1)");
    const Eigen::Index n = t.size();
    std::vector<Scalar> sorted(t.data(), t.data() + n);
    const Eigen::Index k = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(quantile * static_cast<double>(n)));
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
    const Scalar t0 = sorted[k - 1];

    Scalar best = Scalar(-1);
    BackgroundLight bg;
    for (Eigen::Index y = 0; y < t.rows(); ++y) {
        for (Eigen::Index x = 0; x < t.cols(); ++x) {
            if (t(y, x) > t0) continue;
            const Scalar gray = Scalar(kLumaR) * i.r(y, x) + Scalar(kLumaG) * i.g(y, x) +
                                Scalar(kLumaB) * i.b(y, x);
            if (gray > best) {
                best = gray;
                bg = BackgroundLight{double(i.r(y, x)), double(i.g(y, x)), double(i.b(y, x))};
            }
        }
    }
    return bg;
}

} // namespace aqua

#endif
