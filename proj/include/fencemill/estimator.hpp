#pragma once
/**
 * @file   estimator.hpp
 * @brief  Beacon bearing from range rates and headings.
 *
 * A vehicle moving at speed A with heading psi, seen from the beacon at
 * bearing theta, has range rate u_r = A cos(theta - psi). Expanding the
 * cosine makes this linear in (K1, K2) = A (cos theta, sin theta):
 *
 *     u_r = K1 cos psi + K2 sin psi
 *
 * so a window of (u_r, psi) pairs gives (K1, K2) by least squares and
 * theta = atan2(K2, K1). Here theta is the bearing of the vehicle as seen
 * from the beacon; the beacon lies at theta + 180 degrees from the vehicle.
 */

#include "angles.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace fencemill
{
    struct EstimatorEntry
    {
        double u_r = 0.0; ///< range rate, m/s
        double psi = 0.0; ///< heading when the rate was received, rad
        double t = 0.0;   ///< reception time, s

        friend bool operator== (const EstimatorEntry &, const EstimatorEntry &) = default;
    };

    struct ThetaEstimate
    {
        double theta = 0.0;        ///< rad, (-pi, pi]
        double amplitude = 0.0;    ///< fitted speed A, m/s
        double conditioning = 0.0; ///< sqrt of the smallest eigenvalue of X^T X / n
        bool valid = false;

        friend bool operator== (const ThetaEstimate &, const ThetaEstimate &) = default;
    };

    inline constexpr double kDefaultMinConditioning = 1e-3;
    inline constexpr double kMinAmplitude = 1e-9;

    [[nodiscard]] inline ThetaEstimate estimate_theta (std::span<const EstimatorEntry> window,
                                                       double min_conditioning = kDefaultMinConditioning) noexcept
    {
        ThetaEstimate est;
        if (window.size () < 2)
            return est;

        double scc = 0.0, scs = 0.0, sss = 0.0, suc = 0.0, sus = 0.0;
        for (const EstimatorEntry &e : window)
        {
            const double c = std::cos (e.psi), s = std::sin (e.psi);
            scc += c * c;
            scs += c * s;
            sss += s * s;
            suc += e.u_r * c;
            sus += e.u_r * s;
        }
        const double n = static_cast<double> (window.size ());
        const double half_trace = (scc + sss) / (2.0 * n);
        const double radius = std::hypot ((scc - sss) / (2.0 * n), scs / n);
        est.conditioning = std::sqrt (std::max (0.0, half_trace - radius));

        const double det = scc * sss - scs * scs;
        if (!(est.conditioning > min_conditioning) || det <= 0.0)
            return est;

        const double k1 = (sss * suc - scs * sus) / det;
        const double k2 = (scc * sus - scs * suc) / det;
        est.amplitude = std::hypot (k1, k2);
        if (!(est.amplitude > kMinAmplitude))
            return est;
        est.theta = normalize_angle (std::atan2 (k2, k1));
        est.valid = true;
        return est;
    }

} // namespace fencemill
