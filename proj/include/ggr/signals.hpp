#pragma once

#include <vector>

#include "ggr/grid.hpp"

namespace ggr
{
    enum class SignalKind
    {
        gaussian,          ///< e^{-pi|t|^2}
        shifted_gaussian,  ///< e^{2 pi i b.t} e^{-pi|t-a|^2}
        two_bump,          ///< f_1 + sign * f_2 of two shifted gaussians
    };

    struct TimeFrequencyShift
    {
        std::vector<double> center;     ///< a in R^d
        std::vector<double> frequency;  ///< b in R^d
    };

    struct AnalyticSignalSpec
    {
        SignalKind kind = SignalKind::gaussian;
        std::size_t dimension = 1;
        TimeFrequencyShift first;
        TimeFrequencyShift second;  ///< two-bump only
        int sign = 1;               ///< two-bump only, +1 or -1

        static AnalyticSignalSpec gaussian(std::size_t d);
        static AnalyticSignalSpec shifted(std::vector<double> center, std::vector<double> frequency);
        static AnalyticSignalSpec two_bump(TimeFrequencyShift first, TimeFrequencyShift second, int sign);

        /// Throws on non-finite parameters, wrong lengths, a bad sign, or a two-bump
        /// difference (sign -1) of identical bumps, which is the zero signal.
        void validate() const;
    };

    SignalGrid make_gaussian(std::size_t d, const GridGeometry& geometry);
    SignalGrid make_analytic(const AnalyticSignalSpec& spec, const GridGeometry& geometry);

    /// L^2-normalised Hermite function H_k(sqrt(2 pi) t_1) e^{-pi|t|^2}, varying along the first axis.
    SignalGrid make_hermite(std::size_t order, const GridGeometry& geometry);

    /// a * f + b * g on a shared geometry.
    SignalGrid combine(Complex a, const SignalGrid& f, Complex b, const SignalGrid& g);
    SignalGrid scaled(const SignalGrid& f, Complex c);

    /// Largest |f| on the outer faces of the box divided by max |f| (0 for the zero signal).
    double boundary_ratio(const ComplexGrid& f);
}  // namespace ggr
