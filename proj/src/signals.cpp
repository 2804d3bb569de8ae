#include "ggr/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ggr
{
    namespace
    {
        using std::numbers::pi;

        void require_rank(std::size_t d, const GridGeometry& geometry)
        {
            require(geometry.rank() == d, "signal: geometry rank " + std::to_string(geometry.rank()) +
                                              " does not match dimension " + std::to_string(d));
        }

        bool finite_all(const std::vector<double>& v)
        {
            return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        }

        void check_shift(const TimeFrequencyShift& s, std::size_t d)
        {
            require(s.center.size() == d && s.frequency.size() == d, "signal: center/frequency length must equal d");
            require(finite_all(s.center) && finite_all(s.frequency), "signal: parameters must be finite");
        }

        /// e^{2 pi i b.t} e^{-pi|t-a|^2}; the phase b.t is reduced mod 1 before scaling by 2 pi.
        Complex shifted_value(const TimeFrequencyShift& s, std::span<const double> t)
        {
            double r2 = 0.0, phase = 0.0;
            for (std::size_t a = 0; a < t.size(); ++a)
            {
                const double dt = t[a] - s.center[a];
                r2 += dt * dt;
                phase += s.frequency[a] * t[a];
            }
            phase -= std::round(phase);
            return std::polar(std::exp(-pi * r2), 2.0 * pi * phase);
        }

        template <typename Fn>
        SignalGrid sample(const GridGeometry& geometry, Fn&& fn)
        {
            std::vector<Complex> values(geometry.size());
            std::vector<double> t(geometry.rank());
            for (std::size_t i = 0; i < values.size(); ++i)
            {
                geometry.point(i, t);
                values[i] = fn(std::span<const double>(t));
            }
            return SignalGrid(geometry, std::move(values));
        }
    }  // namespace

    AnalyticSignalSpec AnalyticSignalSpec::gaussian(std::size_t d)
    {
        AnalyticSignalSpec s;
        s.kind = SignalKind::gaussian;
        s.dimension = d;
        s.first = {std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
        return s;
    }

    AnalyticSignalSpec AnalyticSignalSpec::shifted(std::vector<double> center, std::vector<double> frequency)
    {
        AnalyticSignalSpec s;
        s.kind = SignalKind::shifted_gaussian;
        s.dimension = center.size();
        s.first = {std::move(center), std::move(frequency)};
        return s;
    }

    AnalyticSignalSpec AnalyticSignalSpec::two_bump(TimeFrequencyShift first, TimeFrequencyShift second, int sign)
    {
        AnalyticSignalSpec s;
        s.kind = SignalKind::two_bump;
        s.dimension = first.center.size();
        s.first = std::move(first);
        s.second = std::move(second);
        s.sign = sign;
        return s;
    }

    void AnalyticSignalSpec::validate() const
    {
        require(dimension >= 1, "signal: dimension must be positive");
        if (kind == SignalKind::gaussian)
            return;
        check_shift(first, dimension);
        if (kind == SignalKind::two_bump)
        {
            check_shift(second, dimension);
            require(sign == 1 || sign == -1, "signal: two-bump sign must be +1 or -1");
            const bool same = first.center == second.center && first.frequency == second.frequency;
            require(!(same && sign == -1), "signal: two-bump difference of coincident bumps is the zero signal");
        }
    }

    SignalGrid make_gaussian(std::size_t d, const GridGeometry& geometry)
    {
        require_rank(d, geometry);
        return sample(geometry, [](std::span<const double> t) {
            double r2 = 0.0;
            for (double x : t)
                r2 += x * x;
            return Complex(std::exp(-pi * r2), 0.0);
        });
    }

    SignalGrid make_analytic(const AnalyticSignalSpec& spec, const GridGeometry& geometry)
    {
        spec.validate();
        require_rank(spec.dimension, geometry);
        switch (spec.kind)
        {
            case SignalKind::gaussian:
                return make_gaussian(spec.dimension, geometry);
            case SignalKind::shifted_gaussian:
                return sample(geometry, [&](std::span<const double> t) { return shifted_value(spec.first, t); });
            case SignalKind::two_bump:
                return sample(geometry, [&](std::span<const double> t) {
                    return shifted_value(spec.first, t) + double(spec.sign) * shifted_value(spec.second, t);
                });
        }
        fail(ErrorKind::invalid_argument, "signal: unknown kind");
    }

    SignalGrid make_hermite(std::size_t order, const GridGeometry& geometry)
    {
        // ||H_k(sqrt(2 pi) t) e^{-pi t^2}||_2^2 = 2^k k! / sqrt(2); the remaining axes carry
        // e^{-pi t^2}, whose squared norm is 1/sqrt(2) each.
        double norm2 = 1.0 / std::sqrt(2.0);
        for (std::size_t j = 1; j <= order; ++j)
            norm2 *= 2.0 * double(j);
        for (std::size_t a = 1; a < geometry.rank(); ++a)
            norm2 /= std::sqrt(2.0);
        const double scale = 1.0 / std::sqrt(norm2);
        const double root = std::sqrt(2.0 * pi);
        return sample(geometry, [&](std::span<const double> t) {
            const double u = root * t[0];
            double h_prev = 1.0, h = 2.0 * u;
            if (order == 0)
                h = 1.0;
            for (std::size_t k = 1; k < order; ++k)
            {
                const double next = 2.0 * u * h - 2.0 * double(k) * h_prev;
                h_prev = h;
                h = next;
            }
            double r2 = 0.0;
            for (double x : t)
                r2 += x * x;
            return Complex(scale * h * std::exp(-pi * r2), 0.0);
        });
    }

    SignalGrid combine(Complex a, const SignalGrid& f, Complex b, const SignalGrid& g)
    {
        require(f.geometry() == g.geometry(), "combine: geometries differ");
        std::vector<Complex> values(f.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = a * f[i] + b * g[i];
        return SignalGrid(f.geometry(), std::move(values));
    }

    SignalGrid scaled(const SignalGrid& f, Complex c)
    {
        std::vector<Complex> values(f.values().begin(), f.values().end());
        for (auto& v : values)
            v *= c;
        return SignalGrid(f.geometry(), std::move(values));
    }

    double boundary_ratio(const ComplexGrid& f)
    {
        const GridGeometry& g = f.geometry();
        double peak = 0.0, edge = 0.0;
        std::vector<std::size_t> idx(g.rank());
        for (std::size_t i = 0; i < f.size(); ++i)
        {
            const double m = std::abs(f[i]);
            peak = std::max(peak, m);
            g.unravel(i, idx);
            for (std::size_t a = 0; a < g.rank(); ++a)
                if (idx[a] == 0 || idx[a] + 1 == g.extent(a))
                {
                    edge = std::max(edge, m);
                    break;
                }
        }
        return peak > 0.0 ? edge / peak : 0.0;
    }
}  // namespace ggr
