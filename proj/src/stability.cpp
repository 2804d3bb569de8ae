#include "ggr/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "ggr/numerics.hpp"
#include "ggr/signals.hpp"

namespace ggr
{
    namespace
    {
        using std::numbers::pi;
        constexpr double inf = std::numeric_limits<double>::infinity();

        void require_same(const GridGeometry& a, const GridGeometry& b, const char* what)
        {
            require(a == b, std::string(what) + ": geometries differ");
        }

        double wrap_angle(double theta)
        {
            theta = std::fmod(theta, 2.0 * pi);
            if (theta < 0.0)
                theta += 2.0 * pi;
            if (theta >= 2.0 * pi)
                theta = 0.0;
            return theta;
        }

        /// sum over active cells of |F2 - e^{i theta} F1|^p.
        double misfit(const ComplexGrid& F1, const ComplexGrid& F2, double p, const std::vector<bool>& mask, double theta)
        {
            const Complex a = std::polar(1.0, theta);
            CompensatedSum s;
            for (std::size_t i = 0; i < F1.size(); ++i)
                if (mask[i])
                    s += std::pow(std::abs(F2[i] - a * F1[i]), p);
            return s.value();
        }

        double residual_from(double sum, double p, double vol)
        {
            const double s = sum * vol;
            return s > 0.0 ? std::pow(s, 1.0 / p) : 0.0;
        }

        PhaseAlignment align_on(const ComplexGrid& F1, const ComplexGrid& F2, double p, const std::vector<bool>& mask,
                                AlignMethod method)
        {
            require(p >= 1.0 && std::isfinite(p), "alignment: p must be finite and >= 1");
            const double vol = F1.geometry().cell_volume();
            if (method == AlignMethod::automatic)
                method = p == 2.0 ? AlignMethod::closed_form : AlignMethod::search;

            PhaseAlignment out;
            out.method = method;
            if (method == AlignMethod::closed_form)
            {
                require(p == 2.0, "alignment: the closed form applies to p = 2 only");
                CompensatedSum re, im;
                for (std::size_t i = 0; i < F1.size(); ++i)
                    if (mask[i])
                    {
                        const Complex c = F2[i] * std::conj(F1[i]);
                        re += c.real();
                        im += c.imag();
                    }
                const Complex ip(re.value(), im.value());
                out.theta = std::abs(ip) > 0.0 ? wrap_angle(std::arg(ip)) : 0.0;
                out.residual = residual_from(misfit(F1, F2, p, mask, out.theta), p, vol);
                return out;
            }

            constexpr int coarse = 64;
            const double step = 2.0 * pi / coarse;
            int best_k = 0;
            double best = inf;
            for (int k = 0; k < coarse; ++k)
            {
                const double v = misfit(F1, F2, p, mask, step * k);
                if (v < best)
                {
                    best = v;
                    best_k = k;
                }
            }
            const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = step * (best_k - 1), b = step * (best_k + 1);
            double c = b - invphi * (b - a), d = a + invphi * (b - a);
            double fc = misfit(F1, F2, p, mask, c), fd = misfit(F1, F2, p, mask, d);
            while (b - a > 1e-10)
            {
                if (fc <= fd)
                {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - invphi * (b - a);
                    fc = misfit(F1, F2, p, mask, c);
                }
                else
                {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + invphi * (b - a);
                    fd = misfit(F1, F2, p, mask, d);
                }
            }
            double theta = 0.5 * (a + b);
            double value = misfit(F1, F2, p, mask, theta);
            if (best < value)
            {
                theta = step * best_k;
                value = best;
            }
            out.theta = wrap_angle(theta);
            out.residual = residual_from(value, p, vol);
            return out;
        }

        double weighted_norm(const RealGrid& S1, const RealGrid* S2, double q, const std::vector<double>& z0,
                             const std::vector<bool>& mask)
        {
            const GridGeometry& g = S1.geometry();
            require(z0.size() == g.rank(), "weighted norm: z0 must have one coordinate per axis");
            const double power = double(g.rank() + 2);  // 2d + 2 with rank = 2d
            std::vector<double> vals(S1.size(), 0.0);
            std::vector<double> z(g.rank());
            for (std::size_t i = 0; i < S1.size(); ++i)
            {
                if (!mask[i])
                    continue;
                g.point(i, z);
                double r2 = 0.0;
                for (std::size_t a = 0; a < z.size(); ++a)
                    r2 += (z[a] - z0[a]) * (z[a] - z0[a]);
                const double diff = S2 ? S1[i] - (*S2)[i] : S1[i];
                vals[i] = (1.0 + std::pow(r2, 0.5 * power)) * diff;
            }
            return lp_norm(vals, q, g.cell_volume(), mask);
        }
    }  // namespace

    PhaseAlignment align_phase_global(const ComplexGrid& F1, const ComplexGrid& F2, double p, const DomainPartition* mask,
                                      AlignMethod method)
    {
        require_same(F1.geometry(), F2.geometry(), "alignment");
        return align_on(F1, F2, p, active_mask(F1.geometry(), mask), method);
    }

    MulticomponentAlignment align_phase_multicomponent(const ComplexGrid& F1, const ComplexGrid& F2, double p,
                                                       const DomainPartition& partition)
    {
        require_same(F1.geometry(), F2.geometry(), "alignment");
        require_same(F1.geometry(), partition.geometry(), "alignment");
        MulticomponentAlignment out;
        for (int c = 0; c < partition.component_count(); ++c)
        {
            out.components.push_back(align_on(F1, F2, p, partition.component_mask(c), AlignMethod::automatic));
            out.total_residual += out.components.back().residual;
        }
        return out;
    }

    bool admissible(double p, double q, std::size_t d)
    {
        if (d < 1 || !std::isfinite(p) || !std::isfinite(q))
            return false;
        const double dd = double(d);
        if (!(p >= 1.0 && p < 1.0 + 1.0 / (2.0 * dd - 1.0)))
            return false;
        return q > p / (1.0 - p * (2.0 * dd - 1.0) / (2.0 * dd));
    }

    void require_admissible(double p, double q, std::size_t d)
    {
        if (admissible(p, q, d))
            return;
        char buf[200];
        const double dd = double(d);
        if (!(p >= 1.0 && p < 1.0 + 1.0 / (2.0 * dd - 1.0)))
            std::snprintf(buf, sizeof buf, "inadmissible parameters: p = %g must satisfy 1 <= p < %g for d = %zu", p,
                          1.0 + 1.0 / (2.0 * dd - 1.0), d);
        else
            std::snprintf(buf, sizeof buf, "inadmissible parameters: q = %g must exceed %g for p = %g, d = %zu", q,
                          p / (1.0 - p * (2.0 * dd - 1.0) / (2.0 * dd)), p, d);
        fail(ErrorKind::admissibility, buf);
    }

    SobolevParts sobolev_diff_parts(const RealGrid& S1, const RealGrid& S2, double p, const std::vector<bool>& mask)
    {
        require_same(S1.geometry(), S2.geometry(), "sobolev norm");
        const GridGeometry& g = S1.geometry();
        std::vector<double> diff(S1.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = S1[i] - S2[i];
        const std::vector<double> grad = gradient_magnitude(gradient<double>(diff, g, &mask));
        return {lp_norm(diff, p, g.cell_volume(), mask), lp_norm(grad, p, g.cell_volume(), mask)};
    }

    double sobolev_diff_norm(const RealGrid& S1, const RealGrid& S2, double p, const DomainPartition* mask)
    {
        return sobolev_diff_parts(S1, S2, p, active_mask(S1.geometry(), mask)).total();
    }

    double weighted_lq_diff_norm(const RealGrid& S1, const RealGrid& S2, double q, double p,
                                 const std::vector<double>& z0, const std::vector<bool>& mask)
    {
        require_same(S1.geometry(), S2.geometry(), "weighted norm");
        require(S1.geometry().rank() % 2 == 0, "weighted norm: phase-space rank must be even");
        require_admissible(p, q, S1.geometry().rank() / 2);
        return weighted_norm(S1, &S2, q, z0, mask);
    }

    LogDerivTerm logderiv_term(const RealGrid& S1, const RealGrid& S2, double p, const std::vector<bool>& mask)
    {
        require_same(S1.geometry(), S2.geometry(), "log-derivative term");
        const GridGeometry& g = S1.geometry();
        double peak = 0.0;
        std::size_t active = 0;
        for (std::size_t i = 0; i < S1.size(); ++i)
            if (mask[i])
            {
                peak = std::max(peak, S1[i]);
                ++active;
            }
        std::vector<bool> kept(S1.size(), false);
        std::size_t dropped = 0;
        for (std::size_t i = 0; i < S1.size(); ++i)
            if (mask[i])
            {
                kept[i] = S1[i] > 1e-12 * peak;
                dropped += kept[i] ? 0 : 1;
            }
        const std::vector<double> grad = gradient_magnitude(gradient<double>(S1.values(), g, &kept));
        std::vector<double> vals(S1.size(), 0.0);
        for (std::size_t i = 0; i < S1.size(); ++i)
            if (kept[i])
                vals[i] = grad[i] / S1[i] * (S1[i] - S2[i]);
        LogDerivTerm out;
        out.value = lp_norm(vals, p, g.cell_volume(), kept);
        out.excluded_fraction = active ? double(dropped) / double(active) : 0.0;
        return out;
    }

    std::pair<SignalGrid, SignalGrid> make_instability_pair(std::size_t d, double T, const GridGeometry& geometry)
    {
        require(std::isfinite(T) && T > 0.0, "instability pair: separation must be positive");
        std::vector<double> a1(d, 0.0), a2(d, 0.0), zero(d, 0.0);
        a1[0] = -0.5 * T;
        a2[0] = 0.5 * T;
        const TimeFrequencyShift s1{a1, zero}, s2{a2, zero};
        SignalGrid plus = make_analytic(AnalyticSignalSpec::two_bump(s1, s2, +1), geometry);
        SignalGrid minus = make_analytic(AnalyticSignalSpec::two_bump(s1, s2, -1), geometry);
        const SignalGrid single = make_analytic(AnalyticSignalSpec::shifted(a2, zero), geometry);
        require(boundary_ratio(plus) <= 1e-12 && boundary_ratio(single) <= 1e-12,
                "instability pair: grid too small to contain both bumps");
        return {std::move(plus), std::move(minus)};
    }

    RealGrid make_noise(const NoiseSpec& spec, const GridGeometry& geometry)
    {
        require(std::isfinite(spec.amplitude), "noise: amplitude must be finite");
        const std::size_t r = geometry.rank();
        std::vector<double> values(geometry.size());
        std::vector<double> z(r);
        if (spec.kind == NoiseSpec::Kind::gaussian_bump)
        {
            require(spec.width > 0.0 && std::isfinite(spec.width), "noise: width must be positive");
            std::vector<double> c = spec.center.empty() ? std::vector<double>(r, 0.0) : spec.center;
            require(c.size() == r, "noise: center must have one coordinate per axis");
            for (std::size_t i = 0; i < values.size(); ++i)
            {
                geometry.point(i, z);
                double r2 = 0.0;
                for (std::size_t a = 0; a < r; ++a)
                    r2 += (z[a] - c[a]) * (z[a] - c[a]);
                values[i] = spec.amplitude * std::exp(-pi * r2 / (spec.width * spec.width));
            }
            return RealGrid(geometry, std::move(values));
        }

        require(spec.bandwidth >= 0.0 && std::isfinite(spec.bandwidth), "noise: bandwidth must be finite");
        // Raw engine bits only, so the field is identical across standard libraries.
        std::mt19937_64 rng(spec.seed);
        auto uniform = [&] { return double(rng() >> 11) * 0x1.0p-53; };
        constexpr std::size_t waves = 16;
        std::vector<std::vector<double>> k(waves, std::vector<double>(r));
        std::vector<double> phase(waves);
        for (std::size_t w = 0; w < waves; ++w)
        {
            for (std::size_t a = 0; a < r; ++a)
                k[w][a] = spec.bandwidth * (2.0 * uniform() - 1.0);
            phase[w] = uniform();
        }
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            geometry.point(i, z);
            double s = 0.0;
            for (std::size_t w = 0; w < waves; ++w)
            {
                double arg = phase[w];
                for (std::size_t a = 0; a < r; ++a)
                    arg += k[w][a] * z[a];
                s += std::cos(2.0 * pi * arg);
            }
            values[i] = spec.amplitude * s / double(waves);
        }
        return RealGrid(geometry, std::move(values));
    }

    double dnorm(const RealGrid& field, double p, double q, const std::vector<double>& z0, const std::vector<bool>& mask)
    {
        require(field.geometry().rank() % 2 == 0, "dnorm: phase-space rank must be even");
        require_admissible(p, q, field.geometry().rank() / 2);
        const RealGrid zero(field.geometry(), std::vector<double>(field.size(), 0.0));
        return sobolev_diff_parts(field, zero, p, mask).total() + weighted_norm(field, nullptr, q, z0, mask);
    }

    StabilityReport stability_report(const SignalGrid& f, const SignalGrid& g, double p, double q,
                                     const StabilityOptions& options)
    {
        const std::size_t d = f.dimension();
        require_admissible(p, q, d);
        require_same(f.geometry(), g.geometry(), "stability report");
        const GridGeometry& pg = options.phase_geometry;
        require(pg.rank() == 2 * d, "stability report: phase-space rank must be twice the signal rank");

        const PhaseSpaceGrid Gf = gabor_transform(f, pg);
        const PhaseSpaceGrid Gg = gabor_transform(g, pg);
        const Spectrogram S1 = spectrogram(Gf);
        const Spectrogram S2 = spectrogram(Gg);
        require(S1.max_value() > 0.0, "stability report: f has a zero spectrogram");

        std::vector<bool> mask(pg.size());
        const std::vector<bool> restrict_to = active_mask(pg, options.partition ? &*options.partition : nullptr);
        std::size_t active = 0;
        for (std::size_t i = 0; i < pg.size(); ++i)
        {
            mask[i] = restrict_to[i] && S1[i] > options.mask_threshold * S1.max_value();
            active += mask[i] ? 1 : 0;
        }
        require(active >= 2, "stability report: active domain has fewer than two cells");

        StabilityReport rep;
        rep.p = p;
        rep.q = q;
        rep.d = d;
        rep.z0 = S1.argmax_location();
        rep.active_cells = active;

        const PhaseAlignment al = align_on(Gf, Gg, p, mask, AlignMethod::automatic);
        rep.lhs = al.residual;
        rep.theta = al.theta;

        std::vector<double> w(pg.size());
        for (std::size_t i = 0; i < pg.size(); ++i)
            w[i] = std::pow(S1[i], p);
        const WeightGrid weight(pg, std::move(w), mask);
        const CheegerEstimate est = sweep_cut_cheeger(weight, options.lanczos);
        rep.h_upper = est.h_upper;
        rep.disconnected = est.disconnected;
        rep.h_oracle = est.h_oracle;
        if (options.oracle_block)
        {
            const WeightGrid coarse = coarsen(weight, *options.oracle_block);
            require(coarse.active_count() <= 20, "stability report: coarsened domain still has more than 20 cells");
            rep.h_oracle = exhaustive_cheeger_oracle(coarse);
        }
        rep.h = rep.h_oracle ? *rep.h_oracle : rep.h_upper;
        rep.poincare_bound = rep.h > 0.0 ? 8.0 / rep.h : inf;

        const SobolevParts sob = sobolev_diff_parts(S1, S2, p, mask);
        rep.value_term = sob.value;
        rep.gradient_term = sob.gradient;
        rep.sobolev_term = sob.total();
        rep.weighted_term = weighted_norm(S1, &S2, q, rep.z0, mask);
        const LogDerivTerm ld = logderiv_term(S1, S2, p, mask);
        rep.logderiv_term = ld.value;
        rep.logderiv_excluded_fraction = ld.excluded_fraction;

        const double inner = rep.gradient_term + rep.logderiv_term;
        rep.rhs_thm23 = rep.value_term + (inner > 0.0 ? std::pow(2.0, 1.5) * rep.poincare_bound * inner : 0.0);
        const double shape = rep.sobolev_term + rep.weighted_term;
        const double factor = rep.h > 0.0 ? 1.0 + 1.0 / rep.h : inf;
        rep.rhs_thm44_shape = shape > 0.0 ? factor * shape : 0.0;
        rep.ratio = rep.rhs_thm44_shape > 0.0 ? rep.lhs / rep.rhs_thm44_shape : (rep.lhs > 0.0 ? inf : 0.0);
        rep.empirical_ratio = shape > 0.0 ? rep.lhs / shape : (rep.lhs > 0.0 ? inf : 0.0);

        if (options.noise)
        {
            const RealGrid gamma = make_noise(*options.noise, pg);
            std::vector<double> e(pg.size());
            for (std::size_t i = 0; i < pg.size(); ++i)
                e[i] = S1[i] + gamma[i] - S2[i];
            NoiseTerms nt;
            nt.epsilon = dnorm(RealGrid(pg, std::move(e)), p, q, rep.z0, mask);
            nt.gamma_dnorm = dnorm(gamma, p, q, rep.z0, mask);
            const double sum = nt.epsilon + nt.gamma_dnorm;
            nt.bound_shape = sum > 0.0 ? factor * sum : 0.0;
            rep.noise = nt;
        }
        return rep;
    }
}  // namespace ggr
