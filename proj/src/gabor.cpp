#include "ggr/gabor.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "ggr/fourier.hpp"
#include "ggr/numerics.hpp"
#include "ggr/signals.hpp"

namespace ggr
{
    namespace
    {
        using std::numbers::pi;

        /// Applies `sampler` along `axis` of a row-major block with extents `dims`,
        /// replacing that extent by the sampler's output length.
        std::vector<Complex> transform_axis(const std::vector<Complex>& in, std::vector<std::size_t>& dims,
                                            std::size_t axis, const FrequencySampler& sampler)
        {
            std::size_t outer = 1, inner = 1;
            for (std::size_t a = 0; a < axis; ++a)
                outer *= dims[a];
            for (std::size_t a = axis + 1; a < dims.size(); ++a)
                inner *= dims[a];
            const std::size_t n = dims[axis], m = sampler.out_count();

            std::vector<Complex> out(outer * m * inner);
            std::vector<Complex> line_in(n), line_out(m);
            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t i = 0; i < inner; ++i)
                {
                    for (std::size_t k = 0; k < n; ++k)
                        line_in[k] = in[(o * n + k) * inner + i];
                    sampler.apply(line_in, line_out);
                    for (std::size_t j = 0; j < m; ++j)
                        out[(o * m + j) * inner + i] = line_out[j];
                }
            dims[axis] = m;
            return out;
        }
    }  // namespace

    PhaseSpaceGrid gabor_transform(const SignalGrid& f, const GridGeometry& phase_geometry)
    {
        const GridGeometry& sg = f.geometry();
        const std::size_t d = sg.rank();
        require(f.size() > 0, "gabor: empty signal grid");
        require(phase_geometry.rank() == 2 * d, "gabor: phase-space rank must be twice the signal rank");

        const double ratio = boundary_ratio(f);
        if (ratio > 1e-12)
        {
            char buf[128];
            std::snprintf(buf, sizeof buf, "gabor: signal boundary magnitude %.3g of max exceeds 1e-12", ratio);
            warn(buf);
        }

        // Per-axis samplers (t_a -> y_a) and window tables e^{-pi (t - x)^2}.
        std::vector<FrequencySampler> samplers;
        std::vector<std::vector<double>> window(d);
        std::vector<std::size_t> x_extent(d), y_extent(d);
        for (std::size_t a = 0; a < d; ++a)
        {
            const std::size_t xa = 2 * a, ya = 2 * a + 1;
            x_extent[a] = phase_geometry.extent(xa);
            y_extent[a] = phase_geometry.extent(ya);
            samplers.emplace_back(sg.extent(a), sg.origin()[a], sg.spacing()[a], y_extent[a],
                                  phase_geometry.origin()[ya], phase_geometry.spacing()[ya]);
            window[a].resize(x_extent[a] * sg.extent(a));
            for (std::size_t i = 0; i < x_extent[a]; ++i)
            {
                const double x = phase_geometry.coordinate(xa, i);
                for (std::size_t k = 0; k < sg.extent(a); ++k)
                {
                    const double u = sg.coordinate(a, k) - x;
                    window[a][i * sg.extent(a) + k] = std::exp(-pi * u * u);
                }
            }
        }

        std::size_t x_points = 1;
        for (std::size_t a = 0; a < d; ++a)
            x_points *= x_extent[a];

        std::vector<Complex> out(phase_geometry.size());
        const auto values = f.values();
        parallel_for(x_points, [&](std::size_t begin, std::size_t end) {
            std::vector<std::size_t> xi(d), tidx(d), yi(d);
            std::vector<Complex> block(f.size());
            for (std::size_t xp = begin; xp < end; ++xp)
            {
                std::size_t rem = xp;
                for (std::size_t a = d; a-- > 0;)
                {
                    xi[a] = rem % x_extent[a];
                    rem /= x_extent[a];
                }
                for (std::size_t k = 0; k < f.size(); ++k)
                {
                    sg.unravel(k, tidx);
                    double w = 1.0;
                    for (std::size_t a = 0; a < d; ++a)
                        w *= window[a][xi[a] * sg.extent(a) + tidx[a]];
                    block[k] = values[k] * w;
                }
                std::vector<std::size_t> dims = sg.extents();
                std::vector<Complex> spectrum = block;
                for (std::size_t a = d; a-- > 0;)
                    spectrum = transform_axis(spectrum, dims, a, samplers[a]);

                // spectrum is row-major over (y_1, ..., y_d); scatter into (x_1, y_1, ..., x_d, y_d).
                std::vector<std::size_t> pidx(2 * d);
                for (std::size_t j = 0; j < spectrum.size(); ++j)
                {
                    std::size_t r = j;
                    for (std::size_t a = d; a-- > 0;)
                    {
                        yi[a] = r % y_extent[a];
                        r /= y_extent[a];
                    }
                    for (std::size_t a = 0; a < d; ++a)
                    {
                        pidx[2 * a] = xi[a];
                        pidx[2 * a + 1] = yi[a];
                    }
                    out[phase_geometry.ravel(pidx)] = spectrum[j];
                }
            }
        });
        return PhaseSpaceGrid(phase_geometry, std::move(out));
    }

    Spectrogram::Spectrogram(GridGeometry geometry, std::vector<double> values)
        : RealGrid(std::move(geometry), std::move(values))
    {
        const auto v = this->values();
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            require(v[i] >= 0.0 && std::isfinite(v[i]), "spectrogram: values must be finite and nonnegative");
            if (v[i] > max_)
            {
                max_ = v[i];
                argmax_ = i;
            }
        }
        argmax_location_ = this->geometry().point(argmax_);
    }

    Spectrogram spectrogram(const ComplexGrid& F)
    {
        std::vector<double> mag(F.size());
        for (std::size_t i = 0; i < F.size(); ++i)
            mag[i] = std::abs(F[i]);
        return Spectrogram(F.geometry(), std::move(mag));
    }

    double modulation_norm(const ComplexGrid& F, double p, const DomainPartition* mask)
    {
        require(p >= 1.0 && std::isfinite(p), "modulation norm: p must be finite and >= 1");
        const double ratio = boundary_ratio(F);
        if (ratio > 1e-9)
        {
            char buf[128];
            std::snprintf(buf, sizeof buf, "modulation norm: boundary magnitude %.3g of max exceeds 1e-9", ratio);
            warn(buf);
        }
        std::vector<double> mag(F.size());
        for (std::size_t i = 0; i < F.size(); ++i)
            mag[i] = std::abs(F[i]);
        return lp_norm(mag, p, F.geometry().cell_volume(), active_mask(F.geometry(), mask));
    }

    std::size_t conjugate_index(const GridGeometry& geometry, std::size_t flat)
    {
        std::size_t out = flat;
        for (std::size_t a = 1; a < geometry.rank(); a += 2)
        {
            const std::size_t s = geometry.stride(a), n = geometry.extent(a);
            const std::size_t j = (flat / s) % n;
            out += (n - 1 - j) * s;
            out -= j * s;
        }
        return out;
    }

    EntireLift entire_lift(const PhaseSpaceGrid& F)
    {
        const GridGeometry& g = F.geometry();
        for (std::size_t a = 1; a < g.rank(); a += 2)
            require(g.symmetric_about_zero(a), "entire lift: every y axis must be symmetric about 0");

        std::vector<Complex> lifted(F.size());
        std::vector<double> z(g.rank());
        for (std::size_t i = 0; i < F.size(); ++i)
        {
            g.point(i, z);
            double r2 = 0.0, xy = 0.0;
            for (std::size_t a = 0; a < g.rank(); a += 2)
            {
                r2 += z[a] * z[a] + z[a + 1] * z[a + 1];
                xy += z[a] * z[a + 1];
            }
            double half = 0.5 * xy;
            half -= std::round(half);
            lifted[i] = F[conjugate_index(g, i)] * std::exp(0.5 * pi * r2) * std::polar(1.0, -2.0 * pi * half);
        }
        return EntireLift{F, PhaseSpaceGrid(g, std::move(lifted))};
    }
}  // namespace ggr
