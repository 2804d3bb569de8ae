#pragma once

#include <cstddef>
#include <vector>

#include "ggr/grid.hpp"

namespace ggr
{
    /// Gf(x, y) = int f(t) e^{-pi|t-x|^2} e^{-2 pi i t.y} dt sampled on `phase_geometry`
    /// (axes x_1, y_1, ..., x_d, y_d). Riemann sum over the signal grid, evaluated for each
    /// x as a Fourier transform of the windowed signal.
    ///
    /// Warns when |f| on the box boundary exceeds 1e-12 of its maximum.
    PhaseSpaceGrid gabor_transform(const SignalGrid& f, const GridGeometry& phase_geometry);

    /// |F| with the location of its largest sample. Ties go to the smallest row-major index.
    class Spectrogram : public RealGrid
    {
    public:
        Spectrogram() = default;
        Spectrogram(GridGeometry geometry, std::vector<double> values);

        std::size_t argmax_index() const noexcept { return argmax_; }
        const std::vector<double>& argmax_location() const noexcept { return argmax_location_; }
        double max_value() const noexcept { return max_; }

    private:
        std::size_t argmax_ = 0;
        std::vector<double> argmax_location_;
        double max_ = 0.0;
    };

    Spectrogram spectrogram(const ComplexGrid& F);

    /// (sum over active cells of |F|^p * cell volume)^{1/p}. Warns when the boundary of the
    /// box carries more than 1e-9 of max |F|.
    double modulation_norm(const ComplexGrid& F, double p, const DomainPartition* mask = nullptr);

    /// G(z) = F(x, -y) * eta(z), eta(z) = e^{pi|z|^2/2 - pi i x.y}: the entire function
    /// attached to a Gabor transform. Needs every y axis symmetric about 0 so that the
    /// conjugate point is itself a sample.
    struct EntireLift
    {
        PhaseSpaceGrid base;
        PhaseSpaceGrid lifted;
    };

    EntireLift entire_lift(const PhaseSpaceGrid& F);

    /// Index of the sample at (x, -y) on a y-symmetric phase-space grid.
    std::size_t conjugate_index(const GridGeometry& geometry, std::size_t flat);
}  // namespace ggr
