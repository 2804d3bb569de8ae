#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ggr/grid.hpp"

namespace ggr
{
    /// Riemann-sum Fourier transform between two uniform 1-D grids:
    ///
    ///   out_j = step * sum_k in_k exp(-2 pi i (t0 + k step)(y0 + j dy)),  j < out_count.
    ///
    /// When 1/(step*dy) is an integer L the core sum is a length-L DFT (input folded mod L,
    /// output wrapped mod L, both exact by periodicity); otherwise a chirp-z (Bluestein)
    /// convolution is used. The grid-origin phase exp(-2 pi i t0 y) is applied to the DFT
    /// output and is the only place that offset enters.
    ///
    /// apply() is const and may be called concurrently.
    class FrequencySampler
    {
    public:
        FrequencySampler(std::size_t in_count, double t0, double step, std::size_t out_count, double y0, double dy);
        ~FrequencySampler();
        FrequencySampler(FrequencySampler&&) noexcept;
        FrequencySampler& operator=(FrequencySampler&&) noexcept;

        std::size_t in_count() const noexcept { return in_count_; }
        std::size_t out_count() const noexcept { return out_count_; }
        bool uses_chirp() const noexcept { return chirp_; }

        void apply(std::span<const Complex> in, std::span<Complex> out) const;

    private:
        struct Plans;

        std::size_t in_count_ = 0, out_count_ = 0, length_ = 0;
        bool chirp_ = false;
        std::vector<Complex> pre_;     // exp(-2 pi i k step y0)
        std::vector<Complex> post_;    // step * exp(-2 pi i t0 y_j)
        std::vector<Complex> chirp_w_; // exp(-i pi r k^2), chirp mode only
        std::unique_ptr<Plans> plans_;
    };
}  // namespace ggr
