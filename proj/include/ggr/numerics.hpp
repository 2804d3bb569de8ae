#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ggr/grid.hpp"

namespace ggr
{
    /// Neumaier-compensated accumulator. Summation order is the caller's loop order,
    /// so results are reproducible run to run.
    class CompensatedSum
    {
    public:
        void add(double x) noexcept
        {
            const double t = sum_ + x;
            if (std::abs(sum_) >= std::abs(x))
                comp_ += (sum_ - t) + x;
            else
                comp_ += (x - t) + sum_;
            sum_ = t;
        }
        CompensatedSum& operator+=(double x) noexcept
        {
            add(x);
            return *this;
        }
        double value() const noexcept { return sum_ + comp_; }

    private:
        double sum_ = 0.0;
        double comp_ = 0.0;
    };

    /// Worker count for parallel loops (>= 1). Results never depend on it.
    void set_thread_count(std::size_t n);
    std::size_t thread_count();

    /// Runs body(begin, end) over contiguous chunks of [0, n).
    void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

    /// (sum over active cells of |v|^p * cell_volume)^{1/p}.
    double lp_norm(std::span<const double> magnitudes, double p, double cell_volume, const std::vector<bool>& mask);

    /// Per-axis finite-difference derivatives of a sampled field. Central differences where
    /// both neighbours are usable; one-sided where only one is; zero where neither is.
    /// A neighbour is usable when it lies inside the grid and (if a mask is given) is active.
    template <typename T>
    std::vector<std::vector<T>> gradient(std::span<const T> values, const GridGeometry& geometry,
                                         const std::vector<bool>* mask = nullptr)
    {
        const std::size_t rank = geometry.rank();
        std::vector<std::vector<T>> out(rank, std::vector<T>(values.size(), T{}));
        std::vector<std::size_t> idx(rank);
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            if (mask && !(*mask)[i])
                continue;
            geometry.unravel(i, idx);
            for (std::size_t a = 0; a < rank; ++a)
            {
                const std::size_t s = geometry.stride(a);
                const double h = geometry.spacing()[a];
                const bool lo = idx[a] > 0 && (!mask || (*mask)[i - s]);
                const bool hi = idx[a] + 1 < geometry.extent(a) && (!mask || (*mask)[i + s]);
                if (lo && hi)
                    out[a][i] = (values[i + s] - values[i - s]) / (2.0 * h);
                else if (hi)
                    out[a][i] = (values[i + s] - values[i]) / h;
                else if (lo)
                    out[a][i] = (values[i] - values[i - s]) / h;
            }
        }
        return out;
    }

    /// Euclidean length of a per-axis gradient at every sample.
    std::vector<double> gradient_magnitude(const std::vector<std::vector<double>>& grad);
    std::vector<double> gradient_magnitude(const std::vector<std::vector<Complex>>& grad);

    /// Wirtinger derivatives d/dz_j and d/dzbar_j from per-axis gradients on a phase-space
    /// grid with axes (x_1, y_1, ..., x_d, y_d): d/dz = (d/dx - i d/dy) / 2.
    std::vector<std::vector<Complex>> wirtinger_dz(const std::vector<std::vector<Complex>>& grad);
    std::vector<std::vector<Complex>> wirtinger_dzbar(const std::vector<std::vector<Complex>>& grad);

    /// Least-squares fit y = slope * x + intercept.
    struct LineFit
    {
        double slope = 0.0;
        double intercept = 0.0;
    };
    LineFit fit_line(std::span<const double> x, std::span<const double> y);
}  // namespace ggr
