#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ggr/error.hpp"

namespace ggr
{
    using Complex = std::complex<double>;

    /// Uniform box grid. Sample i along axis a sits at origin[a] + i * spacing[a];
    /// values are stored row-major (last axis fastest).
    class GridGeometry
    {
    public:
        GridGeometry() = default;
        GridGeometry(std::vector<std::size_t> extents, std::vector<double> spacing, std::vector<double> origin);

        /// Grid whose samples are symmetric about 0 on every axis: origin = -(n-1)/2 * spacing.
        static GridGeometry symmetric(std::vector<std::size_t> extents, std::vector<double> spacing);
        /// Same extent and spacing on all `rank` axes.
        static GridGeometry symmetric(std::size_t rank, std::size_t extent, double spacing);

        std::size_t rank() const noexcept { return extents_.size(); }
        const std::vector<std::size_t>& extents() const noexcept { return extents_; }
        const std::vector<double>& spacing() const noexcept { return spacing_; }
        const std::vector<double>& origin() const noexcept { return origin_; }
        std::size_t extent(std::size_t axis) const { return extents_.at(axis); }
        std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

        std::size_t size() const noexcept { return size_; }
        double cell_volume() const noexcept;
        double coordinate(std::size_t axis, std::size_t i) const { return origin_[axis] + double(i) * spacing_[axis]; }

        /// Last sample coordinate along an axis.
        double upper(std::size_t axis) const { return coordinate(axis, extents_[axis] - 1); }

        /// Per-axis indices of a flat row-major index.
        void unravel(std::size_t flat, std::span<std::size_t> index) const;
        std::size_t ravel(std::span<const std::size_t> index) const;
        /// Coordinates of a flat index.
        std::vector<double> point(std::size_t flat) const;
        void point(std::size_t flat, std::span<double> out) const;

        /// True when the samples along `axis` are symmetric about 0 (to 1e-12 of the spacing).
        bool symmetric_about_zero(std::size_t axis) const;

        bool operator==(const GridGeometry& other) const;

    private:
        std::vector<std::size_t> extents_;
        std::vector<double> spacing_;
        std::vector<double> origin_;
        std::vector<std::size_t> strides_;
        std::size_t size_ = 0;
    };

    template <typename T>
    class Grid
    {
    public:
        using value_type = T;

        Grid() = default;
        Grid(GridGeometry geometry, std::vector<T> values) : geometry_(std::move(geometry)), values_(std::move(values))
        {
            require(values_.size() == geometry_.size(), "grid: value count does not match geometry");
        }

        const GridGeometry& geometry() const noexcept { return geometry_; }
        std::span<const T> values() const noexcept { return values_; }
        const T& operator[](std::size_t i) const { return values_[i]; }
        std::size_t size() const noexcept { return values_.size(); }

        /// Moves the storage out; the grid is left empty.
        std::vector<T> release() && { return std::move(values_); }

    private:
        GridGeometry geometry_;
        std::vector<T> values_;
    };

    using RealGrid = Grid<double>;
    using ComplexGrid = Grid<Complex>;

    /// Samples of a function on a box in R^d.
    class SignalGrid : public ComplexGrid
    {
    public:
        SignalGrid() = default;
        SignalGrid(GridGeometry geometry, std::vector<Complex> values);

        std::size_t dimension() const noexcept { return geometry().rank(); }
    };

    /// Samples of a field on a box in R^{2d}, axes ordered (x_1, y_1, ..., x_d, y_d).
    class PhaseSpaceGrid : public ComplexGrid
    {
    public:
        PhaseSpaceGrid() = default;
        PhaseSpaceGrid(GridGeometry geometry, std::vector<Complex> values);

        std::size_t dimension() const noexcept { return geometry().rank() / 2; }
    };

    /// Active-cell labels over a grid: -1 is inactive, 0..k-1 name the components.
    class DomainPartition
    {
    public:
        DomainPartition() = default;
        DomainPartition(GridGeometry geometry, std::vector<int> labels);

        /// Every cell active, one component.
        static DomainPartition full(const GridGeometry& geometry);
        /// One component made of the cells where mask is true.
        static DomainPartition from_mask(const GridGeometry& geometry, const std::vector<bool>& mask);
        /// Two components split at `cut` along `axis` (coordinate < cut is component 0).
        static DomainPartition split(const GridGeometry& geometry, std::size_t axis, double cut);

        const GridGeometry& geometry() const noexcept { return geometry_; }
        int label(std::size_t i) const { return labels_[i]; }
        bool active(std::size_t i) const { return labels_[i] >= 0; }
        int component_count() const noexcept { return components_; }
        std::size_t active_count() const noexcept;
        std::vector<bool> mask() const;
        std::vector<bool> component_mask(int component) const;

        /// Same components, restricted to cells where mask is true.
        DomainPartition restricted(const std::vector<bool>& mask) const;

    private:
        GridGeometry geometry_;
        std::vector<int> labels_;
        int components_ = 0;
    };

    /// Cells where mask is true (or all cells when the partition is absent).
    std::vector<bool> active_mask(const GridGeometry& geometry, const DomainPartition* partition);
}  // namespace ggr
