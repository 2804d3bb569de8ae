#include "ggr/grid.hpp"

#include <algorithm>
#include <cmath>

namespace ggr
{
    GridGeometry::GridGeometry(std::vector<std::size_t> extents, std::vector<double> spacing, std::vector<double> origin)
        : extents_(std::move(extents)), spacing_(std::move(spacing)), origin_(std::move(origin))
    {
        require(!extents_.empty(), "geometry: rank must be positive");
        require(extents_.size() == spacing_.size() && extents_.size() == origin_.size(),
                "geometry: extents, spacing and origin must have the same length");
        for (std::size_t a = 0; a < extents_.size(); ++a)
        {
            require(extents_[a] >= 2, "geometry: every extent must be at least 2");
            require(std::isfinite(spacing_[a]) && spacing_[a] > 0.0, "geometry: spacing must be positive and finite");
            require(std::isfinite(origin_[a]), "geometry: origin must be finite");
        }
        strides_.assign(extents_.size(), 1);
        for (std::size_t a = extents_.size() - 1; a > 0; --a)
            strides_[a - 1] = strides_[a] * extents_[a];
        size_ = strides_[0] * extents_[0];
    }

    GridGeometry GridGeometry::symmetric(std::vector<std::size_t> extents, std::vector<double> spacing)
    {
        std::vector<double> origin(extents.size());
        for (std::size_t a = 0; a < extents.size() && a < spacing.size(); ++a)
            origin[a] = -0.5 * double(extents[a] - 1) * spacing[a];
        return GridGeometry(std::move(extents), std::move(spacing), std::move(origin));
    }

    GridGeometry GridGeometry::symmetric(std::size_t rank, std::size_t extent, double spacing)
    {
        return symmetric(std::vector<std::size_t>(rank, extent), std::vector<double>(rank, spacing));
    }

    double GridGeometry::cell_volume() const noexcept
    {
        double v = 1.0;
        for (double h : spacing_)
            v *= h;
        return v;
    }

    void GridGeometry::unravel(std::size_t flat, std::span<std::size_t> index) const
    {
        for (std::size_t a = 0; a < extents_.size(); ++a)
        {
            index[a] = flat / strides_[a];
            flat -= index[a] * strides_[a];
        }
    }

    std::size_t GridGeometry::ravel(std::span<const std::size_t> index) const
    {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < extents_.size(); ++a)
            flat += index[a] * strides_[a];
        return flat;
    }

    std::vector<double> GridGeometry::point(std::size_t flat) const
    {
        std::vector<double> out(rank());
        point(flat, out);
        return out;
    }

    void GridGeometry::point(std::size_t flat, std::span<double> out) const
    {
        for (std::size_t a = 0; a < extents_.size(); ++a)
        {
            const std::size_t i = flat / strides_[a];
            flat -= i * strides_[a];
            out[a] = coordinate(a, i);
        }
    }

    bool GridGeometry::symmetric_about_zero(std::size_t axis) const
    {
        const double mid = origin_.at(axis) + 0.5 * double(extents_[axis] - 1) * spacing_[axis];
        return std::abs(mid) <= 1e-12 * spacing_[axis];
    }

    bool GridGeometry::operator==(const GridGeometry& other) const
    {
        return extents_ == other.extents_ && spacing_ == other.spacing_ && origin_ == other.origin_;
    }

    namespace
    {
        void require_finite(std::span<const Complex> values, const char* what)
        {
            for (const Complex& v : values)
                require(std::isfinite(v.real()) && std::isfinite(v.imag()), what);
        }
    }  // namespace

    SignalGrid::SignalGrid(GridGeometry geometry, std::vector<Complex> values)
        : ComplexGrid(std::move(geometry), std::move(values))
    {
        require_finite(this->values(), "signal grid: values must be finite");
    }

    PhaseSpaceGrid::PhaseSpaceGrid(GridGeometry geometry, std::vector<Complex> values)
        : ComplexGrid(std::move(geometry), std::move(values))
    {
        require(this->geometry().rank() % 2 == 0, "phase-space grid: rank must be even");
        require_finite(this->values(), "phase-space grid: values must be finite");
    }

    DomainPartition::DomainPartition(GridGeometry geometry, std::vector<int> labels)
        : geometry_(std::move(geometry)), labels_(std::move(labels))
    {
        require(labels_.size() == geometry_.size(), "partition: label count does not match geometry");
        int top = -1;
        for (int l : labels_)
        {
            require(l >= -1, "partition: labels must be -1 or a component index");
            top = std::max(top, l);
        }
        components_ = top + 1;
    }

    DomainPartition DomainPartition::full(const GridGeometry& geometry)
    {
        return DomainPartition(geometry, std::vector<int>(geometry.size(), 0));
    }

    DomainPartition DomainPartition::from_mask(const GridGeometry& geometry, const std::vector<bool>& mask)
    {
        require(mask.size() == geometry.size(), "partition: mask size does not match geometry");
        std::vector<int> labels(mask.size());
        for (std::size_t i = 0; i < mask.size(); ++i)
            labels[i] = mask[i] ? 0 : -1;
        return DomainPartition(geometry, std::move(labels));
    }

    DomainPartition DomainPartition::split(const GridGeometry& geometry, std::size_t axis, double cut)
    {
        require(axis < geometry.rank(), "partition: split axis out of range");
        std::vector<int> labels(geometry.size());
        std::vector<std::size_t> idx(geometry.rank());
        for (std::size_t i = 0; i < labels.size(); ++i)
        {
            geometry.unravel(i, idx);
            labels[i] = geometry.coordinate(axis, idx[axis]) < cut ? 0 : 1;
        }
        return DomainPartition(geometry, std::move(labels));
    }

    std::size_t DomainPartition::active_count() const noexcept
    {
        return std::size_t(std::count_if(labels_.begin(), labels_.end(), [](int l) { return l >= 0; }));
    }

    std::vector<bool> DomainPartition::mask() const
    {
        std::vector<bool> m(labels_.size());
        for (std::size_t i = 0; i < labels_.size(); ++i)
            m[i] = labels_[i] >= 0;
        return m;
    }

    std::vector<bool> DomainPartition::component_mask(int component) const
    {
        std::vector<bool> m(labels_.size());
        for (std::size_t i = 0; i < labels_.size(); ++i)
            m[i] = labels_[i] == component;
        return m;
    }

    DomainPartition DomainPartition::restricted(const std::vector<bool>& mask) const
    {
        require(mask.size() == labels_.size(), "partition: mask size does not match geometry");
        std::vector<int> labels = labels_;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (!mask[i])
                labels[i] = -1;
        DomainPartition out(geometry_, std::move(labels));
        out.components_ = components_;
        return out;
    }

    std::vector<bool> active_mask(const GridGeometry& geometry, const DomainPartition* partition)
    {
        if (!partition)
            return std::vector<bool>(geometry.size(), true);
        require(partition->geometry() == geometry, "partition geometry does not match grid geometry");
        return partition->mask();
    }
}  // namespace ggr
