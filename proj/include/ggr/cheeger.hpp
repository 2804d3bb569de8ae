#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ggr/grid.hpp"
#include "ggr/lanczos.hpp"

namespace ggr
{
    /// Nonnegative cell weights w on a box, with the active cells that make up the domain.
    class WeightGrid
    {
    public:
        WeightGrid(GridGeometry geometry, std::vector<double> values, std::vector<bool> mask);
        /// All cells active.
        WeightGrid(GridGeometry geometry, std::vector<double> values);

        const GridGeometry& geometry() const noexcept { return geometry_; }
        const std::vector<double>& values() const noexcept { return values_; }
        const std::vector<bool>& mask() const noexcept { return mask_; }
        std::size_t active_count() const noexcept { return active_; }

    private:
        GridGeometry geometry_;
        std::vector<double> values_;
        std::vector<bool> mask_;
        std::size_t active_ = 0;
    };

    /// Block-averages w over `factor` cells per axis (trailing partial blocks are merged
    /// into the last block). A coarse cell is active when any of its fine cells is.
    WeightGrid coarsen(const WeightGrid& w, const std::vector<std::size_t>& factor);

    struct WeightEdge
    {
        std::size_t u = 0, v = 0;
        double weight = 0.0;  ///< boundary measure of the shared face
        double length = 1.0;  ///< distance between the two cell centres
    };

    /// Vertices are active cells (mass w_i * cell volume); edges join face-adjacent active
    /// cells with weight (w_i + w_j)/2 * face measure, face measure = cell volume / spacing.
    struct WeightGraph
    {
        std::vector<std::size_t> cell;  ///< grid index of each vertex
        std::vector<double> mass;
        std::vector<WeightEdge> edges;  ///< u < v, in generation order
        std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;
        double min_spacing = 1.0;
        std::size_t rank = 1;

        std::size_t size() const noexcept { return mass.size(); }
    };

    WeightGraph build_weight_graph(const WeightGrid& w);

    /// Labels of the components joined by positive-weight edges, and their count.
    std::vector<std::size_t> graph_components(const WeightGraph& g, std::size_t& count);

    struct CutResult
    {
        std::vector<bool> side;  ///< true for C, per vertex
        double cut_weight = 0.0;
        double mass_in = 0.0;    ///< mass of C
        double mass_out = 0.0;   ///< mass of the complement
        double ratio = 0.0;      ///< cut_weight / min(mass); +inf when a side is massless
    };

    /// Every cut in this module is scored here, so sweep and oracle results are comparable bitwise.
    CutResult evaluate_cut(const WeightGraph& g, std::vector<bool> side);

    struct FiedlerResult
    {
        double value = 0.0;          ///< second eigenvalue of M^{-1} L
        std::vector<double> vector;  ///< per vertex, M-orthogonal to constants
        double residual = 0.0;
        std::size_t matvecs = 0;
    };

    /// Second eigenpair of M^{-1} L, L the graph Laplacian with conductances weight / length
    /// (a discretisation of int w |grad u|^2) and M the vertex masses, by Lanczos with the
    /// constant mode deflated. Seed: +1 on the first half of the vertices (row-major order), -1 on
    /// the rest. Throws on disconnected graphs.
    FiedlerResult fiedler_vector(const WeightGraph& g, const LanczosOptions& options = {});

    struct CheegerEstimate
    {
        double h_upper = 0.0;
        std::optional<double> h_oracle;
        double fiedler_value = 0.0;
        CutResult best_cut;
        bool disconnected = false;
        std::string diagnostic;
    };

    /// Sweep cuts along the Fiedler ordering; attaches the exhaustive minimum when at most
    /// 20 cells are active. Reports h = 0 when two components each carry more than 1e-9
    /// of the mass.
    CheegerEstimate sweep_cut_cheeger(const WeightGrid& w, const LanczosOptions& options = {});

    /// Minimum ratio over every nonempty proper subset of the active cells (at most 20).
    double exhaustive_cheeger_oracle(const WeightGrid& w);
    CutResult exhaustive_cheeger_cut(const WeightGraph& g);

    /// 8 / h with h = h_oracle when present, else h_upper; +inf when h = 0.
    double poincare_bound(const CheegerEstimate& estimate);
}  // namespace ggr
