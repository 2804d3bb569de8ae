#include "ggr/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "ggr/numerics.hpp"

namespace ggr
{
    namespace
    {
        constexpr double inf = std::numeric_limits<double>::infinity();

        struct Score
        {
            double cut = 0.0, in = 0.0, out = 0.0, ratio = 0.0;
        };

        Score score(const WeightGraph& g, const std::vector<bool>& side)
        {
            Score s;
            for (const WeightEdge& e : g.edges)
                if (side[e.u] != side[e.v])
                    s.cut += e.weight;
            for (std::size_t i = 0; i < g.size(); ++i)
                (side[i] ? s.in : s.out) += g.mass[i];
            const double lo = std::min(s.in, s.out);
            s.ratio = lo > 0.0 ? s.cut / lo : inf;
            return s;
        }

        /// The vertices of `keep` with their edges, renumbered in order.
        WeightGraph subgraph(const WeightGraph& g, const std::vector<std::size_t>& keep)
        {
            std::vector<std::size_t> remap(g.size(), std::size_t(-1));
            WeightGraph out;
            for (std::size_t k = 0; k < keep.size(); ++k)
            {
                remap[keep[k]] = k;
                out.cell.push_back(g.cell[keep[k]]);
                out.mass.push_back(g.mass[keep[k]]);
            }
            out.adjacency.resize(keep.size());
            for (const WeightEdge& e : g.edges)
            {
                const std::size_t u = remap[e.u], v = remap[e.v];
                if (u == std::size_t(-1) || v == std::size_t(-1))
                    continue;
                out.edges.push_back(e);
                out.edges.back().u = u;
                out.edges.back().v = v;
                out.adjacency[u].emplace_back(v, e.weight);
                out.adjacency[v].emplace_back(u, e.weight);
            }
            return out;
        }
    }  // namespace

    WeightGrid::WeightGrid(GridGeometry geometry, std::vector<double> values, std::vector<bool> mask)
        : geometry_(std::move(geometry)), values_(std::move(values)), mask_(std::move(mask))
    {
        require(values_.size() == geometry_.size(), "weight grid: value count does not match geometry");
        require(mask_.size() == geometry_.size(), "weight grid: mask size does not match geometry");
        double total = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
        {
            require(std::isfinite(values_[i]) && values_[i] >= 0.0, "weight grid: weights must be finite and nonnegative");
            if (mask_[i])
            {
                ++active_;
                total += values_[i];
            }
        }
        require(active_ >= 2, "weight grid: at least two active cells are required");
        require(total > 0.0, "weight grid: total mass must be positive");
    }

    WeightGrid::WeightGrid(GridGeometry geometry, std::vector<double> values)
        : WeightGrid(geometry, std::move(values), std::vector<bool>(geometry.size(), true))
    {
    }

    WeightGrid coarsen(const WeightGrid& w, const std::vector<std::size_t>& factor)
    {
        const GridGeometry& g = w.geometry();
        require(factor.size() == g.rank(), "coarsen: one factor per axis");
        std::vector<std::size_t> ext(g.rank());
        std::vector<double> spacing(g.rank()), origin(g.rank());
        for (std::size_t a = 0; a < g.rank(); ++a)
        {
            require(factor[a] >= 1, "coarsen: factors must be positive");
            ext[a] = g.extent(a) / factor[a];
            require(ext[a] >= 2, "coarsen: coarse grid needs at least two cells per axis");
            spacing[a] = g.spacing()[a] * double(factor[a]);
            origin[a] = g.origin()[a] + 0.5 * double(factor[a] - 1) * g.spacing()[a];
        }
        GridGeometry cg(ext, spacing, origin);
        std::vector<double> vals(cg.size(), 0.0);
        std::vector<bool> mask(cg.size(), false);
        std::vector<std::size_t> idx(g.rank()), cidx(g.rank());
        const double ratio = g.cell_volume() / cg.cell_volume();
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            if (!w.mask()[i])
                continue;
            g.unravel(i, idx);
            for (std::size_t a = 0; a < g.rank(); ++a)
                cidx[a] = std::min(idx[a] / factor[a], ext[a] - 1);
            const std::size_t c = cg.ravel(cidx);
            vals[c] += w.values()[i] * ratio;
            mask[c] = true;
        }
        return WeightGrid(std::move(cg), std::move(vals), std::move(mask));
    }

    WeightGraph build_weight_graph(const WeightGrid& w)
    {
        const GridGeometry& g = w.geometry();
        const double vol = g.cell_volume();
        WeightGraph out;
        out.min_spacing = *std::min_element(g.spacing().begin(), g.spacing().end());
        out.rank = g.rank();
        std::vector<std::size_t> vertex(g.size(), std::size_t(-1));
        for (std::size_t i = 0; i < g.size(); ++i)
            if (w.mask()[i])
            {
                vertex[i] = out.cell.size();
                out.cell.push_back(i);
                out.mass.push_back(w.values()[i] * vol);
            }
        out.adjacency.resize(out.cell.size());
        std::vector<std::size_t> idx(g.rank());
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            if (!w.mask()[i])
                continue;
            g.unravel(i, idx);
            for (std::size_t a = 0; a < g.rank(); ++a)
            {
                if (idx[a] + 1 >= g.extent(a))
                    continue;
                const std::size_t j = i + g.stride(a);
                if (!w.mask()[j])
                    continue;
                const double face = vol / g.spacing()[a];
                const double weight = 0.5 * (w.values()[i] + w.values()[j]) * face;
                const std::size_t u = vertex[i], v = vertex[j];
                out.edges.push_back({u, v, weight, g.spacing()[a]});
                out.adjacency[u].emplace_back(v, weight);
                out.adjacency[v].emplace_back(u, weight);
            }
        }
        return out;
    }

    std::vector<std::size_t> graph_components(const WeightGraph& g, std::size_t& count)
    {
        std::vector<std::size_t> label(g.size(), std::size_t(-1));
        count = 0;
        std::vector<std::size_t> stack;
        for (std::size_t s = 0; s < g.size(); ++s)
        {
            if (label[s] != std::size_t(-1))
                continue;
            label[s] = count;
            stack.push_back(s);
            while (!stack.empty())
            {
                const std::size_t u = stack.back();
                stack.pop_back();
                for (auto [v, wt] : g.adjacency[u])
                    if (wt > 0.0 && label[v] == std::size_t(-1))
                    {
                        label[v] = count;
                        stack.push_back(v);
                    }
            }
            ++count;
        }
        return label;
    }

    CutResult evaluate_cut(const WeightGraph& g, std::vector<bool> side)
    {
        require(side.size() == g.size(), "cut: side assignment does not match the graph");
        const Score s = score(g, side);
        CutResult r;
        r.side = std::move(side);
        r.cut_weight = s.cut;
        r.mass_in = s.in;
        r.mass_out = s.out;
        r.ratio = s.ratio;
        return r;
    }

    FiedlerResult fiedler_vector(const WeightGraph& g, const LanczosOptions& options)
    {
        const std::size_t n = g.size();
        require(n >= 2, "fiedler: at least two vertices are required");
        std::size_t count = 0;
        graph_components(g, count);
        require(count == 1, "fiedler: graph is disconnected");

        std::vector<double> degree(n, 0.0);
        std::vector<std::vector<std::pair<std::size_t, double>>> conductance(n);
        for (const WeightEdge& e : g.edges)
        {
            const double c = e.weight / e.length;
            degree[e.u] += c;
            degree[e.v] += c;
            conductance[e.u].emplace_back(e.v, c);
            conductance[e.v].emplace_back(e.u, c);
        }
        // A massless vertex gets the mass a cell of its neighbours' average weight would have.
        std::vector<double> mass = g.mass;
        for (std::size_t i = 0; i < n; ++i)
            if (!(mass[i] > 0.0))
                mass[i] = degree[i] * g.min_spacing * g.min_spacing / double(2 * g.rank);

        std::vector<double> isq(n);
        for (std::size_t i = 0; i < n; ++i)
            isq[i] = 1.0 / std::sqrt(mass[i]);

        SparseSymmetric A;
        A.n = n;
        A.row_ptr.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i)
            A.row_ptr[i + 1] = A.row_ptr[i] + 1 + conductance[i].size();
        A.col.resize(A.row_ptr[n]);
        A.val.resize(A.row_ptr[n]);
        for (std::size_t i = 0; i < n; ++i)
        {
            std::size_t k = A.row_ptr[i];
            A.col[k] = i;
            A.val[k] = degree[i] * isq[i] * isq[i];
            ++k;
            for (auto [j, c] : conductance[i])
            {
                A.col[k] = j;
                A.val[k] = -c * isq[i] * isq[j];
                ++k;
            }
        }

        std::vector<double> q0(n);
        double nq = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            q0[i] = std::sqrt(mass[i]);
            nq += mass[i];
        }
        nq = std::sqrt(nq);
        for (auto& v : q0)
            v /= nq;

        // +1 on the first half of the vertex order, -1 on the second. A per-vertex alternating
        // sign is the highest grid frequency and has next to no weight on the smooth low modes.
        std::vector<double> seed(n);
        for (std::size_t i = 0; i < n; ++i)
            seed[i] = 2 * i < n ? 1.0 : -1.0;

        const EigenPair ep = smallest_eigenpair(A, {q0}, std::move(seed), options);
        FiedlerResult out;
        out.value = ep.value;
        out.residual = ep.residual;
        out.matvecs = ep.matvecs;
        out.vector.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            out.vector[i] = ep.vector[i] * isq[i];
        return out;
    }

    CutResult exhaustive_cheeger_cut(const WeightGraph& g)
    {
        const std::size_t n = g.size();
        require(n >= 2 && n <= 20, "oracle: between 2 and 20 active cells are required");
        std::vector<bool> side(n);
        std::uint32_t best_mask = 1;
        double best = inf;
        // Subsets containing vertex n-1 are complements of ones that do not; scores agree
        // bitwise under complement, so half the enumeration suffices.
        const std::uint32_t limit = std::uint32_t(1) << (n - 1);
        for (std::uint32_t mask = 1; mask < limit; ++mask)
        {
            for (std::size_t i = 0; i < n; ++i)
                side[i] = (mask >> i) & 1u;
            const double r = score(g, side).ratio;
            if (r < best)
            {
                best = r;
                best_mask = mask;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            side[i] = (best_mask >> i) & 1u;
        return evaluate_cut(g, side);
    }

    double exhaustive_cheeger_oracle(const WeightGrid& w)
    {
        require(w.active_count() <= 20, "oracle: at most 20 active cells are supported");
        return exhaustive_cheeger_cut(build_weight_graph(w)).ratio;
    }

    CheegerEstimate sweep_cut_cheeger(const WeightGrid& w, const LanczosOptions& options)
    {
        const WeightGraph g = build_weight_graph(w);
        const std::size_t n = g.size();
        CheegerEstimate est;

        std::size_t ncomp = 0;
        const std::vector<std::size_t> label = graph_components(g, ncomp);
        std::vector<double> comp_mass(ncomp, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            comp_mass[label[i]] += g.mass[i];
            total += g.mass[i];
        }
        std::vector<std::size_t> significant;
        for (std::size_t c = 0; c < ncomp; ++c)
            if (comp_mass[c] > 1e-9 * total)
                significant.push_back(c);

        if (significant.size() > 1)
        {
            std::vector<bool> side(n);
            for (std::size_t i = 0; i < n; ++i)
                side[i] = label[i] == significant[0];
            est.best_cut = evaluate_cut(g, std::move(side));
            est.h_upper = est.best_cut.ratio;
            est.disconnected = true;
            char buf[160];
            std::snprintf(buf, sizeof buf, "disconnected: %zu components each carry more than 1e-9 of the mass",
                          significant.size());
            est.diagnostic = buf;
        }
        else
        {
            const std::size_t main = significant.at(0);
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < n; ++i)
                if (label[i] == main)
                    keep.push_back(i);
            if (keep.size() < 2)
            {
                est.h_upper = inf;
                est.best_cut = evaluate_cut(g, std::vector<bool>(n, false));
                est.diagnostic = "the mass sits in a single cell; no cut separates it";
            }
            else
            {
                const WeightGraph sub = subgraph(g, keep);
                const FiedlerResult fr = fiedler_vector(sub, options);
                est.fiedler_value = fr.value;

                std::vector<std::size_t> order(keep.size());
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t a, std::size_t b) { return fr.vector[a] < fr.vector[b]; });

                // Running prefix scores; the winner is rescored exactly by evaluate_cut.
                std::vector<bool> in(n, false);
                double cut = 0.0, mass_in = 0.0;
                double best = inf;
                std::size_t best_k = 1;
                for (std::size_t k = 0; k + 1 < order.size(); ++k)
                {
                    const std::size_t u = keep[order[k]];
                    for (auto [v, wt] : g.adjacency[u])
                        cut += in[v] ? -wt : wt;
                    in[u] = true;
                    mass_in += g.mass[u];
                    const double lo = std::min(mass_in, total - mass_in);
                    const double r = lo > 0.0 ? std::max(cut, 0.0) / lo : inf;
                    if (r < best)
                    {
                        best = r;
                        best_k = k + 1;
                    }
                }
                std::vector<bool> side(n, false);
                for (std::size_t k = 0; k < best_k; ++k)
                    side[keep[order[k]]] = true;
                est.best_cut = evaluate_cut(g, std::move(side));
                est.h_upper = est.best_cut.ratio;
            }
        }

        if (n <= 20)
            est.h_oracle = exhaustive_cheeger_cut(g).ratio;
        return est;
    }

    double poincare_bound(const CheegerEstimate& estimate)
    {
        const double h = estimate.h_oracle ? *estimate.h_oracle : estimate.h_upper;
        require(h >= 0.0, "poincare bound: negative Cheeger estimate");
        return h > 0.0 ? 8.0 / h : inf;
    }
}  // namespace ggr
