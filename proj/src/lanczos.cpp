#include "ggr/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Eigenvalues>

#include "ggr/error.hpp"

namespace ggr
{
    namespace
    {
        double dot(std::span<const double> a, std::span<const double> b)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                s += a[i] * b[i];
            return s;
        }

        void axpy(double alpha, std::span<const double> x, std::span<double> y)
        {
            for (std::size_t i = 0; i < x.size(); ++i)
                y[i] += alpha * x[i];
        }

        void project_out(const std::vector<std::vector<double>>& basis, std::vector<double>& w)
        {
            for (const auto& q : basis)
                axpy(-dot(q, w), q, w);
        }
    }  // namespace

    void SparseSymmetric::multiply(std::span<const double> x, std::span<double> y) const
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            double s = 0.0;
            for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
                s += val[k] * x[col[k]];
            y[i] = s;
        }
    }

    EigenPair smallest_eigenpair(const SparseSymmetric& A, const std::vector<std::vector<double>>& deflate,
                                 std::vector<double> seed, const LanczosOptions& options)
    {
        const std::size_t n = A.n;
        require(seed.size() == n, "lanczos: seed length does not match the matrix");
        require(deflate.size() < n, "lanczos: deflation space fills the whole space");
        const std::size_t dim = n - deflate.size();
        const std::size_t m = std::min(std::max<std::size_t>(options.basis, 3), dim);
        const std::size_t keep = std::min(std::max<std::size_t>(options.keep, 1), m - 1 > 0 ? m - 1 : 1);
        const std::size_t cap = options.max_matvecs ? options.max_matvecs : 10 * n;

        std::mt19937_64 fallback(0x5eedULL);
        auto fresh_direction = [&](const std::vector<std::vector<double>>& V, std::size_t count) {
            // Deterministic replacement after an invariant-subspace breakdown.
            for (int attempt = 0; attempt < 16; ++attempt)
            {
                std::vector<double> w(n);
                for (auto& v : w)
                    v = double(fallback() >> 11) * 0x1.0p-53 - 0.5;
                for (int pass = 0; pass < 2; ++pass)
                {
                    project_out(deflate, w);
                    for (std::size_t i = 0; i < count; ++i)
                        axpy(-dot(V[i], w), V[i], w);
                }
                const double nw = std::sqrt(dot(w, w));
                if (nw > 1e-8)
                {
                    for (auto& v : w)
                        v /= nw;
                    return w;
                }
            }
            return std::vector<double>{};
        };

        std::vector<std::vector<double>> V(m + 1, std::vector<double>(n, 0.0));
        for (int pass = 0; pass < 2; ++pass)
            project_out(deflate, seed);
        double ns = std::sqrt(dot(seed, seed));
        if (!(ns > 1e-300))
        {
            seed = fresh_direction(V, 0);
            ns = 1.0;
            require(!seed.empty(), "lanczos: could not build a start vector");
        }
        for (std::size_t i = 0; i < n; ++i)
            V[0][i] = seed[i] / ns;

        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(Eigen::Index(m + 1), Eigen::Index(m + 1));
        std::size_t start = 0;  // first column whose A-image still has to be formed
        std::size_t matvecs = 0;
        double a_norm = 0.0;
        double last_residual = 0.0;
        std::vector<double> w(n);

        while (true)
        {
            std::size_t filled = m;
            double beta = 0.0;
            for (std::size_t j = start; j < m; ++j)
            {
                A.multiply(V[j], w);
                ++matvecs;
                // Classical Gram-Schmidt, applied twice; the first pass records the projections.
                for (int pass = 0; pass < 2; ++pass)
                {
                    project_out(deflate, w);
                    for (std::size_t i = 0; i <= j; ++i)
                    {
                        const double c = dot(V[i], w);
                        axpy(-c, V[i], w);
                        H(Eigen::Index(i), Eigen::Index(j)) += c;
                    }
                }
                beta = std::sqrt(dot(w, w));
                H(Eigen::Index(j + 1), Eigen::Index(j)) = beta;
                a_norm = std::max(a_norm, std::abs(H(Eigen::Index(j), Eigen::Index(j))));
                if (beta <= 1e-12 * std::max(a_norm, 1e-300) || j + 1 == dim || matvecs >= cap)
                {
                    filled = j + 1;
                    if (filled == dim)
                        beta = 0.0;
                    break;
                }
                for (std::size_t i = 0; i < n; ++i)
                    V[j + 1][i] = w[i] / beta;
            }

            // Rayleigh-Ritz. Column j of H holds <v_i, A v_j> for i <= j, which is the upper
            // triangle of the projected matrix (including the restart arrowhead).
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(Eigen::Index(filled), Eigen::Index(filled));
            for (std::size_t i = 0; i < filled; ++i)
                for (std::size_t j = i; j < filled; ++j)
                {
                    const double v = H(Eigen::Index(i), Eigen::Index(j));
                    T(Eigen::Index(i), Eigen::Index(j)) = v;
                    T(Eigen::Index(j), Eigen::Index(i)) = v;
                }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            const Eigen::VectorXd theta = es.eigenvalues();
            const Eigen::MatrixXd Y = es.eigenvectors();
            a_norm = std::max({a_norm, std::abs(theta(0)), std::abs(theta(Eigen::Index(filled - 1)))});

            const double residual = std::abs(beta * Y(Eigen::Index(filled - 1), 0));
            last_residual = residual;
            const bool breakdown = filled < m && filled < dim && beta <= 1e-12 * std::max(a_norm, 1e-300);
            // filled < m without breakdown means the cap cut the expansion short
            const bool converged = residual <= options.tolerance * std::max(a_norm, 1.0) && !breakdown;

            if (converged || filled == dim)
            {
                EigenPair out;
                out.value = theta(0);
                out.vector.assign(n, 0.0);
                for (std::size_t i = 0; i < filled; ++i)
                    axpy(Y(Eigen::Index(i), 0), V[i], out.vector);
                const double nv = std::sqrt(dot(out.vector, out.vector));
                for (auto& v : out.vector)
                    v /= nv;
                out.residual = residual;
                out.matvecs = matvecs;
                return out;
            }
            if (matvecs >= cap)
            {
                char buf[160];
                std::snprintf(buf, sizeof buf, "lanczos: no convergence after %zu matrix-vector products (residual %.3g)",
                              matvecs, last_residual);
                fail(ErrorKind::non_convergence, buf);
            }

            // Thick restart: keep the lowest Ritz vectors and continue from the residual direction.
            const std::size_t k = std::min(keep, filled - 1);
            std::vector<std::vector<double>> W(k, std::vector<double>(n, 0.0));
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t i = 0; i < filled; ++i)
                    axpy(Y(Eigen::Index(i), Eigen::Index(c)), V[i], W[c]);
            std::vector<double> next;
            if (breakdown)
                next = fresh_direction(W, k);
            else
                next = V[filled];
            for (std::size_t c = 0; c < k; ++c)
                V[c] = std::move(W[c]);
            if (next.empty())
                fail(ErrorKind::non_convergence, "lanczos: Krylov space exhausted");
            V[k] = std::move(next);

            H.setZero();
            for (std::size_t c = 0; c < k; ++c)
                H(Eigen::Index(c), Eigen::Index(c)) = theta(Eigen::Index(c));
            start = k;
        }
    }
}  // namespace ggr
