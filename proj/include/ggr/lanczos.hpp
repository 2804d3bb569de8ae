#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ggr
{
    /// Symmetric matrix in compressed-row form (both triangles stored).
    struct SparseSymmetric
    {
        std::size_t n = 0;
        std::vector<std::size_t> row_ptr;
        std::vector<std::size_t> col;
        std::vector<double> val;

        void multiply(std::span<const double> x, std::span<double> y) const;
    };

    struct LanczosOptions
    {
        std::size_t max_matvecs = 0;  ///< 0 means 10 n
        double tolerance = 1e-8;      ///< on ||A u - theta u|| relative to the largest Ritz value seen
        std::size_t basis = 80;
        std::size_t keep = 30;
    };

    struct EigenPair
    {
        double value = 0.0;
        std::vector<double> vector;  ///< unit norm
        double residual = 0.0;
        std::size_t matvecs = 0;
    };

    /// Smallest eigenpair of A on the orthogonal complement of `deflate` (orthonormal vectors),
    /// by thick-restart Lanczos with full reorthogonalisation. Deterministic for a given seed.
    /// Throws ErrorKind::non_convergence with the last residual when the cap is hit.
    EigenPair smallest_eigenpair(const SparseSymmetric& A, const std::vector<std::vector<double>>& deflate,
                                 std::vector<double> seed, const LanczosOptions& options = {});
}  // namespace ggr
