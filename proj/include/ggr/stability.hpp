#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ggr/cheeger.hpp"
#include "ggr/gabor.hpp"
#include "ggr/grid.hpp"

namespace ggr
{
    enum class AlignMethod
    {
        automatic,    ///< closed form for p = 2, search otherwise
        closed_form,
        search,
    };

    /// Best unimodular constant a = e^{i theta} for ||F2 - a F1||_p on the active cells.
    struct PhaseAlignment
    {
        double theta = 0.0;     ///< in [0, 2 pi)
        double residual = 0.0;  ///< ||F2 - e^{i theta} F1||_p
        AlignMethod method = AlignMethod::closed_form;
    };

    /// p = 2: a = <F2, F1> / |<F2, F1>| with <F2, F1> = sum F2 conj(F1) (a = 1 when it vanishes).
    /// Otherwise a 64-point scan of theta followed by golden-section refinement to 1e-10.
    PhaseAlignment align_phase_global(const ComplexGrid& F1, const ComplexGrid& F2, double p,
                                      const DomainPartition* mask = nullptr, AlignMethod method = AlignMethod::automatic);

    struct MulticomponentAlignment
    {
        std::vector<PhaseAlignment> components;
        double total_residual = 0.0;  ///< sum of the per-component residuals
    };

    /// Independent alignment on every component of the partition.
    MulticomponentAlignment align_phase_multicomponent(const ComplexGrid& F1, const ComplexGrid& F2, double p,
                                                       const DomainPartition& partition);

    /// True when 1 <= p < 1 + 1/(2d-1) and q > p / (1 - p (2d-1)/(2d)).
    bool admissible(double p, double q, std::size_t d);
    /// Throws ErrorKind::admissibility with the violated condition.
    void require_admissible(double p, double q, std::size_t d);

    struct SobolevParts
    {
        double value = 0.0;     ///< ||S1 - S2||_p
        double gradient = 0.0;  ///< || |grad (S1 - S2)| ||_p
        double total() const { return value + gradient; }
    };

    /// W^{1,p} norm of S1 - S2 on the active cells; central differences inside the mask,
    /// one-sided at its boundary.
    SobolevParts sobolev_diff_parts(const RealGrid& S1, const RealGrid& S2, double p, const std::vector<bool>& mask);
    double sobolev_diff_norm(const RealGrid& S1, const RealGrid& S2, double p, const DomainPartition* mask = nullptr);

    /// ||(1 + |z - z0|^{2d+2}) (S1 - S2)||_q. Rejects (p, q) outside the admissible range.
    double weighted_lq_diff_norm(const RealGrid& S1, const RealGrid& S2, double q, double p,
                                 const std::vector<double>& z0, const std::vector<bool>& mask);

    struct LogDerivTerm
    {
        double value = 0.0;
        double excluded_fraction = 0.0;  ///< active cells dropped because S1 <= 1e-12 max S1
    };

    /// ||(grad S1 / S1)(S1 - S2)||_p over active cells with S1 > 1e-12 max S1.
    LogDerivTerm logderiv_term(const RealGrid& S1, const RealGrid& S2, double p, const std::vector<bool>& mask);

    /// f_plus = f_1 + f_2 and f_minus = f_1 - f_2, Gaussians centred at -T/2 and +T/2 on the
    /// first axis. Throws when either bump is not contained in the grid.
    std::pair<SignalGrid, SignalGrid> make_instability_pair(std::size_t d, double T, const GridGeometry& geometry);

    struct NoiseSpec
    {
        enum class Kind
        {
            gaussian_bump,  ///< amplitude * e^{-pi |z - center|^2 / width^2}
            band_limited,   ///< amplitude * mean of 16 random plane waves with |k| <= bandwidth
        };
        Kind kind = Kind::gaussian_bump;
        double amplitude = 0.0;
        double width = 1.0;
        std::vector<double> center;  ///< empty means the origin
        double bandwidth = 0.5;
        std::uint64_t seed = 0;
    };

    /// gamma sampled on a phase-space grid.
    RealGrid make_noise(const NoiseSpec& spec, const GridGeometry& geometry);

    /// ||F||_D = ||F||_{W^{1,p}} + ||(1 + |z - z0|^{2d+2}) F||_q.
    double dnorm(const RealGrid& field, double p, double q, const std::vector<double>& z0, const std::vector<bool>& mask);

    struct StabilityOptions
    {
        GridGeometry phase_geometry;
        std::optional<DomainPartition> partition;   ///< restricts the active mask
        double mask_threshold = 1e-9;               ///< active where |Gf| > threshold * max
        std::optional<std::vector<std::size_t>> oracle_block;  ///< coarsening factors for h_oracle
        std::optional<NoiseSpec> noise;
        LanczosOptions lanczos;
    };

    struct NoiseTerms
    {
        double epsilon = 0.0;       ///< || |Gf| + gamma - |Gg| ||_D
        double gamma_dnorm = 0.0;   ///< ||gamma||_D
        double bound_shape = 0.0;   ///< (1 + 1/h)(epsilon + ||gamma||_D)
    };

    struct StabilityReport
    {
        double p = 1.0, q = 1.0;
        std::size_t d = 1;
        double lhs = 0.0;
        double theta = 0.0;
        double h_upper = 0.0;
        std::optional<double> h_oracle;
        double h = 0.0;  ///< h_oracle when available, else h_upper
        bool disconnected = false;
        double poincare_bound = 0.0;  ///< 8 / h
        double value_term = 0.0;      ///< ||S1 - S2||_p
        double gradient_term = 0.0;   ///< ||grad(S1 - S2)||_p
        double sobolev_term = 0.0;
        double weighted_term = 0.0;
        double logderiv_term = 0.0;
        double logderiv_excluded_fraction = 0.0;
        double rhs_thm23 = 0.0;        ///< value + 2^{3/2} (8/h)(gradient + logderiv)
        double rhs_thm44_shape = 0.0;  ///< (1 + 1/h)(sobolev + weighted)
        double ratio = 0.0;            ///< lhs / rhs_thm44_shape
        double empirical_ratio = 0.0;  ///< lhs / (sobolev + weighted), no Cheeger factor
        std::vector<double> z0;
        std::size_t active_cells = 0;
        std::optional<NoiseTerms> noise;
    };

    /// Both sides of the stability estimates for the pair (f, g), with F1 = Gf and F2 = Gg.
    StabilityReport stability_report(const SignalGrid& f, const SignalGrid& g, double p, double q,
                                     const StabilityOptions& options);
}  // namespace ggr
