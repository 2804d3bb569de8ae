#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ggr/gabor.hpp"
#include "ggr/grid.hpp"

namespace ggr
{
    /// O_alpha^beta: M_G(r) <= |G(0)| e^{alpha r^beta} for every r.
    struct GrowthClassSpec
    {
        double alpha = 1.0;
        double beta = 1.0;

        void validate() const;
    };

    /// sum_k coeffs[k] z^k, one complex variable.
    struct PolynomialFunction
    {
        std::vector<Complex> coeffs;
    };

    /// scale * e^{c z^2}, one complex variable.
    struct GaussianExpFunction
    {
        Complex c;
        Complex scale{1.0, 0.0};
    };

    /// An entire function together with a way to evaluate it and its derivative.
    /// Polynomial and Gaussian-exponential kinds are evaluated in closed form at any z;
    /// the lifted kind is a sampled field whose derivatives come from central differences.
    class EntireFunctionSpec
    {
    public:
        static EntireFunctionSpec polynomial(std::vector<Complex> coeffs);
        static EntireFunctionSpec gaussian_exp(Complex c, Complex scale = 1.0);
        static EntireFunctionSpec lifted(EntireLift lift);

        /// Number of complex variables.
        std::size_t dimension() const;
        bool analytic() const noexcept { return !std::holds_alternative<std::shared_ptr<const EntireLift>>(kind_); }
        bool is_polynomial() const noexcept { return std::holds_alternative<PolynomialFunction>(kind_); }

        /// Closed-form kinds only.
        Complex value(Complex z) const;
        Complex derivative(Complex z) const;
        double log_abs(Complex z) const;
        /// G'/G, evaluated without forming G for the exponential kind.
        Complex log_derivative(Complex z) const;

        const PolynomialFunction* polynomial_coeffs() const { return std::get_if<PolynomialFunction>(&kind_); }
        const EntireLift* lift() const;

        /// |G(0)|, as log.
        double log_abs_at_origin() const;

    private:
        std::variant<PolynomialFunction, GaussianExpFunction, std::shared_ptr<const EntireLift>> kind_;
        std::size_t origin_index_ = 0;  ///< lifted kind: sample at z = 0
    };

    struct GrowthClassReport
    {
        bool member = false;
        double worst_margin = 0.0;  ///< min over r of log|G(0)| + alpha r^beta - log M_G(r)
        double worst_radius = 0.0;
        std::vector<double> margins;
    };

    /// Samples M_G(r) (4096 angles on the circle for closed-form kinds, every grid sample
    /// in the ball for the lifted kind) and compares with the growth class envelope.
    GrowthClassReport growth_class_check(const EntireFunctionSpec& G, const GrowthClassSpec& spec,
                                         const std::vector<double>& radii, std::size_t angles = 4096);

    /// (log G)' = G'/G on a grid; one component per complex variable. For closed-form kinds
    /// the geometry must be rank 2 and is used as given; the lifted kind uses its own grid.
    ///
    /// A cell is excluded when G or G'/G is not finite, or when |G| is below
    /// `threshold` times the largest |G| among the cell and its face neighbours.
    struct LogDerivativeField
    {
        GridGeometry geometry;
        std::vector<std::vector<Complex>> components;
        std::vector<bool> excluded;
        std::size_t excluded_count = 0;

        PhaseSpaceGrid component(std::size_t j) const;
        /// sqrt(sum_j |component_j|^2) per sample.
        std::vector<double> magnitude() const;
    };

    LogDerivativeField log_derivative_field(const EntireFunctionSpec& G, const GridGeometry& geometry,
                                            double threshold = 1e-12);

    struct BallNormOptions
    {
        double spacing = 1.0 / 64.0;  ///< grid step for closed-form kinds
        double threshold = 1e-12;
        std::optional<GrowthClassSpec> growth;  ///< enables the bound column
    };

    struct BallNormTable
    {
        std::size_t dimension = 1;
        double p = 1.0;
        std::vector<double> radii;
        std::vector<double> norms;
        std::vector<double> bounds;          ///< alpha 2^{2d+2beta} r^{2d+beta-1}, NaN without a growth class
        std::vector<double> slopes_so_far;   ///< log-log slope of rows 0..i, NaN for i = 0
        double fitted_slope = 0.0;
        double fitted_constant = 0.0;        ///< norm ~ fitted_constant * r^fitted_slope
        double excluded_fraction = 0.0;
    };

    /// ||(log G)'||_{L^p(B_r)} per radius by cell quadrature (cells whose centre lies in the
    /// closed ball), excluded cells omitted. Requires 1 <= p < 1 + 1/(2d-1).
    BallNormTable logderiv_ball_norms(const EntireFunctionSpec& G, double p, const std::vector<double>& radii,
                                      const BallNormOptions& options = {});

    struct JensenResult
    {
        double lhs = 0.0;              ///< log|G(z)|
        double circle_term = 0.0;      ///< Poisson-kernel average of log|G| on |xi| = r
        double zero_correction = 0.0;  ///< sum over zeros in the disc
        double residual = 0.0;
    };

    /// Poisson-Jensen balance in one variable. Zeros are the polynomial roots (none for the
    /// Gaussian-exponential kind).
    JensenResult jensen_check_1d(const EntireFunctionSpec& G, Complex z, double r, std::size_t angles = 4096);

    struct ZeroCountResult
    {
        std::size_t count = 0;          ///< roots with |z_k| < r, with multiplicity
        long contour_count = 0;         ///< argument-principle integral, rounded
        double contour_value = 0.0;     ///< unrounded
        double bound = 0.0;             ///< 2^beta alpha r^beta / log 2
        bool holds = false;
    };

    /// Polynomial roots (companion matrix eigenvalues).
    std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs);

    /// Zero count in B_r against the growth-class bound. Requires the polynomial to pass
    /// growth_class_check on a log-spaced radius sweep.
    ZeroCountResult zero_count_bound_1d(const EntireFunctionSpec& G, const GrowthClassSpec& spec, double r);
}  // namespace ggr
