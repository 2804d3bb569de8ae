#include "ggr/entire.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ggr/numerics.hpp"

namespace ggr
{
    namespace
    {
        using std::numbers::pi;
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();

        std::vector<Complex> trimmed(std::vector<Complex> c)
        {
            while (!c.empty() && c.back() == Complex{})
                c.pop_back();
            return c;
        }

        Complex horner(const std::vector<Complex>& c, Complex z)
        {
            Complex v{};
            for (std::size_t k = c.size(); k-- > 0;)
                v = v * z + c[k];
            return v;
        }

        Complex horner_derivative(const std::vector<Complex>& c, Complex z)
        {
            Complex v{};
            for (std::size_t k = c.size(); k-- > 1;)
                v = v * z + double(k) * c[k];
            return v;
        }

        double admissible_p_limit(std::size_t d) { return 1.0 + 1.0 / double(2 * d - 1); }

        /// Largest half-width of a centred ball that fits in the grid box.
        double ball_coverage(const GridGeometry& g)
        {
            double cover = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < g.rank(); ++a)
                cover = std::min({cover, -g.origin()[a], g.upper(a)});
            return cover;
        }

        double norm2(std::span<const double> z)
        {
            double s = 0.0;
            for (double v : z)
                s += v * v;
            return s;
        }

        /// Local exclusion: |G| below threshold * max |G| over the cell and its face neighbours.
        std::vector<bool> locally_small(const GridGeometry& g, const std::vector<double>& log_abs, double threshold)
        {
            const double log_t = std::log(threshold);
            std::vector<bool> out(log_abs.size(), false);
            std::vector<std::size_t> idx(g.rank());
            for (std::size_t i = 0; i < log_abs.size(); ++i)
            {
                if (!(log_abs[i] > -std::numeric_limits<double>::infinity()))
                {
                    out[i] = true;
                    continue;
                }
                g.unravel(i, idx);
                double top = log_abs[i];
                for (std::size_t a = 0; a < g.rank(); ++a)
                {
                    const std::size_t s = g.stride(a);
                    if (idx[a] > 0)
                        top = std::max(top, log_abs[i - s]);
                    if (idx[a] + 1 < g.extent(a))
                        top = std::max(top, log_abs[i + s]);
                }
                out[i] = log_abs[i] < top + log_t;
            }
            return out;
        }
    }  // namespace

    void GrowthClassSpec::validate() const
    {
        require(std::isfinite(alpha) && alpha > 0.0, "growth class: alpha must be finite and positive");
        require(std::isfinite(beta) && beta > 0.0, "growth class: beta must be finite and positive");
    }

    EntireFunctionSpec EntireFunctionSpec::polynomial(std::vector<Complex> coeffs)
    {
        coeffs = trimmed(std::move(coeffs));
        require(!coeffs.empty() && coeffs[0] != Complex{}, "entire function: G(0) must be nonzero");
        for (const Complex& c : coeffs)
            require(std::isfinite(c.real()) && std::isfinite(c.imag()), "entire function: coefficients must be finite");
        EntireFunctionSpec s;
        s.kind_ = PolynomialFunction{std::move(coeffs)};
        return s;
    }

    EntireFunctionSpec EntireFunctionSpec::gaussian_exp(Complex c, Complex scale)
    {
        require(std::isfinite(c.real()) && std::isfinite(c.imag()), "entire function: exponent must be finite");
        require(scale != Complex{} && std::isfinite(std::abs(scale)), "entire function: G(0) must be nonzero");
        EntireFunctionSpec s;
        s.kind_ = GaussianExpFunction{c, scale};
        return s;
    }

    EntireFunctionSpec EntireFunctionSpec::lifted(EntireLift lift)
    {
        const GridGeometry& g = lift.lifted.geometry();
        std::vector<std::size_t> idx(g.rank());
        for (std::size_t a = 0; a < g.rank(); ++a)
        {
            const double i0 = -g.origin()[a] / g.spacing()[a];
            const double r = std::round(i0);
            require(std::abs(i0 - r) <= 1e-9 && r >= 0.0 && r < double(g.extent(a)),
                    "entire function: lifted grid must contain the origin as a sample");
            idx[a] = std::size_t(r);
        }
        EntireFunctionSpec s;
        s.origin_index_ = g.ravel(idx);
        require(lift.lifted[s.origin_index_] != Complex{}, "entire function: G(0) must be nonzero");
        s.kind_ = std::make_shared<const EntireLift>(std::move(lift));
        return s;
    }

    std::size_t EntireFunctionSpec::dimension() const
    {
        if (const EntireLift* l = lift())
            return l->lifted.dimension();
        return 1;
    }

    const EntireLift* EntireFunctionSpec::lift() const
    {
        if (auto p = std::get_if<std::shared_ptr<const EntireLift>>(&kind_))
            return p->get();
        return nullptr;
    }

    Complex EntireFunctionSpec::value(Complex z) const
    {
        if (auto p = std::get_if<PolynomialFunction>(&kind_))
            return horner(p->coeffs, z);
        if (auto g = std::get_if<GaussianExpFunction>(&kind_))
            return g->scale * std::exp(g->c * z * z);
        fail(ErrorKind::invalid_argument, "entire function: pointwise evaluation needs a closed-form kind");
    }

    Complex EntireFunctionSpec::derivative(Complex z) const
    {
        if (auto p = std::get_if<PolynomialFunction>(&kind_))
            return horner_derivative(p->coeffs, z);
        if (auto g = std::get_if<GaussianExpFunction>(&kind_))
            return 2.0 * g->c * z * g->scale * std::exp(g->c * z * z);
        fail(ErrorKind::invalid_argument, "entire function: pointwise evaluation needs a closed-form kind");
    }

    Complex EntireFunctionSpec::log_derivative(Complex z) const
    {
        if (auto p = std::get_if<PolynomialFunction>(&kind_))
            return horner_derivative(p->coeffs, z) / horner(p->coeffs, z);
        if (auto g = std::get_if<GaussianExpFunction>(&kind_))
            return 2.0 * g->c * z;
        fail(ErrorKind::invalid_argument, "entire function: pointwise evaluation needs a closed-form kind");
    }

    double EntireFunctionSpec::log_abs(Complex z) const
    {
        if (auto g = std::get_if<GaussianExpFunction>(&kind_))
            return std::log(std::abs(g->scale)) + (g->c * z * z).real();
        return std::log(std::abs(value(z)));
    }

    double EntireFunctionSpec::log_abs_at_origin() const
    {
        if (const EntireLift* l = lift())
            return std::log(std::abs(l->lifted[origin_index_]));
        return log_abs(Complex{});
    }

    GrowthClassReport growth_class_check(const EntireFunctionSpec& G, const GrowthClassSpec& spec,
                                         const std::vector<double>& radii, std::size_t angles)
    {
        spec.validate();
        require(!radii.empty(), "growth check: no radii");
        require(angles >= 8, "growth check: too few angles");
        for (double r : radii)
            require(std::isfinite(r) && r > 0.0, "growth check: radii must be positive");

        const double log_g0 = G.log_abs_at_origin();
        GrowthClassReport rep;
        rep.margins.resize(radii.size());

        std::vector<double> lifted_log, lifted_r;
        if (const EntireLift* l = G.lift())
        {
            const GridGeometry& g = l->lifted.geometry();
            const double cover = ball_coverage(g);
            for (double r : radii)
                require(r <= cover + 1e-12, "growth check: radius exceeds grid coverage");
            lifted_log.resize(g.size());
            lifted_r.resize(g.size());
            std::vector<double> z(g.rank());
            for (std::size_t i = 0; i < g.size(); ++i)
            {
                g.point(i, z);
                lifted_r[i] = std::sqrt(norm2(z));
                lifted_log[i] = std::log(std::abs(l->lifted[i]));
            }
        }

        for (std::size_t k = 0; k < radii.size(); ++k)
        {
            const double r = radii[k];
            double log_m = -std::numeric_limits<double>::infinity();
            if (G.lift())
            {
                for (std::size_t i = 0; i < lifted_log.size(); ++i)
                    if (lifted_r[i] <= r)
                        log_m = std::max(log_m, lifted_log[i]);
            }
            else
            {
                for (std::size_t j = 0; j < angles; ++j)
                {
                    const double theta = 2.0 * pi * double(j) / double(angles);
                    log_m = std::max(log_m, G.log_abs(std::polar(r, theta)));
                }
            }
            const double envelope = log_g0 + spec.alpha * std::pow(r, spec.beta);
            rep.margins[k] = envelope - log_m;
            if (k == 0 || rep.margins[k] < rep.worst_margin)
            {
                rep.worst_margin = rep.margins[k];
                rep.worst_radius = r;
            }
        }
        // Equality cases (e.g. e^{pi z^2/2} on the real axis) land within rounding of 0.
        double scale = 1.0;
        for (std::size_t k = 0; k < radii.size(); ++k)
            scale = std::max(scale, std::abs(log_g0) + spec.alpha * std::pow(radii[k], spec.beta));
        rep.member = rep.worst_margin >= -1e-12 * scale;
        return rep;
    }

    PhaseSpaceGrid LogDerivativeField::component(std::size_t j) const
    {
        std::vector<Complex> v = components.at(j);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (excluded[i])
                v[i] = Complex{};
        return PhaseSpaceGrid(geometry, std::move(v));
    }

    std::vector<double> LogDerivativeField::magnitude() const
    {
        std::vector<double> out(excluded.size(), 0.0);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            if (excluded[i])
                continue;
            double s = 0.0;
            for (const auto& c : components)
                s += std::norm(c[i]);
            out[i] = std::sqrt(s);
        }
        return out;
    }

    LogDerivativeField log_derivative_field(const EntireFunctionSpec& G, const GridGeometry& geometry, double threshold)
    {
        require(threshold > 0.0 && threshold < 1.0, "log-derivative: threshold must lie in (0, 1)");
        LogDerivativeField out;
        std::vector<double> log_abs;

        if (const EntireLift* l = G.lift())
        {
            const GridGeometry& g = l->lifted.geometry();
            out.geometry = g;
            const auto vals = l->lifted.values();
            log_abs.resize(g.size());
            for (std::size_t i = 0; i < g.size(); ++i)
                log_abs[i] = std::log(std::abs(vals[i]));
            auto dz = wirtinger_dz(gradient<Complex>(vals, g));
            for (auto& comp : dz)
                for (std::size_t i = 0; i < g.size(); ++i)
                    comp[i] /= vals[i];
            out.components = std::move(dz);
        }
        else
        {
            require(geometry.rank() == 2, "log-derivative: closed-form kinds need a rank-2 grid");
            out.geometry = geometry;
            log_abs.resize(geometry.size());
            out.components.assign(1, std::vector<Complex>(geometry.size()));
            parallel_for(geometry.size(), [&](std::size_t begin, std::size_t end) {
                std::vector<double> z(2);
                for (std::size_t i = begin; i < end; ++i)
                {
                    geometry.point(i, z);
                    const Complex w(z[0], z[1]);
                    log_abs[i] = G.log_abs(w);
                    out.components[0][i] = G.log_derivative(w);
                }
            });
        }

        out.excluded = locally_small(out.geometry, log_abs, threshold);
        for (std::size_t i = 0; i < out.excluded.size(); ++i)
        {
            if (!std::isfinite(log_abs[i]))
                out.excluded[i] = true;
            for (const auto& c : out.components)
                if (!std::isfinite(c[i].real()) || !std::isfinite(c[i].imag()))
                    out.excluded[i] = true;
            if (out.excluded[i])
                ++out.excluded_count;
        }
        require(out.excluded_count < out.excluded.size(), "log-derivative: every cell is excluded");
        return out;
    }

    BallNormTable logderiv_ball_norms(const EntireFunctionSpec& G, double p, const std::vector<double>& radii,
                                      const BallNormOptions& options)
    {
        const std::size_t d = G.dimension();
        if (!(p >= 1.0 && p < admissible_p_limit(d)))
            fail(ErrorKind::admissibility, "ball norms: p must satisfy 1 <= p < 1 + 1/(2d-1)");
        require(!radii.empty(), "ball norms: no radii");
        for (std::size_t k = 0; k < radii.size(); ++k)
        {
            require(std::isfinite(radii[k]) && radii[k] > 0.0, "ball norms: radii must be positive");
            require(k == 0 || radii[k] > radii[k - 1], "ball norms: radii must be strictly increasing");
        }
        if (options.growth)
            options.growth->validate();

        GridGeometry geometry;
        if (const EntireLift* l = G.lift())
        {
            geometry = l->lifted.geometry();
            require(radii.back() <= ball_coverage(geometry) + 1e-12, "ball norms: radius exceeds grid coverage");
        }
        else
        {
            require(options.spacing > 0.0, "ball norms: spacing must be positive");
            const std::size_t half = std::size_t(std::ceil(radii.back() / options.spacing)) + 1;
            geometry = GridGeometry::symmetric(2, 2 * half + 1, options.spacing);
        }
        const LogDerivativeField field = log_derivative_field(G, geometry, options.threshold);
        const std::vector<double> mag = field.magnitude();

        // Cells sorted by |z|; a running sum of nonnegative terms keeps the norms monotone in r.
        std::vector<double> radius(geometry.size());
        std::vector<double> z(geometry.rank());
        for (std::size_t i = 0; i < geometry.size(); ++i)
        {
            geometry.point(i, z);
            radius[i] = std::sqrt(norm2(z));
        }
        std::vector<std::size_t> order(geometry.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radius[a] < radius[b]; });

        BallNormTable t;
        t.dimension = d;
        t.p = p;
        t.radii = radii;
        const double vol = geometry.cell_volume();
        double acc = 0.0;
        std::size_t pos = 0, in_ball = 0, excluded_in_ball = 0;
        for (double r : radii)
        {
            while (pos < order.size() && radius[order[pos]] <= r)
            {
                const std::size_t i = order[pos++];
                ++in_ball;
                if (field.excluded[i])
                    ++excluded_in_ball;
                else
                    acc += std::pow(mag[i], p) * vol;
            }
            t.norms.push_back(std::pow(acc, 1.0 / p));
            if (options.growth)
            {
                const double a = options.growth->alpha, b = options.growth->beta;
                t.bounds.push_back(a * std::pow(2.0, 2.0 * double(d) + 2.0 * b) * std::pow(r, 2.0 * double(d) + b - 1.0));
            }
            else
                t.bounds.push_back(nan);
        }
        t.excluded_fraction = in_ball ? double(excluded_in_ball) / double(in_ball) : 0.0;

        std::vector<double> lx, ly;
        for (std::size_t k = 0; k < radii.size(); ++k)
        {
            if (t.norms[k] > 0.0)
            {
                lx.push_back(std::log(radii[k]));
                ly.push_back(std::log(t.norms[k]));
            }
            t.slopes_so_far.push_back(lx.size() >= 2 ? fit_line(lx, ly).slope : nan);
        }
        if (lx.size() >= 2)
        {
            const LineFit fit = fit_line(lx, ly);
            t.fitted_slope = fit.slope;
            t.fitted_constant = std::exp(fit.intercept);
        }
        return t;
    }

    std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs_in)
    {
        const std::vector<Complex> c = trimmed(coeffs_in);
        require(!c.empty(), "roots: zero polynomial");
        const std::size_t n = c.size() - 1;
        if (n == 0)
            return {};
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(Eigen::Index(n), Eigen::Index(n));
        for (std::size_t i = 1; i < n; ++i)
            companion(Eigen::Index(i), Eigen::Index(i - 1)) = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            companion(Eigen::Index(i), Eigen::Index(n - 1)) = -c[i] / c[n];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
        if (solver.info() != Eigen::Success)
            fail(ErrorKind::non_convergence, "roots: companion eigensolve failed");
        std::vector<Complex> roots(n);
        for (std::size_t i = 0; i < n; ++i)
            roots[i] = solver.eigenvalues()(Eigen::Index(i));
        return roots;
    }

    JensenResult jensen_check_1d(const EntireFunctionSpec& G, Complex z, double r, std::size_t angles)
    {
        require(G.analytic() && G.dimension() == 1, "jensen: needs a closed-form function of one variable");
        require(std::isfinite(r) && r > 0.0, "jensen: radius must be positive");
        require(std::abs(z) < r, "jensen: z must lie inside the disc");
        require(angles >= 4, "jensen: too few angles");

        std::vector<Complex> zeros;
        if (const PolynomialFunction* p = G.polynomial_coeffs())
            zeros = polynomial_roots(p->coeffs);
        for (const Complex& zk : zeros)
        {
            require(std::abs(std::abs(zk) - r) > 1e-9 * r, "jensen: G has a zero on the contour");
            require(std::abs(z - zk) > 0.0, "jensen: z is a zero of G");
        }

        JensenResult res;
        res.lhs = G.log_abs(z);
        const double r2 = r * r, z2 = std::norm(z);
        CompensatedSum circle;
        for (std::size_t j = 0; j < angles; ++j)
        {
            const Complex xi = std::polar(r, 2.0 * pi * double(j) / double(angles));
            circle.add(G.log_abs(xi) * (r2 - z2) / std::norm(xi - z));
        }
        res.circle_term = circle.value() / double(angles);
        CompensatedSum corr;
        for (const Complex& zk : zeros)
            if (std::abs(zk) < r)
                corr.add(std::log(std::abs((r2 - std::conj(zk) * z) / (r * (z - zk)))));
        res.zero_correction = corr.value();
        res.residual = std::abs(res.lhs - (res.circle_term - res.zero_correction));
        return res;
    }

    ZeroCountResult zero_count_bound_1d(const EntireFunctionSpec& G, const GrowthClassSpec& spec, double r)
    {
        const PolynomialFunction* poly = G.polynomial_coeffs();
        require(poly != nullptr, "zero count: needs a polynomial");
        require(std::isfinite(r) && r > 0.0, "zero count: radius must be positive");
        spec.validate();

        std::vector<double> sweep;
        for (int k = 0; k <= 80; ++k)
            sweep.push_back(std::pow(10.0, -2.0 + 4.0 * double(k) / 80.0));
        if (!growth_class_check(G, spec, sweep).member)
            fail(ErrorKind::admissibility, "zero count: function is not in the requested growth class");

        ZeroCountResult res;
        for (const Complex& zk : polynomial_roots(poly->coeffs))
        {
            require(std::abs(std::abs(zk) - r) > 1e-8 * r, "zero count: root on the contour");
            if (std::abs(zk) < r)
                ++res.count;
        }

        // (1 / 2 pi i) oint G'/G dz with z = r e^{i theta}: the mean of z G'(z)/G(z).
        double previous = nan;
        bool converged = false;
        for (std::size_t n = 256; n <= (std::size_t(1) << 22); n *= 2)
        {
            CompensatedSum re;
            for (std::size_t j = 0; j < n; ++j)
            {
                const Complex xi = std::polar(r, 2.0 * pi * double(j) / double(n));
                re.add((xi * G.derivative(xi) / G.value(xi)).real());
            }
            res.contour_value = re.value() / double(n);
            if (std::abs(res.contour_value - std::round(res.contour_value)) < 1e-6 &&
                std::abs(res.contour_value - previous) < 1e-6)
            {
                converged = true;
                break;
            }
            previous = res.contour_value;
        }
        if (!converged)
            fail(ErrorKind::non_convergence, "zero count: argument-principle integral did not settle");
        res.contour_count = std::lround(res.contour_value);
        res.bound = std::pow(2.0, spec.beta) * spec.alpha * std::pow(r, spec.beta) / std::log(2.0);
        res.holds = double(res.count) <= res.bound;
        return res;
    }
}  // namespace ggr
