#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ggr/entire.hpp"
#include "ggr/gabor.hpp"
#include "ggr/signals.hpp"
#include "testing.hpp"

using namespace ggr;
using std::numbers::pi;
using testing::error_kind;

namespace
{
    const auto exp_half_pi = EntireFunctionSpec::gaussian_exp(pi / 2);
    const auto one_minus_z = EntireFunctionSpec::polynomial({1.0, -1.0});
    const auto one_minus_z2 = EntireFunctionSpec::polynomial({1.0, 0.0, -1.0});
    const auto constant = EntireFunctionSpec::polynomial({1.0});

    std::vector<double> linspace(double a, double b, std::size_t n)
    {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = a + (b - a) * double(i) / double(n - 1);
        return v;
    }
}

TEST_CASE("specs reject G(0) = 0 and bad growth parameters")
{
    CHECK(error_kind([] { EntireFunctionSpec::polynomial({0.0, 1.0}); }) == ErrorKind::invalid_argument);
    CHECK(error_kind([] { EntireFunctionSpec::gaussian_exp(1.0, 0.0); }) == ErrorKind::invalid_argument);
    CHECK(error_kind([] { GrowthClassSpec{0.0, 1.0}.validate(); }) == ErrorKind::invalid_argument);
    CHECK(error_kind([] { GrowthClassSpec{1.0, INFINITY}.validate(); }) == ErrorKind::invalid_argument);
    CHECK(error_kind([] { growth_class_check(one_minus_z, {1.0, 1.0}, {-1.0}); }) == ErrorKind::invalid_argument);
}

TEST_CASE("growth class membership")
{
    const auto radii = linspace(0.05, 6.0, 60);
    const auto exact = growth_class_check(exp_half_pi, {pi / 2, 2.0}, radii);
    CHECK(exact.member);
    CHECK(std::abs(exact.worst_margin) <= 1e-9);

    CHECK(growth_class_check(one_minus_z, {1.0, 1.0}, radii).member);

    const auto out = growth_class_check(exp_half_pi, {1.0, 1.0}, {2.0});
    CHECK_FALSE(out.member);
    CHECK(out.worst_margin == doctest::Approx(2.0 - 2.0 * pi).epsilon(1e-9));

    // a larger alpha never loses membership, and the margin grows with alpha
    double previous = -HUGE_VAL;
    bool was_member = false;
    for (double alpha : {0.5, 1.0, 1.5, 2.0, 4.0})
    {
        const auto rep = growth_class_check(one_minus_z2, {alpha, 2.0}, radii);
        CHECK(rep.worst_margin >= previous);
        CHECK((!was_member || rep.member));
        previous = rep.worst_margin;
        was_member = rep.member;
    }
    CHECK(was_member);
}

TEST_CASE("log-derivative field, closed-form kinds")
{
    const auto g = GridGeometry::symmetric(2, 33, 1.0 / 8);
    const auto f = log_derivative_field(exp_half_pi, g);
    CHECK(f.excluded_count == 0);
    std::vector<double> z(2);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        g.point(i, z);
        CHECK(std::abs(f.components[0][i] - pi * Complex(z[0], z[1])) <= 1e-13);
    }
    const auto lin = log_derivative_field(one_minus_z, g);
    CHECK(lin.components[0][g.ravel(std::vector<std::size_t>{16, 16})] == Complex(-1.0));
    // the zero at z = 1 is a grid sample
    CHECK(lin.excluded[g.ravel(std::vector<std::size_t>{24, 16})]);
    const auto flat = log_derivative_field(constant, g);
    for (const Complex& v : flat.components[0])
        CHECK(v == Complex(0.0));
}

TEST_CASE("log-derivative is invariant under constant multiples")
{
    const auto g = GridGeometry::symmetric(2, 21, 0.2);
    const auto a = log_derivative_field(EntireFunctionSpec::polynomial({1.0, 2.0, Complex(0.0, 1.0)}), g);
    const auto b = log_derivative_field(
        EntireFunctionSpec::polynomial({Complex(3.0, -4.0), Complex(6.0, -8.0), Complex(4.0, 3.0)}), g);
    const auto c = log_derivative_field(EntireFunctionSpec::gaussian_exp(0.7, Complex(-1e-5, 2.0)), g);
    const auto d = log_derivative_field(EntireFunctionSpec::gaussian_exp(0.7), g);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        if (a.excluded[i])
            continue;
        CHECK(std::abs(a.components[0][i] - b.components[0][i]) <= 1e-12 * std::max(1.0, std::abs(a.components[0][i])));
        CHECK(std::abs(c.components[0][i] - d.components[0][i]) <= 1e-12);
    }
}

TEST_CASE("log-derivative of a lifted transform")
{
    // Gf of e^{2 pi i b t} e^{-pi (t-a)^2} lifts to c e^{pi (a + i b) z}: constant log-derivative
    const double a = 0.25, b = 0.125;
    const auto sg = GridGeometry::symmetric(1, 512, 1.0 / 32);
    const auto pg = GridGeometry::symmetric(2, 65, 1.0 / 32);
    const auto G = EntireFunctionSpec::lifted(
        entire_lift(gabor_transform(make_analytic(AnalyticSignalSpec::shifted({a}, {b}), sg), pg)));
    CHECK(G.dimension() == 1);
    const auto f = log_derivative_field(G, pg);
    std::vector<std::size_t> idx(2);
    double worst = 0.0;
    for (std::size_t i = 0; i < pg.size(); ++i)
    {
        pg.unravel(i, idx);
        if (idx[0] == 0 || idx[1] == 0 || idx[0] == 64 || idx[1] == 64)
            continue;
        worst = std::max(worst, std::abs(f.components[0][i] - pi * Complex(a, b)) / (pi * std::hypot(a, b)));
    }
    CHECK(worst <= 1e-3);

    const auto centred = EntireFunctionSpec::lifted(entire_lift(gabor_transform(make_gaussian(1, sg), pg)));
    CHECK(centred.log_abs_at_origin() == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(growth_class_check(centred, {0.1, 1.0}, {0.5, 1.0}).member);
    CHECK(error_kind([&] { centred.value(0.0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("ball norms")
{
    const auto radii = linspace(1.0, 8.0, 8);
    const auto t = logderiv_ball_norms(exp_half_pi, 1.0, radii, {.spacing = 1.0 / 64, .growth = GrowthClassSpec{pi / 2, 2.0}});
    // int_{B_r} pi |z| dA = 2 pi^2 r^3 / 3
    CHECK(t.norms[0] == doctest::Approx(2.0 * pi * pi / 3.0).epsilon(0.01));
    CHECK(t.fitted_slope == doctest::Approx(3.0).epsilon(0.05 / 3.0));
    CHECK(t.excluded_fraction == 0.0);
    CHECK(t.bounds[0] == doctest::Approx(pi / 2 * std::pow(2.0, 6.0)));
    CHECK(std::isnan(t.slopes_so_far[0]));
    for (std::size_t k = 1; k < radii.size(); ++k)
        CHECK(t.norms[k] >= t.norms[k - 1]);

    const auto flat = logderiv_ball_norms(constant, 1.0, {0.5, 1.0});
    for (double v : flat.norms)
        CHECK(v == 0.0);

    CHECK(error_kind([] { logderiv_ball_norms(exp_half_pi, 2.0, {1.0}); }) == ErrorKind::admissibility);
    CHECK(error_kind([] { logderiv_ball_norms(exp_half_pi, 0.5, {1.0}); }) == ErrorKind::admissibility);
    CHECK(error_kind([] { logderiv_ball_norms(exp_half_pi, 1.0, {2.0, 1.0}); }) == ErrorKind::invalid_argument);
}

TEST_CASE("ball-norm slope stays within the growth exponent for class members")
{
    struct Case
    {
        EntireFunctionSpec G;
        GrowthClassSpec spec;
    };
    const std::vector<Case> family{
        {exp_half_pi, {pi / 2, 2.0}},
        {EntireFunctionSpec::gaussian_exp(Complex(0.0, 1.0)), {1.0, 2.0}},
        {one_minus_z2, {1.0, 2.0}},
        {EntireFunctionSpec::polynomial({1.0, 0.5, 0.25, 0.125}), {1.0, 1.0}},
    };
    const auto radii = linspace(0.8, 8.0, 10);
    for (const auto& c : family)
    {
        REQUIRE(growth_class_check(c.G, c.spec, radii).member);
        const auto t = logderiv_ball_norms(c.G, 1.0, radii, {.spacing = 1.0 / 32});
        CHECK(t.fitted_slope <= 2.0 + c.spec.beta - 1.0 + 0.1);
    }
}

TEST_CASE("Poisson-Jensen balance")
{
    const auto G = EntireFunctionSpec::polynomial({-2.0, 1.0});
    const auto r1 = jensen_check_1d(G, 0.0, 1.0);
    CHECK(r1.lhs == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(r1.residual <= 1e-8);
    const auto r3 = jensen_check_1d(G, 0.0, 3.0);
    CHECK(r3.circle_term == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(r3.zero_correction == doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(r3.residual <= 1e-8);
    CHECK(jensen_check_1d(constant, Complex(0.3, 0.2), 1.0).residual == 0.0);
    CHECK(jensen_check_1d(EntireFunctionSpec::polynomial({1.0, 0.0, 0.0, 1.0}), Complex(0.2, -0.4), 1.7).residual <= 1e-8);

    CHECK(error_kind([&] { jensen_check_1d(G, 0.0, 2.0); }) == ErrorKind::invalid_argument);
    CHECK(error_kind([&] { jensen_check_1d(G, 1.5, 1.0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("Jensen residual falls at least linearly as the circle is refined")
{
    const auto G = EntireFunctionSpec::polynomial({-1.1, 1.0});
    double previous = jensen_check_1d(G, 0.1, 1.0, 8).residual;
    for (std::size_t n : {16, 32, 64})
    {
        const double r = jensen_check_1d(G, 0.1, 1.0, n).residual;
        CHECK(r <= 0.5 * previous);
        previous = r;
    }
}

TEST_CASE("zero counts")
{
    const auto a = zero_count_bound_1d(one_minus_z2, {1.0, 2.0}, 1.5);
    CHECK(a.count == 2);
    CHECK(a.contour_count == 2);
    CHECK(a.bound == doctest::Approx(4.0 * 2.25 / std::log(2.0)));
    CHECK(a.holds);

    const auto b = zero_count_bound_1d(one_minus_z, {1.0, 1.0}, 0.5);
    CHECK(b.count == 0);
    CHECK(b.contour_count == 0);
    CHECK(b.holds);

    const std::vector<Complex> roots{0.3, Complex(0.0, 0.6), -0.9, 2.5, Complex(0.0, -2.5)};
    std::vector<Complex> coeffs{1.0};
    for (Complex root : roots)
    {
        std::vector<Complex> next(coeffs.size() + 1);
        for (std::size_t k = 0; k < coeffs.size(); ++k)
        {
            next[k] -= root * coeffs[k];
            next[k + 1] += coeffs[k];
        }
        coeffs = next;
    }
    const auto p = EntireFunctionSpec::polynomial(coeffs);
    for (auto [r, want] : {std::pair{0.5, 1}, {0.7, 2}, {1.0, 3}, {3.0, 5}})
    {
        const auto z = zero_count_bound_1d(p, {8.0, 1.0}, r);
        CHECK(z.count == std::size_t(want));
        CHECK(z.contour_count == want);
    }
    CHECK(error_kind([] { zero_count_bound_1d(one_minus_z2, {0.1, 1.0}, 1.5); }) == ErrorKind::admissibility);
    CHECK(error_kind([] { zero_count_bound_1d(exp_half_pi, {2.0, 2.0}, 1.5); }) == ErrorKind::invalid_argument);
}

TEST_CASE("polynomial roots")
{
    auto roots = polynomial_roots({6.0, -5.0, 1.0});
    std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - 2.0) <= 1e-12);
    CHECK(std::abs(roots[1] - 3.0) <= 1e-12);
    CHECK(polynomial_roots({1.0}).empty());
}
