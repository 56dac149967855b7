#include "schureq/distribution.hpp"

#include "schureq/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

using namespace schureq;

namespace {

double abs_err(double a, double b) { return std::abs(a - b); }

}  // namespace

TEST_CASE("survival convention pins S(0) = 1 for every family") {
    CHECK(DiscreteDistribution::poisson(3.7).survival(0) == 1.0);
    CHECK(DiscreteDistribution::geometric(0.42).survival(0) == 1.0);
    CHECK(DiscreteDistribution::from_pmf({0.25, 0.5, 0.25}).survival(0) == 1.0);
    CHECK(DiscreteDistribution().survival(0) == 1.0);
}

TEST_CASE("default instance is the point mass at zero") {
    const DiscreteDistribution d;
    CHECK(d.pmf(0) == 1.0);
    CHECK(d.pmf(1) == 0.0);
    CHECK(d.survival(1) == 0.0);
    CHECK(d.mean() == 0.0);
}

TEST_CASE("poisson pmf and survival match the closed forms") {
    const double lambda = 1.0;
    const auto d = DiscreteDistribution::poisson(lambda);
    CHECK(abs_err(d.pmf(0), std::exp(-1.0)) < 1e-16);
    CHECK(abs_err(d.pmf(2), std::exp(-1.0) / 2.0) < 1e-16);
    CHECK(abs_err(d.survival(1), 1.0 - std::exp(-1.0)) < 1e-15);
    CHECK(d.mean() == 1.0);

    // pmf identity p(x) = S(x) - S(x+1) across both survival branches. The
    // log-space pmf at lambda = 50 carries ~1e-14 relative error from the
    // cancellation in -lambda + x log(lambda) - lgamma(x+1).
    const auto big = DiscreteDistribution::poisson(50.0);
    for (std::uint64_t x : {0ull, 1ull, 10ull, 49ull, 50ull, 51ull, 90ull, 200ull}) {
        CHECK(abs_err(big.pmf(x), big.survival(x) - big.survival(x + 1)) <
              1e-13 * (1.0 + big.pmf(x)));
    }
}

TEST_CASE("geometric survival is q^x") {
    const auto d = DiscreteDistribution::geometric(0.5);
    CHECK(d.survival(3) == 0.125);
    CHECK(d.pmf(0) == 0.5);
    CHECK(d.pmf(2) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(d.mean() == doctest::Approx(1.0).epsilon(1e-15));

    const auto h = DiscreteDistribution::geometric(0.9);
    for (std::uint64_t x = 0; x <= 40; ++x) {
        CHECK(abs_err(h.pmf(x), h.survival(x) - h.survival(x + 1)) < 1e-16);
    }
}

TEST_CASE("explicit laws validate and expose their stored head") {
    const auto d = DiscreteDistribution::from_pmf({0.25, 0.5, 0.25});
    CHECK(d.is_explicit());
    CHECK(d.support_size() == 3);
    CHECK(d.pmf(1) == 0.5);
    CHECK(d.pmf(7) == 0.0);
    CHECK(d.survival(2) == 0.25);
    CHECK(d.survival(3) == 0.0);
    CHECK(d.survival(100) == 0.0);
    CHECK(d.mean() == 1.0);

    CHECK_THROWS_AS(DiscreteDistribution::from_pmf({0.6, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteDistribution::from_pmf({-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteDistribution::from_pmf({0.5, 0.5 - 1e-6}), std::invalid_argument);
    // Within the 1e-12 mass budget the pmf is accepted unnormalized.
    CHECK_NOTHROW(DiscreteDistribution::from_pmf({0.5, 0.5 - 1e-13}));
}

TEST_CASE("explicit laws with tail report the discarded mass as flat survival") {
    const auto d = DiscreteDistribution::from_pmf_with_tail({0.5, 0.25}, 0.25);
    CHECK(d.discarded_mass() == 0.25);
    CHECK(d.survival(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.survival(2) == 0.25);
    CHECK(d.survival(50) == 0.25);
    // The pmf identity stays valid beyond the stored support.
    CHECK(d.pmf(2) == 0.0);
    CHECK(d.survival(2) - d.survival(3) == 0.0);
}

TEST_CASE("truncate materializes closed forms on the minimal support") {
    const auto g = truncate(DiscreteDistribution::geometric(0.999), 1e-12);
    // Smallest M with 0.999^(M+1) < 1e-12 is M = 27617.
    CHECK(g.support_size() == 27618);
    CHECK(g.discarded_mass() < 1e-12);
    CHECK(g.discarded_mass() > 0.0);
    CHECK(abs_err(g.discarded_mass(), std::pow(0.999, 27618.0)) < 1e-24);

    const auto p = truncate(DiscreteDistribution::poisson(5.0), 1e-10);
    CHECK(p.is_explicit());
    CHECK(p.discarded_mass() < 1e-10);
    CHECK(DiscreteDistribution::poisson(5.0).survival(p.support_size()) < 1e-10);
    CHECK(DiscreteDistribution::poisson(5.0).survival(p.support_size() - 1) >= 1e-10);
    CHECK(abs_err(p.mean(), 5.0) < 1e-8);

    // Explicit instances pass through untouched.
    const auto e = DiscreteDistribution::from_pmf({0.5, 0.5});
    const auto e2 = truncate(e, 1e-30);
    CHECK(e2.support_size() == 2);
    CHECK(e2.pmf(1) == 0.5);
}

TEST_CASE("truncate refuses supports past the truncation bound") {
    const auto d = DiscreteDistribution::geometric(0.5, 1e-12, /*truncation_bound=*/10);
    CHECK_THROWS_AS(truncate(d, 1e-12), NonConvergentError);
}

TEST_CASE("closed-form raw moments are exact") {
    // Poisson(1) raw moments are the Bell numbers.
    const auto p = DiscreteDistribution::poisson(1.0);
    CHECK(p.moment_rational(0) == 1);
    CHECK(p.moment_rational(1) == 1);
    CHECK(p.moment_rational(2) == 2);
    CHECK(p.moment_rational(3) == 5);
    CHECK(p.moment_rational(4) == 15);
    CHECK(p.moment_rational(5) == 52);
    CHECK(p.moment_rational(6) == 203);

    // Geometric(1/2) raw moments are the ordered Bell numbers.
    const auto g = DiscreteDistribution::geometric(0.5);
    CHECK(g.moment_rational(1) == 1);
    CHECK(g.moment_rational(2) == 3);
    CHECK(g.moment_rational(3) == 13);
    CHECK(g.moment_rational(4) == 75);
    CHECK(g.moment_rational(5) == 541);
    CHECK(g.moment_rational(6) == 4683);

    // E(X^3) = lambda^3 + 3 lambda^2 + lambda = 22 at lambda = 2.
    CHECK(DiscreteDistribution::poisson(2.0).moment(3) == 22.0);
    CHECK(DiscreteDistribution::geometric(0.25).moment_rational(2) == Rational(5, 9));
}

TEST_CASE("explicit moments sum the stored pmf exactly") {
    const auto d = DiscreteDistribution::from_pmf({0.2, 0.3, 0.5});
    CHECK(d.moment(0) == 1.0);
    CHECK(abs_err(d.moment(1), 1.3) < 1e-15);
    CHECK(abs_err(d.moment(2), 2.3) < 1e-15);
    CHECK(d.moment_rational(2) == Rational(0.3) + 4 * Rational(0.5));

    const auto detail = d.moment_detail(2);
    CHECK(detail.error_bound == 0.0);

    const auto t = DiscreteDistribution::from_pmf_with_tail({0.5, 0.4}, 0.1);
    CHECK(t.moment_detail(1).error_bound > 0.0);
}

TEST_CASE("check_n_monotone certifies closed families and flags genuine failures") {
    // Geometric survival q^x is completely monotone: (-1)^j D^j S = q^x (1-q)^j.
    for (unsigned n = 2; n <= 6; ++n) {
        CHECK(check_n_monotone(DiscreteDistribution::geometric(0.5), n, 100).holds);
    }

    // Poisson(1) is 2-monotone (pmf decreasing) but not 3-monotone: the pmf
    // is not convex at 0, where (-1)^3 D^3 S(0) = p(0) - 2 p(1) + p(2) =
    // -exp(-1)/2.
    CHECK(check_n_monotone(DiscreteDistribution::poisson(1.0), 2, 100).holds);
    const auto p3 = check_n_monotone(DiscreteDistribution::poisson(1.0), 3, 100);
    CHECK_FALSE(p3.holds);
    REQUIRE(p3.violation.has_value());
    CHECK(p3.violation->difference_order == 3);
    CHECK(p3.violation->x == 0);
    CHECK(p3.violation->value == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-12));

    // With an interior mode the pmf increases at 0, breaking 2-monotonicity.
    const auto p2 = check_n_monotone(DiscreteDistribution::poisson(5.0), 2, 100);
    CHECK_FALSE(p2.holds);
    CHECK(p2.violation->difference_order == 2);
    CHECK(p2.violation->x == 0);

    // A two-point uniform head is 2-monotone but not 3-monotone.
    const auto two = DiscreteDistribution::from_pmf({0.5, 0.5});
    CHECK(check_n_monotone(two, 2, 20).holds);
    const auto r3 = check_n_monotone(two, 3, 20);
    CHECK_FALSE(r3.holds);
    REQUIRE(r3.violation.has_value());
    CHECK(r3.violation->difference_order == 3);
    CHECK(r3.violation->x == 0);

    const auto hump = DiscreteDistribution::from_pmf({0.4, 0.3, 0.3});
    CHECK(check_n_monotone(hump, 2, 20).holds);
    const auto h3 = check_n_monotone(hump, 3, 20);
    CHECK_FALSE(h3.holds);
    CHECK(h3.violation->difference_order == 3);
    CHECK(h3.violation->x == 1);

    // A gap pmf already fails at order 2.
    const auto gap = DiscreteDistribution::from_pmf({0.5, 0.0, 0.5});
    const auto g2 = check_n_monotone(gap, 2, 20);
    CHECK_FALSE(g2.holds);
    CHECK(g2.violation->difference_order == 2);
    CHECK(g2.violation->x == 1);
}

TEST_CASE("forward_difference reproduces finite-difference identities") {
    // D C(x, k) = C(x, k-1), so D^j C(x, j) = 1 for every x.
    for (unsigned j = 1; j <= 6; ++j) {
        auto f = [j](std::uint64_t x) { return binomial_coefficient(x, j); };
        for (std::uint64_t x = 0; x <= 12; ++x) {
            CHECK(forward_difference(f, x, j) == 1.0);
        }
    }

    auto sq = [](std::uint64_t x) { return static_cast<double>(x * x); };
    CHECK(forward_difference(sq, 4, 0) == 16.0);
    CHECK(forward_difference(sq, 4, 1) == 9.0);   // (x+1)^2 - x^2 = 2x + 1
    CHECK(forward_difference(sq, 7, 2) == 2.0);   // second difference of x^2
    CHECK(forward_difference(sq, 3, 3) == 0.0);

    CHECK_THROWS_AS(forward_difference(sq, 0, 63), std::invalid_argument);
}

TEST_CASE("truncated survival sums reconstruct unity") {
    const auto d = DiscreteDistribution::poisson(4.0);
    double acc = 0.0;
    for (std::uint64_t x = 0; x < 60; ++x) acc += d.pmf(x);
    CHECK(abs_err(acc + d.survival(60), 1.0) < 1e-14);
}
