#include "schureq/schur_model.hpp"

#include "schureq/distribution.hpp"
#include "schureq/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

using namespace schureq;

TEST_CASE("build_model validates the dimension range") {
    const auto base = DiscreteDistribution::poisson(1.0);
    CHECK_THROWS_AS(build_model(base, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_model(base, 11), UnsupportedDimensionError);
    CHECK_NOTHROW(build_model(base, 10));
}

TEST_CASE("joint survival depends on coordinates only through their sum") {
    const auto model = build_model(DiscreteDistribution::poisson(1.0), 3);
    const double ref = joint_survival(model, {4, 0, 0});
    CHECK(joint_survival(model, {0, 4, 0}) == ref);
    CHECK(joint_survival(model, {2, 1, 1}) == ref);
    CHECK(joint_survival(model, {1, 3}) == ref);  // trailing coordinates at 0
    CHECK(joint_survival(model, {4}) == ref);
    CHECK(joint_survival(model, {}) == 1.0);

    const double p = joint_pmf(model, {2, 1, 1});
    CHECK(joint_pmf(model, {1, 1, 2}) == p);
    CHECK(joint_pmf(model, {0, 4, 0}) == joint_pmf(model, {4, 0, 0}));

    CHECK_THROWS_AS(joint_survival(model, {1, 1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(joint_pmf(model, {}), std::invalid_argument);
}

TEST_CASE("bivariate Poisson(1) joint values match high-precision references") {
    const auto model = build_model(DiscreteDistribution::poisson(1.0), 2);
    // Survival of the first equilibrium law at 2.
    CHECK(std::abs(joint_survival(model, {1, 1}) - 0.10363832351432696479) < 1e-15);
    // Full-mass corner: both coordinates zero iff the sum is zero.
    CHECK(std::abs(joint_pmf(model, {0, 0}) - std::exp(-1.0)) < 1e-14);
    CHECK(std::abs(sum_pmf(model, 0) - std::exp(-1.0)) < 1e-14);
}

TEST_CASE("explicit three-point base gives exact bivariate sum head") {
    const auto model = build_model(DiscreteDistribution::from_pmf({0.25, 0.5, 0.25}), 2);
    // mean 1, so P(Z=0) = p(1) C(1,1) / 1 = 0.5.
    CHECK(sum_pmf(model, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sum_pmf(model, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sum_pmf(model, 2) == 0.0);
}

TEST_CASE("sum distribution: closed form and difference path agree") {
    const std::vector<DiscreteDistribution> bases = {
        DiscreteDistribution::poisson(1.0),
        DiscreteDistribution::geometric(0.5),
        DiscreteDistribution::from_pmf({0.1, 0.2, 0.3, 0.25, 0.15}),
    };
    for (const auto& base : bases) {
        for (unsigned n = 2; n <= 4; ++n) {
            const auto model = build_model(base, n);
            for (std::uint64_t z = 0; z <= 30; ++z) {
                CHECK(std::abs(sum_pmf(model, z) - sum_pmf_via_differences(model, z)) < 1e-10);
            }
        }
    }
}

TEST_CASE("a Poisson base reproduces a Poisson sum in every dimension") {
    const auto base = DiscreteDistribution::poisson(1.5);
    for (unsigned n = 2; n <= 5; ++n) {
        const auto model = build_model(base, n);
        for (std::uint64_t z = 0; z <= 25; ++z) {
            CHECK(std::abs(sum_pmf(model, z) - base.pmf(z)) < 1e-12);
        }
    }

    // Non-Poisson bases do not: the geometric sum visibly differs.
    const auto g = DiscreteDistribution::geometric(0.5);
    const auto gm = build_model(g, 2);
    double max_diff = 0.0;
    for (std::uint64_t z = 0; z <= 10; ++z) {
        max_diff = std::max(max_diff, std::abs(sum_pmf(gm, z) - g.pmf(z)));
    }
    CHECK(max_diff > 1e-3);
}

TEST_CASE("mean_product multiplies the chain means") {
    const auto base = DiscreteDistribution::poisson(2.0);
    const auto m4 = build_model(base, 4);
    // mu_{i:1} = lambda/(i+1): 2 * 1 * 2/3.
    CHECK(m4.mean_product() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    const auto m2 = build_model(base, 2);
    CHECK(m2.mean_product() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("marginal pmf is the top chain level") {
    const auto model = build_model(DiscreteDistribution::geometric(0.5), 3);
    const auto& top = model.chain().levels[2];
    for (std::uint64_t x = 0; x <= 20; ++x) {
        CHECK(marginal_pmf(model, x) == top.pmf(x));
    }
}

TEST_CASE("bivariate marginal recursion matches the direct marginal") {
    for (const auto& base : {DiscreteDistribution::poisson(1.0),
                             DiscreteDistribution::geometric(0.5)}) {
        const auto model = build_model(base, 2);
        const auto rec = marginal_pmf_by_sum_recursion(model, 100);
        REQUIRE(rec.size() == 101);
        for (std::uint64_t x = 0; x <= 100; ++x) {
            CHECK(std::abs(rec[x] - marginal_pmf(model, x)) < 1e-10);
        }
    }

    const auto m3 = build_model(DiscreteDistribution::poisson(1.0), 3);
    CHECK_THROWS_AS(marginal_pmf_by_sum_recursion(m3, 10), std::invalid_argument);
}

TEST_CASE("correlation forms agree and respect the exchangeability bound") {
    const std::vector<DiscreteDistribution> bases = {
        DiscreteDistribution::poisson(0.5),
        DiscreteDistribution::poisson(5.0),
        DiscreteDistribution::geometric(0.3),
        DiscreteDistribution::from_pmf({0.1, 0.2, 0.3, 0.25, 0.15}),
    };
    for (const auto& base : bases) {
        for (unsigned n = 2; n <= 4; ++n) {
            const auto model = build_model(base, n);
            const auto a = correlation(model, RhoMethod::MarginalForm);
            const auto b = correlation(model, RhoMethod::BaseMomentForm);
            CHECK(a.method == RhoMethod::MarginalForm);
            CHECK(b.method == RhoMethod::BaseMomentForm);
            CHECK(std::abs(a.value - b.value) < 1e-12);
            CHECK(a.value >= -1.0 / (n - 1) - 1e-9);
            CHECK(a.value <= 1.0);
        }
    }
}

TEST_CASE("closed-form Poisson correlations") {
    CHECK(poisson_rho(1.0, 2) == doctest::Approx(-1.0 / 7.0).epsilon(1e-15));
    CHECK(poisson_rho(1.0, 3) == doctest::Approx(-1.0 / 14.0).epsilon(1e-15));
    CHECK(poisson_rho(1.0, 4) == doctest::Approx(-1.0 / 23.0).epsilon(1e-15));
    CHECK(poisson_rho(1.0, 5) == doctest::Approx(-1.0 / 34.0).epsilon(1e-15));
    CHECK(poisson_rho(100.0, 2) == doctest::Approx(-100.0 / 106.0).epsilon(1e-15));
    CHECK(poisson_rho(10.0, 3) == doctest::Approx(-0.3125).epsilon(1e-15));

    CHECK_THROWS_AS(poisson_rho(1.0, 6), UnsupportedDimensionError);
    CHECK_THROWS_AS(poisson_rho(0.0, 2), std::invalid_argument);

    // The observed general pattern restricts to the published forms.
    for (double lambda : {0.01, 0.5, 1.0, 5.0, 10.0, 100.0}) {
        for (unsigned n = 2; n <= 5; ++n) {
            CHECK(poisson_rho_conjecture(lambda, n) == poisson_rho(lambda, n));
        }
        CHECK(poisson_rho_conjecture(lambda, 9) ==
              doctest::Approx(-lambda / (90.0 + 8.0 * lambda)).epsilon(1e-15));
    }

    // ClosedForm routing picks the right family.
    const auto pm = build_model(DiscreteDistribution::poisson(2.0), 3);
    CHECK(correlation(pm, RhoMethod::ClosedForm).value == poisson_rho(2.0, 3));
    const auto em = build_model(DiscreteDistribution::from_pmf({0.25, 0.5, 0.25}), 2);
    CHECK_THROWS_AS(correlation(em, RhoMethod::ClosedForm), std::invalid_argument);
}

TEST_CASE("geometric coordinates are uncorrelated") {
    for (double q : {0.1, 0.5, 0.9}) {
        const auto base = DiscreteDistribution::geometric(q);
        for (unsigned n = 2; n <= 4; ++n) {
            const auto model = build_model(base, n);
            CHECK(std::abs(correlation(model, RhoMethod::MarginalForm).value) < 1e-15);
            CHECK(std::abs(correlation(model, RhoMethod::BaseMomentForm).value) < 1e-15);
            CHECK(correlation(model, RhoMethod::ClosedForm).value == 0.0);
        }
    }
}

TEST_CASE("degenerate marginal raises ZeroVarianceError") {
    const auto model = build_model(DiscreteDistribution::from_pmf({0.5, 0.5}), 2);
    CHECK_THROWS_AS(correlation(model, RhoMethod::MarginalForm), ZeroVarianceError);
    CHECK_THROWS_AS(correlation(model, RhoMethod::BaseMomentForm), ZeroVarianceError);
}

TEST_CASE("rho_method_name labels every method") {
    CHECK(std::string(rho_method_name(RhoMethod::MarginalForm)) == "marginal");
    CHECK(std::string(rho_method_name(RhoMethod::BaseMomentForm)) == "base-moment");
    CHECK(std::string(rho_method_name(RhoMethod::ClosedForm)) == "closed");
}

TEST_CASE("sampling is deterministic and shape-correct") {
    const auto model = build_model(DiscreteDistribution::poisson(1.0), 3);
    CHECK(sample(model, 7, 0).empty());

    const auto draws = sample(model, 7, 500);
    REQUIRE(draws.size() == 500);
    for (const auto& d : draws) CHECK(d.size() == 3);
    CHECK(sample(model, 7, 500) == draws);
    CHECK(sample(model, 8, 500) != draws);

    // The coordinate sum follows the sum law; compare first moments loosely.
    double mean_sum = 0.0;
    for (const auto& d : draws) mean_sum += static_cast<double>(d[0] + d[1] + d[2]);
    mean_sum /= 500.0;
    CHECK(std::abs(mean_sum - 1.0) < 0.2);  // Z ~ Poisson(1), SE ~ 0.045

    // Explicit bases sample too.
    const auto em = build_model(DiscreteDistribution::from_pmf({0.25, 0.5, 0.25}), 2);
    const auto ed = sample(em, 3, 200);
    for (const auto& d : ed) CHECK(d[0] + d[1] <= 1);  // sum support is {0, 1}
}

TEST_CASE("with_mean_product returns a corrupted copy for fault injection") {
    const auto model = build_model(DiscreteDistribution::poisson(1.0), 2);
    const auto bad = model.with_mean_product(model.mean_product() * 2.0);
    CHECK(bad.mean_product() == 2.0 * model.mean_product());
    CHECK(std::abs(sum_pmf(bad, 0) - 0.5 * sum_pmf(model, 0)) < 1e-15);
}
