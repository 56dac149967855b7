#pragma once

#include "schureq/distribution.hpp"
#include "schureq/rational.hpp"

#include <ostream>
#include <vector>

namespace schureq {

/// Ladder of equilibrium laws of a base distribution. levels[0] is the
/// materialized base; levels[i+1] has pmf S_i(x+1)/means[i], where S_i is
/// the survival function of level i.
struct EquilibriumChain {
    DiscreteDistribution base;
    unsigned order = 0;
    std::vector<DiscreteDistribution> levels;  // order + 1 entries
    std::vector<double> means;                 // order entries, all > 0
};

/// Exact coefficients a_r(n) of the polynomial P_n(x) = sum_r a_r(n) x^r
/// solving P_n(x+1) - P_n(x) = x^(n-1) with P_n(0) = 0; they turn tail sums
/// of survival values into moment combinations.
struct CoefficientTriangle {
    unsigned n_max = 0;
    /// rows[n][r] = a_r(n) for 1 <= r <= n <= n_max; index 0 entries are 0.
    std::vector<std::vector<Rational>> rows;

    const Rational& a(unsigned r, unsigned n) const;
};

/// Single row {a_r(n)}_{r=1..n}; slot [0] is zero padding.
std::vector<Rational> delta_inverse_coeffs(unsigned n);

CoefficientTriangle coefficient_triangle(unsigned n_max);

/// CSV rendering: one row per r, one column per n, rationals as "p/q".
/// Columns run n = 2..n_max (n = 1 has the single trivial entry a_1 = 1).
void write_coefficients_csv(const CoefficientTriangle& triangle, std::ostream& out);

/// First-order equilibrium transform: the law with pmf S(x+1)/mean.
DiscreteDistribution stationary_excess(const DiscreteDistribution& dist);

/// Materialize equilibrium levels 0..order. Every level is computed straight
/// from the base head by iterated tail sums scaled with exact rational means,
/// so errors do not compound across levels. Closed-form bases are materialized
/// on a window that keeps the discarded tail, including its combinatorial
/// carry into the top level, within tail_tolerance/(order+1) per level.
/// Throws ZeroMeanError naming the first level whose construction needs a
/// vanished mean.
EquilibriumChain nth_equilibrium(const DiscreteDistribution& dist, unsigned order);

/// j-th raw moment of the i-th equilibrium law, exact: the recursion
/// mu_{i:j} = (1/mu_{i-1:1}) sum_{r=1..j+1} mu_{i-1:r} a_r(j+1) evaluated in
/// rational arithmetic from exact base moments. i = 0 is the base itself.
Rational equilibrium_moment_rational(const DiscreteDistribution& base, unsigned i, unsigned j);

/// mu_{i:1}, exact.
Rational equilibrium_mean_rational(const DiscreteDistribution& base, unsigned i);

/// Double-precision view of the exact recursion; requires i <= chain.order
/// and j >= 1.
double equilibrium_moment(const EquilibriumChain& chain, unsigned i, unsigned j);

struct BivariateEqStats {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of the first-order equilibrium law from raw base
/// moments: mean = (E(X^2)/mu - 1)/2,
/// variance = (4 mu E(X^3) - 3 E(X^2)^2 - mu^2) / (12 mu^2).
BivariateEqStats bivariate_eq_stats(const DiscreteDistribution& dist);

}  // namespace schureq
