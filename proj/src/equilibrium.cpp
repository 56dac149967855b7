#include "schureq/equilibrium.hpp"

#include "schureq/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace schureq {
namespace {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

void check_mean(const Rational& mu, unsigned level) {
    if (mu <= 0 || to_double(mu) < kZeroMeanThreshold) throw ZeroMeanError(level);
}

/// Materialized head of a closed-form base, wide enough for a chain of the
/// given order. Mass at h beyond the window would reach level k carrying
/// weight C(h, k) / prod(means), so the plain truncation window is extended
/// until the first discarded term, with the top level's weight, drops below
/// the per-level budget spread over the window. Terms are unimodal in h for
/// the closed families, so stopping past the peak bounds the whole tail sum.
DiscreteDistribution chain_head(const DiscreteDistribution& dist, unsigned order,
                                double per_level_eps, const Rational& mean_product) {
    DiscreteDistribution head = truncate(dist, per_level_eps);
    if (order == 0) return head;

    const std::uint64_t bound = dist.truncation_bound();
    const double prod = to_double(mean_product);
    const auto term = [&](std::uint64_t h) {
        const double p = dist.pmf(h);
        if (p <= 0.0) return 0.0;
        return p * binomial_coefficient(h, order) / prod;
    };

    const std::uint64_t start = head.support_size() - 1;
    std::uint64_t M = start;
    while (term(M + 1) > per_level_eps / (2.0 * static_cast<double>(M + 2)) ||
           term(M + 2) > term(M + 1)) {
        if (++M > bound) {
            throw NonConvergentError("nth_equilibrium: weighted tail exceeds truncation bound");
        }
    }
    if (M == start) return head;

    std::vector<double> pmf(M + 1);
    for (std::uint64_t x = 0; x <= M; ++x) pmf[x] = dist.pmf(x);
    return DiscreteDistribution::from_pmf_with_tail(std::move(pmf), dist.survival(M + 1),
                                                    dist.tail_tolerance(), bound);
}

}  // namespace

const Rational& CoefficientTriangle::a(unsigned r, unsigned n) const {
    if (n == 0 || n > n_max || r == 0 || r > n) {
        throw std::out_of_range("CoefficientTriangle::a: index out of range");
    }
    return rows[n][r];
}

std::vector<Rational> delta_inverse_coeffs(unsigned n) {
    if (n == 0) throw std::invalid_argument("delta_inverse_coeffs: n must be >= 1");
    std::vector<Rational> a(n + 1, Rational(0));
    a[n] = Rational(1) / n;
    // Downward recursion: a_j = -(1/j) sum_{r=j+1..n} C(r, j-1) a_r.
    for (unsigned j = n; j-- > 1;) {
        Rational acc = 0;
        for (unsigned r = j + 1; r <= n; ++r) {
            acc += Rational(binomial_exact(r, j - 1)) * a[r];
        }
        a[j] = -acc / j;
    }
    return a;
}

CoefficientTriangle coefficient_triangle(unsigned n_max) {
    if (n_max == 0) throw std::invalid_argument("coefficient_triangle: n_max must be >= 1");
    CoefficientTriangle t;
    t.n_max = n_max;
    t.rows.resize(n_max + 1);
    for (unsigned n = 1; n <= n_max; ++n) t.rows[n] = delta_inverse_coeffs(n);
    return t;
}

void write_coefficients_csv(const CoefficientTriangle& triangle, std::ostream& out) {
    const unsigned first = triangle.n_max >= 2 ? 2 : 1;
    out << "r";
    for (unsigned n = first; n <= triangle.n_max; ++n) out << ",n=" << n;
    out << "\n";
    for (unsigned r = 1; r <= triangle.n_max; ++r) {
        out << r;
        for (unsigned n = first; n <= triangle.n_max; ++n) {
            out << ",";
            if (r <= n) out << rational_string(triangle.rows[n][r]);
        }
        out << "\n";
    }
}

Rational equilibrium_moment_rational(const DiscreteDistribution& base, unsigned i, unsigned j) {
    if (j == 0) throw std::invalid_argument("equilibrium_moment: j must be >= 1");
    const unsigned top = i + j;
    const CoefficientTriangle triangle = coefficient_triangle(top + 1);

    // moments[r] = mu_{level:r}; start at the base and climb one level at a
    // time, losing one usable order per step.
    std::vector<Rational> moments(top + 1);
    for (unsigned r = 1; r <= top; ++r) moments[r] = base.moment_rational(r);

    for (unsigned level = 1; level <= i; ++level) {
        const Rational mu = moments[1];
        check_mean(mu, level);
        const unsigned usable = top - level;
        std::vector<Rational> next(top + 1);
        for (unsigned s = 1; s <= usable; ++s) {
            Rational acc = 0;
            for (unsigned r = 1; r <= s + 1; ++r) {
                acc += moments[r] * triangle.rows[s + 1][r];
            }
            next[s] = acc / mu;
        }
        moments = std::move(next);
    }
    return moments[j];
}

Rational equilibrium_mean_rational(const DiscreteDistribution& base, unsigned i) {
    return equilibrium_moment_rational(base, i, 1);
}

double equilibrium_moment(const EquilibriumChain& chain, unsigned i, unsigned j) {
    if (i > chain.order) throw std::invalid_argument("equilibrium_moment: i exceeds chain order");
    return to_double(equilibrium_moment_rational(chain.base, i, j));
}

EquilibriumChain nth_equilibrium(const DiscreteDistribution& dist, unsigned order) {
    EquilibriumChain chain;
    chain.base = dist;
    chain.order = order;

    // Exact level means first, in level order, so a vanished mean is reported
    // against the first level whose construction needs it.
    std::vector<Rational> mu(order);
    Rational prod = 1;
    for (unsigned i = 0; i < order; ++i) {
        mu[i] = equilibrium_mean_rational(dist, i);
        check_mean(mu[i], i + 1);
        prod *= mu[i];
        chain.means.push_back(to_double(mu[i]));
    }

    const double per_level_eps = dist.tail_tolerance() / (order + 1);
    chain.levels.push_back(dist.is_explicit() ? dist
                                              : chain_head(dist, order, per_level_eps, prod));

    // Level k has pmf proportional to the k-fold tail sum of the head pmf:
    // s_k[x] = sum_{h > x} s_{k-1}[h], scaled once by the exact mean product.
    // Every term is nonnegative, so no step loses accuracy to cancellation,
    // and the only deviation from the true law is the discarded base tail.
    std::vector<double> s(chain.levels[0].support_size());
    for (std::uint64_t x = 0; x < s.size(); ++x) s[x] = chain.levels[0].pmf(x);

    Rational scale = 1;
    for (unsigned k = 1; k <= order; ++k) {
        scale *= mu[k - 1];
        const double div = to_double(scale);

        std::vector<double> next(s.size() > 1 ? s.size() - 1 : 1, 0.0);
        KahanSum suffix;
        for (std::uint64_t x = s.size(); x-- > 1;) {
            suffix.add(s[x]);
            next[x - 1] = suffix.sum;
        }
        s = std::move(next);

        std::vector<double> pmf(s.size());
        for (std::uint64_t x = 0; x < s.size(); ++x) pmf[x] = std::min(s[x] / div, 1.0);
        while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
        KahanSum total;
        for (double v : pmf) total.add(v);
        const double tail = std::clamp(1.0 - total.sum, 0.0, 1.0);
        chain.levels.push_back(DiscreteDistribution::from_pmf_with_tail(
            std::move(pmf), tail, dist.tail_tolerance(), dist.truncation_bound()));
    }
    return chain;
}

DiscreteDistribution stationary_excess(const DiscreteDistribution& dist) {
    return nth_equilibrium(dist, 1).levels[1];
}

BivariateEqStats bivariate_eq_stats(const DiscreteDistribution& dist) {
    const Rational mu = dist.moment_rational(1);
    check_mean(mu, 1);
    const Rational m2 = dist.moment_rational(2);
    const Rational m3 = dist.moment_rational(3);
    BivariateEqStats stats;
    stats.mean = to_double((m2 / mu - 1) / 2);
    stats.variance = to_double((4 * mu * m3 - 3 * m2 * m2 - mu * mu) / (12 * mu * mu));
    return stats;
}

}  // namespace schureq
