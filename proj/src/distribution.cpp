#include "schureq/distribution.hpp"

#include "schureq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

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

double poisson_point(double lambda, std::uint64_t x) {
    if (lambda == 0.0) return x == 0 ? 1.0 : 0.0;
    const double xd = static_cast<double>(x);
    return std::exp(-lambda + xd * std::log(lambda) - std::lgamma(xd + 1.0));
}

double poisson_tail(double lambda, std::uint64_t x) {
    // S(x) = sum_{k >= x} p(k); terms decay once k > lambda, and this branch
    // is only used for x > lambda so the ratio chain is monotone decreasing.
    KahanSum s;
    double term = poisson_point(lambda, x);
    for (std::uint64_t k = x;; ++k) {
        s.add(term);
        const double next = term * (lambda / static_cast<double>(k + 1));
        if (next <= 0.0 || next <= s.sum * 1e-18) break;
        term = next;
    }
    return std::min(s.sum, 1.0);
}

double poisson_head(double lambda, std::uint64_t x) {
    // sum_{k < x} p(k), walking the ratio chain downward from the largest term.
    if (x == 0) return 0.0;
    KahanSum s;
    double term = poisson_point(lambda, x - 1);
    for (std::uint64_t k = x - 1;; --k) {
        s.add(term);
        if (k == 0) break;
        term *= static_cast<double>(k) / lambda;
    }
    return std::min(s.sum, 1.0);
}

double poisson_survival(double lambda, std::uint64_t x) {
    if (x == 0) return 1.0;
    if (lambda == 0.0) return 0.0;
    if (static_cast<double>(x) > lambda) return poisson_tail(lambda, x);
    return std::max(0.0, 1.0 - poisson_head(lambda, x));
}

void validate_pmf_entries(const std::vector<double>& pmf) {
    if (pmf.empty()) throw std::invalid_argument("pmf must be nonempty");
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        const double v = pmf[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw std::invalid_argument("pmf entry " + std::to_string(i) + " out of [0,1]");
        }
    }
}

}  // namespace

DiscreteDistribution DiscreteDistribution::poisson(double lambda, double tail_tolerance,
                                                   std::uint64_t truncation_bound) {
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw std::invalid_argument("poisson: lambda must be finite and >= 0");
    }
    if (!(tail_tolerance > 0.0)) throw std::invalid_argument("tail tolerance must be positive");
    DiscreteDistribution d;
    d.family_ = Family::Poisson;
    d.param_ = lambda;
    d.tail_tolerance_ = tail_tolerance;
    d.truncation_bound_ = truncation_bound;
    return d;
}

DiscreteDistribution DiscreteDistribution::geometric(double q, double tail_tolerance,
                                                     std::uint64_t truncation_bound) {
    if (!std::isfinite(q) || q < 0.0 || q >= 1.0) {
        throw std::invalid_argument("geometric: q must lie in [0,1)");
    }
    if (!(tail_tolerance > 0.0)) throw std::invalid_argument("tail tolerance must be positive");
    DiscreteDistribution d;
    d.family_ = Family::Geometric;
    d.param_ = q;
    d.tail_tolerance_ = tail_tolerance;
    d.truncation_bound_ = truncation_bound;
    return d;
}

DiscreteDistribution DiscreteDistribution::from_pmf(std::vector<double> pmf, double tail_tolerance,
                                                    std::uint64_t truncation_bound) {
    return from_pmf_with_tail(std::move(pmf), 0.0, tail_tolerance, truncation_bound);
}

DiscreteDistribution DiscreteDistribution::from_pmf_with_tail(std::vector<double> pmf,
                                                              double tail_mass,
                                                              double tail_tolerance,
                                                              std::uint64_t truncation_bound) {
    validate_pmf_entries(pmf);
    if (!std::isfinite(tail_mass) || tail_mass < 0.0 || tail_mass > 1.0) {
        throw std::invalid_argument("tail mass out of [0,1]");
    }
    if (!(tail_tolerance > 0.0)) throw std::invalid_argument("tail tolerance must be positive");
    KahanSum total;
    for (double v : pmf) total.add(v);
    total.add(tail_mass);
    if (std::abs(total.sum - 1.0) > 1e-12) {
        throw std::invalid_argument("pmf mass is " + std::to_string(total.sum) +
                                    ", expected 1 within 1e-12");
    }

    DiscreteDistribution d;
    d.family_ = Family::Explicit;
    d.tail_tolerance_ = tail_tolerance;
    d.truncation_bound_ = truncation_bound;
    d.discarded_ = tail_mass;
    d.survival_.assign(pmf.size() + 1, 0.0);
    d.survival_[pmf.size()] = tail_mass;
    for (std::size_t x = pmf.size(); x-- > 0;) {
        d.survival_[x] = d.survival_[x + 1] + pmf[x];
    }
    d.survival_[0] = 1.0;
    d.pmf_ = std::move(pmf);
    return d;
}

const std::vector<double>& DiscreteDistribution::weights() const {
    if (!is_explicit()) throw std::logic_error("weights(): distribution is not explicit");
    return pmf_;
}

std::uint64_t DiscreteDistribution::support_size() const {
    if (!is_explicit()) throw std::logic_error("support_size(): distribution is not explicit");
    return pmf_.size();
}

double DiscreteDistribution::pmf(std::uint64_t x) const {
    switch (family_) {
        case Family::Poisson:
            return poisson_point(param_, x);
        case Family::Geometric:
            return std::pow(param_, static_cast<double>(x)) * (1.0 - param_);
        case Family::Explicit:
            return x < pmf_.size() ? pmf_[x] : 0.0;
    }
    return 0.0;
}

double DiscreteDistribution::survival(std::uint64_t x) const {
    switch (family_) {
        case Family::Poisson:
            return poisson_survival(param_, x);
        case Family::Geometric:
            return x == 0 ? 1.0 : std::pow(param_, static_cast<double>(x));
        case Family::Explicit:
            return x < survival_.size() ? survival_[x] : discarded_;
    }
    return 0.0;
}

double DiscreteDistribution::mean() const { return moment(1); }

double DiscreteDistribution::moment(unsigned j) const {
    if (family_ == Family::Explicit) {
        KahanSum s;
        for (std::size_t x = 0; x < pmf_.size(); ++x) {
            s.add(pmf_[x] * std::pow(static_cast<double>(x), static_cast<double>(j)));
        }
        return s.sum;  // for j == 0 this is the stored head mass
    }
    return to_double(moment_rational(j));
}

Rational DiscreteDistribution::moment_rational(unsigned j) const {
    switch (family_) {
        case Family::Poisson: {
            if (j == 0) return 1;
            // E X^j = sum_k S(j,k) lambda^k with S the Stirling partition numbers.
            const Rational lambda(param_);
            Rational acc = 0;
            Rational power = 1;
            for (unsigned k = 1; k <= j; ++k) {
                power *= lambda;
                acc += Rational(stirling_second(j, k)) * power;
            }
            return acc;
        }
        case Family::Geometric: {
            if (j == 0) return 1;
            // E X^j = q A_j(q) / (1-q)^j with A_j the Eulerian polynomial.
            const Rational q(param_);
            Rational poly = 0;
            Rational power = 1;
            for (unsigned k = 0; k < j; ++k) {
                poly += Rational(eulerian_number(j, k)) * power;
                power *= q;
            }
            Rational denom = 1;
            const Rational one_minus_q = Rational(1) - q;
            for (unsigned k = 0; k < j; ++k) denom *= one_minus_q;
            return q * poly / denom;
        }
        case Family::Explicit: {
            Rational acc = 0;
            for (std::size_t x = 0; x < pmf_.size(); ++x) {
                if (pmf_[x] == 0.0) continue;
                BigInt xp = 1;
                for (unsigned k = 0; k < j; ++k) xp *= x;
                acc += Rational(pmf_[x]) * Rational(xp);
            }
            return acc;
        }
    }
    return 0;
}

MomentEstimate DiscreteDistribution::moment_detail(unsigned j) const {
    MomentEstimate est;
    est.value = moment(j);
    if (family_ == Family::Explicit && discarded_ > 0.0) {
        // The discarded tail sits beyond the stored support; for light-tailed
        // sources its j-th moment contribution is within a small factor of
        // discarded * (support end)^j.
        const double edge = static_cast<double>(pmf_.size());
        est.error_bound = 2.0 * discarded_ * std::pow(edge, static_cast<double>(j));
    }
    return est;
}

DiscreteDistribution truncate(const DiscreteDistribution& dist, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("truncate: eps must be positive");
    if (dist.is_explicit()) return dist;

    const std::uint64_t bound = dist.truncation_bound();
    // Minimal M with S(M+1) < eps. Closed-form survival is authoritative; the
    // initial guess only has to land nearby.
    std::uint64_t M = 0;
    if (dist.family() == Family::Geometric) {
        const double q = dist.parameter();
        if (q > 0.0) {
            const double guess = std::log(eps) / std::log(q) - 1.0;
            if (guess > static_cast<double>(bound)) {
                throw NonConvergentError("truncate: support exceeds truncation bound");
            }
            M = guess > 0.0 ? static_cast<std::uint64_t>(guess) : 0;
        }
    } else {
        double cum = 0.0;
        std::uint64_t x = 0;
        for (;; ++x) {
            if (x > bound) throw NonConvergentError("truncate: support exceeds truncation bound");
            cum += dist.pmf(x);
            if (1.0 - cum < 0.5 * eps) break;
        }
        M = x;
    }
    while (dist.survival(M + 1) >= eps) {
        if (++M > bound) throw NonConvergentError("truncate: support exceeds truncation bound");
    }
    while (M > 0 && dist.survival(M) < eps) --M;

    std::vector<double> pmf(M + 1);
    for (std::uint64_t x = 0; x <= M; ++x) pmf[x] = dist.pmf(x);
    const double discarded = dist.survival(M + 1);
    return DiscreteDistribution::from_pmf_with_tail(std::move(pmf), discarded,
                                                    dist.tail_tolerance(), bound);
}

MonotonicityReport check_n_monotone(const DiscreteDistribution& dist, unsigned n,
                                    std::uint64_t x_max, double tol) {
    if (n == 0 || n > 62) throw std::invalid_argument("check_n_monotone: order out of range");
    if (tol < 0.0) throw std::invalid_argument("check_n_monotone: negative tolerance");

    std::vector<double> surv(x_max + n + 1);
    for (std::uint64_t x = 0; x < surv.size(); ++x) surv[x] = dist.survival(x);

    MonotonicityReport report;
    report.order_checked = n;
    report.x_max = x_max;
    report.holds = true;
    for (unsigned j = 0; j <= n; ++j) {
        for (std::uint64_t x = 0; x <= x_max; ++x) {
            const double diff = forward_difference([&](std::uint64_t h) { return surv[h]; }, x, j);
            const double signed_diff = (j % 2 == 0) ? diff : -diff;
            if (signed_diff < -tol) {
                report.holds = false;
                report.violation = MonotonicityViolation{j, x, signed_diff};
                return report;
            }
        }
    }
    return report;
}

}  // namespace schureq
