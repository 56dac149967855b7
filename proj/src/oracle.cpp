#include "schureq/oracle.hpp"

#include "schureq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace schureq {
namespace {

constexpr double kOracleTupleBudget = 2e8;

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

/// Last support point that matters: first m with S(m+1) < threshold.
std::uint64_t tail_scan(const DiscreteDistribution& dist, double threshold) {
    if (dist.is_explicit()) return dist.support_size() - 1;
    std::uint64_t m = 0;
    while (dist.survival(m + 1) >= threshold) {
        if (++m > dist.truncation_bound()) {
            throw NonConvergentError("oracle: tail scan exceeded the truncation bound");
        }
    }
    return m;
}

/// Survival of the order-th equilibrium on 0..W+1 by literal nested suffix
/// sums over the window; level means are direct weighted pmf sums.
std::vector<double> ladder_survival(const DiscreteDistribution& dist, unsigned order,
                                    std::uint64_t W) {
    std::vector<double> surv(W + 2);
    for (std::uint64_t x = 0; x <= W + 1; ++x) surv[x] = dist.survival(x);

    for (unsigned level = 1; level <= order; ++level) {
        KahanSum mu;
        for (std::uint64_t x = 1; x <= W; ++x) {
            mu.add(static_cast<double>(x) * (surv[x] - surv[x + 1]));
        }
        if (mu.sum <= kZeroMeanThreshold) throw ZeroMeanError(level);

        std::vector<double> next(W + 2, 0.0);
        KahanSum acc;
        for (std::uint64_t x = W + 1; x-- > 0;) {
            acc.add(surv[x + 1] / mu.sum);
            next[x] = acc.sum;
        }
        surv = std::move(next);
    }
    return surv;
}

std::string point_location(const char* label, std::uint64_t v) {
    return std::string(label) + "=" + std::to_string(v);
}

void add_check(VerificationReport& report, std::string name, double err, double tol,
               std::optional<std::string> location) {
    CheckResult c;
    c.name = std::move(name);
    c.max_abs_error = err;
    c.tolerance = tol;
    c.pass = err <= tol;
    c.location = std::move(location);
    report.checks.push_back(std::move(c));
}

}  // namespace

std::vector<double> brute_equilibrium(const DiscreteDistribution& dist, unsigned order,
                                      std::uint64_t x_max) {
    if (order == 0) throw std::invalid_argument("brute_equilibrium: order must be >= 1");

    std::uint64_t W = std::max(tail_scan(dist, 1e-16), x_max) + order + 8;
    std::vector<double> prev;
    for (;;) {
        if (W > dist.truncation_bound()) {
            throw NonConvergentError("brute_equilibrium: window exceeded the truncation bound");
        }
        const std::vector<double> surv = ladder_survival(dist, order, W);
        std::vector<double> pmf(x_max + 1);
        for (std::uint64_t x = 0; x <= x_max; ++x) pmf[x] = surv[x] - surv[x + 1];

        if (!prev.empty()) {
            double delta = 0.0;
            for (std::uint64_t x = 0; x <= x_max; ++x) {
                delta = std::max(delta, std::abs(pmf[x] - prev[x]));
            }
            if (delta < 5e-14) return pmf;
        }
        prev = std::move(pmf);
        W = 2 * W + 16;
    }
}

BruteMomentDetail brute_joint_moment_detail(const SchurModel& model,
                                            const std::vector<unsigned>& powers,
                                            std::uint64_t x_max) {
    const unsigned n = model.dimension();
    const std::size_t j = powers.size();
    if (j == 0 || j > n) {
        throw std::invalid_argument("brute_joint_moment: need between 1 and n powers");
    }
    unsigned total_power = 0;
    for (unsigned p : powers) total_power += p;
    if (total_power > 4) {
        throw std::invalid_argument("brute_joint_moment: total power above 4 not supported");
    }
    if (std::pow(static_cast<double>(x_max) + 1.0, static_cast<double>(j)) > kOracleTupleBudget) {
        throw NonConvergentError("brute_joint_moment: tuple count exceeds the oracle budget");
    }

    // x^{p_i} lookup per coordinate.
    std::vector<std::vector<double>> powtab(j, std::vector<double>(x_max + 1));
    for (std::size_t c = 0; c < j; ++c) {
        for (std::uint64_t x = 0; x <= x_max; ++x) {
            powtab[c][x] = std::pow(static_cast<double>(x), static_cast<double>(powers[c]));
        }
    }

    const std::uint64_t s_max = static_cast<std::uint64_t>(j) * x_max;
    const auto evaluate = [&](std::uint64_t W, double* tail_term) {
        const std::vector<double> surv = ladder_survival(model.base(), n - 1, W);

        // d[s] = (-1)^j D^j G(s): the joint pmf of any tuple summing to s.
        std::vector<double> d(s_max + 1);
        for (std::uint64_t s = 0; s <= s_max; ++s) {
            double acc = 0.0;
            std::uint64_t binom = 1;
            for (std::size_t k = 0; k <= j; ++k) {
                const double term = static_cast<double>(binom) * surv[s + k];
                const bool negative = (j - k) % 2 != 0;
                acc += negative ? -term : term;
                if (k < j) binom = binom * (j - k) / (k + 1);
            }
            d[s] = (j % 2 == 0) ? acc : -acc;
        }

        KahanSum total;
        std::vector<std::uint64_t> coord(j, 0);
        for (;;) {
            std::uint64_t s = 0;
            double prod = 1.0;
            for (std::size_t c = 0; c < j; ++c) {
                s += coord[c];
                prod *= powtab[c][coord[c]];
            }
            if (prod != 0.0) total.add(prod * d[s]);

            std::size_t c = 0;
            while (c < j && coord[c] == x_max) coord[c++] = 0;
            if (c == j) break;
            ++coord[c];
        }

        if (tail_term != nullptr) {
            // Mass the coordinate window ignored, estimated from the marginal
            // tail of the highest total power.
            KahanSum tail;
            for (std::uint64_t x = x_max + 1; x <= W; ++x) {
                tail.add(std::pow(static_cast<double>(x), static_cast<double>(total_power)) *
                         (surv[x] - surv[x + 1]));
            }
            *tail_term = static_cast<double>(j) * tail.sum;
        }
        return total.sum;
    };

    std::uint64_t W = std::max(tail_scan(model.base(), 1e-16), s_max) + n + 8;
    double value = evaluate(W, nullptr);
    for (;;) {
        const std::uint64_t W2 = 2 * W + 16;
        if (W2 > model.base().truncation_bound()) {
            throw NonConvergentError("brute_joint_moment: window exceeded the truncation bound");
        }
        double tail_term = 0.0;
        const double value2 = evaluate(W2, &tail_term);
        const double delta = std::abs(value2 - value);
        if (delta <= 1e-12 * std::max(1.0, std::abs(value2))) {
            return BruteMomentDetail{value2, delta + tail_term};
        }
        value = value2;
        W = W2;
    }
}

double brute_joint_moment(const SchurModel& model, const std::vector<unsigned>& powers,
                          std::uint64_t x_max) {
    return brute_joint_moment_detail(model, powers, x_max).value;
}

double brute_correlation(const SchurModel& model, std::uint64_t x_max) {
    const double m1 = brute_joint_moment(model, {1}, x_max);
    const double m2 = brute_joint_moment(model, {2}, x_max);
    const double m11 = brute_joint_moment(model, {1, 1}, x_max);
    const double variance = m2 - m1 * m1;
    if (variance <= 1e-12) {
        throw ZeroVarianceError("brute_correlation: marginal variance vanishes");
    }
    return (m11 - m1 * m1) / variance;
}

std::uint64_t oracle_default_x_max(const DiscreteDistribution& dist, unsigned n) {
    return tail_scan(dist, 1e-14) + 2 * (n - 1);
}

VerificationReport verify_model(const SchurModel& model) {
    VerificationReport report;
    const unsigned n = model.dimension();
    const DiscreteDistribution& marginal = model.marginal();
    const std::uint64_t m_size = marginal.support_size();

    {
        const double err = std::abs(joint_survival(model, {}) - 1.0);
        add_check(report, "joint survival at the origin equals 1", err, 0.0, std::nullopt);
    }

    {
        const MonotonicityReport mono = check_n_monotone(marginal, n, m_size + n, 1e-12);
        double err = 0.0;
        std::optional<std::string> loc;
        if (!mono.holds) {
            err = std::abs(mono.violation->value);
            loc = "j=" + std::to_string(mono.violation->difference_order) +
                  ", x=" + std::to_string(mono.violation->x);
        }
        add_check(report, "marginal survival is n-monotone", err, 1e-12, loc);
    }

    {
        // The difference route is ill-conditioned for long supports: an n-th
        // difference of survival values of size S(z) carries about 2^n ulp of
        // rounding noise, amplified by the binomial factor. Disagreement under
        // that floor says nothing about the model, so the per-z tolerance
        // never drops below it; where the route is well conditioned the floor
        // is far under 1e-10 and the strict tolerance applies.
        double err = 0.0;
        double tol = 1e-10;
        double worst = 0.0;
        std::uint64_t where = 0;
        for (std::uint64_t z = 0; z <= m_size; ++z) {
            const double diff = std::abs(sum_pmf(model, z) - sum_pmf_via_differences(model, z));
            const double noise = 4.0 * std::ldexp(1.0, static_cast<int>(n)) *
                                 std::numeric_limits<double>::epsilon() *
                                 binomial_coefficient(z + n - 1, n - 1) * marginal.survival(z);
            const double tol_z = std::max(1e-10, noise);
            if (diff / tol_z > worst) {
                worst = diff / tol_z;
                err = diff;
                tol = tol_z;
                where = z;
            }
        }
        add_check(report, "sum pmf: closed form matches difference path", err, tol,
                  point_location("z", where));
    }

    {
        std::uint64_t z_end = model.base().is_explicit() ? model.base().support_size()
                                                         : tail_scan(model.base(), 1e-16) + 2;
        KahanSum total;
        for (std::uint64_t z = 0; z <= z_end; ++z) total.add(sum_pmf(model, z));
        add_check(report, "sum pmf normalizes to 1", std::abs(total.sum - 1.0), 1e-9,
                  std::nullopt);
    }

    {
        KahanSum total;
        for (double v : marginal.weights()) total.add(v);
        add_check(report, "marginal pmf normalizes to 1", std::abs(total.sum - 1.0), 1e-9,
                  std::nullopt);
    }

    if (n == 2) {
        const std::vector<double> rec = marginal_pmf_by_sum_recursion(model, m_size - 1);
        double err = 0.0;
        std::uint64_t where = 0;
        for (std::uint64_t x = 0; x < m_size; ++x) {
            const double diff = std::abs(rec[x] - marginal.pmf(x));
            if (diff > err) {
                err = diff;
                where = x;
            }
        }
        add_check(report, "bivariate marginal recursion matches direct pmf", err, 1e-10,
                  point_location("x", where));
    }

    if (n <= 4) {
        bool degenerate_a = false;
        bool degenerate_b = false;
        double a = 0.0;
        double b = 0.0;
        try {
            a = correlation(model, RhoMethod::MarginalForm).value;
        } catch (const ZeroVarianceError&) {
            degenerate_a = true;
        }
        try {
            b = correlation(model, RhoMethod::BaseMomentForm).value;
        } catch (const ZeroVarianceError&) {
            degenerate_b = true;
        }
        if (degenerate_a || degenerate_b) {
            const double err = degenerate_a == degenerate_b
                                   ? 0.0
                                   : std::numeric_limits<double>::infinity();
            add_check(report, "correlation: marginal form matches raw-moment form", err, 1e-9,
                      "both methods report a degenerate marginal");
        } else {
            add_check(report, "correlation: marginal form matches raw-moment form",
                      std::abs(a - b), 1e-9, std::nullopt);
        }
    }

    {
        const std::uint64_t x_corr = oracle_default_x_max(model.base(), n);
        const bool degenerate = marginal.support_size() == 1;
        if (!degenerate &&
            std::pow(static_cast<double>(x_corr) + 1.0, 2.0) <= kOracleTupleBudget) {
            const double main_rho = correlation(model, RhoMethod::MarginalForm).value;
            const double brute_rho = brute_correlation(model, x_corr);
            add_check(report, "correlation matches brute-force joint sums",
                      std::abs(main_rho - brute_rho), 1e-8, std::nullopt);
        }
    }

    {
        const std::uint64_t x_cmp =
            std::min<std::uint64_t>(m_size - 1, oracle_default_x_max(model.base(), n));
        const std::vector<double> brute = brute_equilibrium(model.base(), n - 1, x_cmp);
        double err = 0.0;
        std::uint64_t where = 0;
        for (std::uint64_t x = 0; x <= x_cmp; ++x) {
            const double diff = std::abs(brute[x] - marginal.pmf(x));
            if (diff > err) {
                err = diff;
                where = x;
            }
        }
        add_check(report, "marginal pmf matches brute-force equilibrium", err, 1e-9,
                  point_location("x", where));
    }

    return report;
}

void print_report(const VerificationReport& report, std::ostream& out) {
    std::size_t width = 0;
    for (const CheckResult& c : report.checks) width = std::max(width, c.name.size());
    for (const CheckResult& c : report.checks) {
        out << std::left << std::setw(static_cast<int>(width + 2)) << c.name
            << (c.pass ? "PASS" : "FAIL") << "  max_err=" << std::scientific
            << std::setprecision(3) << c.max_abs_error << "  tol=" << std::setprecision(1)
            << c.tolerance << std::defaultfloat;
        if (c.location) out << "  at " << *c.location;
        out << "\n";
    }
    std::size_t passed = 0;
    for (const CheckResult& c : report.checks) passed += c.pass ? 1 : 0;
    out << (report.all_pass() ? "PASS" : "FAIL") << " (" << passed << "/" << report.checks.size()
        << " checks)\n";
}

}  // namespace schureq
