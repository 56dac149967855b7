#include "schureq/schur_model.hpp"

#include "schureq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
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

std::uint64_t coordinate_sum(const std::vector<std::uint64_t>& x) {
    std::uint64_t s = 0;
    for (std::uint64_t v : x) s += v;
    return s;
}

void check_rho_range(double value, unsigned n) {
    const double lower = -1.0 / (n - 1) - 1e-9;  // exchangeability bound
    if (!(value >= lower && value <= 1.0 + 1e-12)) {
        throw NonConvergentError("correlation outside the exchangeable range");
    }
}

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t m) {
    // Unbiased draw in [0, m) by rejection.
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % m + 1) % m;  // 2^64 mod m
    const std::uint64_t limit = max - rem;
    for (;;) {
        const std::uint64_t r = rng();
        if (r <= limit) return r % m;
    }
}

/// Uniform (n-1)-subset of {1..t} (Floyd), sorted ascending.
std::vector<std::uint64_t> sample_cut_points(std::mt19937_64& rng, std::uint64_t t, unsigned k) {
    std::vector<std::uint64_t> cuts;
    cuts.reserve(k);
    for (std::uint64_t j = t - k + 1; j <= t; ++j) {
        const std::uint64_t r = 1 + uniform_below(rng, j);
        if (std::find(cuts.begin(), cuts.end(), r) != cuts.end()) {
            cuts.push_back(j);
        } else {
            cuts.push_back(r);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

}  // namespace

SchurModel SchurModel::with_mean_product(double value) const {
    SchurModel copy = *this;
    copy.mean_product_ = value;
    return copy;
}

SchurModel build_model(const DiscreteDistribution& dist, unsigned n) {
    if (n < 2) throw std::invalid_argument("build_model: dimension must be >= 2");
    if (n > kMaxDimension) {
        throw UnsupportedDimensionError("build_model: dimension " + std::to_string(n) +
                                        " exceeds the supported maximum " +
                                        std::to_string(kMaxDimension));
    }
    SchurModel model;
    model.base_ = dist;
    model.n_ = n;
    model.chain_ = nth_equilibrium(dist, n - 1);
    Rational product = 1;
    for (unsigned i = 0; i + 2 <= n; ++i) product *= equilibrium_mean_rational(dist, i);
    model.mean_product_ = to_double(product);
    return model;
}

double joint_survival(const SchurModel& model, const std::vector<std::uint64_t>& x) {
    if (x.size() > model.dimension()) {
        throw std::invalid_argument("joint_survival: more coordinates than dimensions");
    }
    return model.marginal().survival(coordinate_sum(x));
}

double joint_pmf_raw(const SchurModel& model, const std::vector<std::uint64_t>& x) {
    const std::size_t j = x.size();
    if (j == 0 || j > model.dimension()) {
        throw std::invalid_argument("joint_pmf: need between 1 and n coordinates");
    }
    const DiscreteDistribution& marginal = model.marginal();
    const double diff = forward_difference([&](std::uint64_t h) { return marginal.survival(h); },
                                           coordinate_sum(x), static_cast<unsigned>(j));
    return (j % 2 == 0) ? diff : -diff;
}

double joint_pmf(const SchurModel& model, const std::vector<std::uint64_t>& x) {
    const double raw = joint_pmf_raw(model, x);
    if (raw < -1e-12) {
        throw NonConvergentError("joint_pmf: difference " + std::to_string(raw) +
                                 " is negative beyond rounding; truncation too coarse");
    }
    // raw <= 0 maps to +0.0; std::max would keep a negative zero.
    return raw > 0.0 ? raw : 0.0;
}

double sum_pmf(const SchurModel& model, std::uint64_t z) {
    const unsigned n = model.dimension();
    return model.base().pmf(z + n - 1) * binomial_coefficient(z + n - 1, n - 1) /
           model.mean_product();
}

double sum_pmf_via_differences(const SchurModel& model, std::uint64_t z) {
    const unsigned n = model.dimension();
    const DiscreteDistribution& marginal = model.marginal();
    const double diff =
        forward_difference([&](std::uint64_t h) { return marginal.survival(h); }, z, n);
    const double point = (n % 2 == 0) ? diff : -diff;
    return binomial_coefficient(z + n - 1, n - 1) * point;
}

double marginal_pmf(const SchurModel& model, std::uint64_t x) { return model.marginal().pmf(x); }

std::vector<double> marginal_pmf_by_sum_recursion(const SchurModel& model, std::uint64_t x_max) {
    if (model.dimension() != 2) {
        throw std::invalid_argument("marginal_pmf_by_sum_recursion: bivariate models only");
    }
    // P(X_1 = 0) = E(1/(Z+1)), summed over the materialized range of Z.
    const std::uint64_t z_end = model.chain().levels[0].support_size() + 2;
    KahanSum head;
    for (std::uint64_t z = 0; z <= z_end; ++z) {
        head.add(sum_pmf(model, z) / static_cast<double>(z + 1));
    }
    std::vector<double> out(x_max + 1);
    out[0] = head.sum;
    for (std::uint64_t x = 0; x < x_max; ++x) {
        out[x + 1] = out[x] - sum_pmf(model, x) / static_cast<double>(x + 1);
    }
    return out;
}

const char* rho_method_name(RhoMethod method) {
    switch (method) {
        case RhoMethod::MarginalForm: return "marginal";
        case RhoMethod::BaseMomentForm: return "base-moment";
        case RhoMethod::ClosedForm: return "closed";
    }
    return "unknown";
}

RhoResult correlation(const SchurModel& model, RhoMethod method) {
    const unsigned n = model.dimension();
    const DiscreteDistribution& base = model.base();
    double value = 0.0;

    switch (method) {
        case RhoMethod::MarginalForm: {
            const Rational E = equilibrium_moment_rational(base, n - 1, 1);
            const Rational M2 = equilibrium_moment_rational(base, n - 1, 2);
            const Rational V = M2 - E * E;
            if (V <= 0) throw ZeroVarianceError("correlation: marginal law is degenerate");
            value = to_double((V - E * E - E) / (2 * V));
            break;
        }
        case RhoMethod::BaseMomentForm: {
            const Rational mu = base.moment_rational(1);
            const Rational m2 = base.moment_rational(2);
            const Rational m3 = base.moment_rational(3);
            if (n == 2) {
                const Rational den = 4 * mu * m3 - 3 * m2 * m2 - mu * mu;
                if (den == 0) throw ZeroVarianceError("correlation: marginal law is degenerate");
                value = to_double((2 * mu * m3 - 3 * m2 * m2 + mu * mu) / den);
            } else if (n == 3) {
                const Rational m4 = base.moment_rational(4);
                const Rational den = 2 * mu * mu + 2 * m3 * m3 + 3 * m2 * (m2 - m4) +
                                     mu * (-3 * m2 - 4 * m3 + 3 * m4);
                if (den == 0) throw ZeroVarianceError("correlation: marginal law is degenerate");
                value = to_double(Rational(1, 2) - (mu - m3) * (2 * mu - 3 * m2 + m3) / den);
            } else if (n == 4) {
                const Rational m4 = base.moment_rational(4);
                const Rational m5 = base.moment_rational(5);
                const Rational A = 6 * mu - 11 * m2 + 6 * m3 - m4;
                const Rational B = 2 * mu - m2 - 2 * m3 + m4;
                const Rational J = 21 * m2 + 8 * m3 - 15 * m4 + 4 * m5;
                const Rational D = 36 * mu * mu + 65 * m2 * m2 + 20 * m3 * m3 - 70 * m2 * m4 +
                                   5 * m4 * m4 + 24 * m2 * m5 - 8 * m3 * m5;
                const Rational den = D - 4 * mu * J;
                if (den == 0) throw ZeroVarianceError("correlation: marginal law is degenerate");
                value = to_double(Rational(1, 2) - 5 * A * B / (2 * den));
            } else {
                throw UnsupportedDimensionError(
                    "correlation: raw-moment formulas cover n in {2, 3, 4} only");
            }
            break;
        }
        case RhoMethod::ClosedForm: {
            if (base.family() == Family::Poisson) {
                value = poisson_rho(base.parameter(), n);
            } else if (base.family() == Family::Geometric) {
                value = 0.0;  // coordinates are independent for every n
            } else {
                throw std::invalid_argument("correlation: no closed form for explicit bases");
            }
            break;
        }
    }
    check_rho_range(value, n);
    return RhoResult{value, method};
}

double poisson_rho(double lambda, unsigned n) {
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw std::invalid_argument("poisson_rho: lambda must be positive");
    }
    switch (n) {
        case 2: return -lambda / (6.0 + lambda);
        case 3: return -lambda / (12.0 + 2.0 * lambda);
        case 4: return -lambda / (20.0 + 3.0 * lambda);
        case 5: return -lambda / (30.0 + 4.0 * lambda);
        default:
            throw UnsupportedDimensionError(
                "poisson_rho: published closed forms cover n in 2..5 only");
    }
}

double poisson_rho_conjecture(double lambda, unsigned n) {
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw std::invalid_argument("poisson_rho_conjecture: lambda must be positive");
    }
    if (n < 2) throw std::invalid_argument("poisson_rho_conjecture: n must be >= 2");
    return -lambda / (static_cast<double>(n) * (n + 1) + (n - 1) * lambda);
}

std::vector<std::vector<std::uint64_t>> sample(const SchurModel& model, std::uint64_t seed,
                                               std::size_t count) {
    const unsigned n = model.dimension();
    const double tol = model.base().tail_tolerance();

    // Inverse-CDF table for Z over its effective support.
    std::vector<double> cdf;
    double cum = 0.0;
    const bool finite_base = model.base().is_explicit();
    const std::uint64_t hard_stop =
        finite_base ? model.base().support_size() : model.base().truncation_bound();
    for (std::uint64_t z = 0;; ++z) {
        cum += sum_pmf(model, z);
        cdf.push_back(cum);
        if (1.0 - cum <= tol) break;
        if (z + n - 1 >= hard_stop) {
            if (finite_base) break;  // all base mass consumed
            throw NonConvergentError("sample: sum distribution did not converge");
        }
    }

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::uint64_t>> draws;
    draws.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        const double u = uniform01(rng) * cum;
        const std::size_t z = std::min<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), cdf.size() - 1);

        const std::uint64_t t = z + n - 1;
        const std::vector<std::uint64_t> cuts = sample_cut_points(rng, t, n - 1);
        std::vector<std::uint64_t> parts(n);
        std::uint64_t prev = 0;
        for (unsigned i = 0; i + 1 < n; ++i) {
            parts[i] = cuts[i] - prev - 1;
            prev = cuts[i];
        }
        parts[n - 1] = t - prev;
        draws.push_back(std::move(parts));
    }
    return draws;
}

}  // namespace schureq
