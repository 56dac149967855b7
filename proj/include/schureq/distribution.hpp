#pragma once

#include "schureq/rational.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace schureq {

/// Default bound on ignored tail mass when a closed-form law is materialized
/// on a finite support.
inline constexpr double kDefaultTailTolerance = 1e-12;

/// Hard ceiling on materialized support size; scans that would pass it raise
/// NonConvergentError instead.
inline constexpr std::uint64_t kDefaultTruncationBound = 1'000'000;

/// A mean at or below this threshold is treated as zero when building
/// equilibrium levels.
inline constexpr double kZeroMeanThreshold = 1e-300;

enum class Family { Poisson, Geometric, Explicit };

struct MomentEstimate {
    double value = 0.0;
    /// Bound on the error against the untruncated law. Zero for closed forms.
    double error_bound = 0.0;
};

/// A distribution on {0, 1, 2, ...}. Survival uses the closed convention
/// S(x) = P(X >= x), so S(0) == 1 exactly and p(x) == S(x) - S(x+1).
///
/// Explicit instances store a pmf vector plus the mass that was discarded
/// beyond it (zero unless the instance came from truncation); survival past
/// the stored support reports exactly that discarded mass.
class DiscreteDistribution {
public:
    /// Default instance is the point mass at 0 (the degenerate law).
    DiscreteDistribution() : pmf_{1.0}, survival_{1.0, 0.0} {}

    static DiscreteDistribution poisson(double lambda,
                                        double tail_tolerance = kDefaultTailTolerance,
                                        std::uint64_t truncation_bound = kDefaultTruncationBound);

    /// Geometric with survival q^x, i.e. p(x) = (1-q) q^x on {0,1,...}.
    static DiscreteDistribution geometric(double q,
                                          double tail_tolerance = kDefaultTailTolerance,
                                          std::uint64_t truncation_bound = kDefaultTruncationBound);

    /// Finite law from a pmf vector. Entries must be in [0,1] and sum to 1
    /// within 1e-12; the stored pmf is left unnormalized.
    static DiscreteDistribution from_pmf(std::vector<double> pmf,
                                         double tail_tolerance = kDefaultTailTolerance,
                                         std::uint64_t truncation_bound = kDefaultTruncationBound);

    /// Finite head of a law whose remaining mass `tail_mass` lies beyond the
    /// stored support. Entries plus tail must sum to 1 within 1e-12.
    static DiscreteDistribution from_pmf_with_tail(std::vector<double> pmf, double tail_mass,
                                                   double tail_tolerance = kDefaultTailTolerance,
                                                   std::uint64_t truncation_bound = kDefaultTruncationBound);

    Family family() const noexcept { return family_; }
    bool is_explicit() const noexcept { return family_ == Family::Explicit; }

    /// lambda for Poisson, q for Geometric; 0 for Explicit.
    double parameter() const noexcept { return param_; }
    double tail_tolerance() const noexcept { return tail_tolerance_; }
    std::uint64_t truncation_bound() const noexcept { return truncation_bound_; }

    /// Mass beyond the stored support (Explicit only; 0 for closed forms).
    double discarded_mass() const noexcept { return discarded_; }

    /// Stored pmf vector; only valid for Explicit instances.
    const std::vector<double>& weights() const;

    /// One past the largest stored support point. Explicit only.
    std::uint64_t support_size() const;

    double pmf(std::uint64_t x) const;
    double survival(std::uint64_t x) const;

    double mean() const;

    /// Raw moment E(X^j), j >= 0. Closed forms for Poisson and Geometric,
    /// exact summation for Explicit.
    double moment(unsigned j) const;

    /// Same as moment() but exact. Poisson/Geometric require the parameter
    /// to be representable, which holds since doubles are rationals.
    Rational moment_rational(unsigned j) const;

    /// moment() together with an error bound against the untruncated law.
    MomentEstimate moment_detail(unsigned j) const;

private:
    Family family_ = Family::Explicit;
    double param_ = 0.0;
    double tail_tolerance_ = kDefaultTailTolerance;
    std::uint64_t truncation_bound_ = kDefaultTruncationBound;

    // Explicit storage: pmf_ of length L, survival_ of length L + 1 with
    // survival_[0] == 1 and survival_[L] == discarded_.
    std::vector<double> pmf_;
    std::vector<double> survival_;
    double discarded_ = 0.0;
};

/// Materialize a closed-form law on the minimal support {0..M} whose ignored
/// tail mass S(M+1) is below eps. Explicit inputs pass through unchanged.
/// Raises NonConvergentError when M would exceed the truncation bound.
DiscreteDistribution truncate(const DiscreteDistribution& dist, double eps);

struct MonotonicityViolation {
    unsigned difference_order = 0;
    std::uint64_t x = 0;
    double value = 0.0;
};

struct MonotonicityReport {
    unsigned order_checked = 0;
    std::uint64_t x_max = 0;
    bool holds = false;
    std::optional<MonotonicityViolation> violation;
};

/// Check (-1)^j D^j S(x) >= -tol for j = 0..n and x = 0..x_max, where D is
/// the forward difference and S the survival function of `dist`. Reports the
/// first (smallest j, then smallest x) violation.
MonotonicityReport check_n_monotone(const DiscreteDistribution& dist, unsigned n,
                                    std::uint64_t x_max, double tol = 1e-12);

/// j-th forward difference of f at x via the alternating binomial sum
/// D^j f(x) = sum_{k=0..j} (-1)^(j-k) C(j,k) f(x+k). Requires j <= 62 so the
/// binomial row fits in 64 bits.
template <typename F>
double forward_difference(F&& f, std::uint64_t x, unsigned j) {
    if (j > 62) throw std::invalid_argument("forward_difference: order too large");
    double acc = 0.0;
    std::uint64_t binom = 1;  // C(j, k), updated multiplicatively
    for (unsigned k = 0; k <= j; ++k) {
        const double term = static_cast<double>(binom) * f(x + k);
        acc += ((j - k) % 2 == 0) ? term : -term;
        if (k < j) binom = binom * (j - k) / (k + 1);
    }
    return acc;
}

}  // namespace schureq
