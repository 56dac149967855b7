#pragma once

#include "schureq/distribution.hpp"
#include "schureq/equilibrium.hpp"

#include <cstdint>
#include <vector>

namespace schureq {

/// Largest supported model dimension; difference orders beyond this are not
/// validated numerically.
inline constexpr unsigned kMaxDimension = 10;

/// Exchangeable n-dimensional model whose joint survival function is
/// G(x_1) at the coordinate sum: P(X_1>=x_1,...,X_n>=x_n) = G(x_1+...+x_n),
/// where G is the survival function of the (n-1)-th equilibrium law of the
/// base. Each coordinate is marginally that equilibrium law.
class SchurModel {
public:
    const DiscreteDistribution& base() const noexcept { return base_; }
    unsigned dimension() const noexcept { return n_; }
    const EquilibriumChain& chain() const noexcept { return chain_; }

    /// Normalizing constant mu * mu_{1:1} * ... * mu_{n-2:1} (just mu when
    /// n = 2).
    double mean_product() const noexcept { return mean_product_; }

    /// Common marginal law of the coordinates: chain level n-1.
    const DiscreteDistribution& marginal() const { return chain_.levels[n_ - 1]; }

    /// Test fixture: a copy with a corrupted normalizing constant, used to
    /// exercise failure detection in verification. Not for regular use.
    SchurModel with_mean_product(double value) const;

private:
    friend SchurModel build_model(const DiscreteDistribution& dist, unsigned n);
    SchurModel() = default;

    DiscreteDistribution base_;
    unsigned n_ = 0;
    EquilibriumChain chain_;
    double mean_product_ = 0.0;
};

/// Build the n-dimensional model generated by `dist`. Requires 2 <= n and
/// n <= kMaxDimension, and positive equilibrium means up to level n-2.
SchurModel build_model(const DiscreteDistribution& dist, unsigned n);

/// P(X_1 >= x_1, ..., X_j >= x_j) for j <= n coordinates (the rest at 0);
/// depends on x only through its sum.
double joint_survival(const SchurModel& model, const std::vector<std::uint64_t>& x);

/// P(X_1 = x_1, ..., X_j = x_j) = (-1)^j D^j G(sum x), 1 <= j <= n. Small
/// negative rounding residue (above -1e-12) is clamped to 0; anything more
/// negative raises NonConvergentError since the exact value cannot be
/// negative. joint_pmf_raw returns the unclamped difference.
double joint_pmf(const SchurModel& model, const std::vector<std::uint64_t>& x);
double joint_pmf_raw(const SchurModel& model, const std::vector<std::uint64_t>& x);

/// P(Z = z) for Z = X_1 + ... + X_n, by the closed form
/// P(X = z+n-1) C(z+n-1, n-1) / mean_product.
double sum_pmf(const SchurModel& model, std::uint64_t z);

/// Same quantity through the difference path
/// C(z+n-1, n-1) (-1)^n D^n G(z); retained as a cross-check.
double sum_pmf_via_differences(const SchurModel& model, std::uint64_t z);

/// P(X_1 = x): the (n-1)-th equilibrium pmf.
double marginal_pmf(const SchurModel& model, std::uint64_t x);

/// Bivariate alternate route to the marginal pmf (n = 2 only):
/// P(X_1 = 0) = E(1/(Z+1)), then P(X_1 = x+1) = P(X_1 = x) - P(Z = x)/(x+1).
/// Returns values for x = 0..x_max.
std::vector<double> marginal_pmf_by_sum_recursion(const SchurModel& model, std::uint64_t x_max);

enum class RhoMethod { MarginalForm, BaseMomentForm, ClosedForm };

struct RhoResult {
    double value = 0.0;
    RhoMethod method = RhoMethod::MarginalForm;
};

const char* rho_method_name(RhoMethod method);

/// Pairwise Pearson correlation of the coordinates.
///   MarginalForm: (V - E^2 - E)/(2V) with E, V mean/variance of the
///     marginal law, valid for every n.
///   BaseMomentForm: explicit raw-moment formulas, n in {2, 3, 4} only.
///   ClosedForm: published Poisson forms (n in 2..5) or the geometric zero.
/// All paths evaluate in exact rational arithmetic where applicable.
RhoResult correlation(const SchurModel& model, RhoMethod method);

/// Published closed form for a Poisson base: -lambda/(6+lambda),
/// -lambda/(12+2 lambda), -lambda/(20+3 lambda), -lambda/(30+4 lambda) for
/// n = 2, 3, 4, 5. Other n raise UnsupportedDimensionError.
double poisson_rho(double lambda, unsigned n);

/// Observed pattern -lambda/(n(n+1) + (n-1) lambda) extending the published
/// values to every n >= 2. Validated numerically only; kept separate from
/// poisson_rho on purpose.
double poisson_rho_conjecture(double lambda, unsigned n);

/// `count` independent draws of (X_1,...,X_n), deterministic in `seed`.
/// Each draw samples Z by inverse CDF, then places Z uniformly among the
/// C(z+n-1, n-1) compositions into n parts via sorted uniform cut-points.
std::vector<std::vector<std::uint64_t>> sample(const SchurModel& model, std::uint64_t seed,
                                               std::size_t count);

}  // namespace schureq
