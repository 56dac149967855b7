#pragma once

#include "schureq/distribution.hpp"
#include "schureq/schur_model.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace schureq {

/// Brute-force cross-checks of the closed forms and recursions used by the
/// main modules. Everything here is computed by literal nested summation
/// over a finite window (grown until the answer stabilizes), reusing only
/// pmf/survival primitives from the distribution type.

struct CheckResult {
    std::string name;
    bool pass = false;
    double max_abs_error = 0.0;
    double tolerance = 0.0;
    std::optional<std::string> location;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const CheckResult& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

/// pmf of the order-th equilibrium law on {0..x_max}, by repeated explicit
/// suffix sums with compensated accumulation; the mean of every level is
/// recomputed as a direct weighted sum.
std::vector<double> brute_equilibrium(const DiscreteDistribution& dist, unsigned order,
                                      std::uint64_t x_max);

struct BruteMomentDetail {
    double value = 0.0;
    /// Estimated change when the summation window widens; bound on what the
    /// finite window omitted.
    double omitted_bound = 0.0;
};

/// E[prod X_i^{p_i}] over the first j = powers.size() coordinates, summed
/// tuple by tuple from the joint pmf over {0..x_max}^j. Requires
/// sum(powers) <= 4 and a tuple count within the oracle budget.
double brute_joint_moment(const SchurModel& model, const std::vector<unsigned>& powers,
                          std::uint64_t x_max);
BruteMomentDetail brute_joint_moment_detail(const SchurModel& model,
                                            const std::vector<unsigned>& powers,
                                            std::uint64_t x_max);

/// Pearson correlation (E[X1 X2] - E[X1]^2)/V(X1) from brute joint moments.
double brute_correlation(const SchurModel& model, std::uint64_t x_max);

/// Default summation window: smallest M with base tail mass below 1e-14,
/// plus 2(n-1) slack for shifted indices.
std::uint64_t oracle_default_x_max(const DiscreteDistribution& dist, unsigned n);

/// Full consistency suite over one model; failures are report entries, not
/// exceptions.
VerificationReport verify_model(const SchurModel& model);

void print_report(const VerificationReport& report, std::ostream& out);

}  // namespace schureq
