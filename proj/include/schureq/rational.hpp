#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace schureq {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// C(m, k) as an exact big integer. C(m, k) = 0 for k > m.
BigInt binomial_exact(std::uint64_t m, std::uint64_t k);

/// C(m, k) rounded to double. Uses a 64-bit multiplicative path while it
/// cannot overflow and promotes to big integers past that point, so the
/// result is always the correctly rounded value.
double binomial_coefficient(std::uint64_t m, std::uint64_t k);

/// Stirling number of the second kind S(j, k): partitions of a j-set into
/// k nonempty blocks. Defined for 0 <= k <= j.
BigInt stirling_second(unsigned j, unsigned k);

/// Eulerian number A(j, k): permutations of {1..j} with k descents.
/// Defined for j >= 1, 0 <= k < j.
BigInt eulerian_number(unsigned j, unsigned k);

/// "p/q" in lowest terms, or just "p" when the denominator is 1.
std::string rational_string(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace schureq
