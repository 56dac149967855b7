#include "schureq/rational.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace schureq {

BigInt binomial_exact(std::uint64_t m, std::uint64_t k) {
    if (k > m) return 0;
    if (k > m - k) k = m - k;
    BigInt result = 1;
    // result stays integral after each division: after step i it equals C(m - k + i, i).
    for (std::uint64_t i = 1; i <= k; ++i) {
        result *= m - k + i;
        result /= i;
    }
    return result;
}

double binomial_coefficient(std::uint64_t m, std::uint64_t k) {
    if (k > m) return 0.0;
    if (k > m - k) k = m - k;
    std::uint64_t acc = 1;
    bool overflowed = false;
    for (std::uint64_t i = 1; i <= k && !overflowed; ++i) {
        const std::uint64_t factor = m - k + i;
        if (acc > std::numeric_limits<std::uint64_t>::max() / factor) {
            overflowed = true;
            break;
        }
        acc = acc * factor / i;
    }
    if (!overflowed) return static_cast<double>(acc);
    return binomial_exact(m, k).convert_to<double>();
}

BigInt stirling_second(unsigned j, unsigned k) {
    if (k > j) throw std::invalid_argument("stirling_second: k > j");
    if (j == 0) return k == 0 ? 1 : 0;
    if (k == 0) return 0;
    // S(j, k) = k S(j-1, k) + S(j-1, k-1), one rolling row.
    std::vector<BigInt> row(j + 1);
    row[0] = 1;  // row for j = 0
    for (unsigned n = 1; n <= j; ++n) {
        for (unsigned c = n; c >= 1; --c) {
            row[c] = BigInt(c) * row[c] + row[c - 1];
        }
        row[0] = 0;
    }
    return row[k];
}

BigInt eulerian_number(unsigned j, unsigned k) {
    if (j == 0 || k >= j) throw std::invalid_argument("eulerian_number: need j >= 1, k < j");
    // A(j, k) = (k+1) A(j-1, k) + (j-k) A(j-1, k-1), rolling row.
    std::vector<BigInt> row(j);
    row[0] = 1;  // row for j = 1
    for (unsigned n = 2; n <= j; ++n) {
        for (unsigned c = n - 1; c >= 1; --c) {
            row[c] = BigInt(c + 1) * row[c] + BigInt(n - c) * row[c - 1];
        }
        // row[0] stays 1
    }
    return row[k];
}

std::string rational_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace schureq
