#ifndef TWISTLAB_ARITH_HPP
#define TWISTLAB_ARITH_HPP

#include <cstdint>
#include <vector>
#include <utility>

namespace twistlab {

// Full Kronecker symbol (m/n), defined for all integers m, n via the
// standard supplementary laws: (m/0) = [|m|=1], (m/-1) = sign extension,
// (m/2) by m mod 8.  Completely multiplicative in both arguments.
int kronecker(long long m, long long n);

// Prime factorization as (prime, exponent) pairs, primes increasing.
// n = 1 yields the empty list.  Deterministic trial division; inputs are
// capped at 10^7 (desk scale), larger values are rejected.
struct Factorization {
    std::vector<std::pair<std::uint64_t, std::uint32_t>> pe;

    std::uint64_t value() const;
    std::uint32_t exponent_of(std::uint64_t p) const;
};

Factorization factorize(std::uint64_t n);

// Merge factorizations of two coprime numbers (used when a product's
// factors are known separately and the product itself exceeds the
// factorize() cap).
Factorization merge_coprime(const Factorization& a, const Factorization& b);

// flag[n] is true iff n is squarefree, for 1 <= n <= limit (flag[0] unused).
std::vector<std::uint8_t> squarefree_sieve(std::uint64_t limit);

// All primes <= limit.
std::vector<std::uint32_t> prime_sieve(std::uint32_t limit);

// Smallest prime factor for every n <= limit (spf[0] = spf[1] = 1).
std::vector<std::uint32_t> spf_sieve(std::uint32_t limit);

bool is_squarefree(std::uint64_t n);

// v_p(n)
std::uint32_t valuation(std::uint64_t n, std::uint64_t p);

// Modular helpers (64-bit safe via 128-bit intermediates).
std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m);
std::uint64_t invmod(std::uint64_t a, std::uint64_t m);

// Square root mod an odd prime p (Tonelli-Shanks); requires (a/p) != -1.
// Returns the root in [0,p); a = 0 gives 0.
std::uint64_t sqrtmod(std::uint64_t a, std::uint64_t p);

} // namespace twistlab

#endif
