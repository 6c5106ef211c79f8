#ifndef TWISTLAB_GAUSS_HPP
#define TWISTLAB_GAUSS_HPP

#include <complex>
#include <cstdint>

#include "twistlab/arith.hpp"

namespace twistlab {

// Exact value m*sqrt(r) with r squarefree positive; r = 1 whenever m = 0.
struct ExactGaussValue {
    long long m = 0;
    long long r = 1;

    double value() const;
    bool operator==(const ExactGaussValue& o) const { return m == o.m && r == o.r; }
};

// (m1 sqrt(r1))(m2 sqrt(r2)) = m1 m2 g sqrt(r1 r2 / g^2), g = gcd(r1, r2).
// Keeps r squarefree with no floating error.
ExactGaussValue egv_mul(const ExactGaussValue& a, const ExactGaussValue& b);

// G_k(n) for odd n by the multiplicative prime-power table:
//   with p^alpha || k (alpha = infinity when k = 0) and p^beta || n,
//     0              if beta <= alpha odd,
//     phi(p^beta)    if beta <= alpha even,
//     -p^alpha       if beta = alpha+1 even,
//     (k p^-alpha / p) p^alpha sqrt(p)   if beta = alpha+1 odd,
//     0              if beta >= alpha+2.
ExactGaussValue gauss_exact(long long k, std::uint64_t n_odd);

// Same, with the factorization of n supplied by the caller (used where n
// exceeds the factorize() cap but its factors are known).
ExactGaussValue gauss_exact_factored(long long k, const Factorization& n_odd);

// Single prime-power factor G_k(p^beta); exposed for the local Euler sums.
// kron_k_over_p must equal kronecker(k / p^alpha, p) when it is consulted
// (the beta = alpha+1 odd case); alpha = UINT32_MAX encodes k = 0.
ExactGaussValue gauss_prime_power(std::uint64_t p, std::uint32_t beta,
                                  std::uint32_t alpha, int kron_k_over_p);

// Definition-level oracle: G_k(n) = ((1-i)/2 + (-1/n)(1+i)/2) sum_a (a/n) e(ak/n),
// summed with pairwise accumulation.  Oracle scale n <= 10^4.
std::complex<double> gauss_direct(long long k, std::uint64_t n_odd);

// G_{4k}(n) = G_k(n) for odd n; exact comparison of the two table values.
bool gauss_4k_identity_check(long long k, std::uint64_t n_odd);

// Conductor map m(k1) attached to the twisted L-factors:
//   odd case:  k1        if k1 = 1 mod 4,   4 k1 if k1 = 2,3 mod 4,
//   even case: k1 = 2 k1' and m(k1') = k1' if k1' = 1 mod 4, 4 k1' if k1' = 3 mod 4.
enum class MParity { odd_case, even_case };
long long m_of_k1(long long k1, MParity parity);

} // namespace twistlab

#endif
