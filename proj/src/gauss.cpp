#include "twistlab/gauss.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace twistlab {

double ExactGaussValue::value() const {
    return double(m) * std::sqrt(double(r));
}

ExactGaussValue egv_mul(const ExactGaussValue& a, const ExactGaussValue& b) {
    if (a.m == 0 || b.m == 0) return {0, 1};
    long long g = std::gcd(a.r, b.r);
    return {a.m * b.m * g, (a.r / g) * (b.r / g)};
}

ExactGaussValue gauss_prime_power(std::uint64_t p, std::uint32_t beta,
                                  std::uint32_t alpha, int kron_k_over_p) {
    if (beta == 0) return {1, 1};
    if (beta <= alpha) {
        if (beta % 2 == 1) return {0, 1};
        long long ppow = 1;
        for (std::uint32_t i = 0; i + 1 < beta; ++i) ppow *= (long long)p;
        return {ppow * ((long long)p - 1), 1}; // phi(p^beta)
    }
    if (beta == alpha + 1) {
        long long pa = 1;
        for (std::uint32_t i = 0; i < alpha; ++i) pa *= (long long)p;
        if (beta % 2 == 0) return {-pa, 1};
        return {kron_k_over_p * pa, (long long)p};
    }
    return {0, 1}; // beta >= alpha + 2
}

static ExactGaussValue gauss_from_factors(long long k, const Factorization& nf) {
    ExactGaussValue out{1, 1};
    for (auto [p, beta] : nf.pe) {
        if (p == 2) throw std::invalid_argument("gauss_exact: n must be odd");
        std::uint32_t alpha;
        int sym = 0;
        if (k == 0) {
            alpha = UINT32_MAX;
        } else {
            alpha = valuation(std::llabs(k), p);
            if (beta == alpha + 1 && beta % 2 == 1) {
                long long kred = k;
                for (std::uint32_t i = 0; i < alpha; ++i) kred /= (long long)p;
                sym = kronecker(kred, (long long)p);
            }
        }
        out = egv_mul(out, gauss_prime_power(p, beta, alpha, sym));
        if (out.m == 0) return {0, 1};
    }
    return out;
}

ExactGaussValue gauss_exact(long long k, std::uint64_t n_odd) {
    if (n_odd == 0 || n_odd % 2 == 0)
        throw std::invalid_argument("gauss_exact: n must be odd and positive");
    return gauss_from_factors(k, factorize(n_odd));
}

ExactGaussValue gauss_exact_factored(long long k, const Factorization& n_odd) {
    return gauss_from_factors(k, n_odd);
}

// Pairwise (tree) summation of the character sum terms.
static std::complex<double> pairwise_sum(const std::vector<std::complex<double>>& v,
                                         std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        std::complex<double> s = 0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

std::complex<double> gauss_direct(long long k, std::uint64_t n) {
    if (n == 0 || n % 2 == 0)
        throw std::invalid_argument("gauss_direct: n must be odd and positive");
    if (n > 10000)
        throw std::invalid_argument("gauss_direct: oracle capped at n <= 10^4");

    const double two_pi = 6.283185307179586476925286766559;
    std::vector<std::complex<double>> terms;
    terms.reserve(n);
    long long kmod = ((k % (long long)n) + (long long)n) % (long long)n;
    for (std::uint64_t a = 0; a < n; ++a) {
        int chi = kronecker((long long)a, (long long)n);
        if (chi == 0) continue;
        double ang = two_pi * double((unsigned __int128)a * kmod % n) / double(n);
        terms.push_back(double(chi) * std::complex<double>(std::cos(ang), std::sin(ang)));
    }
    std::complex<double> s = terms.empty() ? std::complex<double>(n == 1 ? 1.0 : 0.0, 0.0)
                                           : pairwise_sum(terms, 0, terms.size());
    if (n == 1) s = 1.0; // empty sum convention: G_k(1) = 1

    int eps = kronecker(-1, (long long)n);
    std::complex<double> pref = std::complex<double>(0.5, -0.5)
                              + double(eps) * std::complex<double>(0.5, 0.5);
    return pref * s;
}

bool gauss_4k_identity_check(long long k, std::uint64_t n_odd) {
    return gauss_exact(4 * k, n_odd) == gauss_exact(k, n_odd);
}

long long m_of_k1(long long k1, MParity parity) {
    if (k1 == 0 || !is_squarefree(std::uint64_t(std::llabs(k1))))
        throw std::invalid_argument("m_of_k1: k1 must be squarefree and nonzero");
    auto mod4 = [](long long v) { return int(((v % 4) + 4) % 4); };
    if (parity == MParity::odd_case) {
        if (k1 % 2 == 0) throw std::invalid_argument("m_of_k1: odd case needs odd k1");
        return mod4(k1) == 1 ? k1 : 4 * k1;
    }
    if (k1 % 2 != 0) throw std::invalid_argument("m_of_k1: even case needs k1 = 2*k1'");
    long long k1p = k1 / 2;
    if (k1p % 2 == 0) throw std::invalid_argument("m_of_k1: even case needs odd k1'");
    return mod4(k1p) == 1 ? k1p : 4 * k1p;
}

} // namespace twistlab
