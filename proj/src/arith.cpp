#include "twistlab/arith.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twistlab {

// (m/2) table: 0 for even m, +1 for m = +-1 mod 8, -1 for m = +-3 mod 8.
static int kron_two(long long m) {
    int r = int(((m % 8) + 8) % 8);
    if (r % 2 == 0) return 0;
    return (r == 1 || r == 7) ? 1 : -1;
}

int kronecker(long long m, long long n) {
    if (n == 0) return (m == 1 || m == -1) ? 1 : 0;

    int k = 1;
    if (n < 0) {
        n = -n;
        if (m < 0) k = -k; // (m/-1)
    }
    int v = 0;
    while (n % 2 == 0) { n /= 2; ++v; }
    if (v > 0) {
        if (m % 2 == 0) return 0;
        if (v % 2 == 1) k *= kron_two(m);
    }

    // Jacobi(m, n) with n odd positive, via binary reciprocity.
    long long a = m % n;
    if (a < 0) a += n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            long long r = n % 8;
            if (r == 3 || r == 5) k = -k;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) k = -k;
        a %= n;
    }
    return (n == 1) ? k : 0;
}

std::uint64_t Factorization::value() const {
    std::uint64_t v = 1;
    for (auto [p, e] : pe)
        for (std::uint32_t i = 0; i < e; ++i) v *= p;
    return v;
}

std::uint32_t Factorization::exponent_of(std::uint64_t p) const {
    for (auto [q, e] : pe)
        if (q == p) return e;
    return 0;
}

Factorization factorize(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("factorize: n = 0");
    if (n > 10000000ull)
        throw std::invalid_argument("factorize: n exceeds the 10^7 trial-division cap");
    Factorization f;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
        if (n % p == 0) {
            std::uint32_t e = 0;
            while (n % p == 0) { n /= p; ++e; }
            f.pe.emplace_back(p, e);
        }
    }
    if (n > 1) f.pe.emplace_back(n, 1);
    return f;
}

Factorization merge_coprime(const Factorization& a, const Factorization& b) {
    Factorization out;
    std::size_t i = 0, j = 0;
    while (i < a.pe.size() || j < b.pe.size()) {
        if (j == b.pe.size() || (i < a.pe.size() && a.pe[i].first < b.pe[j].first))
            out.pe.push_back(a.pe[i++]);
        else if (i == a.pe.size() || b.pe[j].first < a.pe[i].first)
            out.pe.push_back(b.pe[j++]);
        else
            throw std::invalid_argument("merge_coprime: arguments share a prime");
    }
    return out;
}

std::vector<std::uint8_t> squarefree_sieve(std::uint64_t limit) {
    if (limit == 0) throw std::invalid_argument("squarefree_sieve: limit = 0");
    std::vector<std::uint8_t> flag(limit + 1, 1);
    flag[0] = 0;
    for (std::uint64_t p = 2; p * p <= limit; ++p) {
        if (!flag[p]) continue; // p not squarefree => p has a smaller square divisor, skip
        std::uint64_t pp = p * p;
        // only need p prime here; composite p with p^2 <= limit are already
        // covered by their prime divisors, marking twice is harmless
        for (std::uint64_t k = pp; k <= limit; k += pp) flag[k] = 0;
    }
    return flag;
}

std::vector<std::uint32_t> prime_sieve(std::uint32_t limit) {
    std::vector<std::uint8_t> comp(std::size_t(limit) + 1, 0);
    std::vector<std::uint32_t> primes;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        primes.push_back(std::uint32_t(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = 1;
    }
    return primes;
}

std::vector<std::uint32_t> spf_sieve(std::uint32_t limit) {
    std::vector<std::uint32_t> spf(std::size_t(limit) + 1, 0);
    if (limit >= 1) spf[1] = 1;
    spf[0] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf[i] == 0) {
            for (std::uint64_t j = i; j <= limit; j += i)
                if (spf[j] == 0) spf[j] = std::uint32_t(i);
        }
    }
    return spf;
}

bool is_squarefree(std::uint64_t n) {
    if (n == 0) return false;
    for (auto [p, e] : factorize(n).pe)
        if (e > 1) return false;
    return true;
}

std::uint32_t valuation(std::uint64_t n, std::uint64_t p) {
    std::uint32_t v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return std::uint64_t((unsigned __int128)a * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
    long long t = 0, nt = 1;
    long long r = (long long)m, nr = (long long)(a % m);
    while (nr != 0) {
        long long q = r / nr;
        std::swap(t, nt); nt -= q * t;
        std::swap(r, nr); nr -= q * r;
    }
    if (r != 1) throw std::invalid_argument("invmod: not invertible");
    return std::uint64_t(t < 0 ? t + (long long)m : t);
}

std::uint64_t sqrtmod(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    if (p == 2) return a;
    if (powmod(a, (p - 1) / 2, p) != 1)
        throw std::invalid_argument("sqrtmod: non-residue");
    if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);

    // Tonelli-Shanks
    std::uint64_t q = p - 1;
    std::uint32_t s = 0;
    while (q % 2 == 0) { q /= 2; ++s; }
    std::uint64_t z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    std::uint64_t m = s;
    std::uint64_t c = powmod(z, q, p);
    std::uint64_t t = powmod(a, q, p);
    std::uint64_t r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        std::uint64_t i = 0, tt = t;
        while (tt != 1) { tt = mulmod(tt, tt, p); ++i; }
        std::uint64_t b = c;
        for (std::uint64_t j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

} // namespace twistlab
