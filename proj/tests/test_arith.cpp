#include <doctest.h>

#include "twistlab/arith.hpp"

#include <numeric>
#include <stdexcept>

using namespace twistlab;

TEST_CASE("kronecker symbol values") {
    CHECK(kronecker(8, 3) == -1);
    CHECK(kronecker(5, 5) == 0);
    for (long long d : {-7, -1, 2, 9, 1000}) CHECK(kronecker(d, 1) == 1);
    CHECK(kronecker(2, 7) == 1);
    CHECK(kronecker(2, 3) == -1);
    CHECK(kronecker(-1, 3) == -1);
    CHECK(kronecker(-1, 5) == 1);
    CHECK(kronecker(3, -1) == 1);
    CHECK(kronecker(-3, -1) == -1);
    CHECK(kronecker(1, 0) == 1);
    CHECK(kronecker(-1, 0) == 1);
    CHECK(kronecker(2, 0) == 0);
    CHECK(kronecker(6, 2) == 0);
    CHECK(kronecker(7, 2) == 1);  // 7 = -1 mod 8
    CHECK(kronecker(3, 2) == -1); // 3 = 3 mod 8
}

TEST_CASE("kronecker multiplicativity in the lower argument") {
    for (long long m = -200; m <= 200; m += 7)
        for (long long n1 = 1; n1 <= 200; n1 += 13)
            for (long long n2 = 1; n2 <= 200; n2 += 17)
                CHECK(kronecker(m, n1 * n2) == kronecker(m, n1) * kronecker(m, n2));
}

TEST_CASE("kronecker against the Euler criterion") {
    for (auto p : prime_sieve(500)) {
        if (p == 2) continue;
        for (long long m = -30; m <= 30; ++m) {
            std::uint64_t mm =
                std::uint64_t(((m % (long long)p) + (long long)p) % (long long)p);
            int expected;
            if (mm == 0) {
                expected = 0;
            } else {
                expected = powmod(mm, (p - 1) / 2, p) == 1 ? 1 : -1;
            }
            CHECK(kronecker(m, (long long)p) == expected);
        }
    }
}

TEST_CASE("squarefree sieve") {
    auto f = squarefree_sieve(12);
    std::vector<std::uint64_t> flagged;
    for (std::uint64_t n = 1; n <= 12; ++n)
        if (f[n]) flagged.push_back(n);
    CHECK(flagged == std::vector<std::uint64_t>{1, 2, 3, 5, 6, 7, 10, 11});

    auto big = squarefree_sieve(100000);
    CHECK(big[1] == 1);
    CHECK(big[49] == 0);
    for (std::uint64_t n = 1; n <= 100000; ++n) {
        bool sf = true;
        for (auto [p, e] : factorize(n).pe)
            if (e > 1) sf = false;
        REQUIRE(bool(big[n]) == sf);
    }
    CHECK_THROWS_AS(squarefree_sieve(0), std::invalid_argument);
}

TEST_CASE("factorize") {
    auto f = factorize(360);
    REQUIRE(f.pe.size() == 3);
    CHECK(f.pe[0] == std::pair<std::uint64_t, std::uint32_t>{2, 3});
    CHECK(f.pe[1] == std::pair<std::uint64_t, std::uint32_t>{3, 2});
    CHECK(f.pe[2] == std::pair<std::uint64_t, std::uint32_t>{5, 1});
    CHECK(f.value() == 360);
    CHECK(factorize(1).pe.empty());
    auto g = factorize(97);
    REQUIRE(g.pe.size() == 1);
    CHECK(g.pe[0].first == 97);
    CHECK_THROWS_AS(factorize(0), std::invalid_argument);
    CHECK_THROWS_AS(factorize(10000001), std::invalid_argument);

    auto m = merge_coprime(factorize(8), factorize(15));
    CHECK(m.value() == 120);
    CHECK_THROWS_AS(merge_coprime(factorize(6), factorize(10)), std::invalid_argument);
}

TEST_CASE("modular helpers") {
    CHECK(powmod(2, 10, 1000) == 24);
    CHECK(mulmod(1ull << 40, 1ull << 40, (1ull << 61) - 1)
          == powmod(2, 80, (1ull << 61) - 1));
    for (auto p : {101ull, 997ull, 65537ull}) {
        for (std::uint64_t a = 2; a < 40; ++a) {
            CHECK(mulmod(invmod(a, p), a, p) == 1);
            if (kronecker((long long)a, (long long)p) == 1) {
                auto r = sqrtmod(a, p);
                CHECK(mulmod(r, r, p) == a % p);
            }
        }
    }
    CHECK_THROWS_AS(sqrtmod(3, 7), std::invalid_argument); // (3/7) = -1
}
