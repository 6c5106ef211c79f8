#include "twistlab/lfun.hpp"
#include "twistlab/arith.hpp"
#include "twistlab/gauss.hpp"

#include <algorithm>
#include <cmath>

namespace twistlab {

namespace {

// G_k(p^beta)/p^beta in closed form (alpha = v_p(k), UINT32_MAX for k = 0;
// sym = kronecker(k p^{-alpha}, p)):
//   beta = 0 -> 1;  beta <= alpha -> 0 (odd) or 1 - 1/p (even);
//   beta = alpha+1 -> -1/p (even) or sym/sqrt(p) (odd);  else 0.
double g_over_pbeta(double p, std::uint32_t beta, std::uint32_t alpha, int sym) {
    if (beta == 0) return 1.0;
    if (beta <= alpha) return beta % 2 == 1 ? 0.0 : 1.0 - 1.0 / p;
    if (alpha != UINT32_MAX && beta == alpha + 1)
        return beta % 2 == 0 ? -1.0 / p : double(sym) / std::sqrt(p);
    return 0.0;
}

void check_params(const ZSeriesParams& P) {
    if (P.alpha < 2.0 || P.beta < 2.0 || P.gamma < 2.0)
        throw std::invalid_argument("z series: alpha, beta, gamma must be >= 2");
    if (P.k1 == 0 || !is_squarefree(std::uint64_t(std::llabs(P.k1))))
        throw std::invalid_argument("z series: k1 must be squarefree and nonzero");
    if (P.Qprime == 0 || P.Qprime % 2 == 0)
        throw std::invalid_argument("z series: Q' must be odd and positive");
    if (P.a == 0) throw std::invalid_argument("z series: a must be positive");
    if (P.b == 0 || P.b % 2 == 0 || !is_squarefree(P.b))
        throw std::invalid_argument("z series: b must be odd and squarefree");
}

std::vector<double> hecke_powers_at(const CoefficientTable& t, std::uint64_t p,
                                    std::uint32_t amax) {
    std::vector<double> out(amax + 1, 0.0);
    out[0] = 1.0;
    if (amax == 0) return out;
    double lp = t(std::uint32_t(p));
    bool ram = t.form().level % (long long)p == 0;
    out[1] = lp;
    for (std::uint32_t a = 2; a <= amax; ++a)
        out[a] = ram ? out[a - 1] * lp : lp * out[a - 1] - out[a - 2];
    return out;
}

} // namespace

double z_local_factor(std::uint64_t p, const ZSeriesParams& P,
                      const CoefficientTable& tf, const CoefficientTable& tg) {
    check_params(P);
    if (p == 2 || p > tf.limit() || p > tg.limit())
        throw std::invalid_argument("z_local_factor: need odd p within table range");

    const double pd = double(p);
    const std::uint32_t r = valuation(P.Qprime, p);
    const std::uint32_t vk1 = valuation(std::uint64_t(std::llabs(P.k1)), p);
    const bool p_div_a = (P.a % p == 0);
    const int chi_bp = kronecker((long long)P.b, (long long)p);
    long long k1red = P.k1;
    for (std::uint32_t i = 0; i < vk1; ++i) k1red /= (long long)p;
    const int sym = kronecker(k1red, (long long)p);

    // e: p-exponent of k2 (weight p^{-2 e gamma}); a1, a2: exponents of n1, n2
    const double lg10 = std::log(10.0);
    std::uint32_t emax = std::uint32_t(std::ceil(19.0 * lg10 / (2.0 * P.gamma * std::log(pd))));
    std::uint32_t amax = std::uint32_t(std::ceil(19.0 * lg10 / (std::min(P.alpha, P.beta) * std::log(pd))));

    double total = 0.0;
    for (std::uint32_t e = 0; e <= emax; ++e) {
        std::uint32_t alpha_p = vk1 + 2 * e;
        double we = std::pow(pd, -2.0 * double(e) * P.gamma);
        std::uint32_t cap = p_div_a ? 0 : std::min(amax, alpha_p + 1 >= r ? alpha_p + 1 - r : 0);
        auto lf = hecke_powers_at(tf, p, cap);
        auto lgv = hecke_powers_at(tg, p, cap);
        // cap = 0 when p | a: only the bare Q'-power term (a1 = a2 = 0) survives
        for (std::uint32_t a1 = 0; a1 <= cap; ++a1) {
            for (std::uint32_t a2 = 0; a1 + a2 <= cap; ++a2) {
                std::uint32_t beta = a1 + a2 + r;
                double gv = g_over_pbeta(pd, beta, alpha_p, sym);
                if (gv == 0.0) continue;
                double chi = beta % 2 == 0 ? 1.0 : double(chi_bp);
                if (beta > 0 && chi_bp == 0) continue;
                total += lf[a1] * lgv[a2] * chi * gv * we
                       * std::pow(pd, -double(a1) * P.alpha - double(a2) * P.beta);
            }
        }
    }
    return total;
}

ZSeriesValue z_local_product(const ZSeriesParams& P, const CoefficientTable& tf,
                             const CoefficientTable& tg, std::uint32_t prime_cutoff) {
    check_params(P);
    std::uint32_t cap = std::min({prime_cutoff, tf.limit(), tg.limit()});
    double prod = 1.0;
    std::uint64_t n = 0;
    for (auto p : prime_sieve(cap)) {
        if (p == 2) continue;
        prod *= z_local_factor(p, P, tf, tg);
        ++n;
    }
    ZSeriesValue out;
    out.value = prod;
    out.terms = n;
    // neglected primes contribute 1 + O(p^{-min(alpha,beta)-1/2}) + O(p^{-2 gamma})
    double m = std::min(P.alpha, P.beta) + 0.5;
    double lp = std::log(double(cap));
    out.tail_majorant = std::fabs(prod)
        * (4.0 * std::pow(double(cap), 1.0 - m) / ((m - 1.0) * lp)
           + std::pow(double(cap), 1.0 - 2.0 * P.gamma) / ((2.0 * P.gamma - 1.0) * lp));
    return out;
}

// ---------------------------------------------------------------------------
// direct route: ball-ordered triple sum
// ---------------------------------------------------------------------------

namespace {

struct ComboOption {
    std::uint64_t c1, c2;
    double fac;
};

// cartesian product of per-prime exponent options
void expand_combos(const std::vector<std::vector<ComboOption>>& opts, std::size_t i,
                   std::uint64_t c1, std::uint64_t c2, double fac, std::uint64_t Wk,
                   std::vector<ComboOption>& out) {
    if (fac == 0.0) return;
    if ((unsigned __int128)c1 * c2 > Wk) return;
    if (i == opts.size()) {
        out.push_back({c1, c2, fac});
        return;
    }
    for (const auto& o : opts[i])
        expand_combos(opts, i + 1, c1 * o.c1, c2 * o.c2, fac * o.fac, Wk, out);
}

} // namespace

ZSeriesValue z_series_direct(const ZSeriesParams& P, const CoefficientTable& tf,
                             const CoefficientTable& tg, std::uint64_t W,
                             std::uint32_t k2_max) {
    check_params(P);
    W = std::min<std::uint64_t>({W, tf.limit(), tg.limit()});
    if (W < 1000) throw InsufficientCoefficients(1000);

    const std::uint64_t ak1 = std::uint64_t(std::llabs(P.k1));

    // multiplicative sieve of the generic squarefree part:
    //   g[p] = (lambda_f(p) p^{-alpha} + lambda_g(p) p^{-beta}) p^{-1/2}
    //          (k1/p)(b/p)   for odd p coprime to a k1 Q'
    // g[m] = prod over the primes of squarefree m, 0 otherwise.
    auto spf = spf_sieve(std::uint32_t(W));
    std::vector<double> g(W + 1, 0.0);
    g[1] = 1.0;
    for (std::uint64_t m = 2; m <= W; ++m) {
        std::uint64_t p = spf[m];
        if (m == p) {
            if (p == 2 || P.a % p == 0 || ak1 % p == 0 || P.Qprime % p == 0) continue;
            int kk = kronecker(P.k1, (long long)p) * kronecker((long long)P.b, (long long)p);
            if (kk == 0) continue;
            g[m] = double(kk) / std::sqrt(double(p))
                 * (tf(std::uint32_t(p)) * std::pow(double(p), -P.alpha)
                  + tg(std::uint32_t(p)) * std::pow(double(p), -P.beta));
        } else {
            std::uint64_t m1 = m / p;
            g[m] = (m1 % p == 0) ? 0.0 : g[m1] * g[p];
        }
    }

    ZSeriesValue out;
    double value = 0.0;
    double shell_abs = 0.0; // |g| mass in (W/2, W], for the logged majorant
    for (std::uint64_t m = W / 2 + 1; m <= W; ++m) shell_abs += std::fabs(g[m]);

    std::vector<std::vector<ComboOption>> opts;
    std::vector<ComboOption> combos;
    std::vector<std::uint64_t> sprimes, newprimes;
    double slice1 = 1.0;

    for (std::uint64_t k2 = 1; k2 <= k2_max; k2 += 2) {
        std::uint64_t Wk = std::max<std::uint64_t>(64, W / (k2 * k2));
        Wk = std::min(Wk, W);

        // odd primes of k1 k2 Q'
        sprimes.clear();
        newprimes.clear();
        auto push_primes = [&](std::uint64_t v, bool is_new) {
            while (v % 2 == 0) v /= 2;
            for (std::uint64_t p = 3; p * p <= v; p += 2) {
                if (v % p) continue;
                while (v % p == 0) v /= p;
                if (std::find(sprimes.begin(), sprimes.end(), p) == sprimes.end()) {
                    sprimes.push_back(p);
                    if (is_new) newprimes.push_back(p);
                }
            }
            if (v > 1 && std::find(sprimes.begin(), sprimes.end(), v) == sprimes.end()) {
                sprimes.push_back(v);
                if (is_new) newprimes.push_back(v);
            }
        };
        push_primes(ak1, false);
        push_primes(P.Qprime, false);
        push_primes(k2, true); // k2 primes are not masked out of g, skip them per m
        std::sort(sprimes.begin(), sprimes.end());

        // per-prime exponent options
        opts.clear();
        bool dead = false;
        for (auto p : sprimes) {
            double pd = double(p);
            std::uint32_t r = valuation(P.Qprime, p);
            std::uint32_t vk = valuation(ak1, p) + 2 * valuation(k2, p);
            long long k1red = P.k1;
            for (std::uint32_t i = 0; i < valuation(ak1, p); ++i) k1red /= (long long)p;
            int sym = kronecker(k1red, (long long)p);
            int chi_bp = kronecker((long long)P.b, (long long)p);
            std::vector<ComboOption> po;
            std::uint32_t top = vk + 1 >= r ? vk + 1 - r : 0;
            if (P.a % p == 0) top = 0;
            for (std::uint32_t e1 = 0; e1 <= top; ++e1) {
                for (std::uint32_t e2 = 0; e1 + e2 <= top; ++e2) {
                    std::uint32_t beta = e1 + e2 + r;
                    double gv = g_over_pbeta(pd, beta, vk, sym);
                    if (gv == 0.0) continue;
                    if (beta > 0 && chi_bp == 0) continue;
                    double chi = beta % 2 == 0 ? 1.0 : double(chi_bp);
                    double c1d = std::pow(pd, double(e1)), c2d = std::pow(pd, double(e2));
                    if (c1d * c2d > double(Wk)) continue;
                    auto lf = hecke_powers_at(tf, p, e1);
                    auto lgv = hecke_powers_at(tg, p, e2);
                    double fac = lf[e1] * lgv[e2] * chi * gv
                               * std::pow(pd, -double(e1) * P.alpha - double(e2) * P.beta);
                    std::uint64_t c1 = 1, c2 = 1;
                    for (std::uint32_t i = 0; i < e1; ++i) c1 *= p;
                    for (std::uint32_t i = 0; i < e2; ++i) c2 *= p;
                    po.push_back({c1, c2, fac});
                }
            }
            if (po.empty()) { dead = true; break; }
            opts.push_back(std::move(po));
        }
        if (dead) continue;

        combos.clear();
        expand_combos(opts, 0, 1, 1, 1.0, Wk, combos);
        if (combos.empty()) continue;
        std::sort(combos.begin(), combos.end(), [](const ComboOption& a, const ComboOption& b) {
            return a.c1 * a.c2 < b.c1 * b.c2;
        });

        // one ascending scan of m; freeze each combo's partial sum at its cap
        double slice = 0.0;
        double run = 0.0;
        std::vector<double> caps(combos.size());
        for (std::size_t i = 0; i < combos.size(); ++i)
            caps[i] = double(Wk) / double(combos[i].c1 * combos[i].c2);
        // iterate combos from smallest cap upward
        std::vector<std::size_t> order(combos.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return caps[x] < caps[y]; });
        std::size_t oi = 0;
        std::uint64_t mmax = std::uint64_t(caps[order.back()]);
        for (std::uint64_t m = 1; m <= mmax && oi < order.size(); ++m) {
            double gm = g[m];
            if (gm != 0.0) {
                bool skip = false;
                for (auto p : newprimes)
                    if (m % p == 0) { skip = true; break; }
                if (!skip) run += gm;
                ++out.terms;
            }
            while (oi < order.size() && std::uint64_t(caps[order[oi]]) == m) {
                slice += combos[order[oi]].fac * run;
                ++oi;
            }
        }
        for (; oi < order.size(); ++oi)
            slice += combos[order[oi]].fac * run;

        double wk2 = std::pow(double(k2), -2.0 * P.gamma);
        value += wk2 * slice;
        if (k2 == 1) slice1 = std::max(1.0, std::fabs(slice));
    }

    out.value = value;
    // divisor-bound majorization: the (W/2, W] shell of |g|, geometrically
    // extended, plus the k2 truncation
    double mexp = std::min(P.alpha, P.beta) + 0.5;
    double rho = std::pow(2.0, 1.0 - mexp) * 1.5;
    out.tail_majorant = shell_abs * rho / std::max(0.25, 1.0 - rho)
                      + slice1 * std::pow(double(k2_max), 1.0 - 2.0 * P.gamma)
                        / (2.0 * P.gamma - 1.0);
    return out;
}

} // namespace twistlab
