// Acceptance suite: one line per criterion, exit code = number of failures.
// Coefficient tables are cached under ./coeff-cache (first run builds them).

#include "twistlab/arith.hpp"
#include "twistlab/forms.hpp"
#include "twistlab/gauss.hpp"
#include "twistlab/lfun.hpp"
#include "twistlab/moments.hpp"

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace twistlab;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Criterion {
    const char* name;
    Clock::time_point start = Clock::now();
    explicit Criterion(const char* n) : name(n) {}
    void report(bool pass, const std::string& detail) {
        double dt = std::chrono::duration<double>(Clock::now() - start).count();
        std::printf("%s  %-58s %7.1fs  %s\n", pass ? "PASS" : "FAIL", name, dt,
                    detail.c_str());
        std::fflush(stdout);
        if (!pass) ++g_failures;
    }
};

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::vector<long long> pick_ds(const NewformSpec& form, int omega_want, std::size_t count,
                               long long dmax) {
    std::vector<long long> all;
    for (long long d = 1; d <= dmax; d += 2) {
        if (!qualify_reason(form, d).empty()) continue;
        if (root_number(form, d) == omega_want) all.push_back(d);
    }
    std::vector<long long> out;
    if (all.empty()) return out;
    double stride = double(all.size()) / double(count);
    for (std::size_t i = 0; i < count && i * stride < all.size(); ++i)
        out.push_back(all[std::size_t(i * stride)]);
    return out;
}

void c1_gauss_oracle() {
    Criterion c("1. Gauss-sum table vs direct character sum");
    double worst = 0;
    for (std::uint64_t n = 1; n <= 1000; n += 2)
        for (long long k = -20; k <= 20; ++k) {
            double ex = gauss_exact(k, n).value();
            double dr = gauss_direct(k, n).real();
            worst = std::max(worst, std::fabs(ex - dr) / std::max(1.0, std::fabs(dr)));
        }
    c.report(worst <= 1e-9, fmt("worst rel err %.2e (tol 1e-9)", worst));
}

void c2_g4k() {
    Criterion c("2. G_{4k} = G_k identity, |k| <= 50, odd n <= 500");
    long long bad = 0;
    for (long long k = -50; k <= 50; ++k)
        for (std::uint64_t n = 1; n <= 500; n += 2)
            if (!gauss_4k_identity_check(k, n)) ++bad;
    c.report(bad == 0, fmt("%lld violations", bad));
}

void c3_poisson() {
    Criterion c("3. Poisson summation two-sided check");
    double worst = 0;
    for (std::uint64_t n : {3ull, 5ull, 9ull, 15ull, 45ull})
        for (double Z : {50.0, 200.0})
            worst = std::max(worst, poisson_identity_check(n, Z, 350).abs_err);
    c.report(worst <= 1e-8, fmt("worst abs err %.2e (tol 1e-8)", worst));
}

void c4_z_independence(const CoefficientTable& tf, const CoefficientTable& tg,
                       KernelSet& kernels) {
    Criterion c("4. AFE Z-independence, 50 qualifying d <= 2000 per form");
    double worst = 0;
    int done = 0;
    for (const CoefficientTable* t : {&tf, &tg}) {
        for (long long d : pick_ds(t->form(), -1, 50, 2000)) {
            auto v1 = lprime_central(*t, kernels, d, 1.0);
            auto v2 = lprime_central(*t, kernels, d, 2.0);
            worst = std::max(worst,
                             std::fabs(v1.value - v2.value) / (1.0 + std::fabs(v1.value)));
            ++done;
        }
    }
    c.report(done >= 100 && worst <= 1e-6,
             fmt("%d evaluations, worst rel %.2e (tol 1e-6)", done, worst));
}

void c5_vanishing(const CoefficientTable& tf, const CoefficientTable& tg,
                  KernelSet& kernels) {
    Criterion c("5. omega = +1 vanishing / eta validation");
    double worst = 0;
    int done = 0;
    bool eta_ok = true;
    for (const CoefficientTable* t : {&tf, &tg}) {
        auto plus = pick_ds(t->form(), 1, 25, 2000);
        const WTable& wZ = kernels.wtable(t->form(), 2.0);
        const WTable& wZi = kernels.wtable(t->form(), 0.5);
        for (long long d : plus) {
            auto s = afe_sums(*t, wZ, wZi, d);
            worst = std::max(worst, std::fabs(s.s_z - s.s_zinv)
                                        / std::max(1e-30, std::fabs(s.s_z)));
            ++done;
        }
        auto minus = pick_ds(t->form(), -1, 12, 400);
        auto some_plus = pick_ds(t->form(), 1, 12, 400);
        some_plus.insert(some_plus.end(), minus.begin(), minus.end());
        eta_ok = eta_ok && validate_eta(*t, kernels, some_plus).pass;
    }
    c.report(done >= 50 && worst <= 1e-6 && eta_ok,
             fmt("%d samples, worst rel %.2e (tol 1e-6), eta %s", done, worst,
                 eta_ok ? "confirmed" : "WRONG"));
}

void c6_hecke(const CoefficientTable& tf) {
    Criterion c("6. Hecke structure: multiplicativity, recursion, tau, a_p");
    double worst = 0;
    auto spf = spf_sieve(100000);
    for (std::uint32_t n = 2; n <= 100000; ++n) {
        std::uint32_t p = spf[n], pe = 1, m = n;
        while (m % p == 0) { m /= p; pe *= p; }
        if (m > 1) worst = std::max(worst, std::fabs(tf(n) - tf(pe) * tf(m)));
    }
    for (auto p : prime_sieve(316)) {
        if (tf.form().level % p == 0) continue;
        std::uint64_t pk = p;
        double prev = 1.0;
        while (pk * p <= 100000) {
            worst = std::max(worst, std::fabs(tf(std::uint32_t(pk * p))
                                              - tf(p) * tf(std::uint32_t(pk)) + prev));
            prev = tf(std::uint32_t(pk));
            pk *= p;
        }
    }
    bool tau_ok = true;
    {
        auto tau = tau_qexpansion(100);
        auto td = build_table(builtin_form("delta"), 100);
        for (std::uint32_t n = 1; n <= 100; ++n)
            if (std::llround(td(n) * std::pow(double(n), 5.5)) != (long long)tau[n])
                tau_ok = false;
    }
    long long ap_bad = 0;
    for (const char* lab : {"11a", "17a"}) {
        auto f = builtin_form(lab);
        for (auto p : prime_sieve(1000)) {
            if (p == 2 || f.level % p == 0) continue;
            if (ap_point_count(*f.curve, p) != ap_naive(*f.curve, p)) ++ap_bad;
        }
    }
    c.report(worst <= 1e-12 && tau_ok && ap_bad == 0,
             fmt("worst residual %.2e (tol 1e-12), tau %s, %lld a_p mismatches", worst,
                 tau_ok ? "exact" : "BROKEN", ap_bad));
}

void c7_partition() {
    Criterion c("7. partition of unity and window V");
    double worst = 0;
    for (int J : {4, 6, 8}) {
        double hi = 3.0 * std::pow(2.0, J - 1);
        for (int i = 0; i <= 10000; ++i) {
            double x = 1.0 + (hi - 1.0) * i / 10000.0;
            double s = 0;
            for (int j = 0; j <= J; ++j) s += partition_G(x / std::pow(2.0, j));
            worst = std::max(worst, std::fabs(s - 1.0));
        }
    }
    double worst_v = 0;
    for (int i = 0; i <= 10000; ++i) {
        double x = 0.5 + 2.5 * i / 10000.0;
        worst_v = std::max(worst_v, std::fabs(window_V(x) - 1.0));
    }
    bool support_ok = window_V(0.374) == 0.0 && window_V(4.01) == 0.0
                   && partition_G(0.749) == 0.0 && partition_G(2.001) == 0.0;
    c.report(worst <= 1e-12 && worst_v <= 1e-12 && support_ok,
             fmt("partition %.2e, V %.2e (tol 1e-12)", worst, worst_v));
}

void c8_fourier() {
    Criterion c("8. Fourier-type transform: direct vs Mellin route");
    auto F = bump_fn();
    double worst = 0;
    for (double y : {0.1, 1.0, 10.0})
        worst = std::max(worst, std::fabs(fourier_check(F, y) - fourier_via_mellin(F, y)));
    c.report(worst <= 1e-8, fmt("worst abs %.2e (tol 1e-8)", worst));
}

void c9_zseries(const CoefficientTable& tf, const CoefficientTable& tg) {
    Criterion c("9. Z-series: direct sum vs local Euler product");
    std::vector<ZSeriesParams> pts = {
        {2.0, 2.0, 2.0, 1, 1, 1, 1},
        {2.5, 2.0, 2.0, 1, 3, 1, 1},
        {2.0, 2.5, 2.2, 1, -3, 1, 1},
        {2.2, 2.4, 2.0, 3, 1, 11, 1},
        {3.0, 3.0, 3.0, 1, 5, 17, 17},
        {2.0, 3.0, 2.0, 5, -1, 187, 11},
        {2.5, 2.5, 2.5, 15, 3, 11, 187},
        {2.0, 2.0, 3.0, 1, 6, 1, 1},
        {2.8, 2.2, 2.0, 3, -5, 17, 1},
        {2.0, 2.0, 2.0, 1, 5, 187, 17},
    };
    double worst = 0;
    for (const auto& P : pts) {
        auto d = z_series_direct(P, tf, tg, 2000000, 1001);
        auto p = z_local_product(P, tf, tg, 1000000);
        worst = std::max(worst, std::fabs(d.value - p.value)
                                    / std::max(1.0, std::fabs(p.value)));
    }
    // exact Euler-factor cases from the case tables
    double worst_exact = 0;
    {
        ZSeriesParams P{2.0, 2.0, 2.0, 3, 3, 1, 1};
        worst_exact = std::max(worst_exact,
            std::fabs(z_local_factor(3, P, tf, tg) - 1.0 / (1.0 - std::pow(3.0, -4.0))));
        ZSeriesParams P2{2.0, 2.0, 2.0, 3, 3, 3, 1};
        worst_exact = std::max(worst_exact, std::fabs(z_local_factor(3, P2, tf, tg)));
        ZSeriesParams P3{2.0, 2.0, 2.0, 5, 3, 5, 1};
        worst_exact = std::max(worst_exact,
            std::fabs(z_local_factor(5, P3, tf, tg) - kronecker(3, 5) / std::sqrt(5.0)));
    }
    c.report(worst <= 1e-8 && worst_exact <= 1e-10,
             fmt("10 points worst %.2e (tol 1e-8); exact cases %.2e (tol 1e-10)", worst,
                 worst_exact));
}

void c10_constants(const CoefficientTable& tf, const CoefficientTable& tg,
                   KernelSet& kernels) {
    Criterion c("10. constants: C0 stability, C1 step-halving");
    auto a = compute_constants(tf, tg, kernels, 10000);
    auto b = compute_constants(tf, tg, kernels, 100000);
    double drift = std::fabs(b.C0 - a.C0) / std::fabs(b.C0);
    auto h = compute_constants(tf, tg, kernels, 100000, 0.5e-4, 0.5e-3);
    double c1drift = std::fabs(h.C1 - b.C1) / std::fabs(b.C1);
    bool ok = b.C0 > 0 && std::isfinite(b.C0) && drift <= 0.01 && std::isfinite(b.C1)
           && c1drift <= 1e-4;
    c.report(ok, fmt("C0=%.6g drift %.3g%% (tol 1%%); C1=%.6g halving drift %.2e "
                     "(tol 1e-4); C1_cross=%.6g", b.C0, 100 * drift, b.C1, c1drift,
                     b.C1_cross));
}

void c11_moment(const CoefficientTable& tf, const CoefficientTable& tg,
                KernelSet& kernels) {
    Criterion c("11. moment pipeline health at X = 2^16");
    auto constants = compute_constants(tf, tg, kernels, 100000);
    MomentConfig cfg;
    cfg.X = 65536.0;
    cfg.Z = 1.0;
    cfg.workers = 2;
    auto rep = moment_scan(cfg, tf, tg, kernels, constants);

    cfg.workers = 1;
    auto rep1 = moment_scan(cfg, tf, tg, kernels, constants);
    bool deterministic = rep.empirical == rep1.empirical;

    double M = resolve_M(cfg);
    double recombined = 0;
    for (auto d : qualifying_ds(cfg.X, tf.form(), tg.form())) {
        auto af = ab_decompose(tf, kernels, d, M);
        auto ag = ab_decompose(tg, kernels, d, M);
        recombined += (af.A * ag.A + af.A * ag.B + af.B * ag.A + af.B * ag.B)
            * bump_F(8.0 * double(d) / cfg.X);
    }
    double ab_rel = std::fabs(recombined - rep.empirical)
                  / std::max(1.0, std::fabs(rep.empirical));

    bool ok = rep.count_d > 0 && std::isfinite(rep.ratio) && rep.ratio > 0
           && ab_rel <= 1e-9 && deterministic;
    c.report(ok, fmt("count_d=%lld ratio=%.4f A/B rel %.2e (tol 1e-9) %s",
                     rep.count_d, rep.ratio, ab_rel,
                     deterministic ? "deterministic" : "NONDETERMINISTIC"));
}

} // namespace

int main() {
    std::printf("twistlab acceptance suite\n");
    auto t0 = Clock::now();

    c1_gauss_oracle();
    c2_g4k();
    c3_poisson();

    std::printf("...  building/loading coefficient tables (limit 2.6e6)\n");
    std::fflush(stdout);
    auto tf = cached_table(builtin_form("11a"), 2600000, "coeff-cache");
    auto tg = cached_table(builtin_form("17a"), 2600000, "coeff-cache");
    KernelSet kernels;

    c4_z_independence(tf, tg, kernels);
    c5_vanishing(tf, tg, kernels);
    c6_hecke(tf);
    c7_partition();
    c8_fourier();
    c9_zseries(tf, tg);
    c10_constants(tf, tg, kernels);
    c11_moment(tf, tg, kernels);

    double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%d criterion failure(s); total %.1f s\n", g_failures, dt);
    return g_failures;
}
