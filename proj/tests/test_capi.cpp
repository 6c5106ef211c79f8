// Exercises the shared-library C surface the CLI is built on.  Plain
// asserts; exits nonzero on the first failure.

#include "twistlab.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

static int g_fail = 0;
#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            std::fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond); \
            ++g_fail;                                                      \
        }                                                                  \
    } while (0)

int main() {
    CHECK(std::strlen(tl_version()) > 0);

    CHECK(tl_form_builtin("nonesuch") == nullptr);
    CHECK(std::strlen(tl_last_error()) > 0);

    tl_form* f = tl_form_builtin("11a");
    tl_form* g = tl_form_builtin("17a");
    CHECK(f && g);
    CHECK(tl_form_level(f) == 11);
    CHECK(tl_form_weight(f) == 2);
    CHECK(tl_form_eta(f) == -1);
    CHECK(std::string(tl_form_label(g)) == "17a");

    CHECK(tl_check_d(f, 3) == TL_OK);
    CHECK(tl_check_d(f, 4) == TL_EUSAGE);
    CHECK(tl_check_d(f, 45) == TL_EUSAGE);
    CHECK(tl_check_d(f, 33) == TL_EUSAGE);

    int omega = 0;
    CHECK(tl_root_number(f, 3, &omega) == TL_OK);
    CHECK(omega == -1);
    CHECK(tl_root_number(f, 9, &omega) == TL_EUSAGE);

    tl_table* tf = tl_table_cached(f, 150000, "coeff-cache");
    tl_table* tg = tl_table_cached(g, 150000, "coeff-cache");
    CHECK(tf && tg);
    CHECK(tl_table_limit(tf) >= 150000);
    CHECK(tl_table_lambda(tf, 1) == 1.0);
    CHECK(std::fabs(tl_table_lambda(tf, 2) + std::sqrt(2.0)) < 1e-14);
    CHECK(tl_table_lambda(tf, 0) == 0.0);

    // save / load round trip
    tl_table* small = tl_table_build(f, 200);
    CHECK(small);
    CHECK(tl_table_save(small, "capi-roundtrip.coeffs") == TL_OK);
    tl_table* loaded = tl_table_load(f, "capi-roundtrip.coeffs");
    CHECK(loaded);
    for (uint32_t n = 1; n <= 200; ++n)
        CHECK(tl_table_lambda(loaded, n) == tl_table_lambda(small, n));
    CHECK(tl_table_load(g, "capi-roundtrip.coeffs") == nullptr); // label mismatch
    tl_table_free(loaded);
    tl_table_free(small);

    tl_session* s = tl_session_new();
    CHECK(s);

    // L' for a -1 twist, Z-independence through the API
    long long d_minus = 0, d_plus = 0;
    for (long long d = 3; d <= 300 && (!d_minus || !d_plus); d += 2) {
        if (tl_check_d(f, d) != TL_OK) continue;
        tl_root_number(f, d, &omega);
        if (omega == -1 && !d_minus) d_minus = d;
        if (omega == 1 && !d_plus) d_plus = d;
    }
    CHECK(d_minus && d_plus);
    tl_lvalue v1{}, v2{};
    CHECK(tl_lprime(s, tf, d_minus, 1.0, &v1) == TL_OK);
    CHECK(tl_lprime(s, tf, d_minus, 2.0, &v2) == TL_OK);
    CHECK(std::fabs(v1.value - v2.value) <= 1e-6 * (1.0 + std::fabs(v1.value)));
    CHECK(v1.terms_used > 0);
    CHECK(v1.tail_bound <= 1e-8 * (1.0 + std::fabs(v1.value)));
    CHECK(tl_lprime(s, tf, d_plus, 1.0, &v1) == TL_EUSAGE);

    double combo = 0, resid = 1;
    CHECK(tl_afe_vanishing(s, tf, d_plus, 2.0, &combo, &resid) == TL_OK);
    CHECK(resid <= 1e-6);
    CHECK(tl_afe_vanishing(s, tf, d_minus, 2.0, &combo, &resid) == TL_EUSAGE);

    // constants
    tl_constants c{};
    CHECK(tl_compute_constants(s, tf, tg, 20000, &c) == TL_OK);
    CHECK(c.C0 > 0);
    CHECK(std::isfinite(c.C1));
    CHECK(std::isfinite(c.C1_cross));
    CHECK(tl_compute_constants(s, tf, tf, 20000, &c) == TL_EUSAGE); // f = g

    // qualifying d
    long long buf[64];
    size_t count = 0;
    CHECK(tl_qualifying_ds(f, g, 160.0, buf, 64, &count) == TL_OK);
    CHECK(count > 0);
    CHECK(count <= 64);
    for (size_t i = 0; i < count; ++i) CHECK(buf[i] >= 10 && buf[i] <= 40);

    // moment scan over the API
    tl_moment_report rep{};
    CHECK(tl_moment_scan(s, tf, tg, 1024.0, 1.0, "auto", 2, 20000, &c, &rep) == TL_OK);
    CHECK(rep.count_d > 0);
    CHECK(std::isfinite(rep.ratio));
    CHECK(tl_moment_scan(s, tf, tg, 1024.0, 1.0, "paper", 1, 20000, &c, &rep) == TL_OK);
    CHECK(rep.M_used < 1.0);
    CHECK(tl_moment_scan(s, tf, tg, 2e6, 1.0, "auto", 1, 20000, &c, &rep)
          == TL_EINSUFFICIENT);

    uint64_t need = 0;
    CHECK(tl_moment_required_limit(s, f, g, 1024.0, 1.0, &need) == TL_OK);
    CHECK(need > 1000);

    // verification subset through the API
    int failures = -1;
    struct Counter {
        int seen = 0;
        static void cb(const tl_oracle_outcome* o, void* me) {
            ++static_cast<Counter*>(me)->seen;
            if (!o->pass) std::fprintf(stderr, "oracle failed: %s\n", o->name);
        }
    } counter;
    CHECK(tl_verify("tau,gamma", "coeff-cache", Counter::cb, &counter, &failures) == TL_OK);
    CHECK(failures == 0);
    CHECK(counter.seen >= 3);

    tl_session_free(s);
    tl_table_free(tf);
    tl_table_free(tg);
    tl_form_free(f);
    tl_form_free(g);

    if (g_fail == 0) std::printf("capi: all checks passed\n");
    return g_fail == 0 ? 0 : 1;
}
