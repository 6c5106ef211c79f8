#include "twistlab.h"

#include "twistlab/forms.hpp"
#include "twistlab/lfun.hpp"
#include "twistlab/moments.hpp"
#include "twistlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

using namespace twistlab;

struct tl_form {
    NewformSpec spec;
};
struct tl_table {
    CoefficientTable table;
};
struct tl_session {
    KernelSet kernels;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
tl_status guard(Fn&& fn) {
    try {
        fn();
        return TL_OK;
    } catch (const InsufficientCoefficients& e) {
        set_error(e.what());
        return TL_EINSUFFICIENT;
    } catch (const NumericFailure& e) {
        set_error(e.what());
        return TL_ENUMERIC;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return TL_EUSAGE;
    } catch (const std::exception& e) {
        set_error(e.what());
        return TL_EIO;
    }
}

template <typename Fn>
auto guard_ptr(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

MomentConfig parse_moment_config(double X, double Z, const char* m_policy,
                                 unsigned workers, uint32_t prime_cutoff) {
    MomentConfig cfg;
    cfg.X = X;
    cfg.Z = Z;
    cfg.workers = workers;
    cfg.prime_cutoff = prime_cutoff;
    std::string mp = m_policy ? m_policy : "auto";
    if (mp == "auto") {
        cfg.m_policy = MPolicy::auto_scale;
    } else if (mp == "paper") {
        cfg.m_policy = MPolicy::paper;
    } else {
        cfg.m_policy = MPolicy::explicit_value;
        cfg.m_explicit = std::stod(mp);
        if (!(cfg.m_explicit > 0))
            throw std::invalid_argument("M must be positive");
    }
    return cfg;
}

} // namespace

extern "C" {

const char* tl_version(void) { return "twistlab 1.0.0"; }
const char* tl_last_error(void) { return g_last_error.c_str(); }

tl_form* tl_form_builtin(const char* label) {
    return guard_ptr([&]() -> tl_form* {
        return new tl_form{builtin_form(label ? label : "")};
    });
}

void tl_form_free(tl_form* f) { delete f; }
long long tl_form_level(const tl_form* f) { return f->spec.level; }
int tl_form_weight(const tl_form* f) { return f->spec.weight; }
int tl_form_eta(const tl_form* f) { return f->spec.eta; }
const char* tl_form_label(const tl_form* f) { return f->spec.label.c_str(); }

tl_table* tl_table_build(const tl_form* f, uint32_t limit) {
    return guard_ptr([&]() -> tl_table* {
        return new tl_table{build_table(f->spec, limit)};
    });
}

tl_table* tl_table_cached(const tl_form* f, uint32_t limit, const char* cache_dir) {
    return guard_ptr([&]() -> tl_table* {
        return new tl_table{cached_table(f->spec, limit, cache_dir ? cache_dir : "")};
    });
}

tl_table* tl_table_load(const tl_form* f, const char* path) {
    return guard_ptr([&]() -> tl_table* {
        return new tl_table{read_coeff_cache(f->spec, path)};
    });
}

tl_status tl_table_save(const tl_table* t, const char* path) {
    return guard([&] { write_coeff_cache(t->table, path); });
}

void tl_table_free(tl_table* t) { delete t; }
uint32_t tl_table_limit(const tl_table* t) { return t->table.limit(); }

double tl_table_lambda(const tl_table* t, uint32_t n) {
    if (n == 0 || n > t->table.limit()) return 0.0;
    return t->table(n);
}

tl_session* tl_session_new(void) {
    return guard_ptr([]() -> tl_session* { return new tl_session{}; });
}
void tl_session_free(tl_session* s) { delete s; }

tl_status tl_check_d(const tl_form* f, long long d) {
    auto why = qualify_reason(f->spec, d);
    if (why.empty()) return TL_OK;
    set_error(why);
    return TL_EUSAGE;
}

tl_status tl_root_number(const tl_form* f, long long d, int* omega) {
    return guard([&] { *omega = root_number(f->spec, d); });
}

tl_status tl_lprime(tl_session* s, const tl_table* t, long long d, double Z,
                    tl_lvalue* out) {
    return guard([&] {
        auto v = lprime_central(t->table, s->kernels, d, Z);
        out->value = v.value;
        out->tail_bound = v.tail_bound;
        out->terms_used = int64_t(v.terms_used);
        out->omega = -1;
    });
}

tl_status tl_afe_vanishing(tl_session* s, const tl_table* t, long long d,
                           double Zprobe, double* combo, double* resid) {
    return guard([&] {
        const auto& form = t->table.form();
        int om = root_number(form, d);
        if (om != 1)
            throw std::invalid_argument("vanishing diagnostic applies to omega = +1");
        const WTable& wZ = s->kernels.wtable(form, Zprobe);
        const WTable& wZi = s->kernels.wtable(form, 1.0 / Zprobe);
        auto sums = afe_sums(t->table, wZ, wZi, d);
        *combo = sums.s_z - sums.s_zinv;
        *resid = std::fabs(*combo) / std::max(1e-30, std::fabs(sums.s_z));
    });
}

tl_status tl_compute_constants(tl_session* s, const tl_table* f, const tl_table* g,
                               uint32_t prime_cutoff, tl_constants* out) {
    return guard([&] {
        auto r = compute_constants(f->table, g->table, s->kernels, prime_cutoff);
        out->L_sym2_f = r.L_sym2_f;
        out->L_sym2_g = r.L_sym2_g;
        out->L_fg = r.L_fg;
        out->Zstar00 = r.Zstar00;
        out->Zstar_du = r.Zstar_du;
        out->Zstar_dv = r.Zstar_dv;
        out->C0 = r.C0;
        out->C1 = r.C1;
        out->C1_cross = r.C1_cross;
        out->Fcheck0 = r.Fcheck0;
        out->prime_cutoff = r.prime_cutoff;
    });
}

tl_status tl_moment_scan(tl_session* s, const tl_table* f, const tl_table* g,
                         double X, double Z, const char* m_policy, unsigned workers,
                         uint32_t prime_cutoff, const tl_constants* constants,
                         tl_moment_report* out) {
    return guard([&] {
        MomentConfig cfg = parse_moment_config(X, Z, m_policy, workers, prime_cutoff);
        ConstantsReport cr;
        cr.C0 = constants->C0;
        cr.C1 = constants->C1;
        auto rep = moment_scan(cfg, f->table, g->table, s->kernels, cr);
        out->X = rep.X;
        out->count_d = rep.count_d;
        out->empirical = rep.empirical;
        out->predicted_leading = rep.predicted_leading;
        out->predicted_two_term = rep.predicted_two_term;
        out->ratio = rep.ratio;
        out->M_used = rep.M_used;
    });
}

tl_status tl_moment_required_limit(tl_session* s, const tl_form* f, const tl_form* g,
                                   double X, double Z, uint64_t* limit) {
    return guard([&] {
        MomentConfig cfg;
        cfg.X = X;
        cfg.Z = Z;
        *limit = moment_required_limit(cfg, f->spec, g->spec, s->kernels);
    });
}

tl_status tl_qualifying_ds(const tl_form* f, const tl_form* g, double X,
                           long long* buf, size_t cap, size_t* count) {
    return guard([&] {
        auto ds = qualifying_ds(X, f->spec, g->spec);
        *count = ds.size();
        size_t n = std::min(cap, ds.size());
        for (size_t i = 0; i < n; ++i) buf[i] = ds[i];
    });
}

tl_status tl_verify(const char* selection, const char* cache_dir,
                    tl_outcome_cb cb, void* user, int* failures) {
    int nf = 0;
    tl_status st = guard([&] {
        auto outcomes = run_suite(selection ? selection : "all",
                                  cache_dir ? cache_dir : "");
        for (const auto& o : outcomes) {
            if (cb) {
                tl_oracle_outcome c{};
                std::snprintf(c.name, sizeof c.name, "%s", o.name.c_str());
                c.fast = o.fast;
                c.oracle = o.oracle;
                c.tolerance = o.tolerance;
                c.pass = o.pass ? 1 : 0;
                cb(&c, user);
            }
            if (!o.pass) ++nf;
        }
    });
    if (failures) *failures = nf;
    if (st != TL_OK) return st;
    if (nf > 0) {
        set_error(std::to_string(nf) + " oracle pair(s) failed");
        return TL_EVERIFY;
    }
    return TL_OK;
}

} // extern "C"
