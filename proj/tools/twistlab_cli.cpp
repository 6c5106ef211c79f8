// twistlab command line front end.  Everything goes through the C API in
// twistlab.h; the CLI owns argument parsing, CSV formatting and exit codes:
//   0 success, 1 usage, 2 numeric failure, 3 verification failure.

#include "twistlab.h"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

namespace {

struct FormDeleter {
    void operator()(tl_form* f) const { tl_form_free(f); }
};
struct TableDeleter {
    void operator()(tl_table* t) const { tl_table_free(t); }
};
struct SessionDeleter {
    void operator()(tl_session* s) const { tl_session_free(s); }
};
using FormPtr = std::unique_ptr<tl_form, FormDeleter>;
using TablePtr = std::unique_ptr<tl_table, TableDeleter>;
using SessionPtr = std::unique_ptr<tl_session, SessionDeleter>;

int exit_code(tl_status st, bool verifying = false) {
    switch (st) {
        case TL_OK: return 0;
        case TL_EUSAGE: return 1;
        case TL_EVERIFY: return 3;
        case TL_EIO: return verifying ? 3 : 2;
        default: return 2;
    }
}

int fail(tl_status st, bool verifying = false) {
    std::fprintf(stderr, "error: %s\n", tl_last_error());
    return exit_code(st, verifying);
}

// FNV-1a of the canonical config string; identical configs hash identically
uint64_t config_hash(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct Output {
    std::FILE* f = stdout;
    bool owned = false;

    explicit Output(const std::string& path) {
        if (!path.empty()) {
            f = std::fopen(path.c_str(), "wb");
            owned = f != nullptr;
            if (!f) {
                std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
                f = stdout;
            }
        }
    }
    ~Output() {
        if (owned) std::fclose(f);
    }
    bool ok() const { return !owned || f != stdout; }
};

FormPtr open_form(const std::string& label) {
    FormPtr f(tl_form_builtin(label.c_str()));
    if (!f) std::fprintf(stderr, "error: %s\n", tl_last_error());
    return f;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"twistlab: central derivatives of quadratic twists of modular "
                 "L-functions, exact-identity checks, and moment scans"};
    app.set_config("--config");
    app.require_subcommand(1);
    app.fallthrough(); // global flags are accepted after the subcommand too

    std::string cache_dir = "coeff-cache";
    app.add_option("--cache-dir", cache_dir, "coefficient cache directory");

    // ---- coeffs -----------------------------------------------------------
    auto* c_coeffs = app.add_subcommand("coeffs", "build/update a coefficient cache");
    std::string co_form = "11a", co_out;
    uint32_t co_limit = 100000;
    c_coeffs->add_option("--form", co_form, "form label");
    c_coeffs->add_option("--limit", co_limit, "coefficient limit")->required();
    c_coeffs->add_option("--out", co_out, "explicit output path (default: cache dir)");

    // ---- lprime -----------------------------------------------------------
    auto* c_lprime = app.add_subcommand("lprime", "evaluate L'(1/2, f x chi_{8d})");
    std::string lp_form = "11a", lp_out;
    long long lp_d = 0;
    double lp_Z = 1.0;
    uint32_t lp_limit = 0;
    c_lprime->add_option("--form", lp_form, "form label");
    c_lprime->add_option("--d", lp_d, "twist parameter d (odd squarefree, coprime to 2q)")
        ->required();
    c_lprime->add_option("--Z", lp_Z, "AFE balance parameter Z");
    c_lprime->add_option("--limit", lp_limit, "coefficient limit override");
    c_lprime->add_option("--out", lp_out, "output path (default stdout)");

    // ---- constants ---------------------------------------------------------
    auto* c_const = app.add_subcommand("constants", "Theorem constants C0, C1 and factors");
    std::string ct_f = "11a", ct_g = "17a", ct_out;
    uint32_t ct_cutoff = 100000, ct_limit = 0;
    c_const->add_option("--f", ct_f, "first form");
    c_const->add_option("--g", ct_g, "second form");
    c_const->add_option("--prime-cutoff", ct_cutoff, "Euler product cutoff");
    c_const->add_option("--limit", ct_limit, "coefficient limit override");
    c_const->add_option("--out", ct_out, "output path");

    // ---- moment -------------------------------------------------------------
    auto* c_mom = app.add_subcommand("moment", "empirical moment scan over an X ladder");
    std::string mo_f = "11a", mo_g = "17a", mo_M = "auto", mo_out;
    double mo_X = 65536.0, mo_Z = 1.0;
    unsigned mo_ladder = 1, mo_workers = 0;
    uint32_t mo_cutoff = 100000, mo_limit = 0;
    c_mom->add_option("--f", mo_f, "first form");
    c_mom->add_option("--g", mo_g, "second form");
    c_mom->add_option("--X", mo_X, "largest scale X in the ladder")->required();
    c_mom->add_option("--ladder", mo_ladder, "number of X values (X/2^{j}, ascending)");
    c_mom->add_option("--Z", mo_Z, "AFE balance parameter");
    c_mom->add_option("--M", mo_M, "A/B split scale policy: auto | paper | <value>");
    c_mom->add_option("--prime-cutoff", mo_cutoff, "Euler cutoff for the predicted constants");
    c_mom->add_option("--limit", mo_limit, "coefficient limit override");
    c_mom->add_option("--workers", mo_workers, "worker threads (0 = hardware)");
    c_mom->add_option("--out", mo_out, "CSV output path");

    // ---- verify ---------------------------------------------------------------
    auto* c_ver = app.add_subcommand("verify", "run the oracle verification suite");
    std::string ve_suite = "all";
    c_ver->add_option("--suite", ve_suite, "all or a comma list: gauss,g4k,points,tau,"
                                           "gamma,fourier,poisson,zseries,eta");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors exit 1; --help exits 0
    }

    // ---- coeffs -----------------------------------------------------------
    if (c_coeffs->parsed()) {
        FormPtr f = open_form(co_form);
        if (!f) return 1;
        TablePtr t(tl_table_build(f.get(), co_limit));
        if (!t) return fail(TL_ENUMERIC);
        std::string path = co_out.empty()
            ? cache_dir + "/" + co_form + "_" + std::to_string(co_limit) + ".coeffs"
            : co_out;
        tl_status st = tl_table_save(t.get(), path.c_str());
        if (st != TL_OK) return fail(st);
        std::printf("%s: %u coefficients\n", path.c_str(), tl_table_limit(t.get()));
        return 0;
    }

    // ---- lprime -----------------------------------------------------------
    if (c_lprime->parsed()) {
        FormPtr f = open_form(lp_form);
        if (!f) return 1;
        tl_status st = tl_check_d(f.get(), lp_d);
        if (st != TL_OK) return fail(st);
        SessionPtr s(tl_session_new());

        uint64_t need = 0;
        if ((st = tl_moment_required_limit(s.get(), f.get(), f.get(), 4.0 * double(lp_d),
                                           lp_Z, &need)) != TL_OK)
            return fail(st);
        uint32_t limit = lp_limit ? lp_limit : uint32_t(need);
        TablePtr t(tl_table_cached(f.get(), limit, cache_dir.c_str()));
        if (!t) return fail(TL_EIO);

        std::string cfg = "lprime|" + lp_form + "|" + std::to_string(lp_d) + "|"
                        + std::to_string(lp_Z) + "|" + std::to_string(limit);
        Output out(lp_out);
        int omega = 0;
        if ((st = tl_root_number(f.get(), lp_d, &omega)) != TL_OK) return fail(st);
        std::fprintf(out.f, "# %s config=%016" PRIx64
                            " columns=label,d,Z,omega,value,terms_used,tail_bound\n",
                     tl_version(), config_hash(cfg));
        if (omega == -1) {
            tl_lvalue v{};
            if ((st = tl_lprime(s.get(), t.get(), lp_d, lp_Z, &v)) != TL_OK)
                return fail(st);
            std::fprintf(out.f, "%s,%lld,%.17g,%d,%.17g,%" PRId64 ",%.3g\n",
                         lp_form.c_str(), lp_d, lp_Z, omega, v.value, v.terms_used,
                         v.tail_bound);
        } else {
            double combo = 0, resid = 0;
            double zp = lp_Z != 1.0 ? lp_Z : 2.0;
            if ((st = tl_afe_vanishing(s.get(), t.get(), lp_d, zp, &combo, &resid)) != TL_OK)
                return fail(st);
            std::fprintf(out.f,
                         "# omega=+1: L'(1/2) is not produced by this combination; "
                         "AFE vanishing diagnostic at Z=%g\n", zp);
            std::fprintf(out.f, "%s,%lld,%.17g,%d,combo=%.3g,resid=%.3g\n",
                         lp_form.c_str(), lp_d, zp, omega, combo, resid);
        }
        return 0;
    }

    // ---- constants ---------------------------------------------------------
    if (c_const->parsed()) {
        if (ct_f == ct_g) {
            std::fprintf(stderr, "error: constants need two distinct forms "
                                 "(f = g makes L(s, f x g) singular at s = 1)\n");
            return 1;
        }
        FormPtr f = open_form(ct_f), g = open_form(ct_g);
        if (!f || !g) return 1;
        uint32_t limit = ct_limit ? ct_limit
                                  : std::max<uint32_t>(ct_cutoff, 100000);
        TablePtr tf(tl_table_cached(f.get(), limit, cache_dir.c_str()));
        TablePtr tg(tl_table_cached(g.get(), limit, cache_dir.c_str()));
        if (!tf || !tg) return fail(TL_EIO);
        SessionPtr s(tl_session_new());
        tl_constants c{};
        tl_status st = tl_compute_constants(s.get(), tf.get(), tg.get(), ct_cutoff, &c);
        if (st != TL_OK) return fail(st);

        std::string cfg = "constants|" + ct_f + "|" + ct_g + "|"
                        + std::to_string(ct_cutoff) + "|" + std::to_string(limit);
        Output out(ct_out);
        std::fprintf(out.f, "# %s config=%016" PRIx64 " columns=name,value\n",
                     tl_version(), config_hash(cfg));
        std::fprintf(out.f, "L_sym2_f,%.17g\n", c.L_sym2_f);
        std::fprintf(out.f, "L_sym2_g,%.17g\n", c.L_sym2_g);
        std::fprintf(out.f, "L_fg,%.17g\n", c.L_fg);
        std::fprintf(out.f, "Zstar00,%.17g\n", c.Zstar00);
        std::fprintf(out.f, "Zstar_du,%.17g\n", c.Zstar_du);
        std::fprintf(out.f, "Zstar_dv,%.17g\n", c.Zstar_dv);
        std::fprintf(out.f, "Fcheck0,%.17g\n", c.Fcheck0);
        std::fprintf(out.f, "C0,%.17g\n", c.C0);
        std::fprintf(out.f, "C1,%.17g\n", c.C1);
        std::fprintf(out.f, "C1_cross,%.17g\n", c.C1_cross);
        std::fprintf(out.f, "prime_cutoff,%u\n", c.prime_cutoff);
        return 0;
    }

    // ---- moment -------------------------------------------------------------
    if (c_mom->parsed()) {
        if (mo_f == mo_g) {
            std::fprintf(stderr, "error: moment scan needs two distinct forms\n");
            return 1;
        }
        FormPtr f = open_form(mo_f), g = open_form(mo_g);
        if (!f || !g) return 1;
        SessionPtr s(tl_session_new());

        uint64_t need = 0;
        tl_status st = tl_moment_required_limit(s.get(), f.get(), g.get(), mo_X, mo_Z, &need);
        if (st != TL_OK) return fail(st);
        if (mo_limit && mo_limit < need) {
            std::fprintf(stderr,
                         "error: insufficient coefficients: the scan at X=%g needs "
                         "limit >= %" PRIu64 " (got --limit %u)\n", mo_X, need, mo_limit);
            return 2;
        }
        uint32_t limit = mo_limit ? mo_limit : uint32_t(std::max<uint64_t>(need, mo_cutoff));
        TablePtr tf(tl_table_cached(f.get(), limit, cache_dir.c_str()));
        TablePtr tg(tl_table_cached(g.get(), limit, cache_dir.c_str()));
        if (!tf || !tg) return fail(TL_EIO);

        tl_constants c{};
        if ((st = tl_compute_constants(s.get(), tf.get(), tg.get(), mo_cutoff, &c)) != TL_OK)
            return fail(st);

        unsigned workers = mo_workers;
        if (workers == 0) workers = 2;

        std::string cfg = "moment|" + mo_f + "|" + mo_g + "|" + std::to_string(mo_X) + "|"
                        + std::to_string(mo_ladder) + "|" + std::to_string(mo_Z) + "|" + mo_M
                        + "|" + std::to_string(mo_cutoff) + "|" + std::to_string(limit);
        Output out(mo_out);
        std::fprintf(out.f, "# %s config=%016" PRIx64
                            " columns=X,count_d,empirical,predicted_leading,"
                            "predicted_two_term,ratio,M_used\n",
                     tl_version(), config_hash(cfg));
        for (unsigned j = 0; j < mo_ladder; ++j) {
            double Xj = mo_X / double(1u << (mo_ladder - 1 - j));
            if (Xj < 16.0) continue;
            tl_moment_report rep{};
            if ((st = tl_moment_scan(s.get(), tf.get(), tg.get(), Xj, mo_Z, mo_M.c_str(),
                                     workers, mo_cutoff, &c, &rep)) != TL_OK)
                return fail(st);
            std::fprintf(out.f, "%.17g,%" PRId64 ",%.17g,%.17g,%.17g,%.17g,%.17g\n",
                         rep.X, rep.count_d, rep.empirical, rep.predicted_leading,
                         rep.predicted_two_term, rep.ratio, rep.M_used);
            std::fflush(out.f);
        }
        return 0;
    }

    // ---- verify ---------------------------------------------------------------
    if (c_ver->parsed()) {
        std::printf("# %s verification suite: %s\n", tl_version(), ve_suite.c_str());
        auto cb = [](const tl_oracle_outcome* o, void*) {
            std::printf("%-4s %-72s fast=%.12g oracle=%.12g tol=%g\n",
                        o->pass ? "ok" : "FAIL", o->name, o->fast, o->oracle, o->tolerance);
        };
        int failures = 0;
        tl_status st = tl_verify(ve_suite.c_str(), cache_dir.c_str(), cb, nullptr, &failures);
        if (st == TL_OK) {
            std::printf("all oracle pairs passed\n");
            return 0;
        }
        std::fprintf(stderr, "error: %s\n", tl_last_error());
        return exit_code(st, true);
    }

    return 1;
}
