/* twistlab C API: numerical toolkit for central derivatives of quadratic
 * twists of modular L-functions.
 *
 * All functions that can fail return tl_status (or NULL for constructors)
 * and leave a message retrievable with tl_last_error().  Handles are opaque
 * and freed with their tl_*_free function.  A tl_session owns the smooth
 * kernels and cached cutoff tables; coefficient tables are immutable once
 * built and may be shared across threads.
 */
#ifndef TWISTLAB_H
#define TWISTLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
    TL_OK = 0,
    TL_EUSAGE = 1,        /* bad arguments / configuration */
    TL_ENUMERIC = 2,      /* numeric failure (quadrature, singular factor) */
    TL_EVERIFY = 3,       /* verification suite reported failures */
    TL_EINSUFFICIENT = 4, /* coefficient table too short; see tl_last_error */
    TL_EIO = 5            /* file I/O or cache validation failure */
} tl_status;

typedef struct tl_form tl_form;
typedef struct tl_table tl_table;
typedef struct tl_session tl_session;

const char* tl_version(void);
const char* tl_last_error(void);

/* ---- forms and coefficient tables ------------------------------------- */

tl_form* tl_form_builtin(const char* label); /* "11a", "17a", "delta" */
void tl_form_free(tl_form* f);
long long tl_form_level(const tl_form* f);
int tl_form_weight(const tl_form* f);
int tl_form_eta(const tl_form* f);
const char* tl_form_label(const tl_form* f);

tl_table* tl_table_build(const tl_form* f, uint32_t limit);
/* load-or-build against a cache directory (dir may be "" to disable) */
tl_table* tl_table_cached(const tl_form* f, uint32_t limit, const char* cache_dir);
tl_table* tl_table_load(const tl_form* f, const char* path);
tl_status tl_table_save(const tl_table* t, const char* path);
void tl_table_free(tl_table* t);
uint32_t tl_table_limit(const tl_table* t);
double tl_table_lambda(const tl_table* t, uint32_t n);

/* ---- session (kernels + cutoff tables) --------------------------------- */

tl_session* tl_session_new(void);
void tl_session_free(tl_session* s);

/* ---- family membership and the AFE ------------------------------------- */

/* 0 when d qualifies; otherwise TL_EUSAGE and the reason in tl_last_error */
tl_status tl_check_d(const tl_form* f, long long d);
/* root number -1/+1 via *omega */
tl_status tl_root_number(const tl_form* f, long long d, int* omega);

typedef struct tl_lvalue {
    double value;
    double tail_bound;
    int64_t terms_used;
    int omega;
} tl_lvalue;

/* L'(1/2, f x chi_{8d}); requires omega = -1 */
tl_status tl_lprime(tl_session* s, const tl_table* t, long long d, double Z,
                    tl_lvalue* out);

/* omega = +1 diagnostic: the AFE combination and its relative residual */
tl_status tl_afe_vanishing(tl_session* s, const tl_table* t, long long d,
                           double Zprobe, double* combo, double* resid);

/* ---- constants ----------------------------------------------------------- */

typedef struct tl_constants {
    double L_sym2_f, L_sym2_g, L_fg;
    double Zstar00, Zstar_du, Zstar_dv;
    double C0, C1, C1_cross;
    double Fcheck0;
    uint32_t prime_cutoff;
} tl_constants;

tl_status tl_compute_constants(tl_session* s, const tl_table* f, const tl_table* g,
                               uint32_t prime_cutoff, tl_constants* out);

/* ---- moment scan ----------------------------------------------------------- */

typedef struct tl_moment_report {
    double X;
    int64_t count_d;
    double empirical;
    double predicted_leading;
    double predicted_two_term;
    double ratio;
    double M_used;
} tl_moment_report;

/* m_policy: "auto", "paper", or a decimal value */
tl_status tl_moment_scan(tl_session* s, const tl_table* f, const tl_table* g,
                         double X, double Z, const char* m_policy, unsigned workers,
                         uint32_t prime_cutoff, const tl_constants* constants,
                         tl_moment_report* out);

/* coefficient-table length the scan would need (checked before any work) */
tl_status tl_moment_required_limit(tl_session* s, const tl_form* f, const tl_form* g,
                                   double X, double Z, uint64_t* limit);

tl_status tl_qualifying_ds(const tl_form* f, const tl_form* g, double X,
                           long long* buf, size_t cap, size_t* count);

/* ---- verification ----------------------------------------------------------- */

typedef struct tl_oracle_outcome {
    char name[120];
    double fast;
    double oracle;
    double tolerance;
    int pass;
} tl_oracle_outcome;

typedef void (*tl_outcome_cb)(const tl_oracle_outcome* outcome, void* user);

/* runs the mirrored fast/oracle pairs; returns TL_EVERIFY when any fail */
tl_status tl_verify(const char* selection, const char* cache_dir,
                    tl_outcome_cb cb, void* user, int* failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TWISTLAB_H */
