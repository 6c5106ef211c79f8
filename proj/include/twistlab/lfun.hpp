#ifndef TWISTLAB_LFUN_HPP
#define TWISTLAB_LFUN_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "twistlab/analytic.hpp"
#include "twistlab/forms.hpp"

namespace twistlab {

// thrown when a coefficient table is too short for a requested evaluation
struct InsufficientCoefficients : std::runtime_error {
    std::uint64_t required;
    explicit InsufficientCoefficients(std::uint64_t need)
        : std::runtime_error("insufficient coefficients: table limit must be at least "
                             + std::to_string(need)),
          required(need) {}
};

struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- kernels ------------------------------------------------------------------

// Smooth kernel bundle: the bump F, partition G, window V, quadrature
// parameters, and cached W_Z tables per (form, Z).  Tables are built on
// first use; call warm() before entering a parallel region.
class KernelSet {
public:
    explicit KernelSet(QuadratureSpec quad = {});

    const QuadratureSpec& quad() const { return quad_; }
    const WTable& wtable(const NewformSpec& form, double Z);
    void warm(const NewformSpec& form, double Z) { (void)wtable(form, Z); }

private:
    QuadratureSpec quad_;
    std::mutex mu_;
    std::map<std::string, std::unique_ptr<WTable>> cache_;
};

// --- twisted central derivative -------------------------------------------------

struct TwistedLValue {
    std::string label;
    long long d = 0;
    double Z = 1.0;
    double value = 0.0;
    std::uint64_t terms_used = 0;
    double tail_bound = 0.0;
};

// Empty string when d qualifies for the family of form (odd, squarefree,
// coprime to 2q); otherwise the reason.
std::string qualify_reason(const NewformSpec& form, long long d);

// omega(f x chi_{8d}) = i^kappa eta chi_{8d}(-q); kappa even keeps it real.
int root_number(const NewformSpec& form, long long d);

// Both smoothed AFE sums sum_n lambda(n) chi_{8d}(n)/sqrt(n) W(n/8d) with the
// cutoffs W_Z and W_{1/Z}; truncation certified by the W tail constants.
struct AfeSums {
    double s_z = 0, s_zinv = 0;
    std::uint64_t terms = 0;
    double tail = 0;
};
AfeSums afe_sums(const CoefficientTable& tab, const WTable& wZ, const WTable& wZinv,
                 long long d, double tol = 1e-8);

// Pre-size the shared factor sieve behind the AFE character evaluation;
// call before a parallel region so workers never trigger growth.
void warm_afe_sieve(std::uint64_t nmax);

// L'(1/2, f x chi_{8d}) for qualifying d with root number -1.
TwistedLValue lprime_central(const CoefficientTable& tab, KernelSet& kernels,
                             long long d, double Z, double tol = 1e-8);

// eta validation: for predicted omega = +1 the AFE combination must vanish;
// for omega = -1 the value must be Z-independent.
struct EtaCheck {
    long long d = 0;
    int omega_pred = 0;
    double resid = 0;
    bool pass = false;
};
struct EtaDiagnostic {
    std::vector<EtaCheck> checks;
    int n_plus = 0, n_minus = 0;
    bool pass = false;
};
EtaDiagnostic validate_eta(const CoefficientTable& tab, KernelSet& kernels,
                           const std::vector<long long>& sample_ds,
                           double Zprobe = 2.0, double tol = 1e-6);

// --- Euler products ---------------------------------------------------------------

// Local L-factors (the factor itself, i.e. 1/denominator); these are the
// single code path shared by the standalone evaluators and zstar_local.
double sym2_local_factor(double s, double lambda_p, bool ramified, double p);
double rs_local_factor(double s, double lf, double lg, bool ram_f, bool ram_g, double p);

struct EulerValue {
    double value = 0;
    double tail_est = 0; // crude log-scale estimate of the neglected factor
};

EulerValue sym2_L_at(double s, const CoefficientTable& t, std::uint32_t prime_cutoff);
EulerValue rankin_selberg_L_at(double s, const CoefficientTable& tf,
                               const CoefficientTable& tg, std::uint32_t prime_cutoff);

// --- Z^*(u,v) ----------------------------------------------------------------------

// Local diagonal sum at odd p divided by the three local L-factors:
//   D_p(u,v) = sum_{a+b = r_p mod 2} lambda_f(p^a) lambda_g(p^b)
//              p^{-a(1/2+u)-b(1/2+v)} w_p(a,b),
// with w_p = p/(p+1) when p | n1 n2 Q and 1 otherwise.
double zstar_local(std::uint64_t p, std::uint32_t r_p, double u, double v,
                   const CoefficientTable& tf, const CoefficientTable& tg);

// Signed four-term combination over Q' in {1, q1, q2, q1 q2}.
double zstar_combined(double u, double v, const CoefficientTable& tf,
                      const CoefficientTable& tg, std::uint32_t prime_cutoff);

// --- Theorem constants ---------------------------------------------------------------

struct ConstantsReport {
    double L_sym2_f = 0, L_sym2_g = 0, L_fg = 0;
    double Zstar00 = 0, Zstar_du = 0, Zstar_dv = 0;
    double C0 = 0, C1 = 0;
    double C1_cross = 0;      // from differentiating the diagonal main term in log M
    double Fcheck0 = 0;
    std::uint32_t prime_cutoff = 0;
};

// hS / hZ: central-difference steps (Richardson-extrapolated) behind the
// L'/L values and the Z^* partials entering C1.
ConstantsReport compute_constants(const CoefficientTable& tf, const CoefficientTable& tg,
                                  KernelSet& kernels, std::uint32_t prime_cutoff,
                                  double hS = 1e-4, double hZ = 1e-3);

// Diagonal main term per unit X:
//   (Fcheck0/2 pi^2) sum_{Q'} sign(Q') sumsum_{n1 n2 Q' square, odd}
//     lambda_f(n1) lambda_g(n2)/sqrt(n1 n2) prod_{p | n1 n2 Q} p/(p+1)
//     W_f(n1/M) W_g(n2/M).
// Used as the independent route behind C1_cross.
double diagonal_main_term(const CoefficientTable& tf, const CoefficientTable& tg,
                          KernelSet& kernels, double M);

// --- Z series (two routes) --------------------------------------------------------------

struct ZSeriesParams {
    double alpha = 2, beta = 2, gamma = 2;
    std::uint64_t a = 1;      // coprimality constraint (n1 n2, 2a) = 1
    long long k1 = 1;         // squarefree, nonzero, possibly negative or even
    std::uint64_t Qprime = 1; // odd positive
    std::uint64_t b = 1;      // chi_b modulus (odd squarefree)
};

struct ZSeriesValue {
    double value = 0;
    double tail_majorant = 0; // divisor-bound majorization of the truncation
    std::uint64_t terms = 0;
};

// Direct truncated triple sum over (k2, n1, n2), Gauss factors from the
// exact table, terms exhausted over the ball n1 n2 <= W.
ZSeriesValue z_series_direct(const ZSeriesParams& P, const CoefficientTable& tf,
                             const CoefficientTable& tg, std::uint64_t W = 2000000,
                             std::uint32_t k2_max = 1001);

// Exact local Euler factor at odd p (direct local summation over the
// k2/n1/n2 exponents with the finite Gauss support).
double z_local_factor(std::uint64_t p, const ZSeriesParams& P,
                      const CoefficientTable& tf, const CoefficientTable& tg);

// Product of local factors over odd p <= prime_cutoff.
ZSeriesValue z_local_product(const ZSeriesParams& P, const CoefficientTable& tf,
                             const CoefficientTable& tg, std::uint32_t prime_cutoff = 1000000);

} // namespace twistlab

#endif
