#ifndef TWISTLAB_ANALYTIC_HPP
#define TWISTLAB_ANALYTIC_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "twistlab/forms.hpp"

namespace twistlab {

using cdouble = std::complex<double>;

// --- special functions -----------------------------------------------------

double digamma(double x);                 // x > 0
cdouble lgamma_complex(cdouble z);        // Re z > 0 (Lanczos)

// --- smooth kernels ---------------------------------------------------------

// F(x) = exp(-1/((x-1/2)(2-x))) on (1/2,2), 0 elsewhere.
double bump_F(double x);

// Partition generator: G = 1 on [1,3/2], supported on [3/4,2], with
// G(x) + G(x/2) = 1 on [1,3]; built from sigma(s) = e(s)/(e(s)+e(1-s)),
// e(s) = exp(-1/s).
double partition_G(double x);

// V(x) = G(x/2) + G(x) + G(2x); V = 1 on [1/2,3], supported on [3/8,4].
double window_V(double x);

// A smooth function together with its support interval.
struct SupportedFn {
    std::function<double(double)> f;
    double lo = 0, hi = 0;
};

SupportedFn bump_fn();

// --- transforms --------------------------------------------------------------

// Plain integral of fn over its support (Gauss-Legendre panels).
double integrate(const SupportedFn& fn);

// Fourier-type transform F^(y) = int (cos(2 pi x y) + sin(2 pi x y)) F(x) dx,
// resolved against the oscillation; absolute accuracy ~1e-10 for smooth fn.
double fourier_check(const SupportedFn& fn, double y);

// The cos- and sin-parts separately (F^(y) = c + s, F^(-y) = c - s).
std::pair<double, double> fourier_cos_sin(const SupportedFn& fn, double y);

// Mellin transform F~(s) = int_0^inf F(x) x^{s-1} dx for fn supported in
// (0, inf).
cdouble mellin(const SupportedFn& fn, cdouble s);

// Mellin-route evaluation of the same Fourier-type transform,
//   F^(y) = (1/2 pi i) int_(c) F~(1-s) Gamma(s) (cos + sgn(y) sin)(pi s/2)
//           (2 pi |y|)^{-s} ds,
// on the vertical line Re s = c.
double fourier_via_mellin(const SupportedFn& fn, double y,
                          double c = 0.5, double T = 900.0, double h = 0.05);

// --- AFE cutoff W_Z ----------------------------------------------------------

struct QuadratureSpec {
    double c = 1.5;   // contour abscissa
    double T = 50.0;  // truncation of Im u
    double h = 0.05;  // trapezoid step
};

// W_Z(x) = (1/2 pi i) int_(c) Gamma(u+k/2)/Gamma(k/2) (2 pi x/(Z sqrt q))^{-u}
//          (1 - u log Z)/u^2 du.
// Contour routing: the residue at u = 0 plus a left contour for small x,
// a right contour for large x; abscissa c in between.  Absolute accuracy
// target 1e-10.
double cutoff_W(const NewformSpec& form, double Z, double x,
                const QuadratureSpec& quad = {});

// Raw single-contour evaluation (no routing); used by the holomorphy checks.
double cutoff_W_contour(const NewformSpec& form, double Z, double x,
                        double c, double T, double h);

// Tabulated cutoff on a geometric grid with cubic interpolation, plus the
// right-contour decay constants used to certify Dirichlet-sum truncation:
// |W_Z(x)| <= K_c x^{-c} for every c > 0 on the grid of exponents.
class WTable {
public:
    WTable(const NewformSpec& form, double Z, QuadratureSpec quad = {},
           std::uint32_t npoints = 4096);

    double operator()(double x) const;
    double eval_direct(double x) const;

    const NewformSpec& form() const { return form_; }
    double Zparam() const { return Z_; }

    // Smallest N such that sum_{n>N} 2 sqrt(n)/sqrt(n) |W(n/D)| is certified
    // <= tol, using |lambda(n)| <= d(n) <= 2 sqrt(n) and the K_c decay.
    std::uint64_t required_terms(double D, double tol) const;
    // Certified bound on the tail beyond N terms.
    double tail_bound(double D, std::uint64_t N) const;

    double grid_min() const { return xmin_; }
    double grid_max() const { return xmax_; }

private:
    NewformSpec form_;
    double Z_;
    QuadratureSpec quad_;
    double xmin_, xmax_, lx0_, dlx_;
    std::vector<double> val_;
    std::vector<double> tail_c_, tail_K_; // decay exponents and constants
};

// gamma_f(u) = Gamma(u + k/2)/Gamma(k/2) (2 pi / sqrt q)^{-u} for real u.
double gamma_factor(const NewformSpec& form, double u);

// gamma_f'(0) = psi(k/2) + log(sqrt(q)/(2 pi)).
double gamma_prime_at_zero(const NewformSpec& form);

} // namespace twistlab

#endif
