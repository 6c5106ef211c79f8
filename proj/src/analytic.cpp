#include "twistlab/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace twistlab {

// ---------------------------------------------------------------------------
// special functions
// ---------------------------------------------------------------------------

double digamma(double x) {
    if (x <= 0) throw std::invalid_argument("digamma: x <= 0");
    double acc = 0.0;
    while (x < 12.0) { acc -= 1.0 / x; x += 1.0; }
    double inv = 1.0 / x, inv2 = inv * inv;
    // asymptotic series, |error| < 3e-15 for x >= 12
    double s = std::log(x) - 0.5 * inv
             - inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252
             - inv2 * (1.0 / 240 - inv2 * (1.0 / 132)))));
    return acc + s;
}

cdouble lgamma_complex(cdouble z) {
    // Lanczos, g = 7, 9 terms; Re z > 0
    static const double g = 7.0;
    static const double coef[9] = {
        0.99999999999980993,    676.5203681218851,    -1259.1392167224028,
        771.32342877765313,    -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.45) {
        // reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1-z)
        const double pi = 3.1415926535897932384626433832795;
        return std::log(pi) - std::log(std::sin(pi * z)) - lgamma_complex(1.0 - z);
    }
    cdouble zz = z - 1.0;
    cdouble x = coef[0];
    for (int i = 1; i < 9; ++i) x += coef[i] / (zz + double(i));
    cdouble t = zz + g + 0.5;
    return 0.91893853320467274178 /* log sqrt(2 pi) */
         + (zz + 0.5) * std::log(t) - t + std::log(x);
}

// ---------------------------------------------------------------------------
// kernels
// ---------------------------------------------------------------------------

double bump_F(double x) {
    if (x <= 0.5 || x >= 2.0) return 0.0;
    return std::exp(-1.0 / ((x - 0.5) * (2.0 - x)));
}

static double ramp_e(double s) { return s <= 0.0 ? 0.0 : std::exp(-1.0 / s); }

static double sigma_step(double s) {
    // sigma(s) + sigma(1-s) = 1; sigma = 0 for s <= 0, 1 for s >= 1
    double a = ramp_e(s), b = ramp_e(1.0 - s);
    if (a == 0.0) return 0.0;
    if (b == 0.0) return 1.0;
    return a / (a + b);
}

static double rho_ramp(double t) { return sigma_step(4.0 * (t - 0.75)); }

double partition_G(double x) {
    if (x <= 0.75 || x >= 2.0) return 0.0;
    if (x < 1.0) return rho_ramp(x);
    if (x <= 1.5) return 1.0;
    return 1.0 - rho_ramp(0.5 * x);
}

double window_V(double x) {
    return partition_G(0.5 * x) + partition_G(x) + partition_G(2.0 * x);
}

SupportedFn bump_fn() { return {[](double x) { return bump_F(x); }, 0.5, 2.0}; }

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

// 16-point Gauss-Legendre nodes/weights on [-1,1]
static const double gl_x[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
static const double gl_w[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename Fn>
static double gl_panels(Fn&& f, double a, double b, double panel_w) {
    int n = std::max(1, int(std::ceil((b - a) / panel_w)));
    double w = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double lo = a + i * w, mid = lo + 0.5 * w, half = 0.5 * w;
        double ps = 0.0;
        for (int j = 0; j < 8; ++j)
            ps += gl_w[j] * (f(mid + half * gl_x[j]) + f(mid - half * gl_x[j]));
        s += ps * half;
    }
    return s;
}

double integrate(const SupportedFn& fn) {
    return gl_panels(fn.f, fn.lo, fn.hi, (fn.hi - fn.lo) / 24.0);
}

std::pair<double, double> fourier_cos_sin(const SupportedFn& fn, double y) {
    const double two_pi = 6.283185307179586476925286766559;
    double panel = (fn.hi - fn.lo) / 24.0;
    if (std::fabs(y) > 1.0) panel = std::min(panel, 1.0 / (8.0 * std::fabs(y)));
    int n = std::max(1, int(std::ceil((fn.hi - fn.lo) / panel)));
    double w = (fn.hi - fn.lo) / n;
    double c = 0.0, s = 0.0;
    for (int i = 0; i < n; ++i) {
        double lo = fn.lo + i * w, mid = lo + 0.5 * w, half = 0.5 * w;
        double pc = 0.0, ps = 0.0;
        for (int j = 0; j < 8; ++j) {
            for (double x : {mid + half * gl_x[j], mid - half * gl_x[j]}) {
                double fv = fn.f(x);
                if (fv == 0.0) continue;
                double a = two_pi * x * y;
                pc += gl_w[j] * fv * std::cos(a);
                ps += gl_w[j] * fv * std::sin(a);
            }
        }
        c += pc * half;
        s += ps * half;
    }
    return {c, s};
}

double fourier_check(const SupportedFn& fn, double y) {
    auto [c, s] = fourier_cos_sin(fn, y);
    return c + s;
}

cdouble mellin(const SupportedFn& fn, cdouble s) {
    if (fn.lo <= 0)
        throw std::invalid_argument("mellin: support must lie in (0,inf)");
    // integrate in tau = log x; oscillation frequency |Im s|
    double la = std::log(fn.lo), lb = std::log(fn.hi);
    double panel = (lb - la) / 24.0;
    double im = std::fabs(s.imag());
    if (im > 1.0) panel = std::min(panel, 6.283185307179586 / (8.0 * im));
    double re = 0.0, imacc = 0.0;
    auto fr = [&](double t) {
        double x = std::exp(t);
        double mag = fn.f(x) * std::exp(s.real() * t);
        return mag * std::cos(s.imag() * t);
    };
    auto fi = [&](double t) {
        double x = std::exp(t);
        double mag = fn.f(x) * std::exp(s.real() * t);
        return mag * std::sin(s.imag() * t);
    };
    re = gl_panels(fr, la, lb, panel);
    imacc = gl_panels(fi, la, lb, panel);
    return {re, imacc};
}

double fourier_via_mellin(const SupportedFn& fn, double y, double c, double T, double h) {
    const double pi = 3.1415926535897932384626433832795;
    if (y == 0.0) return integrate(fn); // cos(0)+sin(0) = 1
    double sgn = y > 0 ? 1.0 : -1.0;
    double ay = std::fabs(y);
    // Gamma(s)(cos + sgn sin)(pi s/2) assembled in exponential form,
    //   cos z + sgn sin z = (1 - sgn i)/2 e^{iz} + (1 + sgn i)/2 e^{-iz},
    // so the e^{pi t/2} growth cancels against the Gamma decay instead of
    // overflowing.
    auto node = [&](double t) -> cdouble {
        cdouble s(c, t);
        cdouble ft = mellin(fn, 1.0 - s);
        cdouble lg = lgamma_complex(s);
        cdouble iz = cdouble(0.0, 1.0) * (0.5 * pi * s);
        cdouble lpw = -s * std::log(2.0 * pi * ay);
        cdouble a = 0.5 * cdouble(1.0, -sgn) * std::exp(lg + iz + lpw);
        cdouble b = 0.5 * cdouble(1.0, sgn) * std::exp(lg - iz + lpw);
        return ft * (a + b);
    };
    // the bump transforms decay like exp(-c sqrt(t)); extend the line until
    // the integrand stays below target, up to the hard cap T
    double acc = 0.5 * node(0.0).real();
    int quiet = 0;
    for (double t = h; t <= T && quiet < 40; t += h) {
        cdouble v = node(t);
        acc += v.real();
        quiet = std::abs(v) < 1e-11 ? quiet + 1 : 0;
    }
    return acc * h / pi; // (1/2pi) * 2 * Re of the upper half line
}

// ---------------------------------------------------------------------------
// cutoff W_Z
// ---------------------------------------------------------------------------

namespace {

struct ContourNodes {
    double c, h;
    std::vector<cdouble> g; // Gamma(c+it_j+k/2)/Gamma(k/2) (1-(c+it_j)lnZ)/(c+it_j)^2
};

ContourNodes make_nodes(const NewformSpec& form, double Z, double c, double T, double h) {
    ContourNodes out;
    out.c = c;
    out.h = h;
    double halfk = form.weight / 2.0;
    double lgk = std::lgamma(halfk);
    double lz = std::log(Z);
    std::size_t n = std::size_t(std::floor(T / h)) + 1;
    out.g.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        cdouble u(c, h * double(j));
        cdouble w = std::exp(lgamma_complex(u + halfk) - lgk) * (1.0 - u * lz) / (u * u);
        out.g.push_back(w);
    }
    return out;
}

// (1/2pi) int e^{-uL} g(u) |du|  along the contour, L = log(2 pi x/(Z sqrt q))
double contour_sum(const ContourNodes& nd, double L) {
    const double two_pi = 6.283185307179586476925286766559;
    cdouble rot = std::exp(cdouble(0.0, -nd.h * L));
    cdouble ph = std::exp(cdouble(-nd.c * L, 0.0));
    double acc = 0.5 * (nd.g[0] * ph).real();
    for (std::size_t j = 1; j < nd.g.size(); ++j) {
        ph *= rot;
        acc += (nd.g[j] * ph).real();
    }
    return 2.0 * acc * nd.h / two_pi;
}

double small_x_residue(const NewformSpec& form, double x) {
    const double two_pi = 6.283185307179586476925286766559;
    return digamma(form.weight / 2.0)
         + std::log(std::sqrt(double(form.level)) / (two_pi * x));
}

} // namespace

double cutoff_W_contour(const NewformSpec& form, double Z, double x,
                        double c, double T, double h) {
    const double two_pi = 6.283185307179586476925286766559;
    double L = std::log(two_pi * x / (Z * std::sqrt(double(form.level))));
    auto nd = make_nodes(form, Z, c, T, h);
    double v = contour_sum(nd, L);
    if (c < 0) v += small_x_residue(form, x); // residue of the double pole at u = 0
    return v;
}

double cutoff_W(const NewformSpec& form, double Z, double x, const QuadratureSpec& q) {
    if (x <= 0 || Z <= 0) throw std::invalid_argument("cutoff_W: x, Z must be positive");
    const double two_pi = 6.283185307179586476925286766559;
    double scale = Z * std::sqrt(double(form.level)) / two_pi;
    if (x < 0.02 * scale) return cutoff_W_contour(form, Z, x, -0.5, q.T, q.h);
    if (x > 30.0 * scale) return cutoff_W_contour(form, Z, x, 8.0, std::max(q.T, 80.0), q.h);
    return cutoff_W_contour(form, Z, x, q.c, q.T, q.h);
}

WTable::WTable(const NewformSpec& form, double Z, QuadratureSpec quad, std::uint32_t npoints)
    : form_(form), Z_(Z), quad_(quad) {
    if (Z <= 0) throw std::invalid_argument("WTable: Z must be positive");
    const double two_pi = 6.283185307179586476925286766559;
    double scale = Z * std::sqrt(double(form.level)) / two_pi;
    xmin_ = 1e-8 * scale;
    xmax_ = 1e3 * scale;
    lx0_ = std::log(xmin_);
    dlx_ = (std::log(xmax_) - lx0_) / double(npoints - 1);
    val_.resize(npoints);

    auto nd_mid = make_nodes(form, Z, quad.c, quad.T, quad.h);
    auto nd_left = make_nodes(form, Z, -0.5, quad.T, quad.h);
    auto nd_right = make_nodes(form, Z, 8.0, std::max(quad.T, 80.0), quad.h);
    for (std::uint32_t i = 0; i < npoints; ++i) {
        double x = std::exp(lx0_ + dlx_ * i);
        double L = std::log(x / scale);
        if (x < 0.02 * scale)
            val_[i] = small_x_residue(form, x) + contour_sum(nd_left, L);
        else if (x > 30.0 * scale)
            val_[i] = contour_sum(nd_right, L);
        else
            val_[i] = contour_sum(nd_mid, L);
    }

    // right-contour decay constants K_c with |W_Z(x)| <= K_c x^{-c}
    double halfk = form.weight / 2.0;
    double lgk = std::lgamma(halfk);
    double lz = std::log(Z);
    double lscale = std::log(scale);
    for (double c : {4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 20.0, 24.0, 28.0, 32.0, 36.0, 40.0, 44.0}) {
        double T = 2.0 * (c + halfk) + 80.0;
        double h = 0.05;
        double acc = 0.0;
        for (double t = 0.0; t <= T; t += h) {
            cdouble u(c, t);
            double mag = std::exp((lgamma_complex(u + halfk) - lgk).real())
                       * std::abs(1.0 - u * lz) / std::norm(u);
            acc += (t == 0.0) ? 0.5 * mag : mag;
        }
        double Ic = 2.0 * acc * h / (2.0 * 3.1415926535897932);
        // K_c in log form: |W(x)| <= exp(lK) * x^{-c}, absorbing the scale
        tail_c_.push_back(c);
        tail_K_.push_back(std::log(Ic) + c * lscale);
    }
}

double WTable::eval_direct(double x) const { return cutoff_W(form_, Z_, x, quad_); }

double WTable::operator()(double x) const {
    if (!(x > 0)) throw std::invalid_argument("WTable: x must be positive");
    double lx = std::log(x);
    double fidx = (lx - lx0_) / dlx_;
    if (fidx < 1.0 || fidx > double(val_.size()) - 3.0) return eval_direct(x);
    std::size_t j = std::size_t(fidx);
    double u = fidx - double(j); // in [0,1), nodes j-1..j+2
    double ym1 = val_[j - 1], y0 = val_[j], y1 = val_[j + 1], y2 = val_[j + 2];
    // cubic Lagrange on equally spaced nodes
    double a = -u * (u - 1.0) * (u - 2.0) / 6.0;
    double b = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    double cc = -(u + 1.0) * u * (u - 2.0) / 2.0;
    double d = (u + 1.0) * u * (u - 1.0) / 6.0;
    return a * ym1 + b * y0 + cc * y1 + d * y2;
}

double WTable::tail_bound(double D, std::uint64_t N) const {
    // sum_{n>N} d(n) n^{-1/2} |W(n/D)| <= 2 K_c D^c sum_{n>N} n^{-c}
    //                                  <= 2 K_c D^c N^{1-c} (1 + c/N)/(c-1)
    double best = HUGE_VAL;
    double lD = std::log(D), lN = std::log(double(N));
    for (std::size_t i = 0; i < tail_c_.size(); ++i) {
        double c = tail_c_[i];
        double lt = std::log(2.0) + tail_K_[i] + c * lD + (1.0 - c) * lN
                  - std::log(c - 1.0) + std::log1p(c / double(N));
        best = std::min(best, lt);
    }
    return std::exp(best);
}

std::uint64_t WTable::required_terms(double D, double tol) const {
    double best = HUGE_VAL;
    double lD = std::log(D);
    for (std::size_t i = 0; i < tail_c_.size(); ++i) {
        double c = tail_c_[i];
        // solve 2 K_c D^c N^{1-c}/(c-1) = tol
        double lN = (std::log(2.0) + tail_K_[i] + c * lD - std::log(c - 1.0)
                   - std::log(tol)) / (c - 1.0);
        best = std::min(best, lN);
    }
    double N = std::exp(best) * 1.05 + 16.0;
    if (N > 4e9) throw std::runtime_error("WTable: truncation point out of range");
    return std::uint64_t(N);
}

double gamma_factor(const NewformSpec& form, double u) {
    double halfk = form.weight / 2.0;
    const double two_pi = 6.283185307179586476925286766559;
    return std::exp(std::lgamma(u + halfk) - std::lgamma(halfk)
                  - u * std::log(two_pi / std::sqrt(double(form.level))));
}

double gamma_prime_at_zero(const NewformSpec& form) {
    const double two_pi = 6.283185307179586476925286766559;
    return digamma(form.weight / 2.0)
         + std::log(std::sqrt(double(form.level)) / two_pi);
}

} // namespace twistlab
