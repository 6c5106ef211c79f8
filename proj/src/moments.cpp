#include "twistlab/moments.hpp"
#include "twistlab/arith.hpp"
#include "twistlab/gauss.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace twistlab {

std::vector<long long> qualifying_ds(double X, const NewformSpec& f, const NewformSpec& g) {
    if (X < 16.0) throw std::invalid_argument("qualifying_ds: X must be >= 16");
    long long lo = (long long)std::ceil(X / 16.0);
    long long hi = (long long)std::floor(X / 4.0);
    std::vector<long long> out;
    if (hi < 1) return out;
    auto sf = squarefree_sieve(std::uint64_t(hi));
    long long Q2 = 2 * f.level * g.level;
    for (long long d = lo | 1; d <= hi; d += 2) {
        if (!sf[d]) continue;
        if (std::gcd(d, Q2) != 1) continue;
        if (root_number(f, d) != -1) continue;
        if (root_number(g, d) != -1) continue;
        out.push_back(d);
    }
    return out;
}

double resolve_M(const MomentConfig& cfg) {
    double lx = std::log(cfg.X);
    switch (cfg.m_policy) {
        case MPolicy::paper: return cfg.X / std::pow(lx, 100.0);
        case MPolicy::explicit_value: return cfg.m_explicit;
        default: return cfg.X / (lx * lx * lx);
    }
}

std::uint64_t moment_required_limit(const MomentConfig& cfg, const NewformSpec& f,
                                    const NewformSpec& g, KernelSet& kernels) {
    double dmax = std::floor(cfg.X / 4.0);
    double D = 8.0 * dmax;
    std::uint64_t need = 0;
    for (const auto* form : {&f, &g}) {
        for (double Z : {cfg.Z, 1.0 / cfg.Z}) {
            const WTable& w = kernels.wtable(*form, Z);
            need = std::max(need, w.required_terms(D, 0.5e-8));
        }
    }
    return need;
}

MomentReport moment_scan(const MomentConfig& cfg, const CoefficientTable& tf,
                         const CoefficientTable& tg, KernelSet& kernels,
                         const ConstantsReport& constants) {
    MomentReport rep;
    rep.X = cfg.X;
    rep.M_used = resolve_M(cfg);

    std::uint64_t need = moment_required_limit(cfg, tf.form(), tg.form(), kernels);
    if (need > tf.limit() || need > tg.limit())
        throw InsufficientCoefficients(need);
    warm_afe_sieve(need);

    auto ds = qualifying_ds(cfg.X, tf.form(), tg.form());
    rep.count_d = (long long)ds.size();

    // tables are built before the parallel region; workers only read
    const WTable& wfZ = kernels.wtable(tf.form(), cfg.Z);
    const WTable& wfZi = kernels.wtable(tf.form(), 1.0 / cfg.Z);
    const WTable& wgZ = kernels.wtable(tg.form(), cfg.Z);
    const WTable& wgZi = kernels.wtable(tg.form(), 1.0 / cfg.Z);

    std::vector<double> contrib(ds.size(), 0.0);
    std::atomic<std::size_t> next{0};
    unsigned nw = std::max(1u, cfg.workers);
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= ds.size()) break;
            long long d = ds[i];
            auto sf = afe_sums(tf, wfZ, wfZi, d);
            auto sg = afe_sums(tg, wgZ, wgZi, d);
            double lf = sf.s_z + sf.s_zinv;
            double lg = sg.s_z + sg.s_zinv;
            contrib[i] = lf * lg * bump_F(8.0 * double(d) / cfg.X);
        }
    };
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nw; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // fixed-order compensated reduction: identical across worker counts
    double s = 0, c = 0;
    for (double x : contrib) {
        double y = x - c, t = s + y;
        c = (t - s) - y;
        s = t;
    }
    rep.empirical = s;

    double lx = std::log(cfg.X);
    rep.predicted_leading = constants.C0 * cfg.X * lx * lx;
    rep.predicted_two_term = rep.predicted_leading + constants.C1 * cfg.X * lx;
    rep.ratio = rep.empirical / rep.predicted_leading;
    return rep;
}

ABParts ab_decompose(const CoefficientTable& tab, KernelSet& kernels, long long d,
                     double M) {
    if (M <= 0) throw std::invalid_argument("ab_decompose: M must be positive");
    const auto& form = tab.form();
    int omega = root_number(form, d);
    if (omega != -1)
        throw std::invalid_argument("ab_decompose: requires root number -1");

    auto lv = lprime_central(tab, kernels, d, 1.0);

    const WTable& w1 = kernels.wtable(form, 1.0);
    std::uint64_t N = w1.required_terms(M, 1e-10);
    ABParts out;
    out.M = M;
    if (N > tab.limit()) throw InsufficientCoefficients(N);
    double acc = 0, comp = 0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        double lam = tab(std::uint32_t(n));
        if (lam == 0.0) continue;
        int chi = kronecker(8 * d, (long long)n);
        if (chi == 0) continue;
        double t = lam * double(chi) / std::sqrt(double(n)) * w1(double(n) / M);
        double y = t - comp, tt = acc + y;
        comp = (tt - acc) - y;
        acc = tt;
    }
    out.A = (1.0 - double(omega)) * acc; // prefactor (1 - i^k eta chi_{8d}(-q)) = 2
    out.B = lv.value - out.A;
    return out;
}

PoissonCheck poisson_identity_check(std::uint64_t n, double Zscale, std::uint32_t k_trunc) {
    if (n == 0 || n % 2 == 0)
        throw std::invalid_argument("poisson_identity_check: n must be odd");
    if (Zscale <= 0) throw std::invalid_argument("poisson_identity_check: Z must be positive");

    auto F = bump_fn();

    // lhs: finite sum over odd d with d/Z inside the support of F
    PoissonCheck out;
    {
        double s = 0;
        long long dlo = (long long)std::floor(F.lo * Zscale) - 1;
        long long dhi = (long long)std::ceil(F.hi * Zscale) + 1;
        if (dlo < 1) dlo = 1;
        for (long long d = dlo | 1; d <= dhi; d += 2)
            s += double(kronecker(d, (long long)n)) * bump_F(double(d) / Zscale);
        out.lhs = s;
    }

    // rhs: (Z/2n)(2/n) sum_k (-1)^k G_k(n) F^(k Z / 2n)
    {
        double s = 0;
        double f0 = fourier_check(F, 0.0);
        s += gauss_exact(0, n).value() * f0; // k = 0, (-1)^0 = 1
        for (std::uint32_t k = 1; k <= k_trunc; ++k) {
            double y = double(k) * Zscale / (2.0 * double(n));
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            double gp = gauss_exact((long long)k, n).value();
            double gm = gauss_exact(-(long long)k, n).value();
            if (gp == 0.0 && gm == 0.0) continue;
            auto [cpart, spart] = fourier_cos_sin(F, y);
            s += sign * (gp * (cpart + spart) + gm * (cpart - spart));
        }
        out.rhs = Zscale / (2.0 * double(n)) * double(kronecker(2, (long long)n)) * s;
    }
    out.abs_err = std::fabs(out.lhs - out.rhs);
    return out;
}

} // namespace twistlab
