#ifndef TWISTLAB_MOMENTS_HPP
#define TWISTLAB_MOMENTS_HPP

#include <cstdint>
#include <vector>

#include "twistlab/lfun.hpp"

namespace twistlab {

// All odd squarefree d with gcd(d, 2 q1 q2) = 1, 8d/X in [1/2, 2] (the
// support of F), and both twisted root numbers -1, ascending.
std::vector<long long> qualifying_ds(double X, const NewformSpec& f, const NewformSpec& g);

enum class MPolicy { auto_scale, paper, explicit_value };

struct MomentConfig {
    double X = 0;
    double Z = 1.0;
    MPolicy m_policy = MPolicy::auto_scale;
    double m_explicit = 0;
    unsigned workers = 1;
    std::uint32_t prime_cutoff = 100000;
};

double resolve_M(const MomentConfig& cfg);

struct MomentReport {
    double X = 0;
    long long count_d = 0;
    double empirical = 0;
    double predicted_leading = 0;   // C0 X (log X)^2
    double predicted_two_term = 0;  // + C1 X log X
    double ratio = 0;
    double M_used = 0;
};

// empirical = sum over qualifying d of L'(f,8d) L'(g,8d) F(8d/X); parallel
// over d with a fixed-order compensated reduction, so results are identical
// across worker counts.
MomentReport moment_scan(const MomentConfig& cfg, const CoefficientTable& tf,
                         const CoefficientTable& tg, KernelSet& kernels,
                         const ConstantsReport& constants);

// Coefficient-table length needed for the scan, checked before any work.
std::uint64_t moment_required_limit(const MomentConfig& cfg, const NewformSpec& f,
                                    const NewformSpec& g, KernelSet& kernels);

// A/B decomposition: A = (1 - i^k eta chi_{8d}(-q)) sum lambda chi / sqrt n
// W_f(n/M), B = L' - A.
struct ABParts {
    double A = 0, B = 0, M = 0;
};
ABParts ab_decompose(const CoefficientTable& tab, KernelSet& kernels, long long d,
                     double M);

// Two-sided Poisson summation check:
//   lhs = sum_{d odd} (d/n) F(d/Z),
//   rhs = (Z/2n)(2/n) sum_{|k| <= k_trunc} (-1)^k G_k(n) F^(kZ/2n).
struct PoissonCheck {
    double lhs = 0, rhs = 0, abs_err = 0;
};
PoissonCheck poisson_identity_check(std::uint64_t n_odd, double Zscale,
                                    std::uint32_t k_trunc);

} // namespace twistlab

#endif
