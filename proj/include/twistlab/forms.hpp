#ifndef TWISTLAB_FORMS_HPP
#define TWISTLAB_FORMS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace twistlab {

using int128 = __int128;

// Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct WeierstrassModel {
    long long a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

    long long b2() const { return a1 * a1 + 4 * a2; }
    long long b4() const { return 2 * a4 + a1 * a3; }
    long long b6() const { return a3 * a3 + 4 * a6; }
    long long b8() const;
    long long c4() const { return b2() * b2() - 24 * b4(); }
    long long c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
    int128 discriminant() const;
};

enum class CoeffSource { curve, delta_qexp };

// The object "f": level q (odd), even weight kappa, Fricke-related sign eta
// (config input, validated empirically through the functional equation),
// and the coefficient source.
struct NewformSpec {
    std::string label;
    long long level = 0;              // q, odd
    int weight = 0;                   // kappa, even
    int eta = 0;                      // +-1
    CoeffSource source = CoeffSource::curve;
    std::optional<WeierstrassModel> curve;

    void validate() const;
};

// Bundled defaults: two distinct odd prime levels with both twisted root
// numbers hitting -1 on a positive proportion of d.
NewformSpec builtin_form(const std::string& label); // "11a", "17a", "delta"
std::vector<std::string> builtin_labels();

// a_p = p + 1 - #E(F_p) for odd p of good reduction.  p = 3 is counted by
// naive enumeration on the long model; p >= 5 by Legendre sums on the short
// model.  p = 2 is rejected.
long long ap_point_count(const WeierstrassModel& c, std::uint64_t p);

// Naive point enumeration over F_p on the long model (oracle path, any p).
long long ap_naive(const WeierstrassModel& c, std::uint64_t p);

// Reduction-type classification at p | conductor: +1 split multiplicative,
// -1 non-split, 0 additive.
int ap_bad_prime(const WeierstrassModel& c, std::uint64_t p);

// a_p for large good p by baby-step giant-step order finding (deterministic
// seeding; falls back to the Legendre sum when the order is ambiguous).
long long ap_bsgs(const WeierstrassModel& c, std::uint64_t p);

// Coefficients of q prod (1-q^n)^24 through q^limit, exact integer
// arithmetic; limit capped at 10^4 (tau(n) needs ~n^{11/2} headroom).
std::vector<int128> tau_qexpansion(std::uint32_t limit);

// Deligne-normalized Hecke eigenvalue table: lambda(n) = a(n)/n^{(k-1)/2},
// lambda(p^k) by the Hecke recursion, lambda(n) multiplicative.  Immutable
// after construction.
class CoefficientTable {
public:
    CoefficientTable(NewformSpec form, std::uint32_t limit, std::vector<double> lambda);

    const NewformSpec& form() const { return form_; }
    std::uint32_t limit() const { return limit_; }
    double operator()(std::uint32_t n) const { return lambda_[n]; }
    const std::vector<double>& raw() const { return lambda_; }

private:
    NewformSpec form_;
    std::uint32_t limit_;
    std::vector<double> lambda_;
};

CoefficientTable build_table(const NewformSpec& form, std::uint32_t limit);

// Versioned text cache:
//   # twistlab-coeffs v1 label=<label> limit=<N> normalization=deligne
//   n,lambda            (17 significant digits)
void write_coeff_cache(const CoefficientTable& t, const std::string& path);
CoefficientTable read_coeff_cache(const NewformSpec& form, const std::string& path);

// Load the cache if present and long enough, otherwise build and persist.
// cache_dir empty disables persistence.
CoefficientTable cached_table(const NewformSpec& form, std::uint32_t limit,
                              const std::string& cache_dir);

std::string coeff_cache_path(const std::string& cache_dir, const NewformSpec& form,
                             std::uint32_t limit);

} // namespace twistlab

#endif
