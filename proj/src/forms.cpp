#include "twistlab/forms.hpp"
#include "twistlab/arith.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace twistlab {

long long WeierstrassModel::b8() const {
    return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
}

int128 WeierstrassModel::discriminant() const {
    int128 B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}

void NewformSpec::validate() const {
    if (level <= 0 || level % 2 == 0)
        throw std::invalid_argument("NewformSpec: level must be odd and positive");
    if (weight <= 0 || weight % 2 != 0)
        throw std::invalid_argument("NewformSpec: weight must be even and positive");
    if (eta != 1 && eta != -1)
        throw std::invalid_argument("NewformSpec: eta must be +1 or -1");
    if (source == CoeffSource::curve) {
        if (!curve) throw std::invalid_argument("NewformSpec: curve source without a model");
        if (weight != 2) throw std::invalid_argument("NewformSpec: curve source needs weight 2");
        if (curve->discriminant() == 0)
            throw std::invalid_argument("NewformSpec: singular model");
    }
}

NewformSpec builtin_form(const std::string& label) {
    NewformSpec f;
    f.label = label;
    if (label == "11a") {
        f.level = 11; f.weight = 2; f.eta = -1;
        f.curve = WeierstrassModel{0, -1, 1, -10, -20};
    } else if (label == "17a") {
        f.level = 17; f.weight = 2; f.eta = -1;
        f.curve = WeierstrassModel{1, -1, 1, -1, -14};
    } else if (label == "delta") {
        f.level = 1; f.weight = 12; f.eta = 1;
        f.source = CoeffSource::delta_qexp;
    } else {
        throw std::invalid_argument("unknown form label: " + label);
    }
    f.validate();
    return f;
}

std::vector<std::string> builtin_labels() { return {"11a", "17a", "delta"}; }

static std::uint64_t umod(long long v, std::uint64_t p) {
    long long r = v % (long long)p;
    return std::uint64_t(r < 0 ? r + (long long)p : r);
}

long long ap_naive(const WeierstrassModel& c, std::uint64_t p) {
    std::uint64_t A1 = umod(c.a1, p), A2 = umod(c.a2, p), A3 = umod(c.a3, p),
                  A4 = umod(c.a4, p), A6 = umod(c.a6, p);
    std::uint64_t count = 0;
    for (std::uint64_t x = 0; x < p; ++x) {
        std::uint64_t rhs = (mulmod(mulmod(x, x, p) , x, p)
                           + mulmod(A2, mulmod(x, x, p), p)
                           + mulmod(A4, x, p) + A6) % p;
        std::uint64_t lx = (mulmod(A1, x, p) + A3) % p;
        for (std::uint64_t y = 0; y < p; ++y) {
            std::uint64_t lhs = (mulmod(y, y, p) + mulmod(lx, y, p)) % p;
            if (lhs == rhs) ++count;
        }
    }
    return (long long)p - (long long)count; // p + 1 - (count + 1)
}

// Short model y^2 = x^3 + Ax + B equivalent to c mod p, valid for p >= 5.
static void short_model(const WeierstrassModel& c, std::uint64_t p,
                        std::uint64_t& A, std::uint64_t& B) {
    A = umod(-27 * c.c4(), p);
    B = umod(-54 * c.c6(), p);
}

// Legendre-symbol sum over the short model with an incremental cubic and a
// sieved quadratic-residue table: a_p = -sum_x (x^3+Ax+B / p).
static long long ap_legendre_sum(std::uint64_t A, std::uint64_t B, std::uint64_t p) {
    static thread_local std::vector<std::uint8_t> qr;
    qr.assign(p, 0);
    std::uint64_t sq = 0;
    for (std::uint64_t x = 1; 2 * x < p + 1; ++x) {
        sq += 2 * x - 1;            // x^2 = (x-1)^2 + (2x-1)
        if (sq >= p) sq -= p;
        qr[sq] = 1;
    }
    long long sum = 0;
    std::uint64_t f = B;            // x^3 + Ax + B at x = 0
    std::uint64_t d1 = (1 + A) % p; // f(x+1) - f(x) at x = 0
    std::uint64_t d2 = 6 % p;       // second difference at x = 0
    for (std::uint64_t x = 0; x < p; ++x) {
        if (f != 0) sum += qr[f] ? 1 : -1;
        f += d1; if (f >= p) f -= p;
        d1 += d2; if (d1 >= p) d1 -= p;
        d2 += 6; if (d2 >= p) d2 -= p;
    }
    return -sum;
}

long long ap_point_count(const WeierstrassModel& c, std::uint64_t p) {
    if (p == 2) throw std::invalid_argument("ap_point_count: p = 2 rejected");
    if (c.discriminant() % (int128)p == 0)
        throw std::invalid_argument("ap_point_count: bad reduction, use ap_bad_prime");
    if (p == 3) return ap_naive(c, p);
    std::uint64_t A, B;
    short_model(c, p, A, B);
    return ap_legendre_sum(A, B, p);
}

int ap_bad_prime(const WeierstrassModel& c, std::uint64_t p) {
    if (p == 2) throw std::invalid_argument("ap_bad_prime: even p unsupported");
    if (c.discriminant() % (int128)p != 0)
        throw std::invalid_argument("ap_bad_prime: good reduction at p");
    std::uint64_t A1 = umod(c.a1, p), A2 = umod(c.a2, p), A3 = umod(c.a3, p),
                  A4 = umod(c.a4, p), A6 = umod(c.a6, p);
    std::uint64_t inv2 = invmod(2, p);
    for (std::uint64_t x = 0; x < p; ++x) {
        // on the singular fiber 2y + a1 x + a3 = 0 at the singular point
        std::uint64_t y = mulmod(p - (mulmod(A1, x, p) + A3) % p, inv2, p);
        std::uint64_t x2 = mulmod(x, x, p);
        std::uint64_t lhs = (mulmod(y, y, p) + mulmod(mulmod(A1, x, p) + A3, y, p)) % p;
        std::uint64_t rhs = (mulmod(x2, x, p) + mulmod(A2, x2, p) + mulmod(A4, x, p) + A6) % p;
        if (lhs != rhs) continue;
        std::uint64_t fx = (mulmod(A1, y, p) + p - mulmod(3, x2, p) % p) % p;
        fx = (fx + 2 * p - (mulmod(2 * A2 % p, x, p) + A4) % p) % p;
        if (fx != 0) continue;
        // tangent-cone discriminant a1^2 + 4(3 x0 + a2)
        std::uint64_t D = (mulmod(A1, A1, p) + mulmod(4, (3 * x % p + A2) % p, p)) % p;
        if (D == 0) return 0;
        return powmod(D, (p - 1) / 2, p) == 1 ? 1 : -1;
    }
    throw std::runtime_error("ap_bad_prime: singular point not found");
}

// ---------------------------------------------------------------------------
// Order-finding point count (Shanks): find all N in the Hasse interval with
// N*P = O for sampled points P on the curve and its quadratic twist; a_p is
// determined once the candidate set is a singleton.
// ---------------------------------------------------------------------------

namespace {

struct EcPoint {
    std::uint64_t x = 0, y = 0;
    bool inf = true;
};

struct EcCurve {
    std::uint64_t p, A, B;

    EcPoint add(const EcPoint& P, const EcPoint& Q) const {
        if (P.inf) return Q;
        if (Q.inf) return P;
        std::uint64_t lam;
        if (P.x == Q.x) {
            if ((P.y + Q.y) % p == 0) return {};
            std::uint64_t num = (3 * mulmod(P.x, P.x, p) % p + A) % p;
            lam = mulmod(num, invmod(2 * P.y % p, p), p);
        } else {
            std::uint64_t dy = (Q.y + p - P.y) % p;
            std::uint64_t dx = (Q.x + p - P.x) % p;
            lam = mulmod(dy, invmod(dx, p), p);
        }
        std::uint64_t x3 = (mulmod(lam, lam, p) + 2 * p - P.x - Q.x) % p;
        std::uint64_t y3 = (mulmod(lam, (P.x + p - x3) % p, p) + p - P.y) % p;
        return {x3, y3, false};
    }

    EcPoint mul(EcPoint P, std::uint64_t k) const {
        EcPoint R;
        while (k) {
            if (k & 1) R = add(R, P);
            P = add(P, P);
            k >>= 1;
        }
        return R;
    }
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// All m in [lo, hi] with m*P = O, by baby-step giant-step.
std::vector<std::uint64_t> multiples_in_range(const EcCurve& E, const EcPoint& P,
                                              std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t width = hi - lo + 1;
    std::uint64_t L = std::uint64_t(std::ceil(std::sqrt(double(width)))) + 1;

    std::vector<std::pair<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>> baby;
    baby.reserve(L);
    EcPoint G;
    for (std::uint64_t i = 0; i < L; ++i) {
        if (!G.inf) baby.push_back({G.x, {i, G.y}});
        G = E.add(G, P);
    }
    std::sort(baby.begin(), baby.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    EcPoint step = E.mul(P, L);
    EcPoint Q = E.mul(P, lo);
    std::set<std::uint64_t> found;
    for (std::uint64_t j = 0; lo + j * L <= hi + L; ++j) {
        if (Q.inf) {
            std::uint64_t m = lo + j * L;
            if (m >= lo && m <= hi) found.insert(m);
        } else {
            auto it = std::lower_bound(baby.begin(), baby.end(), Q.x,
                [](const auto& a, std::uint64_t v) { return a.first < v; });
            for (; it != baby.end() && it->first == Q.x; ++it) {
                std::uint64_t i = it->second.first, yi = it->second.second;
                if ((yi + Q.y) % E.p == 0) { // Q = -iP  =>  (lo+jL+i) P = O
                    std::uint64_t m = lo + j * L + i;
                    if (m >= lo && m <= hi) found.insert(m);
                }
                if (yi == Q.y && j * L >= i) { // Q = iP  =>  (lo+jL-i) P = O
                    std::uint64_t m = lo + j * L - i;
                    if (m >= lo && m <= hi) found.insert(m);
                }
            }
        }
        Q = E.add(Q, step);
    }
    return {found.begin(), found.end()};
}

} // namespace

long long ap_bsgs(const WeierstrassModel& c, std::uint64_t p) {
    if (p < 3000) return ap_point_count(c, p);
    std::uint64_t A, B;
    short_model(c, p, A, B);
    EcCurve E{p, A, B};

    std::uint64_t H = std::uint64_t(std::floor(2.0 * std::sqrt(double(p))));
    while ((unsigned __int128)(H + 1) * (H + 1) <= (unsigned __int128)4 * p) ++H;
    std::uint64_t lo = p + 1 - H, hi = p + 1 + H;

    // non-residue for twisting
    std::uint64_t nr = 2;
    while (powmod(nr, (p - 1) / 2, p) != p - 1) ++nr;
    std::uint64_t nr2 = mulmod(nr, nr, p), nr3 = mulmod(nr2, nr, p);
    EcCurve Etw{p, mulmod(A, nr2, p), mulmod(B, nr3, p)};

    std::vector<std::uint64_t> cand;
    bool have = false;
    for (std::uint32_t attempt = 0; attempt < 24; ++attempt) {
        std::uint64_t x = splitmix64(p * 0x100000001b3ull + attempt) % p;
        std::uint64_t z = (mulmod(mulmod(x, x, p), x, p) + mulmod(A, x, p) + B) % p;
        if (z == 0) continue;
        int chi = powmod(z, (p - 1) / 2, p) == 1 ? 1 : -1;

        std::vector<std::uint64_t> ms;
        if (chi == 1) {
            EcPoint P{x, sqrtmod(z, p), false};
            ms = multiples_in_range(E, P, lo, hi);
        } else {
            // (nr*x, sqrt(nr^3 z)) lies on the twist; its order divides
            // N_tw = 2p + 2 - N
            EcPoint P{mulmod(nr, x, p), sqrtmod(mulmod(nr3, z, p), p), false};
            auto tw = multiples_in_range(Etw, P, lo, hi);
            for (auto m : tw) ms.push_back(2 * p + 2 - m);
            std::sort(ms.begin(), ms.end());
        }
        if (ms.empty()) continue; // cannot happen for valid points; be safe

        if (!have) {
            cand = ms;
            have = true;
        } else {
            std::vector<std::uint64_t> inter;
            std::set_intersection(cand.begin(), cand.end(), ms.begin(), ms.end(),
                                  std::back_inserter(inter));
            cand = inter;
        }
        if (have && cand.size() == 1)
            return (long long)(p + 1) - (long long)cand[0];
    }
    return ap_legendre_sum(A, B, p); // ambiguous group structure; exact fallback
}

// ---------------------------------------------------------------------------
// Delta q-expansion
// ---------------------------------------------------------------------------

std::vector<int128> tau_qexpansion(std::uint32_t limit) {
    if (limit == 0 || limit > 10000)
        throw std::invalid_argument("tau_qexpansion: limit must be in [1, 10^4]");

    // (q;q)_inf via the pentagonal number theorem, degrees 0..limit-1
    std::uint32_t deg = limit; // tau(n) needs eta^24 through q^{limit-1}
    std::vector<int128> eta(deg, 0);
    eta[0] = 1;
    for (long long k = 1;; ++k) {
        long long g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
        if (g1 >= (long long)deg && g2 >= (long long)deg) break;
        int s = (k % 2 == 0) ? 1 : -1;
        if (g1 < (long long)deg) eta[g1] += s;
        if (g2 < (long long)deg) eta[g2] += s;
    }

    auto sq = [&](const std::vector<int128>& a) {
        std::vector<int128> r(deg, 0);
        for (std::uint32_t i = 0; i < deg; ++i) {
            if (a[i] == 0) continue;
            for (std::uint32_t j = 0; i + j < deg; ++j)
                if (a[j] != 0) r[i + j] += a[i] * a[j];
        }
        return r;
    };
    auto mul = [&](const std::vector<int128>& a, const std::vector<int128>& b) {
        std::vector<int128> r(deg, 0);
        for (std::uint32_t i = 0; i < deg; ++i) {
            if (a[i] == 0) continue;
            for (std::uint32_t j = 0; i + j < deg; ++j)
                if (b[j] != 0) r[i + j] += a[i] * b[j];
        }
        return r;
    };

    auto e2 = sq(eta);
    auto e4 = sq(e2);
    auto e8 = sq(e4);
    auto e16 = sq(e8);
    auto e24 = mul(e16, e8);

    std::vector<int128> tau(limit + 1, 0); // tau[n], 1-based; Delta = q * eta^24
    for (std::uint32_t n = 1; n <= limit; ++n) tau[n] = e24[n - 1];
    return tau;
}

// ---------------------------------------------------------------------------
// Coefficient tables
// ---------------------------------------------------------------------------

CoefficientTable::CoefficientTable(NewformSpec form, std::uint32_t limit,
                                   std::vector<double> lambda)
    : form_(std::move(form)), limit_(limit), lambda_(std::move(lambda)) {
    if (lambda_.size() != std::size_t(limit_) + 1)
        throw std::invalid_argument("CoefficientTable: size mismatch");
}

CoefficientTable build_table(const NewformSpec& form, std::uint32_t limit) {
    form.validate();
    if (limit < 1) throw std::invalid_argument("build_table: limit < 1");

    std::vector<double> lam(std::size_t(limit) + 1, 0.0);
    lam[1] = 1.0;
    if (limit == 1) return {form, limit, std::move(lam)};

    auto primes = prime_sieve(limit);
    const double half = (form.weight - 1) / 2.0;

    std::vector<int128> tau;
    if (form.source == CoeffSource::delta_qexp) tau = tau_qexpansion(limit);

    for (auto p : primes) {
        double lp;
        bool ramified = (form.level % p == 0);
        if (form.source == CoeffSource::delta_qexp) {
            lp = double((long double)tau[p] / std::pow((long double)p, 5.5L));
        } else if (ramified) {
            lp = double(ap_bad_prime(*form.curve, p)) / std::pow(double(p), half);
        } else if (p == 2 || p == 3) {
            lp = double(ap_naive(*form.curve, p)) / std::pow(double(p), half);
        } else if (p <= 3000) {
            lp = double(ap_point_count(*form.curve, p)) / std::pow(double(p), half);
        } else {
            lp = double(ap_bsgs(*form.curve, p)) / std::pow(double(p), half);
        }
        if (!ramified && std::fabs(lp) > 2.0 + 1e-9)
            throw std::runtime_error("build_table: Deligne bound violated at p = " +
                                     std::to_string(p));
        lam[p] = lp;

        // prime powers by the Hecke recursion / ramified power law
        std::uint64_t pk = std::uint64_t(p) * p;
        double prev = 1.0, curr = lp;
        while (pk <= limit) {
            double next = ramified ? curr * lp : lp * curr - prev;
            lam[pk] = next;
            prev = curr;
            curr = next;
            if (pk > limit / p) break;
            pk *= p;
        }
    }

    // multiplicative fill over composites
    auto spf = spf_sieve(limit);
    for (std::uint64_t n = 2; n <= limit; ++n) {
        std::uint64_t p = spf[n], m = n, pe = 1;
        while (m % p == 0) { m /= p; pe *= p; }
        if (m == 1) continue; // prime power, already set
        lam[n] = lam[pe] * lam[m];
    }

    return {form, limit, std::move(lam)};
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

void write_coeff_cache(const CoefficientTable& t, const std::string& path) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open cache for writing: " + path);
    std::fprintf(f, "# twistlab-coeffs v1 label=%s limit=%u normalization=deligne\n",
                 t.form().label.c_str(), t.limit());
    for (std::uint32_t n = 1; n <= t.limit(); ++n)
        std::fprintf(f, "%u,%.17g\n", n, t(n));
    std::fclose(f);
}

CoefficientTable read_coeff_cache(const NewformSpec& form, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open cache: " + path);
    char header[256];
    if (!std::fgets(header, sizeof header, f)) {
        std::fclose(f);
        throw std::runtime_error("corrupted cache (empty): " + path);
    }
    char label[128];
    unsigned limit = 0;
    if (std::sscanf(header, "# twistlab-coeffs v1 label=%127s limit=%u normalization=deligne",
                    label, &limit) != 2 || form.label != label || limit == 0) {
        std::fclose(f);
        throw std::runtime_error("corrupted cache (bad header): " + path);
    }
    std::vector<double> lam(std::size_t(limit) + 1, 0.0);
    unsigned expected = 1;
    char line[128];
    while (std::fgets(line, sizeof line, f)) {
        unsigned n;
        double v;
        if (std::sscanf(line, "%u,%lg", &n, &v) != 2 || n != expected || n > limit) {
            std::fclose(f);
            throw std::runtime_error("corrupted cache (bad row " +
                                     std::to_string(expected) + "): " + path);
        }
        lam[n] = v;
        ++expected;
    }
    std::fclose(f);
    if (expected != limit + 1)
        throw std::runtime_error("corrupted cache (truncated): " + path);
    return {form, limit, std::move(lam)};
}

std::string coeff_cache_path(const std::string& cache_dir, const NewformSpec& form,
                             std::uint32_t limit) {
    return cache_dir + "/" + form.label + "_" + std::to_string(limit) + ".coeffs";
}

CoefficientTable cached_table(const NewformSpec& form, std::uint32_t limit,
                              const std::string& cache_dir) {
    namespace fs = std::filesystem;
    if (!cache_dir.empty() && fs::exists(cache_dir)) {
        // any cached table for this label with limit >= requested will do
        std::uint64_t best = 0;
        std::string best_path;
        std::string prefix = form.label + "_";
        for (auto& e : fs::directory_iterator(cache_dir)) {
            std::string name = e.path().filename().string();
            if (name.rfind(prefix, 0) != 0) continue;
            if (name.size() < prefix.size() + 8) continue;
            if (name.substr(name.size() - 7) != ".coeffs") continue;
            std::uint64_t lim = std::strtoull(name.c_str() + prefix.size(), nullptr, 10);
            if (lim >= limit && (best == 0 || lim < best)) {
                best = lim;
                best_path = e.path().string();
            }
        }
        if (best != 0) return read_coeff_cache(form, best_path);
    }
    auto t = build_table(form, limit);
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        write_coeff_cache(t, coeff_cache_path(cache_dir, form, limit));
    }
    return t;
}

} // namespace twistlab
