#ifndef TWISTLAB_ORACLES_HPP
#define TWISTLAB_ORACLES_HPP

#include <string>
#include <vector>

#include "twistlab/forms.hpp"

namespace twistlab {

// pass <=> |fast - oracle| <= tolerance * max(1, |oracle|)
struct OracleOutcome {
    std::string name;
    double fast = 0;
    double oracle = 0;
    double tolerance = 0;
    bool pass = false;
};

// Mirrored fast-path/oracle pairs; each group reports its worst instance.
// selection: "all" or a comma list from
//   gauss, g4k, points, tau, gamma, fourier, poisson, zseries, eta
// cache_dir: coefficient cache location for the table-backed groups
// (empty string builds tables in memory each run).
std::vector<OracleOutcome> run_suite(const std::string& selection,
                                     const std::string& cache_dir);

int count_failures(const std::vector<OracleOutcome>& outcomes);

// Smooth-locus point count at a bad prime: a_p = p - #E_ns(F_p).
// Shares no code with the tangent-cone classification.
long long ap_bad_smooth_locus(const WeierstrassModel& c, std::uint64_t p);

} // namespace twistlab

#endif
