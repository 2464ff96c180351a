#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "palintoep/ensemble.hpp"
#include "palintoep/errors.hpp"

namespace palintoep {

// The 2m entries of a trace cycle tr(A^2m) survive averaging only when their
// link values coincide in pairs. Everything here counts such tuples exactly,
// classifies how each pair resolves (the all-negative sign choice carries the
// main term; any positive sign costs a degree of freedom and decays like 1/N),
// and evaluates the closed-form moment catalog those counts converge to.

/// r!! with (-1)!! = 1; the product stops at 1 (odd r) or 2 (even r).
std::uint64_t double_factorial(int r);

/// Partition of positions {1, ..., 2m} into m unordered pairs.
struct PairMatching {
    std::vector<std::pair<int, int>> pairs; // each (a, b) with a < b, sorted by a

    bool operator==(const PairMatching&) const = default;
};

/// All (2m-1)!! pair matchings in canonical order: the smallest unpaired
/// position is always matched next, partners in increasing order.
std::vector<PairMatching> enumerate_pair_matchings(int two_m);

/// The adjacent configuration {(1,2), (3,4), ..., (2m-1, 2m)}.
PairMatching adjacent_matching(int m);

/// Constants C permitted in the pair relation delta' = -delta + C, found by
/// enumerating every signed difference delta' in [-(N-1), N-1] whose link
/// value equals that of delta. Sorted ascending. Always contains 0 (a
/// diagonal matches its own reflection) and every |C| < 2N.
std::vector<int> constant_set(int delta, int N, int n);

/// Exact finite-N expected moment M_{k,n;N} by full tuple enumeration:
/// N^-(k/2+1) * sum over (i_1..i_k) of prod over distinct link values of
/// moment(multiplicity). Guard: N^k <= 10^9.
double exact_expected_moment(int N, int n, int k, const EntryDistribution& distribution);

/// Optional restriction of a configuration count to one offset family of the
/// first pair: the pair's outer indices must differ by exactly c*N/2^n
/// (crossing = false) or c*N/2^n - 1 (crossing = true).
struct OffsetFilter {
    int c = 0;
    bool crossing = false;
};

struct ConfigurationReport {
    PairMatching matching;
    int N = 0;
    int n = 0;
    int m = 0;
    std::uint64_t count = 0;        // within-pair equal links, distinct across pairs
    std::uint64_t all_negative = 0; // every pair resolves with the negative sign
    std::uint64_t any_positive = 0; // count - all_negative
    std::uint64_t shared_link = 0;  // within-pair equal but a link shared across pairs
    double contribution = 0.0;          // count / N^(m+1)
    double negative_contribution = 0.0; // all_negative / N^(m+1)
};

/// Count the tuples realizing one configuration. A pair resolves with the
/// negative sign when its two signed differences d_p, d_q satisfy
/// d_q = -d_p + C for a structural constant C (|C| = 0 or -1 modulo the
/// period N/2^n); those are the palindrome translations and reflections that
/// fill whole diagonals, everything else is an O(1/N) correction.
ConfigurationReport configuration_contribution(int N, int n, const PairMatching& matching,
                                               std::optional<OffsetFilter> filter = std::nullopt);

/// Same enumeration classifying all (2m-1)!! matchings in a single pass.
std::vector<ConfigurationReport> configuration_contributions(int N, int n, int m,
                                                             std::optional<OffsetFilter> filter = std::nullopt);

/// Fourth-moment adjacent-configuration tuples split by offset family:
/// outer indices differing by c*N/2^n (no main-diagonal crossing) versus
/// c*N/2^n - 1 (crossing). Direct enumeration, no distinctness filter.
struct RegionCounts {
    std::uint64_t no_cross = 0;
    std::uint64_t cross = 0;
};

RegionCounts adjacent_region_counts(int N, int n, int c);

// ---- closed-form catalog ----

/// Limiting fourth moment 2^(n+1) + 2^-n.
double fourth_moment_limit(int n);

/// Contribution of one adjacent configuration to the 2m-th doubly
/// palindromic moment: -2 + 2^-m (1^m + 2^m + 3^m).
double dpt_adjacent_contribution(int m);

/// The same value in its pre-binomial form: the zero C-vector plus four core
/// families, 1 + 4 * sum over even k >= 2 of binom(m, k) (1/2)^(k+1).
double dpt_adjacent_sum(int m);

/// (2 * 2^n)^m (2m-1)!!, an upper bound for M_{2m,n} strong enough for
/// Carleman's condition.
double upper_bound_moment(int m, int n);

/// Lower bound for M_{2m,n}. Assuming every configuration contributes the
/// adjacent main term: (-2(2^n - 1) + 2^-mn sum_{c=1}^{2*2^n-1} c^m) (2m-1)!!;
/// unconditionally: that adjacent value + (2m-1)!! - 1.
double lower_bound_moment(int m, int n, bool assume_conjecture);

/// (2m-1)!! times the adjacent contribution; closed form known for n = 1 only.
double conjectured_moment(int m, int n = 1);

} // namespace palintoep
