#include "palintoep/matchings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace palintoep {

std::uint64_t double_factorial(int r) {
    if (r < -1) throw std::invalid_argument("double factorial needs r >= -1");
    if (r > 33) throw GuardError("double factorial overflows 64 bits beyond r = 33");
    std::uint64_t v = 1;
    for (int t = r; t > 1; t -= 2) v *= static_cast<std::uint64_t>(t);
    return v;
}

namespace {

void enumerate_rec(std::vector<bool>& used, std::vector<std::pair<int, int>>& acc,
                   std::vector<PairMatching>& out) {
    const int two_m = static_cast<int>(used.size());
    int first = -1;
    for (int t = 0; t < two_m; ++t)
        if (!used[static_cast<std::size_t>(t)]) { first = t; break; }
    if (first < 0) {
        out.push_back(PairMatching{acc});
        return;
    }
    used[static_cast<std::size_t>(first)] = true;
    for (int t = first + 1; t < two_m; ++t) {
        if (used[static_cast<std::size_t>(t)]) continue;
        used[static_cast<std::size_t>(t)] = true;
        acc.emplace_back(first + 1, t + 1);
        enumerate_rec(used, acc, out);
        acc.pop_back();
        used[static_cast<std::size_t>(t)] = false;
    }
    used[static_cast<std::size_t>(first)] = false;
}

} // namespace

std::vector<PairMatching> enumerate_pair_matchings(int two_m) {
    if (two_m < 2 || two_m % 2 != 0) throw std::invalid_argument("need an even number of positions");
    if (two_m > 12) throw GuardError("pair matching enumeration is guarded at 2m <= 12");
    std::vector<bool> used(static_cast<std::size_t>(two_m), false);
    std::vector<std::pair<int, int>> acc;
    std::vector<PairMatching> out;
    out.reserve(double_factorial(two_m - 1));
    enumerate_rec(used, acc, out);
    return out;
}

PairMatching adjacent_matching(int m) {
    PairMatching pm;
    for (int j = 0; j < m; ++j) pm.pairs.emplace_back(2 * j + 1, 2 * j + 2);
    return pm;
}

std::vector<int> constant_set(int delta, int N, int n) {
    validate_spec(n, N);
    if (std::abs(delta) > N - 1) throw std::out_of_range("|delta| must be at most N - 1");
    const int P = N >> n;
    const int half = P / 2;
    auto link_of = [&](int d) {
        const int r = std::abs(d) % P;
        return r < half ? r : P - 1 - r;
    };
    const int target = link_of(delta);
    std::vector<int> cs;
    for (int dp = -(N - 1); dp <= N - 1; ++dp)
        if (link_of(dp) == target) cs.push_back(dp + delta);
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    return cs;
}

namespace {

// cost of a full {1..N}^k sweep
double tuple_cost(int N, int k) { return std::pow(static_cast<double>(N), k); }

// link value per absolute index difference, tabulated once per (N, n)
std::vector<int> link_table(int N, int n) {
    const int P = N >> n;
    const int half = P / 2;
    std::vector<int> tab(static_cast<std::size_t>(N));
    for (int d = 0; d < N; ++d) {
        const int r = d % P;
        tab[static_cast<std::size_t>(d)] = r < half ? r : P - 1 - r;
    }
    return tab;
}

/// Walk every tuple in {1..N}^k, handing the leaf the indices and the k link
/// values of the cycle (i_1 i_2), (i_2 i_3), ..., (i_k i_1).
template <typename Leaf>
void for_each_cycle(int N, int k, const std::vector<int>& tab, Leaf&& leaf) {
    std::vector<int> idx(static_cast<std::size_t>(k), 1);
    std::vector<int> lv(static_cast<std::size_t>(k), 0);
    // depth-first with incremental link values; depth d fixes idx[d]
    int d = 0;
    while (true) {
        if (d == k - 1) {
            const int before = idx[static_cast<std::size_t>(k - 2 >= 0 ? k - 2 : 0)];
            for (int v = 1; v <= N; ++v) {
                idx[static_cast<std::size_t>(d)] = v;
                if (k >= 2) {
                    lv[static_cast<std::size_t>(d - 1)] = tab[static_cast<std::size_t>(std::abs(before - v))];
                    lv[static_cast<std::size_t>(d)] = tab[static_cast<std::size_t>(std::abs(v - idx[0]))];
                } else {
                    lv[0] = 0; // k == 1: the single entry sits on the main diagonal
                }
                leaf(idx, lv);
            }
            // backtrack to the deepest level that can still advance
            while (--d >= 0) {
                if (idx[static_cast<std::size_t>(d)] < N) break;
            }
            if (d < 0) return;
            ++idx[static_cast<std::size_t>(d)];
        } else {
            if (d > 0)
                lv[static_cast<std::size_t>(d - 1)] =
                    tab[static_cast<std::size_t>(std::abs(idx[static_cast<std::size_t>(d - 1)] - idx[static_cast<std::size_t>(d)]))];
            ++d;
            idx[static_cast<std::size_t>(d)] = 1;
        }
    }
}

bool pair_is_negative(const std::vector<int>& idx, int a, int b, int P) {
    // signed differences of the two entries at positions a, b (1-based)
    const int k = static_cast<int>(idx.size());
    const int da = idx[static_cast<std::size_t>(a - 1)] - idx[static_cast<std::size_t>(a % k)];
    const int db = idx[static_cast<std::size_t>(b - 1)] - idx[static_cast<std::size_t>(b % k)];
    const int r = std::abs(da + db) % P;
    return r == 0 || r == P - 1;
}

} // namespace

double exact_expected_moment(int N, int n, int k, const EntryDistribution& distribution) {
    validate_spec(n, N);
    if (k < 0) throw std::invalid_argument("moment order must be non-negative");
    if (k == 0) return 1.0;
    if (tuple_cost(N, k) > 1e9)
        throw GuardError("exact moment enumeration needs N^k = " +
                         std::to_string(tuple_cost(N, k)) + " tuples, above the 10^9 guard");
    const auto tab = link_table(N, n);
    double total = 0.0;
    int vals[16];
    int mult[16];
    for_each_cycle(N, k, tab, [&](const std::vector<int>&, const std::vector<int>& lv) {
        int nd = 0;
        for (int p = 0; p < k; ++p) {
            const int v = lv[static_cast<std::size_t>(p)];
            int f = -1;
            for (int q = 0; q < nd; ++q)
                if (vals[q] == v) { f = q; break; }
            if (f < 0) { vals[nd] = v; mult[nd] = 1; ++nd; }
            else ++mult[f];
        }
        double w = 1.0;
        for (int q = 0; q < nd; ++q) {
            w *= distribution.moment(mult[q]);
            if (w == 0.0) return;
        }
        total += w;
    });
    return total / std::pow(static_cast<double>(N), 0.5 * k + 1.0);
}

namespace {

std::vector<ConfigurationReport> count_configurations(int N, int n, int m,
                                                      const std::vector<PairMatching>& matchings,
                                                      std::optional<OffsetFilter> filter) {
    validate_spec(n, N);
    if (m < 1) throw std::invalid_argument("need m >= 1 pairs");
    const int k = 2 * m;
    const double sweep = tuple_cost(N, k);
    const bool small_fourth = (m <= 2 && N <= 96);
    if (sweep > 1e9 && !small_fourth)
        throw GuardError("configuration count needs N^(2m) = " + std::to_string(sweep) +
                         " tuples, above the 10^9 guard");
    if (sweep * static_cast<double>(matchings.size()) > 2e10)
        throw GuardError("configuration count would cost about " +
                         std::to_string(sweep * static_cast<double>(matchings.size())) +
                         " matching checks; reduce N or m");

    const int P = N >> n;
    const auto tab = link_table(N, n);
    std::vector<ConfigurationReport> reports(matchings.size());
    for (std::size_t t = 0; t < matchings.size(); ++t) {
        reports[t].matching = matchings[t];
        reports[t].N = N;
        reports[t].n = n;
        reports[t].m = m;
        if (static_cast<int>(matchings[t].pairs.size()) != m)
            throw std::invalid_argument("matching does not have m pairs");
    }

    const int offset = filter ? filter->c * P - (filter->crossing ? 1 : 0) : 0;

    for_each_cycle(N, k, tab, [&](const std::vector<int>& idx, const std::vector<int>& lv) {
        for (std::size_t t = 0; t < matchings.size(); ++t) {
            const auto& pairs = matchings[t].pairs;
            if (filter) {
                const auto [a, b] = pairs[0];
                if (idx[static_cast<std::size_t>(b % k)] - idx[static_cast<std::size_t>(a - 1)] != offset)
                    continue;
            }
            bool within = true;
            for (const auto& [a, b] : pairs)
                if (lv[static_cast<std::size_t>(a - 1)] != lv[static_cast<std::size_t>(b - 1)]) { within = false; break; }
            if (!within) continue;
            bool distinct = true;
            for (int p = 0; p < m && distinct; ++p)
                for (int q = p + 1; q < m; ++q)
                    if (lv[static_cast<std::size_t>(pairs[static_cast<std::size_t>(p)].first - 1)] ==
                        lv[static_cast<std::size_t>(pairs[static_cast<std::size_t>(q)].first - 1)]) { distinct = false; break; }
            if (!distinct) {
                ++reports[t].shared_link;
                continue;
            }
            ++reports[t].count;
            bool negative = true;
            for (const auto& [a, b] : pairs)
                if (!pair_is_negative(idx, a, b, P)) { negative = false; break; }
            if (negative) ++reports[t].all_negative;
        }
    });

    const double norm = std::pow(static_cast<double>(N), m + 1);
    for (auto& r : reports) {
        r.any_positive = r.count - r.all_negative;
        r.contribution = static_cast<double>(r.count) / norm;
        r.negative_contribution = static_cast<double>(r.all_negative) / norm;
    }
    return reports;
}

} // namespace

ConfigurationReport configuration_contribution(int N, int n, const PairMatching& matching,
                                               std::optional<OffsetFilter> filter) {
    return count_configurations(N, n, static_cast<int>(matching.pairs.size()),
                                {matching}, filter)[0];
}

std::vector<ConfigurationReport> configuration_contributions(int N, int n, int m,
                                                             std::optional<OffsetFilter> filter) {
    return count_configurations(N, n, m, enumerate_pair_matchings(2 * m), filter);
}

RegionCounts adjacent_region_counts(int N, int n, int c) {
    validate_spec(n, N);
    if (c < 0 || c > (1 << n) - 1) throw std::out_of_range("offset c must lie in [0, 2^n - 1]");
    if (tuple_cost(N, 3) > 1e9) throw GuardError("region count is guarded at N^3 <= 10^9");
    const int P = N >> n;
    const auto tab = link_table(N, n);
    auto link = [&](int i, int j) { return tab[static_cast<std::size_t>(std::abs(i - j))]; };
    RegionCounts rc;
    for (int pass = 0; pass < 2; ++pass) {
        const int offset = c * P - pass;
        std::uint64_t& slot = pass ? rc.cross : rc.no_cross;
        for (int i1 = 1; i1 <= N; ++i1) {
            const int i3 = i1 + offset;
            if (i3 < 1 || i3 > N) continue;
            for (int i2 = 1; i2 <= N; ++i2) {
                if (link(i1, i2) != link(i2, i3)) continue;
                for (int i4 = 1; i4 <= N; ++i4)
                    if (link(i3, i4) == link(i4, i1)) ++slot;
            }
        }
    }
    return rc;
}

// ---- closed-form catalog ----

double fourth_moment_limit(int n) {
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    return std::ldexp(1.0, n + 1) + std::ldexp(1.0, -n);
}

double dpt_adjacent_contribution(int m) {
    if (m < 1) throw std::invalid_argument("m must be positive");
    return -2.0 + std::ldexp(1.0 + std::pow(2.0, m) + std::pow(3.0, m), -m);
}

double dpt_adjacent_sum(int m) {
    if (m < 1) throw std::invalid_argument("m must be positive");
    double sum = 0.0;
    double binom = static_cast<double>(m) * (m - 1) / 2.0; // binom(m, 2)
    for (int k = 2; k <= m; k += 2) {
        if (k > 2) {
            // binom(m, k) from binom(m, k-2)
            binom *= static_cast<double>(m - k + 2) * (m - k + 1);
            binom /= static_cast<double>(k) * (k - 1);
        }
        sum += binom * std::ldexp(1.0, -(k + 1));
    }
    return 1.0 + 4.0 * sum;
}

double upper_bound_moment(int m, int n) {
    if (m < 0 || n < 0) throw std::invalid_argument("m and n must be non-negative");
    return std::pow(std::ldexp(2.0, n), m) * static_cast<double>(double_factorial(2 * m - 1));
}

double lower_bound_moment(int m, int n, bool assume_conjecture) {
    if (m < 1 || n < 0) throw std::invalid_argument("need m >= 1 and n >= 0");
    const int top = 2 * (1 << n) - 1;
    double power_sum = 0.0;
    for (int c = 1; c <= top; ++c) power_sum += std::pow(static_cast<double>(c), m);
    const double adjacent = -2.0 * ((1 << n) - 1) + std::ldexp(power_sum, -m * n);
    const double pairings = static_cast<double>(double_factorial(2 * m - 1));
    return assume_conjecture ? adjacent * pairings : adjacent + pairings - 1.0;
}

double conjectured_moment(int m, int n) {
    if (n != 1) throw std::invalid_argument("the conjectured closed form is only known for n = 1");
    if (m < 1) throw std::invalid_argument("m must be positive");
    return static_cast<double>(double_factorial(2 * m - 1)) * dpt_adjacent_contribution(m);
}

} // namespace palintoep
