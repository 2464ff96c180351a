#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "palintoep/errors.hpp"

namespace palintoep {

enum class DistributionKind { Gaussian, Rademacher, UniformScaled };

/// Mean-0, variance-1 entry distribution together with its raw moment table.
/// All three supported kinds are even, so every odd moment is exactly zero.
class EntryDistribution {
public:
    explicit EntryDistribution(DistributionKind kind = DistributionKind::Gaussian)
        : kind_(kind) {}

    DistributionKind kind() const { return kind_; }

    /// k-th raw moment. Gaussian: (k-1)!!, Rademacher: 1, uniform on
    /// [-sqrt(3), sqrt(3)]: 3^(k/2)/(k+1), for even k; 0 for odd k.
    double moment(int k) const;

    bool is_even() const { return true; }

    std::string name() const;
    static EntryDistribution parse(const std::string& name);

private:
    DistributionKind kind_;
};

/// One ensemble member family: dimension, palindromicity, entry law, seed.
struct EnsembleSpec {
    int n = 0;                 // first row is 2^n copies of a palindrome
    int N = 0;                 // matrix dimension, multiple of 2^(n+1)
    EntryDistribution distribution{DistributionKind::Gaussian};
    std::uint64_t seed = 0;

    /// Number of independent entries, N / 2^(n+1).
    int entry_count() const { return N >> (n + 1); }
    /// Palindrome period along the first row, N / 2^n.
    int period() const { return N >> n; }
};

/// Throws DimensionError unless N is a positive multiple of 2^(n+1).
void validate_spec(int n, int N);
bool is_valid_dimension(int n, int N) noexcept;

/// Index of the independent entry behind position (i, j), 1-based.
/// With period P = N/2^n and d = |i-j| mod P, the entry is d when
/// d < P/2 and P-1-d otherwise (the palindrome fold).
int link_index(int i, int j, int N, int n);

/// The N/2^(n+1) i.i.d. draws for one matrix sample. Deterministic in
/// (spec.seed, sample_index) and independent of evaluation order.
std::vector<double> sample_entries(const EnsembleSpec& spec, std::uint64_t sample_index);

/// Dense realization a_ij = entries[link_index(i, j)].
struct PalindromicMatrix {
    EnsembleSpec spec;
    std::vector<double> entries;
    Eigen::MatrixXd dense;
};

PalindromicMatrix build_matrix(const EnsembleSpec& spec, std::vector<double> entries);

} // namespace palintoep
