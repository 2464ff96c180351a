#include "palintoep/ensemble.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "palintoep/rng.hpp"

namespace palintoep {

double EntryDistribution::moment(int k) const {
    if (k < 0) throw std::invalid_argument("moment order must be non-negative");
    if (k == 0) return 1.0;
    if (k % 2 == 1) return 0.0;
    switch (kind_) {
        case DistributionKind::Gaussian: {
            double v = 1.0;
            for (int t = k - 1; t > 1; t -= 2) v *= static_cast<double>(t);
            return v;
        }
        case DistributionKind::Rademacher:
            return 1.0;
        case DistributionKind::UniformScaled:
            return std::pow(3.0, k / 2) / static_cast<double>(k + 1);
    }
    return 0.0;
}

std::string EntryDistribution::name() const {
    switch (kind_) {
        case DistributionKind::Gaussian: return "gaussian";
        case DistributionKind::Rademacher: return "rademacher";
        case DistributionKind::UniformScaled: return "uniform";
    }
    return "?";
}

EntryDistribution EntryDistribution::parse(const std::string& name) {
    if (name == "gaussian") return EntryDistribution(DistributionKind::Gaussian);
    if (name == "rademacher") return EntryDistribution(DistributionKind::Rademacher);
    if (name == "uniform") return EntryDistribution(DistributionKind::UniformScaled);
    throw ConfigError("unknown distribution '" + name +
                      "' (expected gaussian, rademacher or uniform)");
}

bool is_valid_dimension(int n, int N) noexcept {
    if (n < 0 || n > 24 || N <= 0) return false;
    const long block = 1L << (n + 1);
    return N >= block && N % block == 0;
}

void validate_spec(int n, int N) {
    if (n < 0) throw DimensionError("palindromicity n must be non-negative");
    if (!is_valid_dimension(n, N))
        throw DimensionError("N = " + std::to_string(N) + " must be a positive multiple of 2^(n+1) = " +
                             std::to_string(1L << (n + 1)) + " for n = " + std::to_string(n));
}

int link_index(int i, int j, int N, int n) {
    validate_spec(n, N);
    if (i < 1 || i > N || j < 1 || j > N)
        throw std::out_of_range("matrix indices must lie in [1, N]");
    const int P = N >> n;
    const int d = std::abs(i - j) % P;
    return d < P / 2 ? d : P - 1 - d;
}

std::vector<double> sample_entries(const EnsembleSpec& spec, std::uint64_t sample_index) {
    validate_spec(spec.n, spec.N);
    EntryStream stream(spec.seed, sample_index);
    std::vector<double> values(static_cast<std::size_t>(spec.entry_count()));
    switch (spec.distribution.kind()) {
        case DistributionKind::Gaussian:
            for (double& v : values) v = stream.next_normal();
            break;
        case DistributionKind::Rademacher:
            for (double& v : values) v = (stream.next_u64() >> 63) ? 1.0 : -1.0;
            break;
        case DistributionKind::UniformScaled: {
            const double root3 = std::sqrt(3.0);
            for (double& v : values) v = (2.0 * stream.next_unit() - 1.0) * root3;
            break;
        }
    }
    return values;
}

PalindromicMatrix build_matrix(const EnsembleSpec& spec, std::vector<double> entries) {
    validate_spec(spec.n, spec.N);
    if (static_cast<int>(entries.size()) != spec.entry_count())
        throw DimensionError("entry vector has length " + std::to_string(entries.size()) +
                             ", expected N/2^(n+1) = " + std::to_string(spec.entry_count()));
    const int N = spec.N;
    const int P = spec.period();
    const int half = P / 2;
    // one period of link values is enough: the first row repeats it 2^n times
    std::vector<double> row(static_cast<std::size_t>(P));
    for (int d = 0; d < P; ++d) row[static_cast<std::size_t>(d)] = entries[static_cast<std::size_t>(d < half ? d : P - 1 - d)];

    PalindromicMatrix m;
    m.spec = spec;
    m.entries = std::move(entries);
    m.dense.resize(N, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) m.dense(i, j) = row[static_cast<std::size_t>(std::abs(i - j) % P)];
    return m;
}

} // namespace palintoep
