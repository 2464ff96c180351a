#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "palintoep/ensemble.hpp"
#include "palintoep/spectra.hpp"

namespace palintoep {

struct MomentEstimate {
    int order = 0;
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t num_samples = 0;
};

enum class MomentPath { Eigenvalues, TracePowers };

struct MonteCarloOptions {
    MomentPath path = MomentPath::Eigenvalues;
    int threads = 0;              // 0: PALINTOEP_THREADS env var, else hardware count
    bool pool_eigenvalues = false; // collect all normalized eigenvalues (eigenvalue path)
    bool keep_samples = false;     // retain the per-matrix moment values
};

struct MonteCarloResult {
    std::vector<MomentEstimate> moments;             // orders 0..k_max
    std::vector<double> pooled_normalized;           // sample-major, if requested
    std::vector<std::vector<double>> sample_moments; // [order][sample], if requested
};

/// Ensemble average of the spectral moments over num_matrices independent
/// samples. Sample s is a pure function of (spec.seed, s) and all sums are
/// taken over a fixed pairwise reduction tree keyed by sample index, so the
/// result is bit-identical for any thread count or schedule.
MonteCarloResult monte_carlo_moments(const EnsembleSpec& spec, std::uint64_t num_matrices,
                                     int k_max, const MonteCarloOptions& options = {});

struct OddMomentPoint {
    int N = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

struct OddMomentReport {
    int order = 0;
    std::vector<OddMomentPoint> points;
    // log-log slope of |mean| against N, only fitted when the means clear
    // their own noise at every N
    std::optional<double> fitted_exponent;
};

OddMomentReport odd_moment_decay(int n, std::span<const int> Ns, std::uint64_t num_matrices,
                                 int k, const EntryDistribution& distribution, std::uint64_t seed,
                                 const MonteCarloOptions& options = {});

struct FitPoint {
    double N = 0.0;
    double value = 0.0;
};

struct ExtrapolationFit {
    int order = 0;
    double limit = 0.0;                // fitted value at N -> infinity
    std::vector<double> coefficients;  // C_1..C_p of the 1/N powers
    double residual = 0.0;             // minimized (weighted) residual norm
};

/// Least-squares fit of value ~ M + C_1/N + ... + C_p/N^p via a column-scaled
/// orthogonal factorization. Optional weights are applied as sqrt(w) row
/// scalings (pass 1/stderr^2 for inverse-variance weighting).
ExtrapolationFit extrapolate(std::span<const FitPoint> points, int order,
                             std::span<const double> weights = {});

struct VariancePoint {
    int N = 0;
    double variance = 0.0;           // sample variance of the per-matrix moment
    double variance_std_error = 0.0; // large-sample standard error of that variance
};

struct VarianceReport {
    int order = 0;
    std::vector<VariancePoint> points;
    bool decreasing_within_noise = false; // each step down within 3-sigma
};

VarianceReport variance_diagnostic(int n, std::span<const int> Ns, std::uint64_t num_matrices,
                                   int k, const EntryDistribution& distribution, std::uint64_t seed,
                                   const MonteCarloOptions& options = {});

/// Fraction of pooled normalized eigenvalues at or above B.
double tail_mass(std::span<const double> pool, double B);

/// Standard normal upper tail P(X >= B) via the complementary error function.
double gaussian_tail(double B);

} // namespace palintoep
