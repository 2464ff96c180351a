#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "palintoep/errors.hpp"

namespace palintoep {

/// Eigenvalues of one matrix, ascending, plus the sqrt(N)-normalized copy.
struct Spectrum {
    std::vector<double> raw;        // sorted ascending
    std::vector<double> normalized; // raw / sqrt(N)
    int dimension = 0;
};

/// Full symmetric eigendecomposition (values only). Enforces the residual
/// contract |sum(lambda) - tr A| <= 1e-8 N max|a| and
/// |sum(lambda^2) - ||A||_F^2| <= 1e-8 N^2 max|a|^2; violations throw
/// NumericalError.
Spectrum eigenvalues_symmetric(const Eigen::MatrixXd& matrix);

/// Moments of the normalized spectral measure: entry k is
/// N^-(k/2+1) sum_i lambda_i^k = (1/N) sum_i (lambda_i/sqrt(N))^k.
std::vector<double> empirical_moments(const Spectrum& spectrum, int k_max);

/// tr(A^k) / N^(k/2+1) by dense multiplication only; the half power is
/// built by binary exponentiation and the trace recovered from Frobenius
/// products, so no eigendecomposition is involved.
double trace_power_moment(const Eigen::MatrixXd& matrix, int k);

/// All trace-path moments up to k_max in one sweep (shares the power chain).
std::vector<double> trace_moments(const Eigen::MatrixXd& matrix, int k_max);

/// Uniform histogram, bins left-closed/right-open with the last bin closed.
/// Mass outside [lo, hi] is tallied separately, so sum(mass) <= 1.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
    std::vector<double> mass;
    std::uint64_t total = 0;
    std::uint64_t below = 0;
    std::uint64_t above = 0;

    double bin_left(int b) const { return lo + (hi - lo) * b / static_cast<double>(counts.size()); }
    double bin_right(int b) const { return lo + (hi - lo) * (b + 1) / static_cast<double>(counts.size()); }
};

Histogram histogram(std::span<const double> values, int bins, double lo, double hi);

} // namespace palintoep
