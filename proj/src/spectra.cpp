#include "palintoep/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace palintoep {

namespace {

double pairwise_sum_pow(const std::vector<double>& v, int p, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += (p == 1 ? v[i] : v[i] * v[i]);
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum_pow(v, p, lo, mid) + pairwise_sum_pow(v, p, mid, hi);
}

} // namespace

Spectrum eigenvalues_symmetric(const Eigen::MatrixXd& matrix) {
    const Eigen::Index N = matrix.rows();
    if (N != matrix.cols()) throw NumericalError("matrix is not square");
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym != 0.0) throw NumericalError("matrix is not symmetric (max deviation " + std::to_string(asym) + ")");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("symmetric eigensolver did not converge");

    Spectrum s;
    s.dimension = static_cast<int>(N);
    s.raw.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + N);
    std::sort(s.raw.begin(), s.raw.end());

    // residual contract against trace and Frobenius identities
    const double amax = matrix.cwiseAbs().maxCoeff();
    const double trace = matrix.trace();
    const double frob2 = matrix.squaredNorm();
    const double sum1 = pairwise_sum_pow(s.raw, 1, 0, s.raw.size());
    const double sum2 = pairwise_sum_pow(s.raw, 2, 0, s.raw.size());
    const double nd = static_cast<double>(N);
    if (std::abs(sum1 - trace) > 1e-8 * nd * amax)
        throw NumericalError("eigenvalue sum violates the trace identity");
    if (std::abs(sum2 - frob2) > 1e-8 * nd * nd * amax * amax)
        throw NumericalError("eigenvalue square sum violates the Frobenius identity");

    const double scale = 1.0 / std::sqrt(nd);
    s.normalized.resize(s.raw.size());
    for (std::size_t i = 0; i < s.raw.size(); ++i) s.normalized[i] = s.raw[i] * scale;
    return s;
}

std::vector<double> empirical_moments(const Spectrum& spectrum, int k_max) {
    if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");
    const double invN = 1.0 / static_cast<double>(spectrum.dimension);
    std::vector<double> moments(static_cast<std::size_t>(k_max) + 1, 0.0);
    moments[0] = 1.0;
    std::vector<double> power(spectrum.normalized);
    for (int k = 1; k <= k_max; ++k) {
        if (k > 1)
            for (std::size_t i = 0; i < power.size(); ++i) power[i] *= spectrum.normalized[i];
        moments[static_cast<std::size_t>(k)] = pairwise_sum_pow(power, 1, 0, power.size()) * invN;
    }
    return moments;
}

namespace {

double normalized_trace(double trace, int N, int k) {
    return trace / std::pow(static_cast<double>(N), 0.5 * k + 1.0);
}

} // namespace

double trace_power_moment(const Eigen::MatrixXd& matrix, int k) {
    if (k < 0) throw std::invalid_argument("power must be non-negative");
    const int N = static_cast<int>(matrix.rows());
    if (k == 0) return 1.0;
    if (k == 1) return normalized_trace(matrix.trace(), N, 1);
    if (k == 2) return normalized_trace(matrix.squaredNorm(), N, 2);
    // tr(A^2h) = ||A^h||_F^2 and tr(A^(2h+1)) = <A^h, A^(h+1)>_F
    const int h = k / 2;
    Eigen::MatrixXd half = Eigen::MatrixXd::Identity(N, N);
    Eigen::MatrixXd base = matrix;
    for (int e = h; e > 0; e >>= 1) {
        if (e & 1) half = (half * base).eval();
        if (e > 1) base = (base * base).eval();
    }
    if (k % 2 == 0) return normalized_trace(half.squaredNorm(), N, k);
    const Eigen::MatrixXd next = half * matrix;
    return normalized_trace(half.cwiseProduct(next).sum(), N, k);
}

std::vector<double> trace_moments(const Eigen::MatrixXd& matrix, int k_max) {
    if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");
    const int N = static_cast<int>(matrix.rows());
    std::vector<double> moments(static_cast<std::size_t>(k_max) + 1, 0.0);
    moments[0] = 1.0;
    if (k_max >= 1) moments[1] = normalized_trace(matrix.trace(), N, 1);
    if (k_max >= 2) moments[2] = normalized_trace(matrix.squaredNorm(), N, 2);
    if (k_max <= 2) return moments;

    const int h = (k_max + 1) / 2; // highest power held in memory
    Eigen::MatrixXd prev = matrix;
    Eigen::MatrixXd cur = matrix * matrix;
    for (int j = 2; j <= h; ++j) {
        if (2 * j <= k_max) moments[static_cast<std::size_t>(2 * j)] = normalized_trace(cur.squaredNorm(), N, 2 * j);
        const int odd = 2 * j - 1;
        if (odd <= k_max && odd >= 3)
            moments[static_cast<std::size_t>(odd)] = normalized_trace(prev.cwiseProduct(cur).sum(), N, odd);
        if (j < h) {
            prev.swap(cur);
            cur = prev * matrix;
        }
    }
    return moments;
}

Histogram histogram(std::span<const double> values, int bins, double lo, double hi) {
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
    if (!(lo < hi)) throw std::invalid_argument("histogram range must satisfy lo < hi");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    h.total = values.size();
    const double width = (hi - lo) / bins;
    for (double x : values) {
        if (x < lo) { ++h.below; continue; }
        if (x > hi) { ++h.above; continue; }
        int b = static_cast<int>((x - lo) / width);
        if (b >= bins) b = bins - 1; // hi itself lands in the closed last bin
        ++h.counts[static_cast<std::size_t>(b)];
    }
    h.mass.resize(h.counts.size(), 0.0);
    if (h.total > 0)
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            h.mass[b] = static_cast<double>(h.counts[b]) / static_cast<double>(h.total);
    return h;
}

} // namespace palintoep
