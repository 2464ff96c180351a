#include "palintoep/estimation.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace palintoep {

namespace {

constexpr std::uint64_t kChunk = 512; // samples per reduction block

double pairwise(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t mid = v.size() / 2;
    return pairwise(v.first(mid)) + pairwise(v.subspan(mid));
}

int resolve_threads(int requested) {
    int t = requested;
    if (t <= 0) {
        if (const char* env = std::getenv("PALINTOEP_THREADS")) t = std::atoi(env);
    }
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, t);
}

} // namespace

MonteCarloResult monte_carlo_moments(const EnsembleSpec& spec, std::uint64_t num_matrices,
                                     int k_max, const MonteCarloOptions& options) {
    validate_spec(spec.n, spec.N);
    if (num_matrices < 2) throw ConfigError("Monte Carlo needs at least 2 matrices");
    if (k_max < 0) throw std::invalid_argument("k_max must be non-negative");

    const std::uint64_t chunks = (num_matrices + kChunk - 1) / kChunk;
    const std::size_t korders = static_cast<std::size_t>(k_max) + 1;
    const bool pool = options.pool_eigenvalues && options.path == MomentPath::Eigenvalues;

    std::vector<std::vector<double>> chunk_sum(chunks, std::vector<double>(korders, 0.0));
    std::vector<std::vector<double>> chunk_sumsq(chunks, std::vector<double>(korders, 0.0));

    MonteCarloResult result;
    if (pool) result.pooled_normalized.assign(num_matrices * static_cast<std::uint64_t>(spec.N), 0.0);
    if (options.keep_samples)
        result.sample_moments.assign(korders, std::vector<double>(num_matrices, 0.0));

    std::atomic<std::uint64_t> next_chunk{0};
    std::mutex failure_mutex;
    std::uint64_t failed_sample = num_matrices;
    std::string failure_message;

    auto worker = [&]() {
        std::vector<std::vector<double>> local(korders);
        for (auto& v : local) v.reserve(kChunk);
        for (;;) {
            const std::uint64_t c = next_chunk.fetch_add(1);
            if (c >= chunks) return;
            const std::uint64_t lo = c * kChunk;
            const std::uint64_t hi = std::min(num_matrices, lo + kChunk);
            for (auto& v : local) v.clear();
            for (std::uint64_t s = lo; s < hi; ++s) {
                std::vector<double> moments;
                try {
                    PalindromicMatrix matrix = build_matrix(spec, sample_entries(spec, s));
                    if (options.path == MomentPath::Eigenvalues) {
                        Spectrum spectrum = eigenvalues_symmetric(matrix.dense);
                        moments = empirical_moments(spectrum, k_max);
                        if (pool)
                            std::copy(spectrum.normalized.begin(), spectrum.normalized.end(),
                                      result.pooled_normalized.begin() +
                                          static_cast<std::ptrdiff_t>(s * static_cast<std::uint64_t>(spec.N)));
                    } else {
                        moments = trace_moments(matrix.dense, k_max);
                    }
                } catch (const Error& e) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (s < failed_sample) {
                        failed_sample = s;
                        failure_message = e.what();
                    }
                    return;
                }
                for (std::size_t k = 0; k < korders; ++k) {
                    local[k].push_back(moments[k]);
                    if (options.keep_samples) result.sample_moments[k][s] = moments[k];
                }
            }
            for (std::size_t k = 0; k < korders; ++k) {
                chunk_sum[c][k] = pairwise(local[k]);
                for (double& x : local[k]) x *= x;
                chunk_sumsq[c][k] = pairwise(local[k]);
            }
        }
    };

    const int nthreads = std::min<std::uint64_t>(resolve_threads(options.threads), chunks);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> team;
        team.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) team.emplace_back(worker);
        for (auto& th : team) th.join();
    }
    if (failed_sample < num_matrices)
        throw NumericalError("sample " + std::to_string(failed_sample) + ": " + failure_message);

    // fixed reduction tree over chunk partials, independent of scheduling
    const double count = static_cast<double>(num_matrices);
    std::vector<double> column(chunks);
    result.moments.resize(korders);
    for (std::size_t k = 0; k < korders; ++k) {
        for (std::uint64_t c = 0; c < chunks; ++c) column[c] = chunk_sum[c][k];
        const double total = pairwise(column);
        for (std::uint64_t c = 0; c < chunks; ++c) column[c] = chunk_sumsq[c][k];
        const double total_sq = pairwise(column);
        const double mean = total / count;
        double variance = 0.0;
        if (num_matrices > 1) variance = std::max(0.0, (total_sq - total * total / count) / (count - 1.0));
        result.moments[k] = MomentEstimate{static_cast<int>(k), mean, std::sqrt(variance / count),
                                           num_matrices};
    }
    return result;
}

OddMomentReport odd_moment_decay(int n, std::span<const int> Ns, std::uint64_t num_matrices,
                                 int k, const EntryDistribution& distribution, std::uint64_t seed,
                                 const MonteCarloOptions& options) {
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("odd moment order required");
    OddMomentReport report;
    report.order = k;
    bool clears_noise = !Ns.empty();
    for (int N : Ns) {
        EnsembleSpec spec{n, N, distribution, seed};
        const auto mc = monte_carlo_moments(spec, num_matrices, k, options);
        const auto& est = mc.moments[static_cast<std::size_t>(k)];
        report.points.push_back({N, est.mean, est.std_error});
        if (std::abs(est.mean) <= 2.0 * est.std_error) clears_noise = false;
    }
    if (clears_noise && report.points.size() >= 2) {
        // straight-line fit of log|mean| against log N
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& p : report.points) {
            const double x = std::log(static_cast<double>(p.N));
            const double y = std::log(std::abs(p.mean));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double count = static_cast<double>(report.points.size());
        report.fitted_exponent = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    }
    return report;
}

ExtrapolationFit extrapolate(std::span<const FitPoint> points, int order,
                             std::span<const double> weights) {
    if (order < 0) throw std::invalid_argument("fit order must be non-negative");
    const int rows = static_cast<int>(points.size());
    const int cols = order + 1;
    if (rows < order + 2)
        throw ConfigError("need at least " + std::to_string(order + 2) + " points for order " +
                          std::to_string(order) + ", got " + std::to_string(rows));
    if (!weights.empty() && static_cast<int>(weights.size()) != rows)
        throw ConfigError("weight count does not match point count");
    for (int r = 0; r < rows; ++r) {
        if (!(points[static_cast<std::size_t>(r)].N > 0)) throw ConfigError("all N must be positive");
        for (int q = r + 1; q < rows; ++q)
            if (points[static_cast<std::size_t>(r)].N == points[static_cast<std::size_t>(q)].N)
                throw ConfigError("duplicate N = " + std::to_string(points[static_cast<std::size_t>(r)].N));
    }

    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
        double row_scale = 1.0;
        if (!weights.empty()) {
            if (!(weights[static_cast<std::size_t>(r)] > 0)) throw ConfigError("weights must be positive");
            row_scale = std::sqrt(weights[static_cast<std::size_t>(r)]);
        }
        const double invN = 1.0 / points[static_cast<std::size_t>(r)].N;
        double p = 1.0;
        for (int j = 0; j < cols; ++j) {
            design(r, j) = row_scale * p;
            p *= invN;
        }
        rhs(r) = row_scale * points[static_cast<std::size_t>(r)].value;
    }

    const Eigen::VectorXd col_scale = design.colwise().norm();
    Eigen::MatrixXd scaled = design * col_scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    if (qr.rank() < cols)
        throw NumericalError("rank-deficient design: the N values cannot separate order " +
                             std::to_string(order));
    const Eigen::VectorXd solution = qr.solve(rhs).cwiseQuotient(col_scale);

    ExtrapolationFit fit;
    fit.order = order;
    fit.limit = solution(0);
    fit.coefficients.assign(solution.data() + 1, solution.data() + cols);
    fit.residual = (design * solution - rhs).norm();
    return fit;
}

VarianceReport variance_diagnostic(int n, std::span<const int> Ns, std::uint64_t num_matrices,
                                   int k, const EntryDistribution& distribution, std::uint64_t seed,
                                   const MonteCarloOptions& options) {
    if (Ns.size() < 2) throw ConfigError("variance diagnostic needs at least two N values");
    VarianceReport report;
    report.order = k;
    MonteCarloOptions opts = options;
    opts.keep_samples = true;
    for (int N : Ns) {
        EnsembleSpec spec{n, N, distribution, seed};
        const auto mc = monte_carlo_moments(spec, num_matrices, k, opts);
        const auto& values = mc.sample_moments[static_cast<std::size_t>(k)];
        const double count = static_cast<double>(values.size());
        const double mean = pairwise(values) / count;
        std::vector<double> c2(values.size()), c4(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - mean;
            c2[i] = d * d;
            c4[i] = d * d * d * d;
        }
        const double variance = pairwise(c2) / (count - 1.0);
        const double fourth = pairwise(c4) / count;
        const double var_of_var =
            std::max(0.0, (fourth - variance * variance * (count - 3.0) / (count - 1.0)) / count);
        report.points.push_back({N, variance, std::sqrt(var_of_var)});
    }
    report.decreasing_within_noise = true;
    for (std::size_t i = 0; i + 1 < report.points.size(); ++i) {
        const auto& a = report.points[i];
        const auto& b = report.points[i + 1];
        const double sigma = std::sqrt(a.variance_std_error * a.variance_std_error +
                                       b.variance_std_error * b.variance_std_error);
        if (!(b.variance < a.variance + 3.0 * sigma)) report.decreasing_within_noise = false;
    }
    return report;
}

double tail_mass(std::span<const double> pool, double B) {
    if (pool.empty()) throw std::invalid_argument("eigenvalue pool is empty");
    std::uint64_t hits = 0;
    for (double x : pool)
        if (x >= B) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pool.size());
}

double gaussian_tail(double B) { return 0.5 * std::erfc(B / std::sqrt(2.0)); }

} // namespace palintoep
