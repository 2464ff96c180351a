#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "palintoep/ensemble.hpp"
#include "palintoep/estimation.hpp"
#include "palintoep/matchings.hpp"
#include "palintoep/spectra.hpp"
#include "palintoep/version.hpp"

namespace py = pybind11;
using namespace palintoep;

namespace {

EnsembleSpec make_spec(int n, int N, const std::string& distribution, std::uint64_t seed) {
    return EnsembleSpec{n, N, EntryDistribution::parse(distribution), seed};
}

Eigen::MatrixXd as_matrix(const py::array_t<double>& array) {
    const auto buf = array.request();
    if (buf.ndim != 2 || buf.shape[0] != buf.shape[1])
        throw py::value_error("expected a square 2-d array");
    const auto rows = static_cast<Eigen::Index>(buf.shape[0]);
    Eigen::MatrixXd m(rows, rows);
    const auto view = array.unchecked<2>();
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < rows; ++j) m(i, j) = view(i, j);
    return m;
}

py::array_t<double> as_array(const std::vector<double>& values) {
    py::array_t<double> out(static_cast<py::ssize_t>(values.size()));
    std::copy(values.begin(), values.end(), out.mutable_data());
    return out;
}

py::dict estimate_dict(const MomentEstimate& e) {
    py::dict d;
    d["order"] = e.order;
    d["mean"] = e.mean;
    d["stderr"] = e.std_error;
    d["num_samples"] = e.num_samples;
    return d;
}

py::dict report_dict(const ConfigurationReport& r) {
    py::dict d;
    d["matching"] = r.matching.pairs;
    d["count"] = r.count;
    d["contribution"] = r.contribution;
    d["positive_sign_count"] = r.any_positive;
    d["negative_sign_count"] = r.all_negative;
    d["negative_contribution"] = r.negative_contribution;
    d["shared_link_count"] = r.shared_link;
    d["N"] = r.N;
    d["n"] = r.n;
    d["m"] = r.m;
    return d;
}

} // namespace

PYBIND11_MODULE(_palintoep, m) {
    m.doc() = "eigenvalue moments of highly palindromic Toeplitz ensembles";
    m.attr("__version__") = kVersion;

    const auto base = py::register_exception<Error>(m, "PalintoepError");
    py::register_exception<DimensionError>(m, "DimensionError", base);
    py::register_exception<GuardError>(m, "GuardError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<NumericalError>(m, "NumericalError", base);

    m.def("validate_spec", &validate_spec, py::arg("n"), py::arg("N"));
    m.def("is_valid_dimension", &is_valid_dimension, py::arg("n"), py::arg("N"));
    m.def("link_index", &link_index, py::arg("i"), py::arg("j"), py::arg("N"), py::arg("n"));

    m.def(
        "sample_entries",
        [](int n, int N, const std::string& distribution, std::uint64_t seed,
           std::uint64_t sample_index) {
            return as_array(sample_entries(make_spec(n, N, distribution, seed), sample_index));
        },
        py::arg("n"), py::arg("N"), py::arg("distribution") = "gaussian", py::arg("seed") = 0,
        py::arg("sample_index") = 0);

    m.def(
        "build_matrix",
        [](int n, int N, const std::vector<double>& entries) {
            const auto m2 = build_matrix(make_spec(n, N, "gaussian", 0), entries);
            py::array_t<double> out({N, N});
            auto view = out.mutable_unchecked<2>();
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) view(i, j) = m2.dense(i, j);
            return out;
        },
        py::arg("n"), py::arg("N"), py::arg("entries"));

    m.def(
        "eigenvalues",
        [](const py::array_t<double>& matrix) {
            return as_array(eigenvalues_symmetric(as_matrix(matrix)).raw);
        },
        py::arg("matrix"), "sorted eigenvalues of a real symmetric matrix");

    m.def(
        "spectral_moments",
        [](const py::array_t<double>& matrix, int k_max) {
            return as_array(empirical_moments(eigenvalues_symmetric(as_matrix(matrix)), k_max));
        },
        py::arg("matrix"), py::arg("k_max"));

    m.def(
        "trace_power_moment",
        [](const py::array_t<double>& matrix, int k) {
            return trace_power_moment(as_matrix(matrix), k);
        },
        py::arg("matrix"), py::arg("k"));

    m.def(
        "exact_expected_moment",
        [](int N, int n, int k, const std::string& distribution) {
            return exact_expected_moment(N, n, k, EntryDistribution::parse(distribution));
        },
        py::arg("N"), py::arg("n"), py::arg("k"), py::arg("distribution") = "gaussian");

    m.def("double_factorial", &double_factorial, py::arg("r"));
    m.def(
        "enumerate_pair_matchings",
        [](int two_m) {
            std::vector<std::vector<std::pair<int, int>>> out;
            for (const auto& pm : enumerate_pair_matchings(two_m)) out.push_back(pm.pairs);
            return out;
        },
        py::arg("two_m"));

    m.def(
        "configuration_contributions",
        [](int N, int n, int m_pairs) {
            py::list out;
            for (const auto& r : configuration_contributions(N, n, m_pairs))
                out.append(report_dict(r));
            return out;
        },
        py::arg("N"), py::arg("n"), py::arg("m"));

    m.def(
        "adjacent_region_counts",
        [](int N, int n, int c) {
            const auto r = adjacent_region_counts(N, n, c);
            return py::make_tuple(r.no_cross, r.cross);
        },
        py::arg("N"), py::arg("n"), py::arg("c"));

    m.def("fourth_moment_limit", &fourth_moment_limit, py::arg("n"));
    m.def("dpt_adjacent_contribution", &dpt_adjacent_contribution, py::arg("m"));
    m.def("dpt_adjacent_sum", &dpt_adjacent_sum, py::arg("m"));
    m.def("upper_bound_moment", &upper_bound_moment, py::arg("m"), py::arg("n"));
    m.def("lower_bound_moment", &lower_bound_moment, py::arg("m"), py::arg("n"),
          py::arg("assume_conjecture") = true);
    m.def("conjectured_moment", &conjectured_moment, py::arg("m"), py::arg("n") = 1);

    m.def(
        "monte_carlo_moments",
        [](int n, int N, const std::string& distribution, std::uint64_t seed,
           std::uint64_t num_matrices, int k_max, const std::string& path, int threads) {
            MonteCarloOptions options;
            options.threads = threads;
            if (path == "trace") options.path = MomentPath::TracePowers;
            else if (path != "eigenvalues")
                throw py::value_error("path must be 'eigenvalues' or 'trace'");
            const auto result =
                monte_carlo_moments(make_spec(n, N, distribution, seed), num_matrices, k_max, options);
            py::list out;
            for (const auto& e : result.moments) out.append(estimate_dict(e));
            return out;
        },
        py::arg("n"), py::arg("N"), py::arg("distribution"), py::arg("seed"),
        py::arg("num_matrices"), py::arg("k_max"), py::arg("path") = "eigenvalues",
        py::arg("threads") = 0);

    m.def(
        "extrapolate",
        [](const std::vector<double>& Ns, const std::vector<double>& values, int order,
           const std::vector<double>& weights) {
            if (Ns.size() != values.size()) throw py::value_error("N and value lengths differ");
            std::vector<FitPoint> points;
            for (std::size_t i = 0; i < Ns.size(); ++i) points.push_back({Ns[i], values[i]});
            const auto fit = extrapolate(points, order, weights);
            py::dict d;
            d["order"] = fit.order;
            d["limit"] = fit.limit;
            d["coefficients"] = fit.coefficients;
            d["residual"] = fit.residual;
            return d;
        },
        py::arg("N"), py::arg("values"), py::arg("order"),
        py::arg("weights") = std::vector<double>{});

    m.def("gaussian_tail", &gaussian_tail, py::arg("B"));
    m.def(
        "tail_mass",
        [](const std::vector<double>& pool, double B) { return tail_mass(pool, B); },
        py::arg("pool"), py::arg("B"));
}
