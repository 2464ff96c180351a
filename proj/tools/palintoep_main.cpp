// palintoep: spectral laboratory for highly palindromic Toeplitz ensembles.
// Subcommands: validate, simulate, exact, formulas, extrapolate, configurations.
// Exit codes: 0 success, 2 config error, 3 enumeration guard exceeded,
// 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "palintoep/config.hpp"
#include "palintoep/ensemble.hpp"
#include "palintoep/errors.hpp"
#include "palintoep/estimation.hpp"
#include "palintoep/matchings.hpp"
#include "palintoep/report.hpp"
#include "palintoep/spectra.hpp"
#include "palintoep/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace palintoep;

void emit(const ordered_json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + out_path + "'");
    out << text;
}

std::pair<int, int> parse_range(const std::string& text, const char* what) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            const int v = std::stoi(text);
            return {v, v};
        }
        return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ConfigError(std::string("bad ") + what + " range '" + text + "' (use A or A:B)");
    }
}

// ---- simulate ----

struct SimulateArgs {
    std::string config_path;
    RunConfig flags_config;
    std::string dist_name = "gaussian";
    std::string path_name = "eigenvalues";
    bool hist_enabled = false;
    bool timing = false;
};

int run_simulate(SimulateArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) {
        cfg = load_run_config(args.config_path);
    } else {
        cfg = args.flags_config;
        cfg.distribution = EntryDistribution::parse(args.dist_name);
        if (args.path_name == "trace") cfg.path = MomentPath::TracePowers;
        else if (args.path_name != "eigenvalues")
            throw ConfigError("moment path must be 'eigenvalues' or 'trace'");
        cfg.histogram.enabled = args.hist_enabled;
        // round-trip through the strict parser so both entry points agree
        cfg = parse_run_config(nlohmann::json::parse(canonical_config_json(cfg).dump()));
    }
    if (cfg.outputs.moments_csv.empty()) throw ConfigError("outputs.moments_csv is required");
    if (cfg.histogram.enabled && cfg.outputs.histogram_csv_prefix.empty())
        throw ConfigError("histogram output needs outputs.histogram_csv_prefix");

    const auto start = std::chrono::steady_clock::now();
    std::vector<std::string> written;
    auto write_file = [&](const std::string& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + path + "'");
        out << text;
        out.flush();
        if (!out) throw ConfigError("write to '" + path + "' failed");
        written.push_back(path);
    };

    try {
        MomentTable table;
        ordered_json hist_meta = ordered_json::object();
        MonteCarloOptions options;
        options.path = cfg.path;
        options.pool_eigenvalues = cfg.histogram.enabled;
        for (int N : cfg.Ns) {
            EnsembleSpec spec{cfg.n, N, cfg.distribution, cfg.seed};
            const auto mc = monte_carlo_moments(spec, cfg.num_matrices, cfg.max_moment, options);
            for (int k = 1; k <= cfg.max_moment; ++k) {
                const auto& est = mc.moments[static_cast<std::size_t>(k)];
                table.push_back({N, cfg.num_matrices, k, est.mean, est.std_error});
            }
            if (cfg.histogram.enabled) {
                const Histogram h = histogram(mc.pooled_normalized, cfg.histogram.bins,
                                              cfg.histogram.lo, cfg.histogram.hi);
                const std::string path =
                    cfg.outputs.histogram_csv_prefix + "_N" + std::to_string(N) + ".csv";
                write_file(path, histogram_csv(h));
                hist_meta[std::to_string(N)] = {
                    {"file", path},
                    {"below_range_mass",
                     static_cast<double>(h.below) / static_cast<double>(h.total)},
                    {"above_range_mass",
                     static_cast<double>(h.above) / static_cast<double>(h.total)}};
            }
        }
        write_file(cfg.outputs.moments_csv, moment_table_csv(table));

        ordered_json fits = ordered_json::object();
        if (cfg.fit_order >= 1 && static_cast<int>(cfg.Ns.size()) >= cfg.fit_order + 2) {
            for (int k = 2; k <= cfg.max_moment; k += 2) {
                std::vector<FitPoint> points;
                for (const auto& row : table)
                    if (row.order == k) points.push_back({static_cast<double>(row.N), row.mean});
                fits[std::to_string(k)] = fit_json(extrapolate(points, cfg.fit_order));
            }
        }

        if (!cfg.outputs.report_json.empty()) {
            ordered_json report;
            report["schema"] = 1;
            report["config"] = canonical_config_json(cfg);
            report["versions"] = {{"palintoep", kVersion},
                                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                std::to_string(EIGEN_MINOR_VERSION)}};
            report["moments_csv"] = cfg.outputs.moments_csv;
            if (!fits.empty()) report["fits"] = fits;
            if (cfg.histogram.enabled) report["histograms"] = hist_meta;
            if (args.timing)
                report["wall_time_seconds"] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            write_file(cfg.outputs.report_json, report.dump(2) + "\n");
        }
    } catch (...) {
        for (const auto& path : written) std::filesystem::remove(path);
        throw;
    }
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    return 0;
}

// ---- configurations ----

int run_configurations(int n, const std::vector<int>& Ns, int m, const std::string& out_path,
                       std::optional<OffsetFilter> filter) {
    if (Ns.empty()) throw ConfigError("give at least one N");
    ordered_json root;
    root["n"] = n;
    root["m"] = m;
    ordered_json per_n = ordered_json::array();
    const auto matchings = enumerate_pair_matchings(2 * m);
    std::vector<std::vector<ConfigurationReport>> by_matching(matchings.size());
    for (int N : Ns) {
        const auto reports = configuration_contributions(N, n, m, filter);
        ordered_json entry;
        entry["N"] = N;
        ordered_json list = ordered_json::array();
        for (std::size_t t = 0; t < reports.size(); ++t) {
            list.push_back(configuration_report_json(reports[t]));
            by_matching[t].push_back(reports[t]);
        }
        entry["configurations"] = list;
        per_n.push_back(entry);
    }
    root["reports"] = per_n;

    if (Ns.size() >= 3) {
        // defect model: main-term contribution ~ limit + coeff / N
        ordered_json fits = ordered_json::array();
        for (std::size_t t = 0; t < matchings.size(); ++t) {
            std::vector<FitPoint> points;
            for (const auto& r : by_matching[t])
                points.push_back({static_cast<double>(r.N), r.negative_contribution});
            const auto fit = extrapolate(points, 1);
            ordered_json f;
            ordered_json pairs = ordered_json::array();
            for (const auto& [a, b] : matchings[t].pairs) pairs.push_back({a, b});
            f["matching"] = pairs;
            f["limit"] = fit.limit;
            f["one_over_N_coefficient"] = fit.coefficients[0];
            f["residual"] = fit.residual;
            fits.push_back(f);
        }
        root["negative_contribution_fits"] = fits;
    }
    emit(root, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for highly palindromic Toeplitz ensembles"};
    app.set_version_flag("--version", palintoep::kVersion);
    app.require_subcommand(1);

    // validate
    auto* cmd_validate = app.add_subcommand("validate", "check a config file");
    std::string validate_path;
    cmd_validate->add_option("--config", validate_path, "config JSON path")->required();

    // simulate
    SimulateArgs sim;
    auto* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo moment table");
    auto* sim_config = cmd_simulate->add_option("--config", sim.config_path, "config JSON path");
    sim.flags_config.schema = 1;
    auto* sim_n = cmd_simulate->add_option("--n", sim.flags_config.n, "palindromicity");
    cmd_simulate->add_option("--N", sim.flags_config.Ns, "matrix dimensions");
    cmd_simulate->add_option("--sims", sim.flags_config.num_matrices, "matrices per dimension");
    cmd_simulate->add_option("--k", sim.flags_config.max_moment, "largest (even) moment");
    cmd_simulate->add_option("--dist", sim.dist_name, "gaussian|rademacher|uniform");
    cmd_simulate->add_option("--seed", sim.flags_config.seed, "RNG seed");
    cmd_simulate->add_option("--order", sim.flags_config.fit_order, "extrapolation order");
    cmd_simulate->add_option("--path", sim.path_name, "eigenvalues|trace");
    cmd_simulate->add_option("--out", sim.flags_config.outputs.moments_csv, "moments CSV path");
    cmd_simulate->add_option("--report", sim.flags_config.outputs.report_json, "report JSON path");
    cmd_simulate->add_flag("--hist", sim.hist_enabled, "emit eigenvalue histograms");
    cmd_simulate->add_option("--hist-prefix", sim.flags_config.outputs.histogram_csv_prefix,
                             "histogram CSV path prefix");
    cmd_simulate->add_option("--hist-bins", sim.flags_config.histogram.bins, "histogram bins");
    cmd_simulate->add_option("--hist-min", sim.flags_config.histogram.lo, "histogram lower edge");
    cmd_simulate->add_option("--hist-max", sim.flags_config.histogram.hi, "histogram upper edge");
    cmd_simulate->add_flag("--timing", sim.timing, "include wall time in the report JSON");
    sim_config->excludes(sim_n);

    // exact
    auto* cmd_exact = app.add_subcommand("exact", "exact finite-N expected moment");
    int exact_n = 0, exact_N = 0, exact_k = 0;
    std::string exact_dist = "gaussian", exact_out;
    cmd_exact->add_option("--n", exact_n, "palindromicity")->required();
    cmd_exact->add_option("--N", exact_N, "dimension")->required();
    cmd_exact->add_option("--k", exact_k, "moment order")->required();
    cmd_exact->add_option("--dist", exact_dist, "gaussian|rademacher|uniform");
    cmd_exact->add_option("--out", exact_out, "output JSON path (default stdout)");

    // formulas
    auto* cmd_formulas = app.add_subcommand("formulas", "closed-form moment catalog");
    std::string formulas_m = "2:5", formulas_n = "0:3", formulas_out;
    cmd_formulas->add_option("--m", formulas_m, "m or m_lo:m_hi (2m-th moments)");
    cmd_formulas->add_option("--n", formulas_n, "n or n_lo:n_hi");
    cmd_formulas->add_option("--out", formulas_out, "output JSON path (default stdout)");

    // extrapolate
    auto* cmd_extrapolate = app.add_subcommand("extrapolate", "1/N power fit of a moment column");
    std::string extrap_in, extrap_out;
    int extrap_k = 4, extrap_order = 3;
    bool extrap_weighted = false;
    cmd_extrapolate->add_option("--in", extrap_in, "moments CSV path")->required();
    cmd_extrapolate->add_option("--k", extrap_k, "moment order to fit");
    auto* extrap_order_opt = cmd_extrapolate->add_option(
        "--order", extrap_order, "number of 1/N powers (default min(3, rows - 2))");
    cmd_extrapolate->add_flag("--weighted", extrap_weighted, "weight rows by 1/stderr^2");
    cmd_extrapolate->add_option("--out", extrap_out, "output JSON path (default stdout)");

    // configurations
    auto* cmd_configurations =
        app.add_subcommand("configurations", "per-matching contribution counts");
    int conf_n = 1, conf_m = 2;
    std::vector<int> conf_Ns;
    std::string conf_out;
    int conf_offset_c = -1;
    bool conf_offset_cross = false;
    cmd_configurations->add_option("--n", conf_n, "palindromicity")->required();
    cmd_configurations->add_option("--N", conf_Ns, "dimensions")->required();
    cmd_configurations->add_option("--m", conf_m, "number of pairs (2m positions)")->required();
    cmd_configurations->add_option("--offset-c", conf_offset_c,
                                   "restrict first pair to offset c*N/2^n (default: no filter)");
    cmd_configurations->add_flag("--offset-cross", conf_offset_cross,
                                 "use the crossing offset c*N/2^n - 1");
    cmd_configurations->add_option("--out", conf_out, "output JSON path (default stdout)");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        if (*cmd_validate) {
            const RunConfig cfg = load_run_config(validate_path);
            std::cout << "ok: " << cfg.Ns.size() << " dimension(s), n = " << cfg.n << ", "
                      << cfg.num_matrices << " matrices\n";
            return 0;
        }
        if (*cmd_simulate) return run_simulate(sim);
        if (*cmd_exact) {
            const EntryDistribution dist = EntryDistribution::parse(exact_dist);
            const double value = exact_expected_moment(exact_N, exact_n, exact_k, dist);
            ordered_json j;
            j["value"] = value;
            j["N"] = exact_N;
            j["n"] = exact_n;
            j["k"] = exact_k;
            j["distribution"] = dist.name();
            emit(j, exact_out);
            return 0;
        }
        if (*cmd_formulas) {
            const auto [m_lo, m_hi] = parse_range(formulas_m, "m");
            const auto [n_lo, n_hi] = parse_range(formulas_n, "n");
            if (m_lo < 1 || m_hi < m_lo || n_lo < 0 || n_hi < n_lo)
                throw ConfigError("need 1 <= m_lo <= m_hi and 0 <= n_lo <= n_hi");
            if (m_hi > 16 || n_hi > 16) throw GuardError("formula table is guarded at m, n <= 16");
            ordered_json rows = ordered_json::array();
            for (int m = m_lo; m <= m_hi; ++m)
                for (int n = n_lo; n <= n_hi; ++n) {
                    ordered_json row;
                    row["m"] = m;
                    row["n"] = n;
                    row["fourth_moment_limit"] = fourth_moment_limit(n);
                    row["upper_bound"] = upper_bound_moment(m, n);
                    row["lower_bound_conjectured"] = lower_bound_moment(m, n, true);
                    row["lower_bound_unconditional"] = lower_bound_moment(m, n, false);
                    if (n == 1) {
                        row["adjacent_contribution"] = dpt_adjacent_contribution(m);
                        row["conjectured_moment"] = conjectured_moment(m, 1);
                    }
                    rows.push_back(row);
                }
            ordered_json j;
            j["rows"] = rows;
            emit(j, formulas_out);
            return 0;
        }
        if (*cmd_extrapolate) {
            std::ifstream in(extrap_in, std::ios::binary);
            if (!in) throw ConfigError("cannot open '" + extrap_in + "'");
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const MomentTable table = parse_moment_table_csv(text);
            std::vector<FitPoint> points;
            std::vector<double> weights;
            for (const auto& row : table) {
                if (row.order != extrap_k) continue;
                points.push_back({static_cast<double>(row.N), row.mean});
                if (extrap_weighted) {
                    if (!(row.std_error > 0))
                        throw ConfigError("weighted fit needs positive stderr for every row");
                    weights.push_back(1.0 / (row.std_error * row.std_error));
                }
            }
            int order = extrap_order;
            if (extrap_order_opt->count() == 0)
                order = std::min<int>(3, static_cast<int>(points.size()) - 2);
            const auto fit = extrapolate(points, order,
                                         extrap_weighted ? std::span<const double>(weights)
                                                         : std::span<const double>());
            emit(fit_json(fit), extrap_out);
            return 0;
        }
        if (*cmd_configurations) {
            std::optional<OffsetFilter> filter;
            if (conf_offset_c >= 0) filter = OffsetFilter{conf_offset_c, conf_offset_cross};
            return run_configurations(conf_n, conf_Ns, conf_m, conf_out, filter);
        }
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const GuardError& e) {
        std::cerr << "guard exceeded: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
