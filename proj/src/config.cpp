#include "palintoep/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace palintoep {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where, std::vector<std::string>& problems) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.contains(it.key()))
            problems.push_back("unknown key '" + where + it.key() + "'");
}

} // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
    std::vector<std::string> problems;
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(j,
               {"schema", "n", "N", "num_matrices", "max_moment", "distribution", "seed",
                "fit_order", "moment_path", "histogram", "outputs"},
               "", problems);

    RunConfig cfg;
    try {
        cfg.schema = j.at("schema").get<int>();
        if (cfg.schema != 1) problems.push_back("unsupported schema version " + std::to_string(cfg.schema));
        cfg.n = j.at("n").get<int>();
        cfg.Ns = j.at("N").get<std::vector<int>>();
        cfg.num_matrices = j.at("num_matrices").get<std::uint64_t>();
        cfg.max_moment = j.at("max_moment").get<int>();
        if (j.contains("distribution")) cfg.distribution = EntryDistribution::parse(j["distribution"].get<std::string>());
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("fit_order")) cfg.fit_order = j["fit_order"].get<int>();
        if (j.contains("moment_path")) {
            const std::string path = j["moment_path"].get<std::string>();
            if (path == "eigenvalues") cfg.path = MomentPath::Eigenvalues;
            else if (path == "trace") cfg.path = MomentPath::TracePowers;
            else problems.push_back("moment_path must be 'eigenvalues' or 'trace'");
        }
        if (j.contains("histogram")) {
            const auto& h = j["histogram"];
            check_keys(h, {"enabled", "bins", "min", "max"}, "histogram.", problems);
            if (h.contains("enabled")) cfg.histogram.enabled = h["enabled"].get<bool>();
            if (h.contains("bins")) cfg.histogram.bins = h["bins"].get<int>();
            if (h.contains("min")) cfg.histogram.lo = h["min"].get<double>();
            if (h.contains("max")) cfg.histogram.hi = h["max"].get<double>();
        }
        if (j.contains("outputs")) {
            const auto& o = j["outputs"];
            check_keys(o, {"moments_csv", "report_json", "histogram_csv_prefix"}, "outputs.", problems);
            if (o.contains("moments_csv")) cfg.outputs.moments_csv = o["moments_csv"].get<std::string>();
            if (o.contains("report_json")) cfg.outputs.report_json = o["report_json"].get<std::string>();
            if (o.contains("histogram_csv_prefix"))
                cfg.outputs.histogram_csv_prefix = o["histogram_csv_prefix"].get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }

    if (cfg.n < 0) problems.push_back("n must be non-negative");
    if (cfg.Ns.empty()) problems.push_back("N list must not be empty");
    for (int N : cfg.Ns)
        if (cfg.n >= 0 && !is_valid_dimension(cfg.n, N))
            problems.push_back("N = " + std::to_string(N) + " must be a multiple of 2^(n+1) = " +
                               std::to_string(1L << (cfg.n + 1)));
    if (cfg.num_matrices < 2) problems.push_back("num_matrices must be at least 2");
    if (cfg.max_moment < 0 || cfg.max_moment % 2 != 0)
        problems.push_back("max_moment must be even and non-negative");
    if (cfg.max_moment > 12) problems.push_back("max_moment must be at most 12");
    if (cfg.fit_order < 0) problems.push_back("fit_order must be non-negative");
    if (cfg.histogram.bins < 1) problems.push_back("histogram.bins must be positive");
    if (!(cfg.histogram.lo < cfg.histogram.hi)) problems.push_back("histogram range must satisfy min < max");
    if (cfg.histogram.enabled && cfg.path == MomentPath::TracePowers)
        problems.push_back("histograms need moment_path = 'eigenvalues'");

    if (!problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // translate the byte offset into line and column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') { ++line; col = 1; }
            else ++col;
        }
        throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
    }
    return parse_run_config(j);
}

nlohmann::ordered_json canonical_config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["schema"] = cfg.schema;
    j["n"] = cfg.n;
    j["N"] = cfg.Ns;
    j["num_matrices"] = cfg.num_matrices;
    j["max_moment"] = cfg.max_moment;
    j["distribution"] = cfg.distribution.name();
    j["seed"] = cfg.seed;
    j["fit_order"] = cfg.fit_order;
    j["moment_path"] = cfg.path == MomentPath::Eigenvalues ? "eigenvalues" : "trace";
    j["histogram"] = {{"enabled", cfg.histogram.enabled},
                      {"bins", cfg.histogram.bins},
                      {"min", cfg.histogram.lo},
                      {"max", cfg.histogram.hi}};
    j["outputs"] = {{"moments_csv", cfg.outputs.moments_csv},
                    {"report_json", cfg.outputs.report_json},
                    {"histogram_csv_prefix", cfg.outputs.histogram_csv_prefix}};
    return j;
}

} // namespace palintoep
