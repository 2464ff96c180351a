#include "palintoep/report.hpp"

#include <charconv>
#include <sstream>

#include "palintoep/errors.hpp"

namespace palintoep {

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string moment_table_csv(const MomentTable& table) {
    std::string out = "N,sims,moment,mean,stderr\n";
    for (const auto& row : table) {
        out += std::to_string(row.N);
        out += ',';
        out += std::to_string(row.sims);
        out += ',';
        out += std::to_string(row.order);
        out += ',';
        out += format_double(row.mean);
        out += ',';
        out += format_double(row.std_error);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_number(const std::string& s, int line_no) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError("CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

} // namespace

MomentTable parse_moment_table_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV");
    if (split_csv_line(line) != std::vector<std::string>{"N", "sims", "moment", "mean", "stderr"})
        throw ConfigError("CSV header must be exactly 'N,sims,moment,mean,stderr'");
    MomentTable table;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw ConfigError("CSV line " + std::to_string(line_no) + ": expected 5 fields");
        MomentTableRow row;
        row.N = static_cast<int>(parse_number(fields[0], line_no));
        row.sims = static_cast<std::uint64_t>(parse_number(fields[1], line_no));
        row.order = static_cast<int>(parse_number(fields[2], line_no));
        row.mean = parse_number(fields[3], line_no);
        row.std_error = parse_number(fields[4], line_no);
        table.push_back(row);
    }
    return table;
}

std::string histogram_csv(const Histogram& hist) {
    std::string out = "bin_left,bin_right,mass\n";
    for (std::size_t b = 0; b < hist.mass.size(); ++b) {
        out += format_double(hist.bin_left(static_cast<int>(b)));
        out += ',';
        out += format_double(hist.bin_right(static_cast<int>(b)));
        out += ',';
        out += format_double(hist.mass[b]);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json fit_json(const ExtrapolationFit& fit) {
    nlohmann::ordered_json j;
    j["order"] = fit.order;
    j["limit"] = fit.limit;
    j["coefficients"] = fit.coefficients;
    j["residual"] = fit.residual;
    return j;
}

nlohmann::ordered_json configuration_report_json(const ConfigurationReport& report) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& [a, b] : report.matching.pairs) pairs.push_back({a, b});
    j["matching"] = pairs;
    j["count"] = report.count;
    j["contribution"] = report.contribution;
    j["positive_sign_count"] = report.any_positive;
    j["negative_sign_count"] = report.all_negative;
    j["negative_contribution"] = report.negative_contribution;
    j["shared_link_count"] = report.shared_link;
    j["N"] = report.N;
    j["n"] = report.n;
    j["m"] = report.m;
    return j;
}

} // namespace palintoep
