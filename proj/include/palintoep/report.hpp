#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "palintoep/estimation.hpp"
#include "palintoep/matchings.hpp"
#include "palintoep/spectra.hpp"

namespace palintoep {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

struct MomentTableRow {
    int N = 0;
    std::uint64_t sims = 0;
    int order = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

using MomentTable = std::vector<MomentTableRow>;

std::string moment_table_csv(const MomentTable& table);
MomentTable parse_moment_table_csv(const std::string& text);

std::string histogram_csv(const Histogram& hist);

nlohmann::ordered_json fit_json(const ExtrapolationFit& fit);
nlohmann::ordered_json configuration_report_json(const ConfigurationReport& report);

} // namespace palintoep
