#pragma once

#include <string>

#include <json.hpp>

#include "wmsim/calibration.hpp"
#include "wmsim/correlation.hpp"
#include "wmsim/lg.hpp"
#include "wmsim/readout.hpp"

namespace wmsim::io {

using json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

// Trace CSV: "# <json header>" line, then index,count[,angle_deg].
std::string trace_to_csv(const readout::PhotonTrace& t);
readout::PhotonTrace trace_from_csv(const std::string& text);

// lag,value,stderr,kind
std::string corr_to_csv(const corr::CorrelationSeries& c);
corr::CorrelationSeries corr_from_csv(const std::string& text);

// tau_index,lg,stderr,violated
std::string lg_to_csv(const lg::LgSeries& s);
lg::LgSeries lg_from_csv(const std::string& text);

json fit_to_json(const calib::FitResult& f);
calib::FitResult fit_from_json(const json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace wmsim::io
