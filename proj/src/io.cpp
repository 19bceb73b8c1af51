#include "wmsim/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "wmsim/error.hpp"

namespace wmsim::io {
namespace {

const char* kMod = "cli";

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, kMod, msg); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad("bad integer '" + s + "'");
  return v;
}

void expect_header(const std::vector<std::string>& lines, std::size_t at, const std::string& h) {
  if (lines.size() <= at || lines[at] != h) bad("expected CSV header '" + h + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) bad("cannot format number");
  return std::string(buf, p);
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad("bad number '" + s + "'");
  return v;
}

std::string trace_to_csv(const readout::PhotonTrace& t) {
  json h;
  h["kind"] = readout::to_string(t.kind);
  h["seed"] = t.seed;
  h["run_lengths"] = t.run_lengths;
  h["config"] = t.config.empty() ? json::object() : json::parse(t.config);
  std::string out = "# " + h.dump() + "\n";
  const bool angles = !t.angles_deg.empty();
  out += angles ? "index,count,angle_deg\n" : "index,count\n";
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(t.counts[i]);
    if (angles) out += "," + format_double(t.angles_deg[i]);
    out += "\n";
  }
  return out;
}

readout::PhotonTrace trace_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0].rfind("# ", 0) != 0) bad("trace CSV lacks its JSON header");
  readout::PhotonTrace t;
  try {
    const json h = json::parse(lines[0].substr(2));
    t.kind = readout::trace_kind_from_string(h.at("kind").get<std::string>());
    t.seed = h.at("seed").get<std::uint64_t>();
    t.run_lengths = h.at("run_lengths").get<std::vector<std::size_t>>();
    const json& c = h.at("config");
    t.config = c.empty() ? std::string() : c.dump();
  } catch (const json::exception& e) {
    bad(std::string("bad trace header: ") + e.what());
  }
  if (lines.size() < 2) bad("trace CSV lacks its column header");
  const bool angles = lines[1] == "index,count,angle_deg";
  if (!angles) expect_header(lines, 1, "index,count");
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != (angles ? 3u : 2u)) bad("bad trace row");
    if (parse_int(f[0]) != static_cast<long long>(i - 2)) bad("trace indices out of order");
    t.counts.push_back(parse_int(f[1]));
    if (t.counts.back() < 0) bad("negative photon count");
    if (angles) t.angles_deg.push_back(parse_double(f[2]));
  }
  return t;
}

std::string corr_to_csv(const corr::CorrelationSeries& c) {
  std::string out = "lag,value,stderr,kind\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out += std::to_string(c.lags[i]) + "," + format_double(c.values[i]) + ",";
    if (!c.errors.empty()) out += format_double(c.errors[i]);
    out += std::string(",") + corr::to_string(c.kind) + "\n";
  }
  return out;
}

corr::CorrelationSeries corr_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  expect_header(lines, 0, "lag,value,stderr,kind");
  corr::CorrelationSeries c;
  bool any_err = false, all_err = true;
  std::vector<double> errs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 4) bad("bad correlation row");
    c.lags.push_back(static_cast<int>(parse_int(f[0])));
    c.values.push_back(parse_double(f[1]));
    if (f[2].empty()) {
      all_err = false;
      errs.push_back(0);
    } else {
      any_err = true;
      errs.push_back(parse_double(f[2]));
    }
    c.kind = corr::series_kind_from_string(f[3]);
  }
  if (any_err && !all_err) bad("stderr column partially empty");
  if (any_err) c.errors = std::move(errs);
  return c;
}

std::string lg_to_csv(const lg::LgSeries& s) {
  std::string out = "tau_index,lg,stderr,violated\n";
  for (std::size_t i = 0; i < s.taus.size(); ++i)
    out += std::to_string(s.taus[i]) + "," + format_double(s.lg_values[i]) + "," + format_double(s.errors[i]) +
           "," + (s.violated(i) ? "1" : "0") + "\n";
  return out;
}

lg::LgSeries lg_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  expect_header(lines, 0, "tau_index,lg,stderr,violated");
  lg::LgSeries s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 4) bad("bad LG row");
    s.taus.push_back(static_cast<int>(parse_int(f[0])));
    s.lg_values.push_back(parse_double(f[1]));
    s.errors.push_back(parse_double(f[2]));
    if (f[3] == "1")
      s.violations.push_back(s.taus.back());
    else if (f[3] != "0")
      bad("violated must be 0 or 1");
  }
  return s;
}

json fit_to_json(const calib::FitResult& f) {
  json j;
  j["parameters"] = f.parameters;
  j["stderr"] = f.errors;
  j["residual"] = f.residual;
  j["converged"] = f.converged;
  j["boundary"] = f.boundary;
  j["iterations"] = f.iterations;
  j["names"] = f.names;
  if (f.covariance) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < f.covariance->rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < f.covariance->cols(); ++c) row.push_back((*f.covariance)(r, c));
      rows.push_back(row);
    }
    j["covariance"] = rows;
  } else {
    j["covariance"] = nullptr;
  }
  return j;
}

calib::FitResult fit_from_json(const json& j) {
  calib::FitResult f;
  try {
    f.parameters = j.at("parameters").get<std::map<std::string, double>>();
    f.errors = j.at("stderr").get<std::map<std::string, double>>();
    f.residual = j.at("residual").get<double>();
    f.converged = j.at("converged").get<bool>();
    f.boundary = j.at("boundary").get<bool>();
    f.iterations = j.at("iterations").get<int>();
    f.names = j.at("names").get<std::vector<std::string>>();
    const json& c = j.at("covariance");
    if (!c.is_null()) {
      Eigen::MatrixXd m(c.size(), c.empty() ? 0 : c[0].size());
      for (std::size_t r = 0; r < c.size(); ++r)
        for (std::size_t k = 0; k < c[r].size(); ++k) m(r, k) = c[r][k].get<double>();
      f.covariance = m;
    }
  } catch (const json::exception& e) {
    bad(std::string("bad fit JSON: ") + e.what());
  }
  return f;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, kMod, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, kMod, "cannot write " + path);
  out << content;
}

}  // namespace wmsim::io
