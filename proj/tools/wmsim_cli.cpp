// wmsim: sequential weak-measurement simulator and Leggett-Garg analysis.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wmsim/error.hpp"
#include "wmsim/experiment.hpp"

namespace {

using namespace wmsim;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> out;
  bool undo_decay = false;
  std::optional<double> boxcar;
  std::optional<int> max_lag;
  std::optional<int> workers;
  std::string trace;
  std::string corr;
};

cli::ExperimentSpec load_spec(const Flags& f, std::optional<cli::Kind> force) {
  io::json j = io::json::object();
  j["schema"] = cli::kSchema;
  if (!f.config.empty()) {
    try {
      j = io::json::parse(io::read_file(f.config));
    } catch (const io::json::exception& e) {
      throw Error(ErrorKind::ConfigError, "cli", std::string("config is not valid JSON: ") + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, "cli", e.what());
    }
  }
  if (force) j["kind"] = cli::to_string(*force);
  if (f.seed) j["seed"] = *f.seed;
  if (f.runs) j["runs"] = *f.runs;
  if (f.out) j["output_dir"] = *f.out;
  if (f.workers) j["workers"] = *f.workers;
  if (f.undo_decay) j["analysis"]["undo_decay"] = true;
  if (f.boxcar) j["analysis"]["boxcar"] = *f.boxcar;
  if (f.max_lag) j["analysis"]["max_lag"] = *f.max_lag;
  return cli::spec_from_json(j);
}

std::string in_dir(const cli::ExperimentSpec& s, const std::string& explicit_path, const char* name) {
  if (!explicit_path.empty()) return explicit_path;
  return (std::filesystem::path(s.output_dir) / name).string();
}

void print_summary(const io::json& s) {
  auto show = [&](const char* key) {
    if (s.contains(key) && !s[key].is_null()) std::cout << key << ": " << s[key].dump() << "\n";
  };
  for (const char* k : {"kind", "alpha_fit", "alpha_stderr", "violation_count", "max_lg", "max_lg_tau", "verdict"})
    show(k);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential weak-measurement simulator with Leggett-Garg analysis"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config (schema wmsim-config/1)");
    sub->add_option("--seed", f.seed, "top-level RNG seed");
    sub->add_option("--runs", f.runs, "number of independent runs");
    sub->add_option("--out", f.out, "output directory");
    sub->add_flag("--undo-decay", f.undo_decay, "divide out the exp(-(N-1) alpha^2/4) envelope");
    sub->add_option("--boxcar", f.boxcar, "boxcar window as a fraction of the decay length");
    sub->add_option("--max-lag", f.max_lag, "largest correlation lag");
    sub->add_option("--workers", f.workers, "worker threads (results do not depend on it)");
  };
  auto* simulate = app.add_subcommand("simulate", "run the experiment named by the config kind");
  auto* calibrate = app.add_subcommand("calibrate", "modulation trace and n_a, n_b, phi_0 fit");
  auto* correlate = app.add_subcommand("correlate", "trace -> correlations, alpha fit");
  auto* lgtest = app.add_subcommand("lgtest", "corr_ix.csv -> Leggett-Garg series");
  auto* classical = app.add_subcommand("classical", "classical random-phase experiment");
  auto* report = app.add_subcommand("report", "print the verdict from summary.json");
  for (auto* s : {simulate, calibrate, correlate, lgtest, classical, report}) common(s);
  correlate->add_option("--trace", f.trace, "input trace CSV (default <out>/trace.csv)");
  lgtest->add_option("--corr", f.corr, "input correlation CSV (default <out>/corr_ix.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed() || calibrate->parsed() || classical->parsed()) {
      std::optional<cli::Kind> force;
      if (calibrate->parsed()) force = cli::Kind::Calibration;
      if (classical->parsed()) force = cli::Kind::Classical;
      const auto spec = load_spec(f, force);
      const auto out = cli::run(spec);
      cli::write_outputs(out, spec.output_dir);
      print_summary(out.summary);
    } else if (correlate->parsed()) {
      const auto spec = load_spec(f, cli::Kind::Quantum);
      const auto trace = io::trace_from_csv(io::read_file(in_dir(spec, f.trace, "trace.csv")));
      const auto out = cli::correlate(spec, trace);
      cli::write_outputs(out, spec.output_dir);
      print_summary(out.summary);
    } else if (lgtest->parsed()) {
      const auto spec = load_spec(f, std::nullopt);
      const auto c = io::corr_from_csv(io::read_file(in_dir(spec, f.corr, "corr_ix.csv")));
      const auto out = cli::lgtest(c);
      cli::write_outputs(out, spec.output_dir);
      print_summary(out.summary);
    } else if (report->parsed()) {
      const auto spec = load_spec(f, std::nullopt);
      const auto path = in_dir(spec, "", "summary.json");
      io::json s;
      if (std::filesystem::exists(path)) {
        s = io::json::parse(io::read_file(path));
      } else {
        auto lg_spec = spec;
        lg_spec.kind = cli::Kind::LgReport;
        const auto out = cli::run(lg_spec);
        cli::write_outputs(out, spec.output_dir);
        s = out.summary;
      }
      print_summary(s);
    }
  } catch (const Error& e) {
    std::cerr << "error " << e.what() << "\n";
    return cli::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [cli] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
