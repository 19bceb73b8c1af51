#pragma once

#include <atomic>
#include <cstdint>
#include <algorithm>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wmsim/calibration.hpp"
#include "wmsim/error.hpp"
#include "wmsim/io.hpp"
#include "wmsim/protocol.hpp"
#include "wmsim/readout.hpp"

namespace wmsim::cli {

inline constexpr const char* kSchema = "wmsim-config/1";

enum class Kind { Quantum, Classical, Calibration, LgReport };
const char* to_string(Kind k);

struct Analysis {
  int max_lag = 40;
  bool undo_decay = true;
  std::optional<double> boxcar;  // fraction of the decay length
  calib::Centering centering = calib::Centering::SampleMean;
  bool calibrate = true;  // modulation pre-pass for n_a, n_b
};

struct ModulationPlan {
  int reps_per_angle = 50;
  int reps_at_90 = 500;
};

struct ExperimentSpec {
  Kind kind = Kind::Quantum;
  protocol::ProtocolConfig protocol;
  protocol::BackAction back_action = protocol::BackAction::Conditioned;
  protocol::PhysicalParams physical;
  readout::ReadoutModel readout;
  readout::ChargeModel charge;
  readout::ClassicalParams classical;
  Analysis analysis;
  ModulationPlan modulation;
  int runs = 1;
  std::string output_dir = "out";
  int workers = 1;  // scheduling only; never affects results

  void validate() const;
};

/// Parses and validates; failures raise config-error.
ExperimentSpec spec_from_json(const io::json& j);
/// Result-relevant configuration (excludes output_dir and workers).
io::json spec_to_json(const ExperimentSpec& s);

/// Calls fn(i) for i in [0, n) on `workers` threads; results in index order.
template <class T>
std::vector<T> parallel_map(int n, int workers, const std::function<T(int)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int i; (i = next++) < n && !failed;) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        if (!failed.exchange(true)) err = std::current_exception();
      }
    }
  };
  const int w = std::max(1, std::min(workers, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < w; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct Outputs {
  std::optional<readout::PhotonTrace> trace;
  std::optional<corr::CorrelationSeries> corr_sz;
  std::optional<corr::CorrelationSeries> corr_ix;
  std::optional<lg::LgSeries> lg;
  std::optional<io::json> fit;
  io::json summary;
};

Outputs run(const ExperimentSpec& spec);
/// Writes whichever outputs are present into spec.output_dir.
void write_outputs(const Outputs& o, const std::string& dir);

/// Trace-to-correlation stage (correlate subcommand).
Outputs correlate(const ExperimentSpec& spec, const readout::PhotonTrace& trace);
/// Correlation-to-LG stage (lgtest subcommand).
Outputs lgtest(const corr::CorrelationSeries& c_ix);

/// Simulated photon trace of spec.runs quantum runs (run r uses subseed r + 1).
readout::PhotonTrace simulate_quantum_trace(const ExperimentSpec& spec);
readout::PhotonTrace simulate_classical_trace(const ExperimentSpec& spec);
/// Modulation pre-pass (subseed stream 0); returns the fit and the calibrated model.
std::pair<calib::FitResult, readout::ReadoutModel> calibrate_readout(const ExperimentSpec& spec,
                                                                    readout::PhotonTrace* trace_out = nullptr);

int exit_code(ErrorKind k);

}  // namespace wmsim::cli
