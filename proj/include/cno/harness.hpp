#pragma once
// Seeded experiment execution. Every trial draws its own noise through
// Rng::substream(seed, trial), so the two arms of a trial share the initial
// batch bit-for-bit and trials are independent of execution order.

#include <cstdint>
#include <string>
#include <vector>

#include "cno/config.hpp"
#include "cno/metrics.hpp"

namespace cno {

struct TrialRecord {
  int trial = 0;
  std::string arm;  // "ddim" | "cno"
  std::uint64_t seed = 0;  // substream seed for the trial
  MetricReport metrics;
  double final_loss = 0.0;  // last optimization loss; 0 for the plain arm
  double wall_ms = 0.0;
  std::vector<double> endpoints;  // retained for 2-D runs so plots can scatter
};

struct RunResult {
  std::string run_id;
  ExperimentConfig config;
  std::vector<TrialRecord> records;  // trial-major, ddim row then cno row
  std::vector<std::string> diagnostics;  // one entry per failed trial
  int failed_trials = 0;

  struct Summary {
    double vendi_mean = 0.0, vendi_var = 0.0;
    double mss_mean = 0.0, mss_var = 0.0;
    double modes_mean = 0.0, modes_var = 0.0;
    double fidelity_mean = 0.0, fidelity_var = 0.0;
    int n = 0;
  };
  Summary summarize(const std::string& arm) const;
};

RunResult run_experiment(const ExperimentConfig& config);

enum class SweepAxis { gamma, tau, eta, batch, window, lambda };
SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis a);

ExperimentConfig with_axis_value(const ExperimentConfig& base, SweepAxis axis,
                                 double value);

std::vector<RunResult> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                 const std::vector<double>& values);

// Stability study: for each gamma, run the experiment across the eta grid and
// report the sample variance (over eta) of each CNO-arm mean metric.
struct StabilityRow {
  double gamma = 0.0;
  std::vector<double> vendi_means;  // one per eta
  double vendi_s2 = 0.0;
  double mss_s2 = 0.0;
  double fidelity_s2 = 0.0;
};
std::vector<StabilityRow> gamma_stability(const ExperimentConfig& base,
                                          const std::vector<double>& gammas,
                                          const std::vector<double>& etas);

// One-sided sign test: P(X >= k) for X ~ Binomial(n, 1/2).
double sign_test_pvalue(int n, int k);

}  // namespace cno
