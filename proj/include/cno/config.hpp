#pragma once
// Flat key-value experiment configuration. Lines look like
//   section.key = value
// with '#' comments; unknown keys are rejected so sweeps cannot silently
// typo a knob. The full schema is documented in the README and in
// configs/benchmark.cfg.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cno/latent.hpp"
#include "cno/metrics.hpp"
#include "cno/model.hpp"
#include "cno/optimize.hpp"
#include "cno/schedule.hpp"

namespace cno {

struct ExperimentConfig {
  // model: either the circle preset or an explicit component list
  std::string preset = "circle";  // "circle" | "none"
  int dim = 2;
  int modes = 8;
  double radius = 5.0;
  double mode_scale = 0.1;
  double guidance = 6.0;
  std::vector<std::vector<double>> means;          // preset == "none"
  std::vector<double> scales;
  std::vector<double> weights;
  std::map<std::string, std::vector<int>> conditions;

  // latent layout
  bool grid = false;
  int channels = 1;
  int side = 0;

  // schedule
  int T = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.012;
  ScheduleKind kind = ScheduleKind::linear;
  int inference_steps = 50;

  CnoConfig cno;

  SimilarityKernel kernel = SimilarityKernel::rbf;

  // run
  std::string condition = "all";
  int trials = 200;
  std::uint64_t seed = 20240924;
  std::string out_dir = "out";
  bool emit_plots = false;
  bool timing = false;  // wall_ms columns read 0 when off, keeping runs byte-stable

  GaussianMixture build_model() const;
  NoiseSchedule build_noise_schedule() const;
  LatentShape latent_shape() const;
  void validate() const;

  // Canonical serialization (fixed key order, full float precision) and the
  // FNV-1a hash over it. Any field change changes the hash.
  std::string canonical() const;
  std::uint64_t hash() const;
  std::string run_id() const;  // 16 hex digits of hash()
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace cno
