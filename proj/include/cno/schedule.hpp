#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cno {

enum class ScheduleKind { linear, scaled_linear };

ScheduleKind schedule_kind_from_string(const std::string& s);
std::string to_string(ScheduleKind k);

// Discretized diffusion ladder. Index convention: step t runs in [1, T] and
// maps to array slot t-1; t = 0 denotes the clean endpoint with alpha_bar = 1.
struct NoiseSchedule {
  int T = 0;
  std::vector<double> betas;       // beta_t, t = 1..T
  std::vector<double> alphas;      // 1 - beta_t
  std::vector<double> alpha_bars;  // running product of alphas
  std::vector<double> sigmas;      // reverse-process posterior std, sigma_1 = 0

  double alpha_bar(int t) const;   // t in [0, T]
  double beta(int t) const;        // t in [1, T]
  double alpha(int t) const;       // t in [1, T]
  double sigma(int t) const;       // t in [1, T]
};

NoiseSchedule build_schedule(int T, double beta_start, double beta_end,
                             ScheduleKind kind);

// Decreasing grid T = t_n > ... > t_0 = 0 with t_k = floor(T*k/n).
std::vector<int> timestep_grid(int T, int num_inference_steps);

}  // namespace cno
