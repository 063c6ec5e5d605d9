#include "cno/schedule.hpp"

#include <cmath>

#include "cno/errors.hpp"

namespace cno {

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "linear") return ScheduleKind::linear;
  if (s == "scaled_linear") return ScheduleKind::scaled_linear;
  throw ParamError("unknown schedule kind: " + s);
}

std::string to_string(ScheduleKind k) {
  return k == ScheduleKind::linear ? "linear" : "scaled_linear";
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t < 0 || t > T) throw ParamError("timestep out of range: " + std::to_string(t));
  return t == 0 ? 1.0 : alpha_bars[static_cast<std::size_t>(t) - 1];
}

double NoiseSchedule::beta(int t) const {
  if (t < 1 || t > T) throw ParamError("timestep out of range: " + std::to_string(t));
  return betas[static_cast<std::size_t>(t) - 1];
}

double NoiseSchedule::alpha(int t) const {
  if (t < 1 || t > T) throw ParamError("timestep out of range: " + std::to_string(t));
  return alphas[static_cast<std::size_t>(t) - 1];
}

double NoiseSchedule::sigma(int t) const {
  if (t < 1 || t > T) throw ParamError("timestep out of range: " + std::to_string(t));
  return sigmas[static_cast<std::size_t>(t) - 1];
}

NoiseSchedule build_schedule(int T, double beta_start, double beta_end,
                             ScheduleKind kind) {
  if (T < 1) throw ParamError("schedule needs T >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
    throw ParamError("beta range must satisfy 0 < beta_start <= beta_end < 1");

  NoiseSchedule s;
  s.T = T;
  s.betas.resize(T);
  s.alphas.resize(T);
  s.alpha_bars.resize(T);
  s.sigmas.resize(T);

  for (int t = 0; t < T; ++t) {
    const double frac = T > 1 ? static_cast<double>(t) / (T - 1) : 0.0;
    double b;
    if (kind == ScheduleKind::linear) {
      b = beta_start + (beta_end - beta_start) * frac;
    } else {
      const double sq = std::sqrt(beta_start) +
                        (std::sqrt(beta_end) - std::sqrt(beta_start)) * frac;
      b = sq * sq;
    }
    s.betas[t] = b;
    s.alphas[t] = 1.0 - b;
    s.alpha_bars[t] = (t == 0 ? 1.0 : s.alpha_bars[t - 1]) * s.alphas[t];
  }
  // sigma_t^2 = (1 - abar_{t-1}) / (1 - abar_t) * beta_t, with abar_0 = 1.
  for (int t = 1; t <= T; ++t) {
    const double prev = t == 1 ? 1.0 : s.alpha_bars[t - 2];
    const double var = (1.0 - prev) / (1.0 - s.alpha_bars[t - 1]) * s.betas[t - 1];
    s.sigmas[t - 1] = std::sqrt(var);
  }
  return s;
}

std::vector<int> timestep_grid(int T, int num_inference_steps) {
  if (num_inference_steps < 1 || num_inference_steps > T)
    throw ParamError("num_inference_steps must be in [1, T]");
  std::vector<int> grid;
  grid.reserve(static_cast<std::size_t>(num_inference_steps) + 1);
  for (int k = num_inference_steps; k >= 0; --k) {
    const auto tk = static_cast<int>(
        std::floor(static_cast<double>(T) * k / num_inference_steps));
    if (grid.empty() || tk != grid.back()) grid.push_back(tk);
  }
  return grid;
}

}  // namespace cno
