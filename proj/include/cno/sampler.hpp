#pragma once
// Forward noising and reverse sampling steps. All maps are written as linear
// combinations of their inputs; given explicit noise they are pure functions.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cno/latent.hpp"
#include "cno/model.hpp"
#include "cno/schedule.hpp"

namespace cno {

// out = sqrt(abar_t) z0 + sqrt(1 - abar_t) noise
void forward_marginal(std::span<const double> z0, int t,
                      const NoiseSchedule& schedule,
                      std::span<const double> noise, std::span<double> out);

// out = (z_t - sqrt(1 - abar_t) eps) / sqrt(abar_t)
void tweedie(std::span<const double> z_t, int t, const NoiseSchedule& schedule,
             std::span<const double> eps, std::span<double> out);

// Deterministic update z_t -> z_{t_prev}:
//   out = sqrt(abar_prev) ztweedie + sqrt(1 - abar_prev) eps
// t_prev = 0 returns the Tweedie estimate itself.
void ddim_step(std::span<const double> z_t, int t, int t_prev,
               const NoiseSchedule& schedule, std::span<const double> eps,
               std::span<double> out);

// Ancestral update with posterior std sigma_t:
//   out = (z_t - beta_t/sqrt(1-abar_t) eps) / sqrt(alpha_t) + sigma_t noise
void ddpm_step(std::span<const double> z_t, int t, const NoiseSchedule& schedule,
               std::span<const double> eps, std::span<const double> noise,
               std::span<double> out);

// Runs ddim_step along an explicit decreasing timestep grid (grid.front() is
// the starting step of the batch, grid.back() the final one), querying the
// noise oracle at every step.
LatentBatch ddim_sample_grid(const LatentBatch& batch,
                             const GaussianMixture& model,
                             const std::optional<std::string>& condition,
                             const NoiseSchedule& schedule,
                             std::span<const int> grid);

// Even T..0 grid with num_inference_steps segments.
LatentBatch ddim_sample(const LatentBatch& batch, const GaussianMixture& model,
                        const std::optional<std::string>& condition,
                        const NoiseSchedule& schedule, int num_inference_steps);

}  // namespace cno
