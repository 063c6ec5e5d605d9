#include "cno/sampler.hpp"

#include <cmath>

#include "cno/errors.hpp"
#include "cno/kernels.hpp"

namespace cno {

namespace {
constexpr double kAbarFloor = 1e-30;
}

void forward_marginal(std::span<const double> z0, int t,
                      const NoiseSchedule& schedule,
                      std::span<const double> noise, std::span<double> out) {
  const double abar = schedule.alpha_bar(t);
  kern::lincomb(out, std::sqrt(abar), z0, std::sqrt(1.0 - abar), noise);
}

void tweedie(std::span<const double> z_t, int t, const NoiseSchedule& schedule,
             std::span<const double> eps, std::span<double> out) {
  if (t < 1 || t > schedule.T) throw ParamError("tweedie: t out of range");
  const double abar = schedule.alpha_bar(t);
  if (abar < kAbarFloor) throw NumericError("tweedie: alpha_bar underflow");
  const double inv = 1.0 / std::sqrt(abar);
  kern::lincomb(out, inv, z_t, -std::sqrt(1.0 - abar) * inv, eps);
}

void ddim_step(std::span<const double> z_t, int t, int t_prev,
               const NoiseSchedule& schedule, std::span<const double> eps,
               std::span<double> out) {
  if (t_prev >= t) throw ParamError("ddim_step: t_prev must be below t");
  const double abar = schedule.alpha_bar(t);
  if (abar < kAbarFloor) throw NumericError("ddim_step: alpha_bar underflow");
  const double abar_prev = schedule.alpha_bar(t_prev);
  // Fold the Tweedie estimate into one linear combination:
  //   out = sqrt(ap/a) z_t + (sqrt(1-ap) - sqrt(ap/a) sqrt(1-a)) eps
  const double cz = std::sqrt(abar_prev / abar);
  const double ce = std::sqrt(1.0 - abar_prev) - cz * std::sqrt(1.0 - abar);
  kern::lincomb(out, cz, z_t, ce, eps);
}

void ddpm_step(std::span<const double> z_t, int t, const NoiseSchedule& schedule,
               std::span<const double> eps, std::span<const double> noise,
               std::span<double> out) {
  if (t < 1 || t > schedule.T) throw ParamError("ddpm_step: t out of range");
  const double inv_root_alpha = 1.0 / std::sqrt(schedule.alpha(t));
  const double ce = -schedule.beta(t) / std::sqrt(1.0 - schedule.alpha_bar(t));
  kern::lincomb(out, inv_root_alpha, z_t, inv_root_alpha * ce, eps);
  kern::axpy(out, schedule.sigma(t), noise);
}

LatentBatch ddim_sample_grid(const LatentBatch& batch,
                             const GaussianMixture& model,
                             const std::optional<std::string>& condition,
                             const NoiseSchedule& schedule,
                             std::span<const int> grid) {
  if (grid.size() < 2) throw ParamError("ddim grid needs at least two steps");
  LatentBatch out = batch;
  std::vector<double> eps(static_cast<std::size_t>(batch.dim()));
  for (int i = 0; i < out.batch_size; ++i) {
    auto z = out.row(i);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      epsilon(model, z, grid[k], schedule, condition, eps);
      ddim_step(z, grid[k], grid[k + 1], schedule, eps, z);
    }
  }
  return out;
}

LatentBatch ddim_sample(const LatentBatch& batch, const GaussianMixture& model,
                        const std::optional<std::string>& condition,
                        const NoiseSchedule& schedule, int num_inference_steps) {
  const auto grid = timestep_grid(schedule.T, num_inference_steps);
  return ddim_sample_grid(batch, model, condition, schedule, grid);
}

}  // namespace cno
