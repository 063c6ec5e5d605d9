#pragma once
// Isotropic Gaussian mixture with exact noise prediction.
//
// The mixture plays the role of the pretrained denoiser: because the diffused
// marginal of a Gaussian mixture stays a Gaussian mixture, the score (and
// therefore the ideal noise prediction) is available in closed form at every
// timestep. Conditions name component subsets; conditional predictions use the
// subset with renormalized weights and are blended with the unconditional
// prediction at `guidance_scale`.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cno/schedule.hpp"

namespace cno {

struct GaussianMixture {
  int dim = 0;
  std::vector<std::vector<double>> means;  // K vectors of length dim
  std::vector<double> scales;              // per-component isotropic std
  std::vector<double> weights;             // positive, sum to 1
  std::map<std::string, std::vector<int>> conditions;
  double guidance_scale = 0.0;

  int num_components() const { return static_cast<int>(weights.size()); }
  void validate() const;
  const std::vector<int>& condition_subset(const std::string& label) const;
};

// Exact noise prediction -sqrt(1-abar_t) * grad log p_t(z). With a condition,
// returns eps_uncond + guidance_scale * (eps_cond - eps_uncond).
void epsilon(const GaussianMixture& model, std::span<const double> z, int t,
             const NoiseSchedule& schedule,
             const std::optional<std::string>& condition, std::span<double> out);

// Log density of the diffused mixture marginal at step t (t = 0 gives the data
// law). `subset` empty means all components; weights are renormalized.
double log_density(const GaussianMixture& model, std::span<const double> z,
                   int t, const NoiseSchedule& schedule,
                   std::span<const int> subset);

// Benchmark constructors.
//
// circle_mixture: K equal-weight modes on a circle of the given radius lying
// in a 2-plane of R^dim, plus conditions "all" and "half" (first K/2 modes).
// For dim == 2 the plane is the coordinate plane; for dim > 2 the plane is
// spanned by two fixed orthonormal block vectors so every coordinate carries
// signal (and average pooling preserves it).
GaussianMixture circle_mixture(int num_modes, double radius, double scale,
                               int dim, double guidance_scale);

}  // namespace cno
