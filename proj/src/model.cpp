#include "cno/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cno/errors.hpp"
#include "cno/kernels.hpp"

namespace cno {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

void GaussianMixture::validate() const {
  const auto K = weights.size();
  if (dim <= 0) throw ParamError("mixture dim must be positive");
  if (K == 0 || means.size() != K || scales.size() != K)
    throw ParamError("mixture component arrays disagree");
  double wsum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (weights[k] <= 0.0) throw ParamError("mixture weights must be positive");
    if (scales[k] <= 0.0) throw ParamError("mixture scales must be positive");
    if (means[k].size() != static_cast<std::size_t>(dim))
      throw ParamError("mixture mean has wrong dimension");
    wsum += weights[k];
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw ParamError("mixture weights must sum to 1");
  for (const auto& [label, subset] : conditions) {
    if (subset.empty()) throw ParamError("condition '" + label + "' is empty");
    for (int idx : subset)
      if (idx < 0 || idx >= static_cast<int>(K))
        throw ParamError("condition '" + label + "' references invalid component");
  }
}

const std::vector<int>& GaussianMixture::condition_subset(
    const std::string& label) const {
  const auto it = conditions.find(label);
  if (it == conditions.end()) throw LookupError("unknown condition: " + label);
  return it->second;
}

namespace {

// Noise prediction restricted to a component subset (renormalized weights).
// score = sum_k r_k (sqrt(abar) mu_k - z) / s2_k, eps = -sqrt(1-abar) * score.
void epsilon_subset(const GaussianMixture& model, std::span<const double> z,
                    int t, const NoiseSchedule& schedule,
                    std::span<const int> subset, std::span<double> out) {
  const double abar = schedule.alpha_bar(t);
  const double root_abar = std::sqrt(abar);
  const double noise_var = 1.0 - abar;

  double wsum = 0.0;
  for (int k : subset) wsum += model.weights[static_cast<std::size_t>(k)];

  const auto n = subset.size();
  std::vector<double> logp(n), inv_var(n);
  double max_logp = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(subset[j]);
    const double s2 = abar * model.scales[k] * model.scales[k] + noise_var;
    inv_var[j] = 1.0 / s2;
    const double d2 = kern::sqdist_scaled(z, root_abar, model.means[k]);
    logp[j] = std::log(model.weights[k] / wsum) - 0.5 * d2 / s2 -
              0.5 * model.dim * (kLog2Pi + std::log(s2));
    if (!std::isfinite(logp[j]))
      throw NumericError("non-finite component log density in noise oracle");
    max_logp = std::max(max_logp, logp[j]);
  }
  double rsum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    logp[j] = std::exp(logp[j] - max_logp);
    rsum += logp[j];
  }

  std::fill(out.begin(), out.end(), 0.0);
  double z_coeff = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = logp[j] / rsum * inv_var[j];
    kern::axpy(out, c * root_abar, model.means[static_cast<std::size_t>(subset[j])]);
    z_coeff += c;
  }
  kern::axpy(out, -z_coeff, z);
  kern::scale(out, -std::sqrt(noise_var));
}

}  // namespace

void epsilon(const GaussianMixture& model, std::span<const double> z, int t,
             const NoiseSchedule& schedule,
             const std::optional<std::string>& condition, std::span<double> out) {
  if (z.size() != static_cast<std::size_t>(model.dim) || out.size() != z.size())
    throw ParamError("noise oracle size mismatch");
  std::vector<int> all(static_cast<std::size_t>(model.num_components()));
  std::iota(all.begin(), all.end(), 0);
  epsilon_subset(model, z, t, schedule, all, out);
  if (!condition) return;

  const auto& subset = model.condition_subset(*condition);
  std::vector<double> cond_eps(out.size());
  epsilon_subset(model, z, t, schedule, subset, cond_eps);
  // eps = eps_u + s * (eps_c - eps_u)
  const double s = model.guidance_scale;
  kern::lincomb(out, 1.0 - s, {out.data(), out.size()}, s, cond_eps);
}

double log_density(const GaussianMixture& model, std::span<const double> z,
                   int t, const NoiseSchedule& schedule,
                   std::span<const int> subset) {
  std::vector<int> all;
  if (subset.empty()) {
    all.resize(static_cast<std::size_t>(model.num_components()));
    std::iota(all.begin(), all.end(), 0);
    subset = all;
  }
  const double abar = schedule.alpha_bar(t);
  const double root_abar = std::sqrt(abar);

  double wsum = 0.0;
  for (int k : subset) wsum += model.weights[static_cast<std::size_t>(k)];

  double max_logp = -std::numeric_limits<double>::infinity();
  std::vector<double> logp(subset.size());
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const auto k = static_cast<std::size_t>(subset[j]);
    const double s2 = abar * model.scales[k] * model.scales[k] + (1.0 - abar);
    const double d2 = kern::sqdist_scaled(z, root_abar, model.means[k]);
    logp[j] = std::log(model.weights[k] / wsum) - 0.5 * d2 / s2 -
              0.5 * model.dim * (kLog2Pi + std::log(s2));
    max_logp = std::max(max_logp, logp[j]);
  }
  double acc = 0.0;
  for (double lp : logp) acc += std::exp(lp - max_logp);
  return max_logp + std::log(acc);
}

GaussianMixture circle_mixture(int num_modes, double radius, double scale,
                               int dim, double guidance_scale) {
  if (num_modes < 2) throw ParamError("circle mixture needs at least 2 modes");
  if (dim < 2) throw ParamError("circle mixture needs dim >= 2");
  if (dim > 2 && dim % 2 != 0)
    throw ParamError("embedded circle mixture needs an even dim");

  GaussianMixture m;
  m.dim = dim;
  m.guidance_scale = guidance_scale;
  const double inv_root_d = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int k = 0; k < num_modes; ++k) {
    const double ang = 2.0 * M_PI * k / num_modes;
    std::vector<double> mu(static_cast<std::size_t>(dim), 0.0);
    if (dim == 2) {
      mu[0] = radius * std::cos(ang);
      mu[1] = radius * std::sin(ang);
    } else {
      // Plane basis: u1 = 1/sqrt(D), u2 = +-1 split across halves. Spread over
      // all coordinates so block averaging keeps the structure.
      const double c1 = radius * std::cos(ang) * inv_root_d;
      const double c2 = radius * std::sin(ang) * inv_root_d;
      for (int i = 0; i < dim; ++i)
        mu[static_cast<std::size_t>(i)] = c1 + (i < dim / 2 ? c2 : -c2);
    }
    m.means.push_back(std::move(mu));
    m.scales.push_back(scale);
    m.weights.push_back(1.0 / num_modes);
  }
  std::vector<int> all(static_cast<std::size_t>(num_modes));
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> half(all.begin(), all.begin() + std::max(1, num_modes / 2));
  m.conditions["all"] = all;
  m.conditions["half"] = half;
  m.validate();
  return m;
}

}  // namespace cno
