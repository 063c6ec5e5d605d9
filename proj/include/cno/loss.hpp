#pragma once
// Contrastive objective over downsampled, normalized one-step denoised
// predictions, plus the per-tensor Gaussian-prior penalty.

#include <span>
#include <vector>

#include "cno/latent.hpp"

namespace cno {

constexpr double kNormFloor = 1e-12;

// v / ||v||2. Vectors with norm below kNormFloor become zero and are flagged
// degenerate rather than raising.
bool normalize_unit(std::span<const double> v, std::span<double> out);

struct ContrastiveLoss {
  double mean = 0.0;
  std::vector<double> per_sample;
};

// Per sample i over unit vectors:
//   loss_i = -sim(opt_i, fixed_i) / (gamma*tau) + log sum_j exp(sim(opt_i, opt_j)/tau)
// The denominator includes j = i (a constant exp(1/tau) for unit inputs).
// `opt` and `fixed` are B x m row-major.
ContrastiveLoss contrastive_loss(std::span<const double> opt,
                                 std::span<const double> fixed, int batch,
                                 int m, double tau, double gamma);

// Attraction coefficient balancing one attraction term against B-1 saturated
// repulsion terms: 1 / (tau * ln(B-1) + 1). Exactly 1 at B = 2.
double desirable_gamma(double tau, int batch);

struct KlStats {
  double mu_hat = 0.0;
  double sigma2_hat = 0.0;  // unbiased, divisor D-1
  int dim = 0;
  double kl = 0.0;  // log(1/sigma_hat) + (sigma2_hat + mu_hat^2)/2 - 1/2
};

struct KlPenalty {
  double mean = 0.0;
  std::vector<KlStats> per_sample;
};

// Divergence of each tensor's element population from N(0,1).
KlPenalty kl_penalty(const LatentBatch& batch);

// Gradient of one tensor's KL value with respect to its elements.
void kl_gradient(std::span<const double> z, std::span<double> out);

}  // namespace cno
