#pragma once
// Batch noise optimization: gradient descent on the initial latents under the
// contrastive objective between each sample's current denoised prediction and
// its frozen first-pass prediction, with optional Gaussian-prior penalty.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cno/latent.hpp"
#include "cno/loss.hpp"
#include "cno/model.hpp"
#include "cno/schedule.hpp"

namespace cno {

struct CnoConfig {
  int batch_size = 5;
  int n_opt = 3;
  double learning_rate = 0.01;
  double tau = 0.1;
  double gamma = 1.0;
  int window = 16;
  double kl_weight = 0.0;  // 0 disables the prior penalty
  bool use_stopgrad = true;

  void validate(const LatentShape& shape) const;
};

struct TraceStep {
  double contrastive = 0.0;          // batch-mean contrastive loss
  std::vector<double> per_sample;    // per-sample contrastive losses
  double kl = 0.0;                   // mean prior penalty (0 when disabled)
  double total = 0.0;                // contrastive + kl_weight * kl
  double grad_max_norm = 0.0;        // max |entry| of the full gradient
  std::vector<double> similarity;    // B x B dot products of the opt vectors
};

struct OptimizationTrace {
  std::vector<TraceStep> steps;
  // Mean off-diagonal similarity of a recorded snapshot.
  static double mean_cross_similarity(const TraceStep& s, int batch);
};

struct GradientResult {
  std::vector<double> grad;        // B x D, row-major
  TraceStep snapshot;              // loss values at the evaluation point
  std::vector<char> degenerate;    // per-sample zero-norm flags
};

// Pooled, normalized fixed targets (B x pooled_dim) from full-resolution
// first-pass predictions.
std::vector<double> pooled_targets(const LatentBatch& fixed_full, int window);

// Loss at z_T with the noise prediction re-evaluated there. `fixed` is the
// pooled, normalized target matrix.
double cno_total_loss(const LatentBatch& z_T, const GaussianMixture& model,
                      const NoiseSchedule& schedule,
                      const std::optional<std::string>& condition,
                      const CnoConfig& config, std::span<const double> fixed);

// Loss at z_T with the noise prediction held at the supplied values. This is
// the objective each descent step actually minimizes under stopgrad, and the
// function the analytic gradient differentiates exactly.
double cno_total_loss_frozen(const LatentBatch& z_T, const LatentBatch& eps,
                             const NoiseSchedule& schedule,
                             const CnoConfig& config,
                             std::span<const double> fixed);

// Gradient of the total loss with respect to every latent in the batch.
//
// Stopgrad path (the default): the noise prediction is treated as a constant,
// so the denoised estimate is affine in z_T and the chain through pooling and
// normalization is exact. With use_stopgrad = false the gradient is formed by
// central differences of cno_total_loss (h = 1e-4); the oracle is then
// re-evaluated inside every probe, which is O(B^2 D) oracle calls and meant
// for verification at small sizes only.
GradientResult cno_gradient(const LatentBatch& z_T, const GaussianMixture& model,
                            const NoiseSchedule& schedule,
                            const std::optional<std::string>& condition,
                            const CnoConfig& config,
                            std::span<const double> fixed);

struct OptimizeResult {
  LatentBatch optimized;
  LatentBatch initial;  // untouched pre-optimization snapshot
  OptimizationTrace trace;
};

// Draws B latents from N(0, I) under the given seed, records first-pass
// denoised predictions as fixed targets, then runs n_opt plain gradient steps
// z <- z - lr * grad. Deterministic given the seed.
OptimizeResult optimize_noise(const GaussianMixture& model,
                              const NoiseSchedule& schedule,
                              const std::optional<std::string>& condition,
                              const CnoConfig& config, const LatentShape& shape,
                              std::uint64_t seed);

}  // namespace cno
