#pragma once
// Diversity and fidelity measurement over a batch of sample vectors.

#include <span>
#include <string>
#include <vector>

#include "cno/model.hpp"

namespace cno {

enum class SimilarityKernel { cosine, rbf };

struct SimilarityMatrix {
  int batch = 0;
  SimilarityKernel kernel = SimilarityKernel::cosine;
  double bandwidth = 0.0;  // rbf only; 0 requests the median heuristic
  std::vector<double> values;

  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * batch + j];
  }
};

// cosine: Gram matrix of row-normalized samples (zero rows give 0 off-diagonal
// and 1 on the diagonal). rbf: exp(-||xi - xj||^2 / (2 bw^2)) with bw the
// median pairwise distance when not supplied.
SimilarityMatrix similarity_matrix(std::span<const double> samples, int batch,
                                   int dim, SimilarityKernel kernel,
                                   double bandwidth = 0.0);

// Effective sample count: exp of the spectrum entropy of K/B. Tiny negative
// eigenvalues (symmetric roundoff) are clipped at zero before the entropy.
double vendi_score(const SimilarityMatrix& k);

// Mean of the off-diagonal entries.
double mean_pairwise_similarity(const SimilarityMatrix& k);

struct ModeCoverage {
  int modes_hit = 0;
  std::vector<int> histogram;  // per mixture component, sums to B
};

// Nearest conditional component mean per sample; ties go to the lower index.
ModeCoverage mode_coverage(std::span<const double> samples, int batch,
                           const GaussianMixture& model,
                           const std::string& condition);

// Mean log density of the samples under the conditional data law.
double fidelity_logdensity(std::span<const double> samples, int batch,
                           const GaussianMixture& model,
                           const NoiseSchedule& schedule,
                           const std::string& condition);

struct MetricReport {
  double vendi = 1.0;
  double mss = 0.0;
  int modes_hit = 0;
  std::vector<int> mode_histogram;
  double fidelity = 0.0;
};

MetricReport evaluate_metrics(std::span<const double> samples, int batch,
                              const GaussianMixture& model,
                              const NoiseSchedule& schedule,
                              const std::string& condition,
                              SimilarityKernel kernel);

}  // namespace cno
