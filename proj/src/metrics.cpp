#include "cno/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cno/errors.hpp"
#include "cno/kernels.hpp"
#include "cno/linalg.hpp"
#include "cno/loss.hpp"

namespace cno {

SimilarityMatrix similarity_matrix(std::span<const double> samples, int batch,
                                   int dim, SimilarityKernel kernel,
                                   double bandwidth) {
  if (batch < 1 || dim < 1 ||
      samples.size() != static_cast<std::size_t>(batch) * dim)
    throw ParamError("similarity_matrix: bad sample matrix");

  SimilarityMatrix k;
  k.batch = batch;
  k.kernel = kernel;
  k.values.assign(static_cast<std::size_t>(batch) * batch, 0.0);
  const auto row = [&](int i) {
    return samples.subspan(static_cast<std::size_t>(i) * dim,
                           static_cast<std::size_t>(dim));
  };

  if (kernel == SimilarityKernel::cosine) {
    std::vector<double> units(samples.size());
    std::vector<char> degenerate(static_cast<std::size_t>(batch));
    for (int i = 0; i < batch; ++i) {
      auto dst = std::span<double>(units).subspan(
          static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim));
      degenerate[static_cast<std::size_t>(i)] = normalize_unit(row(i), dst) ? 1 : 0;
    }
    for (int i = 0; i < batch; ++i) {
      k.values[static_cast<std::size_t>(i) * batch + i] = 1.0;
      for (int j = i + 1; j < batch; ++j) {
        double s = 0.0;
        if (!degenerate[static_cast<std::size_t>(i)] &&
            !degenerate[static_cast<std::size_t>(j)]) {
          auto ui = std::span<const double>(units).subspan(
              static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim));
          auto uj = std::span<const double>(units).subspan(
              static_cast<std::size_t>(j) * dim, static_cast<std::size_t>(dim));
          s = kern::dot(ui, uj);
        }
        k.values[static_cast<std::size_t>(i) * batch + j] = s;
        k.values[static_cast<std::size_t>(j) * batch + i] = s;
      }
    }
    return k;
  }

  // rbf
  double bw = bandwidth;
  if (bw <= 0.0) {
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(batch) * (batch - 1) / 2);
    for (int i = 0; i < batch; ++i)
      for (int j = i + 1; j < batch; ++j)
        dists.push_back(std::sqrt(kern::sqdist(row(i), row(j))));
    if (dists.empty()) {
      bw = 1.0;
    } else {
      std::sort(dists.begin(), dists.end());
      const auto n = dists.size();
      bw = n % 2 == 1 ? dists[n / 2] : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
      if (bw < 1e-12) bw = 1.0;  // all samples coincide
    }
  }
  k.bandwidth = bw;
  const double inv = 1.0 / (2.0 * bw * bw);
  for (int i = 0; i < batch; ++i) {
    k.values[static_cast<std::size_t>(i) * batch + i] = 1.0;
    for (int j = i + 1; j < batch; ++j) {
      const double s = std::exp(-kern::sqdist(row(i), row(j)) * inv);
      k.values[static_cast<std::size_t>(i) * batch + j] = s;
      k.values[static_cast<std::size_t>(j) * batch + i] = s;
    }
  }
  return k;
}

double vendi_score(const SimilarityMatrix& k) {
  const int B = k.batch;
  std::vector<double> scaled(k.values);
  kern::scale(scaled, 1.0 / B);
  auto ev = symmetric_eigenvalues(std::move(scaled), B);
  double total = 0.0;
  for (double& v : ev) {
    if (v < 0.0) {
      if (v < -1e-9) throw NumericError("vendi: similarity matrix is not PSD");
      v = 0.0;
    }
    total += v;
  }
  if (total <= 0.0) throw NumericError("vendi: zero spectrum");
  double entropy = 0.0;
  for (double v : ev) {
    const double p = v / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return std::exp(entropy);
}

double mean_pairwise_similarity(const SimilarityMatrix& k) {
  const int B = k.batch;
  if (B < 2) throw ParamError("mean pairwise similarity needs B >= 2");
  double acc = 0.0;
  for (int i = 0; i < B; ++i)
    for (int j = 0; j < B; ++j)
      if (i != j) acc += k.at(i, j);
  return acc / (static_cast<double>(B) * (B - 1));
}

ModeCoverage mode_coverage(std::span<const double> samples, int batch,
                           const GaussianMixture& model,
                           const std::string& condition) {
  const auto& subset = model.condition_subset(condition);
  ModeCoverage out;
  out.histogram.assign(static_cast<std::size_t>(model.num_components()), 0);
  for (int i = 0; i < batch; ++i) {
    const auto x = samples.subspan(static_cast<std::size_t>(i) * model.dim,
                                   static_cast<std::size_t>(model.dim));
    int best = subset.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (int kidx : subset) {
      const double d = kern::sqdist(x, model.means[static_cast<std::size_t>(kidx)]);
      if (d < best_d) {  // strict: ties keep the lower component index
        best_d = d;
        best = kidx;
      }
    }
    out.histogram[static_cast<std::size_t>(best)]++;
  }
  for (int c : out.histogram)
    if (c > 0) out.modes_hit++;
  return out;
}

double fidelity_logdensity(std::span<const double> samples, int batch,
                           const GaussianMixture& model,
                           const NoiseSchedule& schedule,
                           const std::string& condition) {
  const auto& subset = model.condition_subset(condition);
  double acc = 0.0;
  for (int i = 0; i < batch; ++i) {
    const auto x = samples.subspan(static_cast<std::size_t>(i) * model.dim,
                                   static_cast<std::size_t>(model.dim));
    acc += log_density(model, x, 0, schedule, subset);
  }
  return acc / batch;
}

MetricReport evaluate_metrics(std::span<const double> samples, int batch,
                              const GaussianMixture& model,
                              const NoiseSchedule& schedule,
                              const std::string& condition,
                              SimilarityKernel kernel) {
  MetricReport r;
  const auto k = similarity_matrix(samples, batch, model.dim, kernel);
  r.vendi = vendi_score(k);
  r.mss = batch >= 2 ? mean_pairwise_similarity(k) : 0.0;
  auto mc = mode_coverage(samples, batch, model, condition);
  r.modes_hit = mc.modes_hit;
  r.mode_histogram = std::move(mc.histogram);
  r.fidelity = fidelity_logdensity(samples, batch, model, schedule, condition);
  return r;
}

}  // namespace cno
