#include "cno/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cno/errors.hpp"
#include "cno/kernels.hpp"

namespace cno {

bool normalize_unit(std::span<const double> v, std::span<double> out) {
  const double norm = std::sqrt(kern::sumsq(v));
  if (norm < kNormFloor) {
    std::fill(out.begin(), out.end(), 0.0);
    return true;
  }
  const double inv = 1.0 / norm;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * inv;
  return false;
}

ContrastiveLoss contrastive_loss(std::span<const double> opt,
                                 std::span<const double> fixed, int batch,
                                 int m, double tau, double gamma) {
  if (batch < 2) throw ParamError("contrastive loss needs a batch of at least 2");
  if (tau <= 0.0 || gamma <= 0.0) throw ParamError("tau and gamma must be positive");

  const auto row = [m](std::span<const double> mat, int i) {
    return mat.subspan(static_cast<std::size_t>(i) * m, static_cast<std::size_t>(m));
  };

  ContrastiveLoss out;
  out.per_sample.resize(static_cast<std::size_t>(batch));
  for (int i = 0; i < batch; ++i) {
    const double pos = kern::dot(row(opt, i), row(fixed, i));
    // log-sum-exp over the full batch, max-subtracted
    double max_arg = -std::numeric_limits<double>::infinity();
    std::vector<double> args(static_cast<std::size_t>(batch));
    for (int j = 0; j < batch; ++j) {
      args[static_cast<std::size_t>(j)] = kern::dot(row(opt, i), row(opt, j)) / tau;
      max_arg = std::max(max_arg, args[static_cast<std::size_t>(j)]);
    }
    double acc = 0.0;
    for (double a : args) acc += std::exp(a - max_arg);
    const double lse = max_arg + std::log(acc);
    out.per_sample[static_cast<std::size_t>(i)] = -pos / (gamma * tau) + lse;
  }
  out.mean = kern::sum(out.per_sample) / batch;
  return out;
}

double desirable_gamma(double tau, int batch) {
  if (batch < 2) throw ParamError("desirable gamma needs batch >= 2");
  if (tau <= 0.0) throw ParamError("tau must be positive");
  return 1.0 / (tau * std::log(static_cast<double>(batch - 1)) + 1.0);
}

KlPenalty kl_penalty(const LatentBatch& batch) {
  const int d = batch.dim();
  if (d < 2) throw ParamError("kl penalty needs at least 2 elements per tensor");
  KlPenalty out;
  out.per_sample.resize(static_cast<std::size_t>(batch.batch_size));
  double acc = 0.0;
  for (int i = 0; i < batch.batch_size; ++i) {
    const auto z = batch.row(i);
    const double mu = kern::sum(z) / d;
    double ss = 0.0;
    for (double v : z) ss += (v - mu) * (v - mu);
    const double s2 = ss / (d - 1);
    if (s2 < 1e-30) throw NumericError("kl penalty: vanishing sample variance");
    const double kl = -0.5 * std::log(s2) + 0.5 * (s2 + mu * mu) - 0.5;
    out.per_sample[static_cast<std::size_t>(i)] = {mu, s2, d, kl};
    acc += kl;
  }
  out.mean = batch.batch_size > 0 ? acc / batch.batch_size : 0.0;
  return out;
}

void kl_gradient(std::span<const double> z, std::span<double> out) {
  const auto d = static_cast<int>(z.size());
  const double mu = kern::sum(z) / d;
  double ss = 0.0;
  for (double v : z) ss += (v - mu) * (v - mu);
  const double s2 = ss / (d - 1);
  if (s2 < 1e-30) throw NumericError("kl gradient: vanishing sample variance");
  // d KL / d z_j = (1 - 1/s2) (z_j - mu) / (d - 1) + mu / d
  const double cs = (1.0 - 1.0 / s2) / (d - 1);
  const double cm = mu / d;
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = cs * (z[j] - mu) + cm;
}

}  // namespace cno
