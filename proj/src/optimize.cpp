#include "cno/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cno/errors.hpp"
#include "cno/kernels.hpp"
#include "cno/pool.hpp"
#include "cno/rng.hpp"
#include "cno/sampler.hpp"

namespace cno {

void CnoConfig::validate(const LatentShape& shape) const {
  if (batch_size < 2) throw ParamError("batch_size must be >= 2");
  if (n_opt < 1) throw ParamError("n_opt must be >= 1");
  if (learning_rate < 0.0) throw ParamError("learning_rate must be non-negative");
  if (tau <= 0.0 || gamma <= 0.0) throw ParamError("tau and gamma must be positive");
  if (kl_weight < 0.0) throw ParamError("kl_weight must be non-negative");
  const int axis = shape.grid ? shape.side : shape.dim;
  if (window < 1 || window > axis)
    throw ParamError("window must be in [1, " + std::to_string(axis) + "]");
}

double OptimizationTrace::mean_cross_similarity(const TraceStep& s, int batch) {
  double acc = 0.0;
  for (int i = 0; i < batch; ++i)
    for (int j = 0; j < batch; ++j)
      if (i != j) acc += s.similarity[static_cast<std::size_t>(i) * batch + j];
  return acc / (static_cast<double>(batch) * (batch - 1));
}

namespace {

struct Pooled {
  std::vector<double> units;     // B x m, normalized
  std::vector<double> norms;     // pre-normalization norms
  std::vector<char> degenerate;  // zero-norm flags
  int m = 0;
};

// Denoised predictions at step T for every latent, pooled and normalized.
// When y_full is non-null it receives the unpooled predictions.
Pooled opt_vectors(const LatentBatch& z_T, const GaussianMixture& model,
                   const NoiseSchedule& schedule,
                   const std::optional<std::string>& condition, int window,
                   LatentBatch* y_full) {
  const int B = z_T.batch_size;
  const int D = z_T.dim();
  Pooled p;
  p.m = pooled_dim(z_T.shape, window);
  p.units.resize(static_cast<std::size_t>(B) * p.m);
  p.norms.resize(static_cast<std::size_t>(B));
  p.degenerate.resize(static_cast<std::size_t>(B), 0);

  std::vector<double> eps(static_cast<std::size_t>(D));
  std::vector<double> y(static_cast<std::size_t>(D));
  std::vector<double> v(static_cast<std::size_t>(p.m));
  for (int i = 0; i < B; ++i) {
    epsilon(model, z_T.row(i), schedule.T, schedule, condition, eps);
    tweedie(z_T.row(i), schedule.T, schedule, eps, y);
    if (y_full) std::copy(y.begin(), y.end(), y_full->row(i).begin());
    downsample(y, z_T.shape, window, v);
    p.norms[static_cast<std::size_t>(i)] = std::sqrt(kern::sumsq(v));
    auto u = std::span<double>(p.units).subspan(
        static_cast<std::size_t>(i) * p.m, static_cast<std::size_t>(p.m));
    p.degenerate[static_cast<std::size_t>(i)] = normalize_unit(v, u) ? 1 : 0;
  }
  return p;
}

TraceStep loss_snapshot(const Pooled& p, std::span<const double> fixed, int B,
                        const CnoConfig& cfg, double kl_value) {
  TraceStep s;
  const auto row = [&](std::span<const double> mat, int i) {
    return mat.subspan(static_cast<std::size_t>(i) * p.m,
                       static_cast<std::size_t>(p.m));
  };
  s.similarity.resize(static_cast<std::size_t>(B) * B);
  s.per_sample.resize(static_cast<std::size_t>(B));
  for (int i = 0; i < B; ++i)
    for (int j = 0; j < B; ++j)
      s.similarity[static_cast<std::size_t>(i) * B + j] =
          kern::dot(row(p.units, i), row(p.units, j));
  for (int i = 0; i < B; ++i) {
    const double pos = kern::dot(row(p.units, i), row(fixed, i));
    double max_arg = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < B; ++j)
      max_arg = std::max(max_arg,
                         s.similarity[static_cast<std::size_t>(i) * B + j] / cfg.tau);
    double acc = 0.0;
    for (int j = 0; j < B; ++j)
      acc += std::exp(s.similarity[static_cast<std::size_t>(i) * B + j] / cfg.tau -
                      max_arg);
    s.per_sample[static_cast<std::size_t>(i)] =
        -pos / (cfg.gamma * cfg.tau) + max_arg + std::log(acc);
  }
  s.contrastive = kern::sum(s.per_sample) / B;
  s.kl = kl_value;
  s.total = s.contrastive + cfg.kl_weight * kl_value;
  return s;
}

GradientResult analytic_gradient(const LatentBatch& z_T,
                                 const GaussianMixture& model,
                                 const NoiseSchedule& schedule,
                                 const std::optional<std::string>& condition,
                                 const CnoConfig& cfg,
                                 std::span<const double> fixed) {
  const int B = z_T.batch_size;
  const int D = z_T.dim();
  const double root_abar = std::sqrt(schedule.alpha_bar(schedule.T));

  Pooled p = opt_vectors(z_T, model, schedule, condition, cfg.window, nullptr);
  const int m = p.m;

  double kl_value = 0.0;
  if (cfg.kl_weight > 0.0) kl_value = kl_penalty(z_T).mean;

  GradientResult out;
  out.snapshot = loss_snapshot(p, fixed, B, cfg, kl_value);
  out.degenerate = p.degenerate;
  out.grad.assign(static_cast<std::size_t>(B) * D, 0.0);

  const auto urow = [&](int i) {
    return std::span<const double>(p.units).subspan(
        static_cast<std::size_t>(i) * m, static_cast<std::size_t>(m));
  };
  const auto frow = [&](int i) {
    return fixed.subspan(static_cast<std::size_t>(i) * m,
                         static_cast<std::size_t>(m));
  };

  // Softmax rows P_ij = exp(s_ij/tau) / sum_j exp(s_ij/tau).
  std::vector<double> P(static_cast<std::size_t>(B) * B);
  for (int i = 0; i < B; ++i) {
    double max_arg = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < B; ++j)
      max_arg = std::max(
          max_arg, out.snapshot.similarity[static_cast<std::size_t>(i) * B + j]);
    double acc = 0.0;
    for (int j = 0; j < B; ++j) {
      const double e = std::exp(
          (out.snapshot.similarity[static_cast<std::size_t>(i) * B + j] - max_arg) /
          cfg.tau);
      P[static_cast<std::size_t>(i) * B + j] = e;
      acc += e;
    }
    for (int j = 0; j < B; ++j) P[static_cast<std::size_t>(i) * B + j] /= acc;
  }

  std::vector<double> gu(static_cast<std::size_t>(m));
  std::vector<double> gy(static_cast<std::size_t>(D));
  for (int k = 0; k < B; ++k) {
    if (p.degenerate[static_cast<std::size_t>(k)]) continue;  // flagged, zero grad
    // d(meanloss)/d u_k treating all u as free vectors. Contributions:
    //   own loss row:   -f_k/(gamma tau) + (1/tau) [sum_j P_kj u_j + P_kk u_k]
    //   other rows i!=k: (1/tau) P_ik u_i
    std::fill(gu.begin(), gu.end(), 0.0);
    kern::axpy(gu, -1.0 / (cfg.gamma * cfg.tau), frow(k));
    for (int j = 0; j < B; ++j)
      kern::axpy(gu, P[static_cast<std::size_t>(k) * B + j] / cfg.tau, urow(j));
    kern::axpy(gu, P[static_cast<std::size_t>(k) * B + k] / cfg.tau, urow(k));
    for (int i = 0; i < B; ++i)
      if (i != k)
        kern::axpy(gu, P[static_cast<std::size_t>(i) * B + k] / cfg.tau, urow(i));
    kern::scale(gu, 1.0 / B);

    // Normalization Jacobian (I - u u^T)/||v||, then the pooling adjoint,
    // then the affine denoiser slope 1/sqrt(abar_T).
    const double radial = kern::dot(gu, urow(k));
    kern::axpy(gu, -radial, urow(k));
    kern::scale(gu, 1.0 / p.norms[static_cast<std::size_t>(k)]);
    downsample_adjoint(gu, z_T.shape, cfg.window, gy);
    auto gz = std::span<double>(out.grad).subspan(
        static_cast<std::size_t>(k) * D, static_cast<std::size_t>(D));
    kern::axpy(gz, 1.0 / root_abar, gy);
  }

  if (cfg.kl_weight > 0.0) {
    std::vector<double> gkl(static_cast<std::size_t>(D));
    for (int k = 0; k < B; ++k) {
      kl_gradient(z_T.row(k), gkl);
      auto gz = std::span<double>(out.grad).subspan(
          static_cast<std::size_t>(k) * D, static_cast<std::size_t>(D));
      kern::axpy(gz, cfg.kl_weight / B, gkl);
    }
  }
  return out;
}

GradientResult difference_gradient(const LatentBatch& z_T,
                                   const GaussianMixture& model,
                                   const NoiseSchedule& schedule,
                                   const std::optional<std::string>& condition,
                                   const CnoConfig& cfg,
                                   std::span<const double> fixed) {
  constexpr double h = 1e-4;
  GradientResult out;
  Pooled p = opt_vectors(z_T, model, schedule, condition, cfg.window, nullptr);
  double kl_value = cfg.kl_weight > 0.0 ? kl_penalty(z_T).mean : 0.0;
  out.snapshot = loss_snapshot(p, fixed, z_T.batch_size, cfg, kl_value);
  out.degenerate = p.degenerate;
  out.grad.resize(z_T.data.size());
  LatentBatch probe = z_T;
  for (std::size_t e = 0; e < probe.data.size(); ++e) {
    const double saved = probe.data[e];
    probe.data[e] = saved + h;
    const double up = cno_total_loss(probe, model, schedule, condition, cfg, fixed);
    probe.data[e] = saved - h;
    const double dn = cno_total_loss(probe, model, schedule, condition, cfg, fixed);
    probe.data[e] = saved;
    out.grad[e] = (up - dn) / (2.0 * h);
  }
  return out;
}

}  // namespace

std::vector<double> pooled_targets(const LatentBatch& fixed_full, int window) {
  const int m = pooled_dim(fixed_full.shape, window);
  std::vector<double> out(static_cast<std::size_t>(fixed_full.batch_size) * m);
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int i = 0; i < fixed_full.batch_size; ++i) {
    downsample(fixed_full.row(i), fixed_full.shape, window, v);
    auto dst = std::span<double>(out).subspan(static_cast<std::size_t>(i) * m,
                                              static_cast<std::size_t>(m));
    normalize_unit(v, dst);
  }
  return out;
}

double cno_total_loss(const LatentBatch& z_T, const GaussianMixture& model,
                      const NoiseSchedule& schedule,
                      const std::optional<std::string>& condition,
                      const CnoConfig& config, std::span<const double> fixed) {
  Pooled p = opt_vectors(z_T, model, schedule, condition, config.window, nullptr);
  const auto loss = contrastive_loss(p.units, fixed, z_T.batch_size, p.m,
                                     config.tau, config.gamma);
  double total = loss.mean;
  if (config.kl_weight > 0.0) total += config.kl_weight * kl_penalty(z_T).mean;
  return total;
}

double cno_total_loss_frozen(const LatentBatch& z_T, const LatentBatch& eps,
                             const NoiseSchedule& schedule,
                             const CnoConfig& config,
                             std::span<const double> fixed) {
  const int B = z_T.batch_size;
  const int D = z_T.dim();
  const int m = pooled_dim(z_T.shape, config.window);
  std::vector<double> units(static_cast<std::size_t>(B) * m);
  std::vector<double> y(static_cast<std::size_t>(D));
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int i = 0; i < B; ++i) {
    tweedie(z_T.row(i), schedule.T, schedule, eps.row(i), y);
    downsample(y, z_T.shape, config.window, v);
    auto u = std::span<double>(units).subspan(static_cast<std::size_t>(i) * m,
                                              static_cast<std::size_t>(m));
    normalize_unit(v, u);
  }
  const auto loss = contrastive_loss(units, fixed, B, m, config.tau, config.gamma);
  double total = loss.mean;
  if (config.kl_weight > 0.0) total += config.kl_weight * kl_penalty(z_T).mean;
  return total;
}

GradientResult cno_gradient(const LatentBatch& z_T, const GaussianMixture& model,
                            const NoiseSchedule& schedule,
                            const std::optional<std::string>& condition,
                            const CnoConfig& config,
                            std::span<const double> fixed) {
  config.validate(z_T.shape);
  return config.use_stopgrad
             ? analytic_gradient(z_T, model, schedule, condition, config, fixed)
             : difference_gradient(z_T, model, schedule, condition, config, fixed);
}

OptimizeResult optimize_noise(const GaussianMixture& model,
                              const NoiseSchedule& schedule,
                              const std::optional<std::string>& condition,
                              const CnoConfig& config, const LatentShape& shape,
                              std::uint64_t seed) {
  config.validate(shape);
  if (shape.dim != model.dim) throw ParamError("latent shape does not match model dim");

  OptimizeResult res;
  res.initial = LatentBatch(config.batch_size, shape);
  Rng rng(seed);
  rng.fill_gaussian(res.initial.data);
  res.optimized = res.initial;

  // First-pass denoised predictions define the anchors (kept at full
  // resolution; pooling is deterministic, so pooling once here is equivalent).
  LatentBatch fixed_full(config.batch_size, shape);
  opt_vectors(res.optimized, model, schedule, condition, config.window, &fixed_full);
  const std::vector<double> fixed = pooled_targets(fixed_full, config.window);

  for (int it = 0; it < config.n_opt; ++it) {
    GradientResult g;
    try {
      g = cno_gradient(res.optimized, model, schedule, condition, config, fixed);
    } catch (const NumericError& e) {
      throw NumericError("noise optimization failed at iteration " +
                         std::to_string(it + 1) + ": " + e.what());
    }
    double gmax = 0.0;
    for (double v : g.grad) gmax = std::max(gmax, std::abs(v));
    g.snapshot.grad_max_norm = gmax;
    if (!std::isfinite(g.snapshot.total) || !std::isfinite(gmax))
      throw NumericError("noise optimization diverged at iteration " +
                         std::to_string(it + 1));
    res.trace.steps.push_back(std::move(g.snapshot));
    kern::axpy(std::span<double>(res.optimized.data), -config.learning_rate,
               g.grad);
  }
  return res;
}

}  // namespace cno
