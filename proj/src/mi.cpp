#include "cno/mi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cno/errors.hpp"
#include "cno/rng.hpp"

namespace cno {

double gaussian_mi(double rho, int dim) {
  if (std::abs(rho) >= 1.0) throw ParamError("gaussian_mi: |rho| must be < 1");
  if (dim < 1) throw ParamError("gaussian_mi: dim must be positive");
  return -0.5 * dim * std::log1p(-rho * rho);
}

void MiExperiment::validate() const {
  if (dim < 1) throw ParamError("mi experiment: dim must be positive");
  if (std::abs(rho_pos) >= 1.0 || std::abs(rho_neg) >= 1.0)
    throw ParamError("mi experiment: |rho| must be < 1");
  if (batch < 2) throw ParamError("mi experiment: batch must be >= 2");
  if (num_batches < 1) throw ParamError("mi experiment: num_batches must be >= 1");
}

namespace {

// log f(z, z') for the positive-pair ratio critic:
//   log p(z|z') - log p(z)
//   = -||z - rho z'||^2 / (2(1-rho^2)) - (d/2) ln(1-rho^2) + ||z||^2 / 2
double log_ratio(const std::vector<double>& z, const std::vector<double>& zp,
                 double rho) {
  const double om = 1.0 - rho * rho;
  double q = 0.0, zz = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = z[i] - rho * zp[i];
    q += d * d;
    zz += z[i] * z[i];
  }
  return -0.5 * q / om - 0.5 * static_cast<double>(z.size()) * std::log(om) +
         0.5 * zz;
}

}  // namespace

BoundCheck empirical_infonce(const MiExperiment& exp, double gamma) {
  exp.validate();
  if (gamma <= 0.0) throw ParamError("gamma must be positive");

  const int d = exp.dim;
  const int n_neg = exp.batch - 1;
  std::vector<double> z(static_cast<std::size_t>(d));
  std::vector<double> partner(static_cast<std::size_t>(d));
  std::vector<double> log_f(static_cast<std::size_t>(exp.batch));

  std::vector<double> losses(static_cast<std::size_t>(exp.num_batches));
  std::vector<double> losses_g1(static_cast<std::size_t>(exp.num_batches));
  for (int rep = 0; rep < exp.num_batches; ++rep) {
    Rng rng = Rng::substream(exp.seed, static_cast<std::uint64_t>(rep));
    rng.fill_gaussian(z);
    // positive: rho_pos z + sqrt(1-rho_pos^2) xi
    const double cp = std::sqrt(1.0 - exp.rho_pos * exp.rho_pos);
    for (int i = 0; i < d; ++i)
      partner[static_cast<std::size_t>(i)] =
          exp.rho_pos * z[static_cast<std::size_t>(i)] + cp * rng.next_gaussian();
    log_f[0] = log_ratio(z, partner, exp.rho_pos);
    const double cn = std::sqrt(1.0 - exp.rho_neg * exp.rho_neg);
    for (int j = 0; j < n_neg; ++j) {
      for (int i = 0; i < d; ++i)
        partner[static_cast<std::size_t>(i)] =
            exp.rho_neg * z[static_cast<std::size_t>(i)] + cn * rng.next_gaussian();
      log_f[static_cast<std::size_t>(j) + 1] = log_ratio(z, partner, exp.rho_pos);
    }
    const double max_lf = *std::max_element(log_f.begin(), log_f.end());
    double acc = 0.0;
    for (double lf : log_f) acc += std::exp(lf - max_lf);
    const double lse = max_lf + std::log(acc);
    losses[static_cast<std::size_t>(rep)] = -log_f[0] / gamma + lse;
    losses_g1[static_cast<std::size_t>(rep)] = -log_f[0] + lse;
  }

  const double n = exp.num_batches;
  const auto mean_and_stderr = [n](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return std::pair<double, double>{mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair<double, double>{mean, std::sqrt(ss / (n - 1.0) / n)};
  };
  BoundCheck out;
  out.gamma = gamma;
  const auto [mu, se] = mean_and_stderr(losses);
  const auto [mu1, se1] = mean_and_stderr(losses_g1);
  out.empirical_loss = mu;
  out.loss_stderr = se;
  out.empirical_loss_g1 = mu1;
  out.loss_g1_stderr = se1;
  out.i_pos = gaussian_mi(exp.rho_pos, d);
  out.i_neg = gaussian_mi(exp.rho_neg, d);
  {
    const double a = exp.rho_pos, b = exp.rho_neg;
    out.e_neg = d * (a * (b - a) / (1.0 - a * a) - 0.5 * std::log1p(-a * a));
  }
  const double logB = std::log(static_cast<double>(exp.batch));
  const double logBm1 = std::log(static_cast<double>(exp.batch - 1));
  out.rhs_classical = logB - out.i_pos;
  out.rhs_prop1 = -out.i_pos + out.e_neg + logBm1;
  out.rhs_prop2 = -out.i_pos / gamma + out.e_neg + logBm1;
  // The classical and first inequalities are statements about the standard
  // (gamma = 1) loss; the gamma inequality is checked on the weighted loss.
  // The independence cell is exactly tight, so leave room for rounding.
  constexpr double kUlpSlack = 1e-12;
  out.classical_ok = out.empirical_loss_g1 >=
                     out.rhs_classical - 3.0 * out.loss_g1_stderr - kUlpSlack;
  out.prop1_ok = out.empirical_loss_g1 >=
                 out.rhs_prop1 - 3.0 * out.loss_g1_stderr - kUlpSlack;
  out.prop2_ok =
      out.empirical_loss >= out.rhs_prop2 - 3.0 * out.loss_stderr - kUlpSlack;
  return out;
}

std::vector<MiSweepRow> check_bounds(const std::vector<MiExperiment>& exps,
                                     const std::vector<double>& gammas) {
  std::vector<MiSweepRow> rows;
  rows.reserve(exps.size() * gammas.size());
  for (const auto& e : exps)
    for (double g : gammas) rows.push_back({e, empirical_infonce(e, g)});
  return rows;
}

std::vector<MiSweepRow> default_mi_sweep(std::uint64_t seed, int num_batches) {
  std::vector<MiExperiment> exps;
  std::uint64_t stream = 0;
  for (double rp : {0.0, 0.5, 0.9})
    for (double rn : {0.0, 0.3})
      for (int b : {4, 16})
        for (int d : {1, 4}) {
          MiExperiment e;
          e.dim = d;
          e.rho_pos = rp;
          e.rho_neg = rn;
          e.batch = b;
          e.num_batches = num_batches;
          e.seed = mix64(seed) + stream++ * kGolden;
          exps.push_back(e);
        }
  return check_bounds(exps, {0.7, 1.0});
}

}  // namespace cno
