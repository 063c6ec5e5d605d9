#include "cno/harness.hpp"

#include <chrono>
#include <cmath>

#include "cno/errors.hpp"
#include "cno/rng.hpp"
#include "cno/sampler.hpp"

namespace cno {

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
      .count();
}

void accumulate(RunResult::Summary& s, const MetricReport& m) {
  s.vendi_mean += m.vendi;
  s.mss_mean += m.mss;
  s.modes_mean += m.modes_hit;
  s.fidelity_mean += m.fidelity;
  ++s.n;
}

double variance(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / (static_cast<double>(xs.size()) - 1.0);
}

}  // namespace

RunResult::Summary RunResult::summarize(const std::string& arm) const {
  Summary s;
  std::vector<double> vendi, mss, modes, fid;
  for (const auto& r : records) {
    if (r.arm != arm) continue;
    accumulate(s, r.metrics);
    vendi.push_back(r.metrics.vendi);
    mss.push_back(r.metrics.mss);
    modes.push_back(r.metrics.modes_hit);
    fid.push_back(r.metrics.fidelity);
  }
  if (s.n == 0) return s;
  s.vendi_mean /= s.n;
  s.mss_mean /= s.n;
  s.modes_mean /= s.n;
  s.fidelity_mean /= s.n;
  s.vendi_var = variance(vendi, s.vendi_mean);
  s.mss_var = variance(mss, s.mss_mean);
  s.modes_var = variance(modes, s.modes_mean);
  s.fidelity_var = variance(fid, s.fidelity_mean);
  return s;
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunResult out;
  out.config = config;
  out.run_id = config.run_id();

  const auto model = config.build_model();
  const auto schedule = config.build_noise_schedule();
  const auto shape = config.latent_shape();

  for (int trial = 0; trial < config.trials; ++trial) {
    // The substream seed reproduces the trial in isolation.
    const std::uint64_t trial_seed =
        mix64(config.seed) + static_cast<std::uint64_t>(trial) * kGolden;
    try {
      const double t0 = now_ms();
      auto opt = optimize_noise(model, schedule, config.condition, config.cno,
                                shape, trial_seed);
      const auto plain_t0 = now_ms();
      const auto plain_end = ddim_sample(opt.initial, model, config.condition,
                                         schedule, config.inference_steps);
      const auto plain_t1 = now_ms();
      const auto cno_end = ddim_sample(opt.optimized, model, config.condition,
                                       schedule, config.inference_steps);
      const auto t1 = now_ms();

      TrialRecord plain;
      plain.trial = trial;
      plain.arm = "ddim";
      plain.seed = trial_seed;
      plain.metrics = evaluate_metrics(plain_end.data, plain_end.batch_size,
                                       model, schedule, config.condition,
                                       config.kernel);
      plain.final_loss = 0.0;
      plain.wall_ms = config.timing ? plain_t1 - plain_t0 : 0.0;
      if (config.dim == 2) plain.endpoints = plain_end.data;

      TrialRecord treated;
      treated.trial = trial;
      treated.arm = "cno";
      treated.seed = trial_seed;
      treated.metrics = evaluate_metrics(cno_end.data, cno_end.batch_size, model,
                                         schedule, config.condition, config.kernel);
      treated.final_loss = opt.trace.steps.back().total;
      // Optimization plus its own sampling pass.
      treated.wall_ms =
          config.timing ? (plain_t0 - t0) + (t1 - plain_t1) : 0.0;
      if (config.dim == 2) treated.endpoints = cno_end.data;

      out.records.push_back(std::move(plain));
      out.records.push_back(std::move(treated));
    } catch (const std::exception& e) {
      ++out.failed_trials;
      out.diagnostics.push_back("trial " + std::to_string(trial) + ": " + e.what());
    }
  }
  return out;
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "gamma") return SweepAxis::gamma;
  if (s == "tau") return SweepAxis::tau;
  if (s == "eta") return SweepAxis::eta;
  if (s == "B" || s == "batch") return SweepAxis::batch;
  if (s == "w" || s == "window") return SweepAxis::window;
  if (s == "lambda") return SweepAxis::lambda;
  throw ParamError("unknown sweep axis: " + s);
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::tau: return "tau";
    case SweepAxis::eta: return "eta";
    case SweepAxis::batch: return "B";
    case SweepAxis::window: return "w";
    case SweepAxis::lambda: return "lambda";
  }
  return "?";
}

ExperimentConfig with_axis_value(const ExperimentConfig& base, SweepAxis axis,
                                 double value) {
  ExperimentConfig c = base;
  switch (axis) {
    case SweepAxis::gamma: c.cno.gamma = value; break;
    case SweepAxis::tau: c.cno.tau = value; break;
    case SweepAxis::eta: c.cno.learning_rate = value; break;
    case SweepAxis::batch: c.cno.batch_size = static_cast<int>(value); break;
    case SweepAxis::window: c.cno.window = static_cast<int>(value); break;
    case SweepAxis::lambda: c.cno.kl_weight = value; break;
  }
  return c;
}

std::vector<RunResult> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                 const std::vector<double>& values) {
  if (values.empty()) throw ParamError("sweep needs at least one value");
  std::vector<RunResult> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(run_experiment(with_axis_value(base, axis, v)));
  return out;
}

std::vector<StabilityRow> gamma_stability(const ExperimentConfig& base,
                                          const std::vector<double>& gammas,
                                          const std::vector<double>& etas) {
  if (etas.size() < 2) throw ParamError("stability study needs >= 2 eta values");
  std::vector<StabilityRow> rows;
  for (double g : gammas) {
    StabilityRow row;
    row.gamma = g;
    std::vector<double> mss_means, fid_means;
    for (double eta : etas) {
      auto cfg = with_axis_value(base, SweepAxis::gamma, g);
      cfg = with_axis_value(cfg, SweepAxis::eta, eta);
      const auto res = run_experiment(cfg);
      const auto s = res.summarize("cno");
      row.vendi_means.push_back(s.vendi_mean);
      mss_means.push_back(s.mss_mean);
      fid_means.push_back(s.fidelity_mean);
    }
    const auto mean_of = [](const std::vector<double>& xs) {
      double acc = 0.0;
      for (double x : xs) acc += x;
      return acc / static_cast<double>(xs.size());
    };
    row.vendi_s2 = variance(row.vendi_means, mean_of(row.vendi_means));
    row.mss_s2 = variance(mss_means, mean_of(mss_means));
    row.fidelity_s2 = variance(fid_means, mean_of(fid_means));
    rows.push_back(std::move(row));
  }
  return rows;
}

double sign_test_pvalue(int n, int k) {
  if (n <= 0) return 1.0;
  if (k < 0) k = 0;
  // sum_{j>=k} C(n,j) / 2^n, accumulated in log space
  double p = 0.0;
  for (int j = k; j <= n; ++j) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                      std::lgamma(n - j + 1.0) - n * std::log(2.0);
    p += std::exp(lc);
  }
  return std::min(1.0, p);
}

}  // namespace cno
