// Command-line front end: seeded experiments, sweeps, bound checks, and
// standalone diversity metrics.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cno/config.hpp"
#include "cno/harness.hpp"
#include "cno/loss.hpp"
#include "cno/mi.hpp"
#include "cno/report.hpp"
#include "cno/svg.hpp"

namespace fs = std::filesystem;
using namespace cno;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> trials;
  bool plots = false;
};

ExperimentConfig load_with_overrides(const std::string& path, const Overrides& o) {
  ExperimentConfig cfg = load_config_file(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.trials) cfg.trials = *o.trials;
  if (o.plots) cfg.emit_plots = true;
  cfg.validate();
  return cfg;
}

void print_summary(const RunResult& res) {
  const auto p = res.summarize("ddim");
  const auto c = res.summarize("cno");
  std::printf("run %s: %d trials (%d failed)\n", res.run_id.c_str(),
              res.config.trials, res.failed_trials);
  std::printf("  %-5s vendi %.4f  mss %.4f  modes %.3f  fidelity %.4f\n", "ddim",
              p.vendi_mean, p.mss_mean, p.modes_mean, p.fidelity_mean);
  std::printf("  %-5s vendi %.4f  mss %.4f  modes %.3f  fidelity %.4f\n", "cno",
              c.vendi_mean, c.mss_mean, c.modes_mean, c.fidelity_mean);
  if (res.config.timing) {
    double plain_ms = 0.0, cno_ms = 0.0;
    for (const auto& r : res.records)
      (r.arm == "ddim" ? plain_ms : cno_ms) += r.wall_ms;
    if (plain_ms > 0.0)
      std::printf("  wall: ddim %.1f ms, cno %.1f ms (overhead x%.3f)\n",
                  plain_ms, cno_ms, cno_ms / plain_ms);
  }
  for (const auto& d : res.diagnostics) std::printf("  ! %s\n", d.c_str());
}

int cmd_run(const std::string& config_path, const Overrides& o) {
  const auto cfg = load_with_overrides(config_path, o);
  fs::create_directories(cfg.out_dir);
  const auto res = run_experiment(cfg);
  write_results_csv({res}, cfg.out_dir + "/results.csv");
  write_manifest(cfg, cfg.out_dir + "/manifest.json");
  print_summary(res);
  if (cfg.emit_plots)
    for (const auto& f : emit_plots({res}, cfg.out_dir))
      std::printf("  wrote %s\n", f.c_str());
  std::printf("  wrote %s/results.csv\n", cfg.out_dir.c_str());
  return res.failed_trials == 0 ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::vector<double>& values,
              const std::vector<double>& eta_grid, const Overrides& o) {
  const auto base = load_with_overrides(config_path, o);
  fs::create_directories(base.out_dir);
  const auto axis = sweep_axis_from_string(axis_name);

  if (!eta_grid.empty()) {
    if (axis != SweepAxis::gamma)
      throw ParamError("--eta-grid applies to the gamma axis only");
    const auto rows = gamma_stability(base, values, eta_grid);
    std::ostringstream csv;
    csv << "gamma,s2_vendi,s2_mss,s2_fidelity\n";
    std::printf("%8s %12s %12s %12s\n", "gamma", "s2_vendi", "s2_mss", "s2_fid");
    for (const auto& r : rows) {
      std::printf("%8.3f %12.3e %12.3e %12.3e\n", r.gamma, r.vendi_s2, r.mss_s2,
                  r.fidelity_s2);
      char line[128];
      std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g\n", r.gamma,
                    r.vendi_s2, r.mss_s2, r.fidelity_s2);
      csv << line;
    }
    write_text_file(base.out_dir + "/stability.csv", csv.str());
    std::printf("wrote %s/stability.csv\n", base.out_dir.c_str());
    return 0;
  }

  const auto results = run_sweep(base, axis, values);
  write_results_csv(results, base.out_dir + "/results.csv");
  write_manifest(base, base.out_dir + "/manifest.json");
  for (const auto& f : emit_plots(results, base.out_dir))
    std::printf("wrote %s\n", f.c_str());
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::printf("%s = %g\n", to_string(axis).c_str(), values[i]);
    print_summary(results[i]);
  }
  std::printf("wrote %s/results.csv\n", base.out_dir.c_str());
  int failed = 0;
  for (const auto& r : results) failed += r.failed_trials;
  return failed == 0 ? 0 : 1;
}

int cmd_mi_check(std::uint64_t seed, int num_batches, const std::string& out_dir) {
  const auto rows = default_mi_sweep(seed, num_batches);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_mi_csv(rows, out_dir + "/mi_bounds.csv");
  }
  int violations = 0;
  std::printf("%3s %6s %6s %3s %5s  %10s %10s %10s %10s  ok\n", "d", "rpos",
              "rneg", "B", "gamma", "loss", "rhs_cl", "rhs_p1", "rhs_p2");
  for (const auto& row : rows) {
    const auto& e = row.exp;
    const auto& c = row.check;
    const bool ok = c.classical_ok && c.prop1_ok && c.prop2_ok;
    if (!ok) ++violations;
    std::printf("%3d %6.2f %6.2f %3d %5.2f  %10.4f %10.4f %10.4f %10.4f  %s\n",
                e.dim, e.rho_pos, e.rho_neg, e.batch, c.gamma, c.empirical_loss,
                c.rhs_classical, c.rhs_prop1, c.rhs_prop2, ok ? "yes" : "NO");
  }
  if (!out_dir.empty()) std::printf("wrote %s/mi_bounds.csv\n", out_dir.c_str());
  std::printf("%zu checks, %d violation(s)\n", rows.size() * 3, violations);
  return violations == 0 ? 0 : 1;
}

int cmd_metrics(const std::string& csv_path, const std::string& kernel_name) {
  const auto rows = read_point_rows(csv_path);
  if (rows.empty()) throw ParamError("metrics: no data rows in " + csv_path);
  const int batch = static_cast<int>(rows.size());
  const int dim = static_cast<int>(rows.front().size());
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(batch) * dim);
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  const auto kernel = kernel_name == "cosine" ? SimilarityKernel::cosine
                                              : SimilarityKernel::rbf;
  const auto k = similarity_matrix(flat, batch, dim, kernel);
  std::printf("samples=%d dim=%d kernel=%s\n", batch, dim, kernel_name.c_str());
  std::printf("vendi=%.9g\n", vendi_score(k));
  if (batch >= 2) std::printf("mss=%.9g\n", mean_pairwise_similarity(k));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contrastive noise optimization workbench"};
  app.require_subcommand(1);

  Overrides o;
  std::string config_path, axis_name, values_arg, eta_grid_arg;
  std::string kernel_name = "rbf", points_csv;
  std::uint64_t mi_seed = 1234;
  int mi_batches = 2000;
  std::string mi_out = "out";
  double tau = 0.1;
  int batch = 5;

  const auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "override run.seed");
    c->add_option("--out", o.out, "override run.out");
    c->add_option("--trials", o.trials, "override run.trials");
    c->add_flag("--plots", o.plots, "emit svg plots");
  };

  auto* run = app.add_subcommand("run", "run one paired experiment");
  run->add_option("config", config_path, "config file")->required();
  add_common(run);

  auto* sweep = app.add_subcommand("sweep", "sweep one knob");
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("--axis", axis_name, "gamma|tau|eta|B|w|lambda")->required();
  sweep->add_option("--values", values_arg, "comma-separated values")->required();
  sweep->add_option("--eta-grid", eta_grid_arg,
                    "stability mode: eta grid per gamma value");
  add_common(sweep);

  auto* mi = app.add_subcommand("mi-check", "verify the mutual-information bounds");
  std::string sweep_name = "default";
  mi->add_option("--sweep", sweep_name, "sweep name (default)");
  mi->add_option("--seed", mi_seed, "sweep seed");
  mi->add_option("--num-batches", mi_batches, "replications per cell");
  mi->add_option("--out", mi_out, "output directory ('' to skip csv)");

  auto* gamma = app.add_subcommand("gamma", "print the balanced attraction coefficient");
  gamma->add_option("--tau", tau, "temperature")->required();
  gamma->add_option("--batch", batch, "batch size")->required();

  auto* metrics = app.add_subcommand("metrics", "vendi/mss for a csv of points");
  metrics->add_option("csv", points_csv, "rows = samples")->required();
  metrics->add_option("--kernel", kernel_name, "cosine|rbf");

  CLI11_PARSE(app, argc, argv);

  const auto parse_list = [](const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
  };

  try {
    if (run->parsed()) return cmd_run(config_path, o);
    if (sweep->parsed())
      return cmd_sweep(config_path, axis_name, parse_list(values_arg),
                       parse_list(eta_grid_arg), o);
    if (mi->parsed()) {
      if (sweep_name != "default")
        throw ParamError("unknown mi sweep: " + sweep_name);
      return cmd_mi_check(mi_seed, mi_batches, mi_out);
    }
    if (gamma->parsed()) {
      std::printf("%.9g\n", desirable_gamma(tau, batch));
      return 0;
    }
    if (metrics->parsed()) {
      if (kernel_name != "cosine" && kernel_name != "rbf")
        throw ParamError("metrics: kernel must be cosine or rbf");
      return cmd_metrics(points_csv, kernel_name);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
