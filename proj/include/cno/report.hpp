#pragma once
// CSV and manifest output. Column order and float formatting are fixed so a
// seeded run writes byte-identical files.

#include <string>
#include <vector>

#include "cno/harness.hpp"
#include "cno/mi.hpp"

namespace cno {

inline constexpr const char* kToolVersion = "0.2.0";

// Header: run_id,trial,arm,seed,B,tau,gamma,eta,n_opt,w,lambda_kl,guidance,
//         vendi,mss,modes_hit,fidelity_logdensity,final_loss,wall_ms
// Reals carry 9 significant digits.
std::string results_csv(const std::vector<RunResult>& results);
void write_results_csv(const std::vector<RunResult>& results,
                       const std::string& path);

std::string mi_csv(const std::vector<MiSweepRow>& rows);
void write_mi_csv(const std::vector<MiSweepRow>& rows, const std::string& path);

// JSON manifest: tool version, seed, config hash, canonical config text.
std::string manifest_json(const ExperimentConfig& config);
void write_manifest(const ExperimentConfig& config, const std::string& path);

struct ParsedCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
ParsedCsv read_csv(const std::string& path);

// Numeric matrix from a CSV of points (optional non-numeric header skipped).
std::vector<std::vector<double>> read_point_rows(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cno
