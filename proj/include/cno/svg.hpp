#pragma once
// Minimal self-contained SVG plots: endpoint scatters for 2-D runs and the
// fidelity/diversity Pareto view. Deterministic output for identical inputs.

#include <string>
#include <vector>

#include "cno/harness.hpp"

namespace cno {

// Side-by-side endpoint scatter of both arms across all trials, with the
// conditional mode centers marked. Only valid for dim == 2.
std::string scatter_svg(const RunResult& result);

struct ParetoSeries {
  std::string label;
  // One (fidelity, vendi) marker per run, e.g. per sweep value.
  std::vector<std::pair<double, double>> points;
};
std::string pareto_svg(const std::vector<ParetoSeries>& series);

// Writes scatter (when dim == 2) and the Pareto plot for a set of runs into
// out_dir. Returns the list of files written.
std::vector<std::string> emit_plots(const std::vector<RunResult>& results,
                                    const std::string& out_dir);

}  // namespace cno
