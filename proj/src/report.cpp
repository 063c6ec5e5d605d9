#include "cno/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cno/errors.hpp"

namespace cno {

namespace {

std::string g9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

std::string results_csv(const std::vector<RunResult>& results) {
  std::ostringstream os;
  os << "run_id,trial,arm,seed,B,tau,gamma,eta,n_opt,w,lambda_kl,guidance,"
        "vendi,mss,modes_hit,fidelity_logdensity,final_loss,wall_ms\n";
  for (const auto& res : results) {
    const auto& c = res.config;
    for (const auto& r : res.records) {
      os << res.run_id << ',' << r.trial << ',' << r.arm << ',' << r.seed << ','
         << c.cno.batch_size << ',' << g9(c.cno.tau) << ',' << g9(c.cno.gamma)
         << ',' << g9(c.cno.learning_rate) << ',' << c.cno.n_opt << ','
         << c.cno.window << ',' << g9(c.cno.kl_weight) << ',' << g9(c.guidance)
         << ',' << g9(r.metrics.vendi) << ',' << g9(r.metrics.mss) << ','
         << r.metrics.modes_hit << ',' << g9(r.metrics.fidelity) << ','
         << g9(r.final_loss) << ',' << g9(r.wall_ms) << '\n';
    }
  }
  return os.str();
}

std::string mi_csv(const std::vector<MiSweepRow>& rows) {
  std::ostringstream os;
  os << "dim,rho_pos,rho_neg,B,num_batches,gamma,empirical_loss,loss_stderr,"
        "loss_gamma1,loss_gamma1_stderr,i_pos,i_neg,e_neg,rhs_classical,rhs_prop1,"
        "rhs_prop2,classical_ok,prop1_ok,prop2_ok\n";
  for (const auto& row : rows) {
    const auto& e = row.exp;
    const auto& c = row.check;
    os << e.dim << ',' << g9(e.rho_pos) << ',' << g9(e.rho_neg) << ',' << e.batch
       << ',' << e.num_batches << ',' << g9(c.gamma) << ','
       << g9(c.empirical_loss) << ',' << g9(c.loss_stderr) << ','
       << g9(c.empirical_loss_g1) << ',' << g9(c.loss_g1_stderr) << ','
       << g9(c.i_pos) << ',' << g9(c.i_neg) << ',' << g9(c.e_neg) << ','
       << g9(c.rhs_classical) << ','
       << g9(c.rhs_prop1) << ',' << g9(c.rhs_prop2) << ','
       << (c.classical_ok ? 1 : 0) << ',' << (c.prop1_ok ? 1 : 0) << ','
       << (c.prop2_ok ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string manifest_json(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"tool_version\": \"" << kToolVersion << "\",\n";
  os << "  \"run_id\": \"" << config.run_id() << "\",\n";
  os << "  \"seed\": " << config.seed << ",\n";
  os << "  \"config\": [\n";
  std::istringstream lines(config.canonical());
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (!first) os << ",\n";
    first = false;
    os << "    \"" << line << "\"";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParamError("cannot write file: " + path);
  out << content;
  if (!out) throw ParamError("write failed: " + path);
}

void write_results_csv(const std::vector<RunResult>& results,
                       const std::string& path) {
  write_text_file(path, results_csv(results));
}

void write_mi_csv(const std::vector<MiSweepRow>& rows, const std::string& path) {
  write_text_file(path, mi_csv(rows));
}

void write_manifest(const ExperimentConfig& config, const std::string& path) {
  write_text_file(path, manifest_json(config));
}

ParsedCsv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open csv: " + path);
  ParsedCsv out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      out.header = std::move(cells);
      first = false;
    } else {
      out.rows.push_back(std::move(cells));
    }
  }
  return out;
}

std::vector<std::vector<double>> read_point_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open csv: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::string cell;
    std::istringstream ls(line);
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header line
      throw ParamError("csv: non-numeric cell in row " +
                       std::to_string(rows.size() + 1));
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ParamError("csv: ragged row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cno
