#include "cno/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cno/errors.hpp"
#include "cno/rng.hpp"

namespace cno {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParamError("config: bad real for " + key + ": '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParamError("config: bad integer for " + key + ": '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const std::uint64_t x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParamError("config: bad unsigned for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ParamError("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) out.push_back(parse_real(key, tok));
  return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) out.push_back(static_cast<int>(parse_int(key, tok)));
  return out;
}

std::vector<std::vector<double>> parse_vectors(const std::string& key,
                                               const std::string& v) {
  std::vector<std::vector<double>> out;
  std::string part;
  std::istringstream is(v);
  while (std::getline(is, part, ';')) {
    const auto vec = parse_reals(key, trim(part));
    if (!vec.empty()) out.push_back(vec);
  }
  return out;
}

std::string fmt_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

GaussianMixture ExperimentConfig::build_model() const {
  if (preset == "circle")
    return circle_mixture(modes, radius, mode_scale, dim, guidance);
  GaussianMixture m;
  m.dim = dim;
  m.means = means;
  m.scales = scales;
  m.weights = weights;
  m.conditions = conditions;
  m.guidance_scale = guidance;
  m.validate();
  return m;
}

NoiseSchedule ExperimentConfig::build_noise_schedule() const {
  return build_schedule(T, beta_start, beta_end, kind);
}

LatentShape ExperimentConfig::latent_shape() const {
  if (!grid) return LatentShape::flat(dim);
  const auto s = LatentShape::make_grid(channels, side);
  if (s.dim != dim)
    throw ParamError("config: grid layout does not match model dim");
  return s;
}

void ExperimentConfig::validate() const {
  if (preset != "circle" && preset != "none")
    throw ParamError("config: model.preset must be circle or none");
  if (trials < 0) throw ParamError("config: run.trials must be >= 0");
  if (inference_steps < 1 || inference_steps > T)
    throw ParamError("config: schedule.steps must be in [1, schedule.t]");
  build_model();
  cno.validate(latent_shape());
  const auto model = build_model();
  if (model.conditions.find(condition) == model.conditions.end())
    throw LookupError("config: run.condition '" + condition + "' not defined");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "model.preset=" << preset << "\n";
  os << "model.dim=" << dim << "\n";
  os << "model.modes=" << modes << "\n";
  os << "model.radius=" << fmt_real(radius) << "\n";
  os << "model.scale=" << fmt_real(mode_scale) << "\n";
  os << "model.guidance=" << fmt_real(guidance) << "\n";
  for (const auto& mu : means) {
    os << "model.means=";
    for (double v : mu) os << fmt_real(v) << " ";
    os << "\n";
  }
  os << "model.scales=";
  for (double v : scales) os << fmt_real(v) << " ";
  os << "\nmodel.weights=";
  for (double v : weights) os << fmt_real(v) << " ";
  os << "\n";
  for (const auto& [label, subset] : conditions) {
    os << "model.condition." << label << "=";
    for (int idx : subset) os << idx << " ";
    os << "\n";
  }
  os << "latent.layout=" << (grid ? "grid" : "flat") << "\n";
  os << "latent.channels=" << channels << "\n";
  os << "latent.side=" << side << "\n";
  os << "schedule.t=" << T << "\n";
  os << "schedule.beta_start=" << fmt_real(beta_start) << "\n";
  os << "schedule.beta_end=" << fmt_real(beta_end) << "\n";
  os << "schedule.kind=" << to_string(kind) << "\n";
  os << "schedule.steps=" << inference_steps << "\n";
  os << "cno.batch=" << cno.batch_size << "\n";
  os << "cno.n_opt=" << cno.n_opt << "\n";
  os << "cno.eta=" << fmt_real(cno.learning_rate) << "\n";
  os << "cno.tau=" << fmt_real(cno.tau) << "\n";
  os << "cno.gamma=" << fmt_real(cno.gamma) << "\n";
  os << "cno.window=" << cno.window << "\n";
  os << "cno.lambda=" << fmt_real(cno.kl_weight) << "\n";
  os << "cno.stopgrad=" << (cno.use_stopgrad ? "true" : "false") << "\n";
  os << "metrics.kernel="
     << (kernel == SimilarityKernel::cosine ? "cosine" : "rbf") << "\n";
  os << "run.condition=" << condition << "\n";
  os << "run.trials=" << trials << "\n";
  os << "run.seed=" << seed << "\n";
  os << "run.plots=" << (emit_plots ? "true" : "false") << "\n";
  os << "run.timing=" << (timing ? "true" : "false") << "\n";
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a 64
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string ExperimentConfig::run_id() const {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash()));
  return buf;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hashpos = line.find('#');
    if (hashpos != std::string::npos) line.resize(hashpos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParamError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "model.preset") c.preset = val;
    else if (key == "model.dim") c.dim = static_cast<int>(parse_int(key, val));
    else if (key == "model.modes") c.modes = static_cast<int>(parse_int(key, val));
    else if (key == "model.radius") c.radius = parse_real(key, val);
    else if (key == "model.scale") c.mode_scale = parse_real(key, val);
    else if (key == "model.guidance") c.guidance = parse_real(key, val);
    else if (key == "model.means") c.means = parse_vectors(key, val);
    else if (key == "model.scales") c.scales = parse_reals(key, val);
    else if (key == "model.weights") c.weights = parse_reals(key, val);
    else if (key.rfind("model.condition.", 0) == 0) {
      const std::string label = key.substr(16);
      if (label.empty()) throw ParamError("config: empty condition label");
      c.conditions[label] = parse_ints(key, val);
    }
    else if (key == "latent.layout") {
      if (val == "grid") c.grid = true;
      else if (val == "flat") c.grid = false;
      else throw ParamError("config: latent.layout must be flat or grid");
    }
    else if (key == "latent.channels") c.channels = static_cast<int>(parse_int(key, val));
    else if (key == "latent.side") c.side = static_cast<int>(parse_int(key, val));
    else if (key == "schedule.t") c.T = static_cast<int>(parse_int(key, val));
    else if (key == "schedule.beta_start") c.beta_start = parse_real(key, val);
    else if (key == "schedule.beta_end") c.beta_end = parse_real(key, val);
    else if (key == "schedule.kind") c.kind = schedule_kind_from_string(val);
    else if (key == "schedule.steps") c.inference_steps = static_cast<int>(parse_int(key, val));
    else if (key == "cno.batch") c.cno.batch_size = static_cast<int>(parse_int(key, val));
    else if (key == "cno.n_opt") c.cno.n_opt = static_cast<int>(parse_int(key, val));
    else if (key == "cno.eta") c.cno.learning_rate = parse_real(key, val);
    else if (key == "cno.tau") c.cno.tau = parse_real(key, val);
    else if (key == "cno.gamma") c.cno.gamma = parse_real(key, val);
    else if (key == "cno.window") c.cno.window = static_cast<int>(parse_int(key, val));
    else if (key == "cno.lambda") c.cno.kl_weight = parse_real(key, val);
    else if (key == "cno.stopgrad") c.cno.use_stopgrad = parse_bool(key, val);
    else if (key == "metrics.kernel") {
      if (val == "cosine") c.kernel = SimilarityKernel::cosine;
      else if (val == "rbf") c.kernel = SimilarityKernel::rbf;
      else throw ParamError("config: metrics.kernel must be cosine or rbf");
    }
    else if (key == "run.condition") c.condition = val;
    else if (key == "run.trials") c.trials = static_cast<int>(parse_int(key, val));
    else if (key == "run.seed") c.seed = parse_u64(key, val);
    else if (key == "run.out") c.out_dir = val;
    else if (key == "run.plots") c.emit_plots = parse_bool(key, val);
    else if (key == "run.timing") c.timing = parse_bool(key, val);
    else throw ParamError("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace cno
