#include "cno/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cno/errors.hpp"
#include "cno/report.hpp"

namespace cno {

namespace {

constexpr int kW = 760;
constexpr int kH = 420;

std::string g6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void grow(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi - lo < 1e-12) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double margin = 0.08 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
  double map(double v, double a, double b) const {
    return a + (v - lo) / (hi - lo) * (b - a);
  }
};

void open_svg(std::ostringstream& os, int w, int h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h
     << "\" fill=\"white\" stroke=\"none\"/>\n";
}

void panel_axes(std::ostringstream& os, double x0, double y0, double x1,
                double y1, const std::string& title) {
  os << "<rect x=\"" << g6(x0) << "\" y=\"" << g6(y1) << "\" width=\""
     << g6(x1 - x0) << "\" height=\"" << g6(y0 - y1)
     << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << g6((x0 + x1) / 2) << "\" y=\"" << g6(y1 - 6)
     << "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">"
     << title << "</text>\n";
}

}  // namespace

std::string scatter_svg(const RunResult& result) {
  if (result.config.dim != 2)
    throw ParamError("scatter plot needs a 2-d model");
  const auto model = result.config.build_model();
  const auto& subset = model.condition_subset(result.config.condition);

  Range rx, ry;
  for (int k : subset) {
    rx.grow(model.means[static_cast<std::size_t>(k)][0]);
    ry.grow(model.means[static_cast<std::size_t>(k)][1]);
  }
  for (const auto& r : result.records)
    for (std::size_t i = 0; i + 1 < r.endpoints.size(); i += 2) {
      rx.grow(r.endpoints[i]);
      ry.grow(r.endpoints[i + 1]);
    }
  rx.pad();
  ry.pad();

  std::ostringstream os;
  open_svg(os, kW, kH);
  const double panel_w = (kW - 60) / 2.0;
  const char* arms[2] = {"ddim", "cno"};
  const char* colors[2] = {"#c0392b", "#2471a3"};
  for (int p = 0; p < 2; ++p) {
    const double x0 = 20 + p * (panel_w + 20);
    const double x1 = x0 + panel_w;
    const double y0 = kH - 20.0, y1 = 30.0;
    panel_axes(os, x0, y0, x1, y1, arms[p]);
    for (const auto& r : result.records) {
      if (r.arm != arms[p]) continue;
      for (std::size_t i = 0; i + 1 < r.endpoints.size(); i += 2)
        os << "<circle cx=\"" << g6(rx.map(r.endpoints[i], x0, x1)) << "\" cy=\""
           << g6(ry.map(r.endpoints[i + 1], y0, y1)) << "\" r=\"1.5\" fill=\""
           << colors[p] << "\" fill-opacity=\"0.35\"/>\n";
    }
    for (int k : subset)
      os << "<circle cx=\""
         << g6(rx.map(model.means[static_cast<std::size_t>(k)][0], x0, x1))
         << "\" cy=\""
         << g6(ry.map(model.means[static_cast<std::size_t>(k)][1], y0, y1))
         << "\" r=\"4\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string pareto_svg(const std::vector<ParetoSeries>& series) {
  Range rx, ry;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [fx, vy] : s.points) {
      if (!any) {
        rx = {fx, fx};
        ry = {vy, vy};
        any = true;
      }
      rx.grow(fx);
      ry.grow(vy);
    }
  if (!any) {
    rx = {0.0, 1.0};
    ry = {0.0, 1.0};
  }
  rx.pad();
  ry.pad();

  std::ostringstream os;
  open_svg(os, kW, kH);
  const double x0 = 70, x1 = kW - 30, y0 = kH - 50.0, y1 = 30.0;
  panel_axes(os, x0, y0, x1, y1, "quality / diversity");
  os << "<text x=\"" << g6((x0 + x1) / 2) << "\" y=\"" << g6(y0 + 30)
     << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">"
        "fidelity log-density</text>\n";
  os << "<text x=\"18\" y=\"" << g6((y0 + y1) / 2)
     << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 18 "
     << g6((y0 + y1) / 2) << ")\">vendi score</text>\n";
  // axis extent labels
  os << "<text x=\"" << g6(x0) << "\" y=\"" << g6(y0 + 16)
     << "\" font-family=\"monospace\" font-size=\"10\">" << g6(rx.lo)
     << "</text>\n";
  os << "<text x=\"" << g6(x1) << "\" y=\"" << g6(y0 + 16)
     << "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">"
     << g6(rx.hi) << "</text>\n";
  os << "<text x=\"" << g6(x0 - 6) << "\" y=\"" << g6(y0)
     << "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">"
     << g6(ry.lo) << "</text>\n";
  os << "<text x=\"" << g6(x0 - 6) << "\" y=\"" << g6(y1 + 4)
     << "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">"
     << g6(ry.hi) << "</text>\n";

  const char* colors[4] = {"#c0392b", "#2471a3", "#1e8449", "#884ea0"};
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* col = colors[si % 4];
    for (const auto& [fx, vy] : series[si].points)
      os << "<circle cx=\"" << g6(rx.map(fx, x0, x1)) << "\" cy=\""
         << g6(ry.map(vy, y0, y1)) << "\" r=\"4\" fill=\"" << col << "\"/>\n";
    os << "<text x=\"" << g6(x0 + 10) << "\" y=\"" << g6(y1 + 16 + 14.0 * si)
       << "\" font-family=\"monospace\" font-size=\"12\" fill=\"" << col << "\">"
       << series[si].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> emit_plots(const std::vector<RunResult>& results,
                                    const std::string& out_dir) {
  std::vector<std::string> written;
  ParetoSeries plain{"ddim", {}};
  ParetoSeries treated{"cno", {}};
  for (const auto& res : results) {
    const auto sp = res.summarize("ddim");
    const auto sc = res.summarize("cno");
    if (sp.n > 0) plain.points.emplace_back(sp.fidelity_mean, sp.vendi_mean);
    if (sc.n > 0) treated.points.emplace_back(sc.fidelity_mean, sc.vendi_mean);
  }
  const std::string pareto_path = out_dir + "/pareto.svg";
  write_text_file(pareto_path, pareto_svg({plain, treated}));
  written.push_back(pareto_path);

  if (results.size() == 1 && results.front().config.dim == 2) {
    const std::string scatter_path = out_dir + "/scatter.svg";
    write_text_file(scatter_path, scatter_svg(results.front()));
    written.push_back(scatter_path);
  }
  return written;
}

}  // namespace cno
