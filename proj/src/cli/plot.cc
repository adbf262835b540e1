// Copyright 2026 The speedlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "speedlab/cli/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"
#include "speedlab/eval/metric_log.h"

namespace speedlab {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Round tick spacing covering [lo, hi] with about n intervals.
double TickStep(double lo, double hi, int n) {
  const double raw = (hi - lo) / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string RenderSvg(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const Series& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << Escape(title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\""
    << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double xs = TickStep(x0, x1, 6), ys = TickStep(y0, y1, 5);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    o << "<line x1=\"" << px(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(t)
      << "\" y2=\"" << kTop + ph + 5 << "\" stroke=\"black\"/>"
      << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 18
      << "\" text-anchor=\"middle\">" << Num(t) << "</text>\n";
  }
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft
      << "\" y2=\"" << py(t) << "\" stroke=\"black\"/>"
      << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(t) + 4
      << "\" text-anchor=\"end\">" << Num(t) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
    << "\" text-anchor=\"middle\">" << Escape(x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << Escape(y_label) << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      o << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
    }
    o << "\"/>\n";
    const double ly = kTop + 10 + 18 * s;
    o << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 30
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
      << "<text x=\"" << kLeft + pw + 35 << "\" y=\"" << ly + 4 << "\">"
      << Escape(series[s].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void WritePlot(const fs::path& stem, const std::vector<Series>& series,
               const std::string& title, const std::string& x_label,
               const std::string& y_label) {
  fs::create_directories(stem.parent_path());
  WriteTextFile(fs::path(stem.string() + ".svg"), RenderSvg(series, title, x_label, y_label));
  std::ofstream tsv(stem.string() + ".tsv");
  if (!tsv) throw Error("plot: cannot write " + stem.string() + ".tsv");
  tsv.precision(10);
  tsv << "series\t" << x_label << '\t' << y_label << '\n';
  for (const Series& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      tsv << s.label << '\t' << s.x[i] << '\t' << s.y[i] << '\n';
    }
  }
}

std::vector<fs::path> PlotMetricLogs(const std::vector<fs::path>& logs,
                                     const fs::path& out_dir) {
  struct Axis {
    const char* key;
    const char* label;
  };
  const Axis xs[] = {{"env_steps", "environment steps"}, {"failed_episodes", "failed episodes"}};
  const Axis ys[] = {{"success_rate", "success rate"}, {"exec_time", "execution time (steps)"}};
  std::vector<MetricLog> parsed;
  std::vector<std::string> labels;
  for (const fs::path& p : logs) {
    parsed.push_back(ReadMetricLog(p));
    const MetricLogHeader& h = parsed.back().header;
    labels.push_back((h.method.empty() ? p.parent_path().string() : h.method) + " s" +
                     std::to_string(h.seed));
  }
  std::vector<fs::path> written;
  for (const Axis& y : ys) {
    for (const Axis& x : xs) {
      std::vector<Series> series;
      for (size_t i = 0; i < parsed.size(); ++i) {
        Series s;
        s.label = labels[i];
        for (const MetricRow& row : parsed[i].rows) {
          if (!row.eval) continue;
          s.x.push_back(std::string(x.key) == "env_steps" ? row.env_steps
                                                          : row.failed_episodes);
          if (std::string(y.key) == "success_rate") {
            s.y.push_back(row.eval->success_rate);
          } else {
            s.y.push_back(row.eval->mean_exec_time.value_or(
                std::numeric_limits<double>::quiet_NaN()));
          }
        }
        series.push_back(std::move(s));
      }
      const fs::path stem = out_dir / (std::string(y.key) + "_vs_" + x.key);
      WritePlot(stem, series, std::string(y.label) + " vs " + x.label, x.label, y.label);
      written.push_back(fs::path(stem.string() + ".svg"));
    }
  }
  return written;
}

}  // namespace speedlab
