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

#ifndef SPEEDLAB_CLI_PLOT_H_
#define SPEEDLAB_CLI_PLOT_H_

#include <filesystem>
#include <string>
#include <vector>

namespace speedlab {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string RenderSvg(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label);

// Writes <stem>.svg and the tab-separated data it was drawn from, <stem>.tsv.
void WritePlot(const std::filesystem::path& stem, const std::vector<Series>& series,
               const std::string& title, const std::string& x_label,
               const std::string& y_label);

// One overlay figure per (metric, x-axis) pair across all given logs:
// success rate and execution time versus env steps and versus failed
// episodes. Returns the figure paths.
std::vector<std::filesystem::path> PlotMetricLogs(
    const std::vector<std::filesystem::path>& logs, const std::filesystem::path& out_dir);

}  // namespace speedlab

#endif  // SPEEDLAB_CLI_PLOT_H_
