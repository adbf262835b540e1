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

#ifndef SPEEDLAB_EVAL_METRIC_LOG_H_
#define SPEEDLAB_EVAL_METRIC_LOG_H_

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "speedlab/eval/evaluate.h"

namespace speedlab {

struct MetricRow {
  long iteration = 0;
  long env_steps = 0;
  long failed_episodes = 0;
  std::optional<EvalReport> eval;
  std::map<std::string, double> losses;
};

struct MetricLogHeader {
  std::string method;
  std::string env_id;
  std::uint64_t seed = 0;
  std::optional<double> baseline_exec_time;
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json ToJson(const EvalReport& report);
EvalReport EvalReportFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const MetricRow& row);
MetricRow MetricRowFromJson(const nlohmann::json& j);

// Line-delimited JSON: the first line is the header, every following line
// one row. Rows are flushed as they are appended.
class MetricLogWriter {
 public:
  MetricLogWriter(const std::filesystem::path& path, const MetricLogHeader& header);
  void Append(const MetricRow& row);

 private:
  std::ofstream out_;
};

struct MetricLog {
  MetricLogHeader header;
  std::vector<MetricRow> rows;
};

MetricLog ReadMetricLog(const std::filesystem::path& path);

}  // namespace speedlab

#endif  // SPEEDLAB_EVAL_METRIC_LOG_H_
