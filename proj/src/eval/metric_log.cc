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

#include "speedlab/eval/metric_log.h"

#include <string>

#include "speedlab/core/error.h"

namespace speedlab {

using nlohmann::json;

json ToJson(const EvalReport& r) {
  json j;
  j["n_episodes"] = r.n_episodes;
  j["successes"] = r.successes;
  j["success_rate"] = r.success_rate;
  j["mean_exec_time"] = r.mean_exec_time ? json(*r.mean_exec_time) : json(nullptr);
  j["exec_time_std"] = r.exec_time_std ? json(*r.exec_time_std) : json(nullptr);
  j["env_steps_so_far"] = r.env_steps_so_far;
  j["failed_episodes_so_far"] = r.failed_episodes_so_far;
  return j;
}

EvalReport EvalReportFromJson(const json& j) {
  EvalReport r;
  r.n_episodes = j.at("n_episodes");
  r.successes = j.value("successes", 0);
  r.success_rate = j.at("success_rate");
  if (!j.at("mean_exec_time").is_null()) r.mean_exec_time = j["mean_exec_time"].get<double>();
  if (!j.at("exec_time_std").is_null()) r.exec_time_std = j["exec_time_std"].get<double>();
  r.env_steps_so_far = j.value("env_steps_so_far", 0L);
  r.failed_episodes_so_far = j.value("failed_episodes_so_far", 0L);
  return r;
}

json ToJson(const MetricRow& row) {
  json j;
  j["iteration"] = row.iteration;
  j["env_steps"] = row.env_steps;
  j["failed_episodes"] = row.failed_episodes;
  j["eval"] = row.eval ? ToJson(*row.eval) : json(nullptr);
  j["losses"] = row.losses;
  return j;
}

MetricRow MetricRowFromJson(const json& j) {
  MetricRow row;
  row.iteration = j.at("iteration");
  row.env_steps = j.at("env_steps");
  row.failed_episodes = j.at("failed_episodes");
  if (j.contains("eval") && !j["eval"].is_null()) row.eval = EvalReportFromJson(j["eval"]);
  if (j.contains("losses")) row.losses = j["losses"].get<std::map<std::string, double>>();
  return row;
}

namespace {

json HeaderToJson(const MetricLogHeader& h) {
  json j;
  j["type"] = "header";
  j["method"] = h.method;
  j["env_id"] = h.env_id;
  j["seed"] = h.seed;
  j["baseline_exec_time"] =
      h.baseline_exec_time ? json(*h.baseline_exec_time) : json(nullptr);
  j["extra"] = h.extra;
  return j;
}

MetricLogHeader HeaderFromJson(const json& j) {
  MetricLogHeader h;
  h.method = j.value("method", "");
  h.env_id = j.value("env_id", "");
  h.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("baseline_exec_time") && !j["baseline_exec_time"].is_null()) {
    h.baseline_exec_time = j["baseline_exec_time"].get<double>();
  }
  if (j.contains("extra")) h.extra = j["extra"];
  return h;
}

}  // namespace

MetricLogWriter::MetricLogWriter(const std::filesystem::path& path,
                                 const MetricLogHeader& header)
    : out_(path, std::ios::trunc) {
  if (!out_) throw Error("metric log: cannot open " + path.string());
  out_ << HeaderToJson(header).dump() << '\n';
  out_.flush();
}

void MetricLogWriter::Append(const MetricRow& row) {
  out_ << ToJson(row).dump() << '\n';
  out_.flush();
}

MetricLog ReadMetricLog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("metric log: missing file " + path.string());
  MetricLog log;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("metric log: bad line " + std::to_string(line_no) + " in " +
                  path.string());
    }
    if (line_no == 1) {
      if (j.value("type", "") != "header") throw Error("metric log: missing header");
      log.header = HeaderFromJson(j);
    } else {
      log.rows.push_back(MetricRowFromJson(j));
    }
  }
  if (line_no == 0) throw Error("metric log: empty file " + path.string());
  return log;
}

}  // namespace speedlab
