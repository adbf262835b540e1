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

#include "speedlab/core/dataset.h"

#include <string>

#include <nlohmann/json.hpp>

#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"

namespace speedlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string DemoFile(int i, const char* field) {
  return "demo_" + std::to_string(i) + "_" + field + ".bin";
}

}  // namespace

void SaveDataset(const Dataset& dataset, const fs::path& dir) {
  dataset.Validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("save_dataset: cannot create " + dir.string());

  json manifest;
  manifest["format_version"] = kDatasetFormatVersion;
  manifest["env_id"] = dataset.env_id;
  manifest["action_space_kind"] = "position_target";
  manifest["obs_dim"] = dataset.obs_dim();
  manifest["action_dim"] = dataset.action_dim();
  manifest["num_demos"] = dataset.demos.size();
  json lengths = json::array();
  for (size_t i = 0; i < dataset.demos.size(); ++i) {
    const Demonstration& d = dataset.demos[i];
    lengths.push_back(d.length());
    // Column-major obs_dim x T is row-major T x obs_dim.
    WriteFloat32File(dir / DemoFile(static_cast<int>(i), "states"),
                     std::span<const float>(d.states.data(), d.states.size()));
    WriteFloat32File(dir / DemoFile(static_cast<int>(i), "actions"),
                     std::span<const float>(d.actions.data(), d.actions.size()));
  }
  manifest["lengths"] = lengths;
  WriteTextFile(dir / "manifest.json", manifest.dump(2) + "\n");
}

Dataset LoadDataset(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(ReadTextFile(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error("load_dataset: bad manifest: " + std::string(e.what()));
  }
  if (manifest.value("format_version", -1) != kDatasetFormatVersion) {
    throw Error("unsupported format version");
  }
  Dataset dataset;
  dataset.env_id = manifest.at("env_id").get<std::string>();
  const int obs_dim = manifest.at("obs_dim").get<int>();
  const int action_dim = manifest.at("action_dim").get<int>();
  const auto lengths = manifest.at("lengths").get<std::vector<int>>();
  if (static_cast<int>(lengths.size()) != manifest.at("num_demos").get<int>()) {
    throw Error("load_dataset: num_demos does not match lengths");
  }
  for (size_t i = 0; i < lengths.size(); ++i) {
    const int t = lengths[i];
    auto states = ReadFloat32File(dir / DemoFile(static_cast<int>(i), "states"));
    auto actions = ReadFloat32File(dir / DemoFile(static_cast<int>(i), "actions"));
    if (states.size() != static_cast<size_t>(t) * obs_dim ||
        actions.size() != static_cast<size_t>(t) * action_dim) {
      throw Error("load_dataset: length mismatch in demo " + std::to_string(i));
    }
    Demonstration d;
    d.states = Eigen::Map<Eigen::MatrixXf>(states.data(), obs_dim, t);
    d.actions = Eigen::Map<Eigen::MatrixXf>(actions.data(), action_dim, t);
    d.success = true;
    dataset.demos.push_back(std::move(d));
  }
  dataset.Validate();
  return dataset;
}

}  // namespace speedlab
