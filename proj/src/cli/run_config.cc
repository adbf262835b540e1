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

#include "speedlab/cli/run_config.h"

#include <set>

#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"

namespace speedlab {

using nlohmann::json;

std::string ToString(Algorithm a) { return a == Algorithm::kDppo ? "dppo" : "parl"; }

Algorithm ParseAlgorithm(const std::string& s) {
  if (s == "dppo") return Algorithm::kDppo;
  if (s == "parl") return Algorithm::kParl;
  throw Error("unknown algorithm: " + s);
}

namespace {

// Reads optional keys of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j.is_object()) throw Error("config: section '" + name_ + "' must be an object");
  }
  ~Section() = default;

  template <typename T>
  void Get(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error("config: bad value for '" + Path(key) + "': " + e.what());
    }
  }
  const json* Child(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  std::string Path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }
  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw Error("config: unknown key '" + Path(it.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> used_;
};

json EnvToJson(const EnvConfig& e) {
  return {{"env_id", ToString(e.env_id)},
          {"max_episode_steps", e.max_episode_steps},
          {"max_ee_speed", e.max_ee_speed},
          {"max_grip_speed", e.max_grip_speed},
          {"grasp_radius", e.grasp_radius},
          {"success_threshold", e.success_threshold},
          {"reset_noise", e.reset_noise}};
}

EnvConfig EnvFromJson(const json& j) {
  Section s(j, "env");
  std::string id = "point_lift";
  s.Get("env_id", id);
  EnvConfig e = EnvConfig::Defaults(ParseEnvId(id));
  s.Get("max_episode_steps", e.max_episode_steps);
  s.Get("max_ee_speed", e.max_ee_speed);
  s.Get("max_grip_speed", e.max_grip_speed);
  s.Get("grasp_radius", e.grasp_radius);
  s.Get("success_threshold", e.success_threshold);
  s.Get("reset_noise", e.reset_noise);
  s.Finish();
  return e;
}

json AugmentToJson(const AugmentConfig& a) {
  return {{"mode", ToString(a.mode)}, {"v", a.v}, {"v_max", a.v_max},
          {"interp", ToString(a.interp)}};
}

AugmentConfig AugmentFromJson(const json& j) {
  Section s(j, "augment");
  AugmentConfig a{AugmentMode::kUniform, 3.0, 3.0, Interp::kStandard, Pad::kHoldLast};
  std::string mode = ToString(a.mode), interp = ToString(a.interp);
  s.Get("mode", mode);
  s.Get("interp", interp);
  s.Get("v", a.v);
  s.Get("v_max", a.v_max);
  s.Finish();
  a.mode = ParseAugmentMode(mode);
  a.interp = ParseInterp(interp);
  return a;
}

json PolicyToJson(const PolicyConfig& p) {
  return {{"horizon", p.horizon},         {"exec_horizon", p.exec_horizon},
          {"num_denoising_steps", p.num_denoising_steps},
          {"width", p.width},             {"depth", p.depth},
          {"lr_start", p.lr_start},       {"lr_end", p.lr_end},
          {"batch_size", p.batch_size},   {"weight_decay", p.weight_decay},
          {"train_steps", p.train_steps}, {"ema_decay", p.ema_decay},
          {"log_every", p.log_every}};
}

PolicyConfig PolicyFromJson(Section& s) {
  PolicyConfig p;
  s.Get("horizon", p.horizon);
  s.Get("exec_horizon", p.exec_horizon);
  s.Get("num_denoising_steps", p.num_denoising_steps);
  s.Get("width", p.width);
  s.Get("depth", p.depth);
  s.Get("lr_start", p.lr_start);
  s.Get("lr_end", p.lr_end);
  s.Get("batch_size", p.batch_size);
  s.Get("weight_decay", p.weight_decay);
  s.Get("train_steps", p.train_steps);
  s.Get("ema_decay", p.ema_decay);
  s.Get("log_every", p.log_every);
  return p;
}

json DppoToJson(const DppoConfig& d) {
  return {{"gamma", d.gamma},
          {"gamma_denoise", d.gamma_denoise},
          {"gae_lambda", d.gae_lambda},
          {"clip_eps_high_k", d.clip_eps_high_k},
          {"clip_eps_low_k", d.clip_eps_low_k},
          {"finetune_steps", d.finetune_steps},
          {"min_std", d.min_std},
          {"actor_lr", d.actor_lr},
          {"critic_lr", d.critic_lr},
          {"epochs_per_iter", d.epochs_per_iter},
          {"minibatch_size", d.minibatch_size},
          {"episodes_per_iter", d.episodes_per_iter},
          {"value_widths", d.value_widths},
          {"target_kl", d.target_kl},
          {"max_grad_norm", d.max_grad_norm},
          {"normalize_advantages", d.normalize_advantages},
          {"log_prob_reduction",
           d.log_prob_reduction == LogProbReduction::kMean ? "mean" : "sum"},
          {"exec_horizon", d.exec_horizon}};
}

DppoConfig DppoFromJson(const json& j) {
  Section s(j, "finetune.dppo");
  DppoConfig d;
  std::string reduction = "mean";
  s.Get("gamma", d.gamma);
  s.Get("gamma_denoise", d.gamma_denoise);
  s.Get("gae_lambda", d.gae_lambda);
  s.Get("clip_eps_high_k", d.clip_eps_high_k);
  s.Get("clip_eps_low_k", d.clip_eps_low_k);
  s.Get("finetune_steps", d.finetune_steps);
  s.Get("min_std", d.min_std);
  s.Get("actor_lr", d.actor_lr);
  s.Get("critic_lr", d.critic_lr);
  s.Get("epochs_per_iter", d.epochs_per_iter);
  s.Get("minibatch_size", d.minibatch_size);
  s.Get("episodes_per_iter", d.episodes_per_iter);
  s.Get("value_widths", d.value_widths);
  s.Get("target_kl", d.target_kl);
  s.Get("max_grad_norm", d.max_grad_norm);
  s.Get("normalize_advantages", d.normalize_advantages);
  s.Get("log_prob_reduction", reduction);
  s.Get("exec_horizon", d.exec_horizon);
  s.Finish();
  if (reduction == "mean") {
    d.log_prob_reduction = LogProbReduction::kMean;
  } else if (reduction == "sum") {
    d.log_prob_reduction = LogProbReduction::kSum;
  } else {
    throw Error("config: log_prob_reduction must be 'mean' or 'sum'");
  }
  return d;
}

json ParlToJson(const ParlConfig& p) {
  return {{"n", p.n},
          {"k", p.k},
          {"local_opt", p.local_opt},
          {"alpha", p.alpha},
          {"m", p.m},
          {"tau", p.tau},
          {"critic_lr", p.critic_lr},
          {"policy_lr", p.policy_lr},
          {"critic_batch", p.critic_batch},
          {"distill_batch", p.distill_batch},
          {"gamma", p.gamma},
          {"critic_widths", p.critic_widths},
          {"target_period", p.target_period},
          {"critic_updates_per_iter", p.critic_updates_per_iter},
          {"distill_updates_per_iter", p.distill_updates_per_iter},
          {"episodes_per_iter", p.episodes_per_iter},
          {"replay_capacity", p.replay_capacity},
          {"distill_capacity", p.distill_capacity},
          {"finetune_steps", p.finetune_steps},
          {"min_std", p.min_std},
          {"exec_horizon", p.exec_horizon}};
}

ParlConfig ParlFromJson(const json& j) {
  Section s(j, "finetune.parl");
  ParlConfig p;
  s.Get("n", p.n);
  s.Get("k", p.k);
  s.Get("local_opt", p.local_opt);
  s.Get("alpha", p.alpha);
  s.Get("m", p.m);
  s.Get("tau", p.tau);
  s.Get("critic_lr", p.critic_lr);
  s.Get("policy_lr", p.policy_lr);
  s.Get("critic_batch", p.critic_batch);
  s.Get("distill_batch", p.distill_batch);
  s.Get("gamma", p.gamma);
  s.Get("critic_widths", p.critic_widths);
  s.Get("target_period", p.target_period);
  s.Get("critic_updates_per_iter", p.critic_updates_per_iter);
  s.Get("distill_updates_per_iter", p.distill_updates_per_iter);
  s.Get("episodes_per_iter", p.episodes_per_iter);
  s.Get("replay_capacity", p.replay_capacity);
  s.Get("distill_capacity", p.distill_capacity);
  s.Get("finetune_steps", p.finetune_steps);
  s.Get("min_std", p.min_std);
  s.Get("exec_horizon", p.exec_horizon);
  s.Finish();
  return p;
}

json SpeedTuningToJson(const SpeedTuningConfig& c) {
  return {{"speed_choices", c.speed_choices},
          {"q_bins", c.q_bins},
          {"backup_steps", c.backup_steps},
          {"v_min", c.v_min},
          {"v_max", c.v_max},
          {"lr_start", c.lr_start},
          {"lr_end", c.lr_end},
          {"batch_size", c.batch_size},
          {"epsilon_start", c.epsilon_start},
          {"epsilon_end", c.epsilon_end},
          {"epsilon_fraction", c.epsilon_fraction},
          {"target_update_period", c.target_update_period},
          {"widths", c.widths},
          {"gamma", c.gamma},
          {"episodes_per_iter", c.episodes_per_iter},
          {"updates_per_iter", c.updates_per_iter},
          {"replay_capacity", c.replay_capacity},
          {"exec_horizon", c.exec_horizon}};
}

SpeedTuningConfig SpeedTuningFromJson(const json& j) {
  Section s(j, "finetune.speedtuning");
  SpeedTuningConfig c;
  s.Get("speed_choices", c.speed_choices);
  s.Get("q_bins", c.q_bins);
  s.Get("backup_steps", c.backup_steps);
  s.Get("v_min", c.v_min);
  s.Get("v_max", c.v_max);
  s.Get("lr_start", c.lr_start);
  s.Get("lr_end", c.lr_end);
  s.Get("batch_size", c.batch_size);
  s.Get("epsilon_start", c.epsilon_start);
  s.Get("epsilon_end", c.epsilon_end);
  s.Get("epsilon_fraction", c.epsilon_fraction);
  s.Get("target_update_period", c.target_update_period);
  s.Get("widths", c.widths);
  s.Get("gamma", c.gamma);
  s.Get("episodes_per_iter", c.episodes_per_iter);
  s.Get("updates_per_iter", c.updates_per_iter);
  s.Get("replay_capacity", c.replay_capacity);
  s.Get("exec_horizon", c.exec_horizon);
  s.Finish();
  return c;
}

}  // namespace

void RunConfig::Validate() const {
  if (seeds.empty()) throw Error("config: seeds must be non-empty");
  if (output_dir.empty()) throw Error("config: output_dir must be set");
  ParseBaselineName(baseline);
  env.Validate();
  policy.Validate();
  augment.Validate();
  if (demos.count < 1) throw Error("config: demos.count must be >= 1");
  finetune.dppo.Validate(policy.num_denoising_steps);
  finetune.parl.Validate(policy.num_denoising_steps);
  finetune.speedtuning.Validate();
  if (finetune.budget_env_steps < 0) throw Error("config: budget_env_steps must be >= 0");
  if (finetune.eval_every < 1) throw Error("config: eval_every must be >= 1");
  if (eval.n_episodes < 1) throw Error("config: eval.n_episodes must be >= 1");
  for (const Goal& g : eval.goals) g.Validate();
  for (double v : sweep_v_max) {
    if (!(v >= 1.0)) throw Error("config: sweep v_max values must be >= 1");
  }
}

BaselineSettings RunConfig::ToBaselineSettings() const {
  BaselineSettings s;
  s.env = env;
  s.policy = policy;
  s.augment = augment;
  s.dppo = finetune.dppo;
  s.dppo.exec_horizon = policy.exec_horizon;
  s.speedtuning = finetune.speedtuning;
  s.speedtuning.exec_horizon = policy.exec_horizon;
  s.accel_demo_v = finetune.accel_demo_v;
  s.accel_policy_v = finetune.accel_policy_v;
  s.long_horizon = finetune.long_horizon;
  return s;
}

json ToJson(const RunConfig& c) {
  json goals = json::array();
  for (const Goal& g : c.eval.goals) goals.push_back(ToString(g));
  json pretrain = PolicyToJson(c.policy);
  pretrain["augment"] = AugmentToJson(c.augment);
  return {
      {"output_dir", c.output_dir},
      {"seeds", c.seeds},
      {"baseline", c.baseline},
      {"env", EnvToJson(c.env)},
      {"demos",
       {{"count", c.demos.count},
        {"speed_fraction", c.demos.expert.speed_fraction},
        {"hover_height", c.demos.expert.hover_height},
        {"settle_steps", c.demos.expert.settle_steps}}},
      {"pretrain", pretrain},
      {"finetune",
       {{"algorithm", ToString(c.finetune.algorithm)},
        {"budget_env_steps", c.finetune.budget_env_steps},
        {"eval_every", c.finetune.eval_every},
        {"stop_at_goal", c.finetune.stop_at_goal},
        {"accel_demo_v", c.finetune.accel_demo_v},
        {"accel_policy_v", c.finetune.accel_policy_v},
        {"long_horizon", c.finetune.long_horizon},
        {"dppo", DppoToJson(c.finetune.dppo)},
        {"parl", ParlToJson(c.finetune.parl)},
        {"speedtuning", SpeedTuningToJson(c.finetune.speedtuning)}}},
      {"eval",
       {{"n_episodes", c.eval.n_episodes},
        {"seed", c.eval.seed},
        {"min_std", c.eval.min_std},
        {"goals", goals}}},
      {"analyze",
       {{"n_samples", c.analyze.n_samples},
        {"steps", c.analyze.steps},
        {"object_x", c.analyze.object_x}}},
      {"sweep", {{"v_max", c.sweep_v_max}}}};
}

RunConfig RunConfigFromJson(const json& j) {
  RunConfig c;
  Section top(j, "");
  top.Get("output_dir", c.output_dir);
  top.Get("seeds", c.seeds);
  top.Get("baseline", c.baseline);
  if (const json* e = top.Child("env")) c.env = EnvFromJson(*e);
  if (const json* d = top.Child("demos")) {
    Section s(*d, "demos");
    s.Get("count", c.demos.count);
    s.Get("speed_fraction", c.demos.expert.speed_fraction);
    s.Get("hover_height", c.demos.expert.hover_height);
    s.Get("settle_steps", c.demos.expert.settle_steps);
    s.Finish();
  }
  if (const json* p = top.Child("pretrain")) {
    Section s(*p, "pretrain");
    c.policy = PolicyFromJson(s);
    if (const json* a = s.Child("augment")) c.augment = AugmentFromJson(*a);
    s.Finish();
  }
  if (const json* f = top.Child("finetune")) {
    Section s(*f, "finetune");
    std::string algorithm = "dppo";
    s.Get("algorithm", algorithm);
    c.finetune.algorithm = ParseAlgorithm(algorithm);
    s.Get("budget_env_steps", c.finetune.budget_env_steps);
    s.Get("eval_every", c.finetune.eval_every);
    s.Get("stop_at_goal", c.finetune.stop_at_goal);
    s.Get("accel_demo_v", c.finetune.accel_demo_v);
    s.Get("accel_policy_v", c.finetune.accel_policy_v);
    s.Get("long_horizon", c.finetune.long_horizon);
    if (const json* d = s.Child("dppo")) c.finetune.dppo = DppoFromJson(*d);
    if (const json* p = s.Child("parl")) c.finetune.parl = ParlFromJson(*p);
    if (const json* t = s.Child("speedtuning")) c.finetune.speedtuning = SpeedTuningFromJson(*t);
    s.Finish();
  }
  if (const json* e = top.Child("eval")) {
    Section s(*e, "eval");
    s.Get("n_episodes", c.eval.n_episodes);
    s.Get("seed", c.eval.seed);
    s.Get("min_std", c.eval.min_std);
    std::vector<std::string> goals;
    s.Get("goals", goals);
    if (e->contains("goals")) {
      c.eval.goals.clear();
      for (const std::string& g : goals) c.eval.goals.push_back(ParseGoal(g));
    }
    s.Finish();
  }
  if (const json* a = top.Child("analyze")) {
    Section s(*a, "analyze");
    s.Get("n_samples", c.analyze.n_samples);
    s.Get("steps", c.analyze.steps);
    s.Get("object_x", c.analyze.object_x);
    s.Finish();
  }
  if (const json* w = top.Child("sweep")) {
    Section s(*w, "sweep");
    s.Get("v_max", c.sweep_v_max);
    s.Finish();
  }
  top.Finish();
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadTextFile(path));
  } catch (const json::exception& e) {
    throw Error("config: cannot parse " + path.string() + ": " + e.what());
  }
  return RunConfigFromJson(j);
}

void ApplyOverride(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error("override: expected key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  json* node = &j;
  size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw Error("override: empty key component in '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw Error("override: '" + part + "' is not a section");
    start = dot + 1;
  }
}

}  // namespace speedlab
