// Copyright 2026 The jim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jim/config/experiment_config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <utility>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "jim/errors.h"

namespace jim::config {
namespace {

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct Field {
  std::string section;
  std::string key;
  Getter get;
  Setter set;
  std::string path() const { return section + "." + key; }
};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T ParseNumber(const std::string& path, const std::string& text) {
  const std::string s = Trim(text);
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(path, "cannot parse '" + s + "' as a number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(path, "value is not finite");
  }
  return value;
}

bool ParseBool(const std::string& path, const std::string& text) {
  const std::string s = Trim(text);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(path, "expected true or false, got '" + s + "'");
}

template <typename E>
E ParseEnum(const std::string& path, const std::string& text,
            const std::vector<std::pair<std::string, E>>& names) {
  const std::string s = Trim(text);
  std::string options;
  for (const auto& [name, value] : names) {
    if (name == s) return value;
    options += (options.empty() ? "" : ", ") + name;
  }
  throw ConfigError(path, "unknown value '" + s + "' (expected one of " +
                              options + ")");
}

template <typename E>
std::string EnumName(E value, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

const std::vector<std::pair<std::string, TrainMode>>& ModeNames() {
  static const std::vector<std::pair<std::string, TrainMode>> names = {
      {"full_method", TrainMode::kFullMethod},
      {"flat_qmix", TrainMode::kFlatQmix},
      {"no_weighting", TrainMode::kNoWeighting}};
  return names;
}

const std::vector<std::pair<std::string, KlPrior>>& PriorNames() {
  static const std::vector<std::pair<std::string, KlPrior>> names = {
      {"sampled", KlPrior::kSampled}, {"boltzmann", KlPrior::kBoltzmann}};
  return names;
}

const std::vector<std::pair<std::string, IntentionSampling>>& SamplingNames() {
  static const std::vector<std::pair<std::string, IntentionSampling>> names = {
      {"epsilon_greedy", IntentionSampling::kEpsilonGreedy},
      {"boltzmann", IntentionSampling::kBoltzmann}};
  return names;
}

const std::vector<std::pair<std::string, mixer::MixerActivation>>&
ActivationNames() {
  static const std::vector<std::pair<std::string, mixer::MixerActivation>>
      names = {{"elu", mixer::MixerActivation::kElu},
               {"identity", mixer::MixerActivation::kIdentity}};
  return names;
}

std::vector<std::pair<std::string, env::EnvKind>> KindNames() {
  std::vector<std::pair<std::string, env::EnvKind>> out;
  for (auto k : {env::EnvKind::kPursuit, env::EnvKind::kPursuitHard,
                 env::EnvKind::kTiger, env::EnvKind::kMatrixGame}) {
    out.emplace_back(std::string(env::EnvKindName(k)), k);
  }
  return out;
}

std::string FormatMatrix(const std::vector<std::vector<double>>& m) {
  std::string out;
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (r > 0) out += " / ";
    for (std::size_t c = 0; c < m[r].size(); ++c) {
      if (c > 0) out += ", ";
      out += FormatDouble(m[r][c]);
    }
  }
  return out;
}

// Rows separated by '/', entries by ','.
std::vector<std::vector<double>> ParseMatrix(const std::string& path,
                                             const std::string& text) {
  std::vector<std::vector<double>> m;
  if (Trim(text).empty()) return m;
  std::stringstream rows(text);
  std::string row;
  while (std::getline(rows, row, '/')) {
    std::vector<double> values;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      values.push_back(ParseNumber<double>(path, cell));
    }
    m.push_back(std::move(values));
  }
  return m;
}

std::string FormatSeeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(seeds[i]);
  }
  return out;
}

std::vector<std::uint64_t> ParseSeeds(const std::string& path,
                                      const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    seeds.push_back(ParseNumber<std::uint64_t>(path, item));
  }
  return seeds;
}

template <typename T>
Field NumberField(std::string section, std::string key,
                  T ExperimentConfig::*member) {
  Field f{std::move(section), std::move(key), nullptr, nullptr};
  const std::string path = f.path();
  f.get = [member](const ExperimentConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return FormatDouble(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  f.set = [member, path](ExperimentConfig& c, const std::string& v) {
    c.*member = ParseNumber<T>(path, v);
  };
  return f;
}

template <typename T>
Field EnvNumberField(std::string key, T env::EnvConfig::*member) {
  Field f{"env", std::move(key), nullptr, nullptr};
  const std::string path = f.path();
  f.get = [member](const ExperimentConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return FormatDouble(c.env.*member);
    } else {
      return std::to_string(c.env.*member);
    }
  };
  f.set = [member, path](ExperimentConfig& c, const std::string& v) {
    c.env.*member = ParseNumber<T>(path, v);
  };
  return f;
}

template <typename E>
Field EnumField(std::string section, std::string key,
                E ExperimentConfig::*member,
                const std::vector<std::pair<std::string, E>>& names) {
  Field f{std::move(section), std::move(key), nullptr, nullptr};
  const std::string path = f.path();
  f.get = [member, &names](const ExperimentConfig& c) {
    return EnumName(c.*member, names);
  };
  f.set = [member, path, &names](ExperimentConfig& c, const std::string& v) {
    c.*member = ParseEnum(path, v, names);
  };
  return f;
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    using C = ExperimentConfig;
    std::vector<Field> f;
    f.push_back({"env", "kind",
                 [](const C& c) {
                   return std::string(env::EnvKindName(c.env.kind));
                 },
                 [](C& c, const std::string& v) {
                   c.env.kind = ParseEnum("env.kind", v, KindNames());
                 }});
    f.push_back(EnvNumberField("n_agents", &env::EnvConfig::n_agents));
    f.push_back(EnvNumberField("n_enemies", &env::EnvConfig::n_enemies));
    f.push_back(EnvNumberField("map_w", &env::EnvConfig::map_w));
    f.push_back(EnvNumberField("map_h", &env::EnvConfig::map_h));
    f.push_back(EnvNumberField("n_walls", &env::EnvConfig::n_walls));
    f.push_back(EnvNumberField("view_radius", &env::EnvConfig::view_radius));
    f.push_back(EnvNumberField("attack_range", &env::EnvConfig::attack_range));
    f.push_back(EnvNumberField("episode_limit", &env::EnvConfig::episode_limit));
    f.push_back(EnvNumberField("catch_reward", &env::EnvConfig::catch_reward));
    f.push_back(EnvNumberField("solo_penalty", &env::EnvConfig::solo_penalty));
    f.push_back(
        EnvNumberField("per_hit_reward", &env::EnvConfig::per_hit_reward));
    f.push_back(EnvNumberField("prey_hp", &env::EnvConfig::prey_hp));
    f.push_back(EnvNumberField("prey_regen", &env::EnvConfig::prey_regen));
    f.push_back(
        EnvNumberField("prey_escape_prob", &env::EnvConfig::prey_escape_prob));
    f.push_back({"env", "payoff_matrix",
                 [](const C& c) { return FormatMatrix(c.env.payoff_matrix); },
                 [](C& c, const std::string& v) {
                   c.env.payoff_matrix = ParseMatrix("env.payoff_matrix", v);
                 }});

    f.push_back(EnumField("method", "mode", &C::mode, ModeNames()));
    f.push_back(NumberField("method", "n_intentions", &C::n_intentions));
    f.push_back(NumberField("method", "hidden_dim", &C::hidden_dim));
    f.push_back(NumberField("method", "mixer_embed", &C::mixer_embed));
    f.push_back(EnumField("method", "mixer_activation", &C::mixer_activation,
                          ActivationNames()));
    f.push_back(NumberField("method", "temperature", &C::temperature));
    f.push_back(EnumField("method", "intention_sampling",
                          &C::intention_sampling, SamplingNames()));
    f.push_back(NumberField("method", "gamma", &C::gamma));
    f.push_back(NumberField("method", "lambda_a", &C::lambda_a));
    f.push_back(NumberField("method", "lambda_d", &C::lambda_d));
    f.push_back(NumberField("method", "beta", &C::beta));
    f.push_back(EnumField("method", "kl_prior", &C::kl_prior, PriorNames()));
    f.push_back({"method", "kl_to_intention",
                 [](const C& c) {
                   return std::string(c.kl_to_intention ? "true" : "false");
                 },
                 [](C& c, const std::string& v) {
                   c.kl_to_intention = ParseBool("method.kl_to_intention", v);
                 }});
    f.push_back(NumberField("method", "eps_gap", &C::eps_gap));

    f.push_back(NumberField("train", "lr", &C::lr));
    f.push_back(NumberField("train", "rms_decay", &C::rms_decay));
    f.push_back(NumberField("train", "rms_eps", &C::rms_eps));
    f.push_back(NumberField("train", "grad_clip", &C::grad_clip));
    f.push_back(NumberField("train", "batch_size", &C::batch_size));
    f.push_back(NumberField("train", "buffer_size", &C::buffer_size));
    f.push_back(NumberField("train", "target_sync", &C::target_sync));
    f.push_back(NumberField("train", "eps_start", &C::eps_start));
    f.push_back(NumberField("train", "eps_end", &C::eps_end));
    f.push_back(NumberField("train", "anneal_steps", &C::anneal_steps));
    f.push_back(NumberField("train", "total_steps", &C::total_steps));
    f.push_back(NumberField("train", "total_episodes", &C::total_episodes));
    f.push_back(NumberField("train", "checkpoint_interval",
                            &C::checkpoint_interval));

    f.push_back(NumberField("eval", "interval", &C::eval_interval));
    f.push_back(NumberField("eval", "episodes", &C::eval_episodes));
    f.push_back(NumberField("eval", "final_episodes", &C::final_eval_episodes));
    f.push_back(NumberField("eval", "dump_episodes", &C::dump_episodes));
    f.push_back(NumberField("eval", "adhoc_delta", &C::adhoc_delta));

    f.push_back({"run", "seeds",
                 [](const C& c) { return FormatSeeds(c.seeds); },
                 [](C& c, const std::string& v) {
                   c.seeds = ParseSeeds("run.seeds", v);
                 }});
    f.push_back({"run", "output_dir",
                 [](const C& c) { return c.output_dir; },
                 [](C& c, const std::string& v) { c.output_dir = Trim(v); }});
    return f;
  }();
  return fields;
}

const Field* FindField(std::string_view path) {
  for (const auto& f : Fields()) {
    if (f.path() == path) return &f;
  }
  return nullptr;
}

void Require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

}  // namespace

std::string_view TrainModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kFullMethod:
      return "full_method";
    case TrainMode::kFlatQmix:
      return "flat_qmix";
    case TrainMode::kNoWeighting:
      return "no_weighting";
  }
  return "?";
}

void SetConfigField(ExperimentConfig& config, std::string_view path,
                    std::string_view value) {
  if (path == "env.preset") {
    const auto preset = env::PresetConfig(Trim(value));
    if (!preset) {
      throw ConfigError("env.preset", "unknown preset '" + Trim(value) + "'");
    }
    config.env = *preset;
    return;
  }
  const Field* field = FindField(path);
  if (field == nullptr) {
    throw ConfigError(std::string(path), "unknown configuration key");
  }
  field->set(config, std::string(value));
}

ExperimentConfig ParseExperimentConfig(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("<file>", "malformed config: " + e.message() +
                                    " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section, "key outside of any section");
    }
    if (section == "env") {
      if (auto preset = body.get_optional<std::string>("preset")) {
        SetConfigField(config, "env.preset", *preset);
      }
    }
    for (const auto& [key, node] : body) {
      if (section == "env" && key == "preset") continue;
      SetConfigField(config, section + "." + key, node.data());
    }
  }
  ValidateExperimentConfig(config);
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseExperimentConfig(buf.str());
}

void ValidateExperimentConfig(const ExperimentConfig& c) {
  env::ValidateEnvConfig(c.env);
  Require(c.n_intentions >= 2, "method.n_intentions", "must be at least 2");
  Require(c.hidden_dim >= 1, "method.hidden_dim", "must be positive");
  Require(c.mixer_embed >= 1, "method.mixer_embed", "must be positive");
  Require(c.temperature > 0.0, "method.temperature", "must be positive");
  Require(c.gamma >= 0.0 && c.gamma <= 1.0, "method.gamma",
          "must lie in [0, 1]");
  Require(c.lambda_a >= 0.0, "method.lambda_a", "must be non-negative");
  Require(c.lambda_d >= 0.0, "method.lambda_d", "must be non-negative");
  Require(c.beta >= 0.0, "method.beta", "must be non-negative");
  Require(c.eps_gap >= 0.0, "method.eps_gap", "must be non-negative");
  Require(c.lr > 0.0, "train.lr", "must be positive");
  Require(c.rms_decay >= 0.0 && c.rms_decay < 1.0, "train.rms_decay",
          "must lie in [0, 1)");
  Require(c.rms_eps > 0.0, "train.rms_eps", "must be positive");
  Require(c.grad_clip >= 0.0, "train.grad_clip", "must be non-negative");
  Require(c.batch_size >= 1, "train.batch_size", "must be positive");
  Require(c.buffer_size >= c.batch_size, "train.buffer_size",
          "must hold at least one batch");
  Require(c.target_sync >= 1, "train.target_sync", "must be positive");
  Require(c.eps_start >= 0.0 && c.eps_start <= 1.0, "train.eps_start",
          "must lie in [0, 1]");
  Require(c.eps_end >= 0.0 && c.eps_end <= 1.0, "train.eps_end",
          "must lie in [0, 1]");
  Require(c.anneal_steps >= 0, "train.anneal_steps", "must be non-negative");
  Require(c.total_steps >= 1, "train.total_steps", "must be positive");
  Require(c.total_episodes >= 0, "train.total_episodes",
          "must be non-negative");
  Require(c.checkpoint_interval >= 0, "train.checkpoint_interval",
          "must be non-negative");
  Require(c.eval_interval >= 1, "eval.interval", "must be positive");
  Require(c.eval_episodes >= 1, "eval.episodes", "must be positive");
  Require(c.final_eval_episodes >= 1, "eval.final_episodes",
          "must be positive");
  Require(c.dump_episodes >= 0, "eval.dump_episodes", "must be non-negative");
  Require(c.adhoc_delta >= 0, "eval.adhoc_delta", "must be non-negative");
  Require(!c.seeds.empty(), "run.seeds", "must list at least one seed");
  Require(!c.output_dir.empty(), "run.output_dir", "must not be empty");
}

std::string CanonicalConfig(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : Fields()) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

std::uint64_t ConfigHash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : CanonicalConfig(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ConfigHashHex(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(ConfigHash(config)));
  return buf;
}

}  // namespace jim::config
