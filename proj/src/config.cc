// Copyright 2026 The dp_resample Authors
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

// Experiment configuration: JSON schema and the n-dependent hyperparameter
// rules.

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "dp_resample/errors.h"
#include "dp_resample/harness.h"
#include "json.hpp"

namespace dp_resample {
namespace {

using nlohmann::json;

// Cursor-based parser for SizeRule expressions.
class RuleParser {
 public:
  explicit RuleParser(std::string_view text) : text_(text) {}

  SizeRule Parse() {
    SizeRule rule{1.0, 0.0, 0.0};
    ParseTerm(rule, /*inverse=*/false);
    while (Consume('*')) ParseTerm(rule, false);
    while (Consume('/')) ParseTerm(rule, true);
    SkipSpace();
    if (pos_ != text_.size()) Fail("unexpected trailing input");
    return rule;
  }

 private:
  void ParseTerm(SizeRule& rule, bool inverse) {
    SkipSpace();
    bool any = false;
    if (pos_ < text_.size() &&
        (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      const double value = ParseNumber();
      rule.coefficient = inverse ? rule.coefficient / value : rule.coefficient * value;
      any = true;
      Consume('*');
    }
    SkipSpace();
    const double sign = inverse ? -1.0 : 1.0;
    if (ConsumeWord("sqrt(n)")) {
      rule.power += sign * 0.5;
      any = true;
    } else if (ConsumeWord("log^")) {
      const double k = ParseNumber();
      if (!ConsumeWord("(n)")) Fail("expected '(n)' after log^k");
      rule.log_power -= sign * k;
      any = true;
    } else if (ConsumeWord("log(n)")) {
      double k = 1.0;
      if (Consume('^')) k = ParseNumber();
      rule.log_power -= sign * k;
      any = true;
    } else if (ConsumeWord("n")) {
      double p = 1.0;
      if (Consume('^')) p = ParseExponent();
      rule.power += sign * p;
      any = true;
    }
    if (!any) Fail("expected a number, n, sqrt(n) or log(n)");
  }

  // "2/3", "(2/3)", "0.75". A bare fraction after '^' binds to the exponent.
  double ParseExponent() {
    const bool paren = Consume('(');
    double value = ParseNumber();
    SkipSpace();
    if (pos_ + 1 < text_.size() && text_[pos_] == '/' &&
        (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
         text_[pos_ + 1] == '.')) {
      ++pos_;
      value /= ParseNumber();
    }
    if (paren && !Consume(')')) Fail("expected ')'");
    return value;
  }

  double ParseNumber() {
    SkipSpace();
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(std::string(text_.substr(pos_)), &used);
    } catch (const std::exception&) {
      Fail("expected a number");
    }
    pos_ += used;
    return value;
  }

  bool Consume(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool ConsumeWord(std::string_view word) {
    SkipSpace();
    if (text_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError("cannot parse size rule '" + std::string(text_) + "': " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void CheckKeys(const json& object, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

double GetNumber(const json& object, const std::string& key,
                 const std::string& where) {
  if (!object.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  const json& v = object.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double GetNumberOr(const json& object, const std::string& key, double fallback,
                   const std::string& where) {
  return object.contains(key) ? GetNumber(object, key, where) : fallback;
}

std::string GetStringOr(const json& object, const std::string& key,
                        std::string fallback, const std::string& where) {
  if (!object.contains(key)) return fallback;
  const json& v = object.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

bool GetBoolOr(const json& object, const std::string& key, bool fallback,
               const std::string& where) {
  if (!object.contains(key)) return fallback;
  const json& v = object.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::vector<double> GetNumberList(const json& object, const std::string& key,
                                  const std::string& where) {
  if (!object.contains(key) || !object.at(key).is_array()) {
    throw ConfigError(where + ": '" + key + "' must be a list of numbers");
  }
  std::vector<double> out;
  for (const json& v : object.at(key)) {
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

SizeRule GetRuleOr(const json& object, const std::string& key, SizeRule fallback,
                   const std::string& where) {
  if (!object.contains(key)) return fallback;
  const json& v = object.at(key);
  if (v.is_number()) return SizeRule::Constant(v.get<double>());
  if (v.is_string()) return SizeRule::Parse(v.get<std::string>());
  throw ConfigError(where + "." + key + ": expected a number or an expression");
}

BoundedRange ParseRange(const json& object, const std::string& where) {
  CheckKeys(object, {"lo", "hi"}, where);
  try {
    return BoundedRange::Make(GetNumber(object, "lo", where),
                              GetNumber(object, "hi", where));
  } catch (const ParameterError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

DistributionSpec DistributionFromJson(const json& object, const std::string& where) {
  if (!object.is_object() || !object.contains("kind") || !object.at("kind").is_string()) {
    throw ConfigError(where + ": distribution needs a string 'kind'");
  }
  const std::string kind = object.at("kind").get<std::string>();
  try {
    if (kind == "truncated_normal") {
      CheckKeys(object, {"id", "kind", "mu", "sigma", "lo", "hi"}, where);
      return DistributionSpec::TruncatedNormal(
          GetNumber(object, "mu", where), GetNumber(object, "sigma", where),
          GetNumber(object, "lo", where), GetNumber(object, "hi", where));
    }
    if (kind == "truncated_exponential") {
      CheckKeys(object, {"id", "kind", "rate", "lo", "hi"}, where);
      return DistributionSpec::TruncatedExponential(
          GetNumber(object, "rate", where), GetNumber(object, "hi", where),
          GetNumberOr(object, "lo", 0.0, where));
    }
    if (kind == "truncated_mixture") {
      CheckKeys(object, {"id", "kind", "means", "sigmas", "weights", "lo", "hi"},
                where);
      return DistributionSpec::TruncatedMixture(
          GetNumberList(object, "means", where),
          GetNumberList(object, "sigmas", where),
          GetNumberList(object, "weights", where), GetNumber(object, "lo", where),
          GetNumber(object, "hi", where));
    }
  } catch (const ParameterError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown distribution kind '" + kind + "'");
}

MethodSpec MethodFromJson(const json& object, const std::string& where) {
  CheckKeys(object,
            {"id", "method", "mechanism", "range", "clip_output", "eps_total",
             "delta", "split", "mode", "m", "T", "num_splits", "granularity",
             "tau", "centered", "csv"},
            where);
  MethodSpec spec;
  const std::string method = GetStringOr(object, "method", "", where);
  if (method.empty()) throw ConfigError(where + ": missing 'method'");
  try {
    spec.kind = ParseMethodKind(method);
  } catch (const ParameterError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  spec.id = GetStringOr(object, "id", method, where);
  spec.mechanism = GetStringOr(object, "mechanism", "", where);
  if (object.contains("range")) spec.range = ParseRange(object.at("range"), where + ".range");
  spec.clip_output = GetBoolOr(object, "clip_output", false, where);
  spec.eps_total = GetNumberOr(object, "eps_total", spec.eps_total, where);
  spec.delta = GetNumberOr(object, "delta", spec.delta, where);
  spec.split = GetNumberOr(object, "split", spec.split, where);
  try {
    spec.composition = ParseCompositionKind(GetStringOr(object, "mode", "basic", where));
  } catch (const ParameterError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  spec.m = GetRuleOr(object, "m", spec.m, where);
  spec.num_subsamples = GetRuleOr(object, "T", spec.num_subsamples, where);
  spec.num_splits = GetRuleOr(object, "num_splits", spec.num_splits, where);
  spec.granularity = GetRuleOr(object, "granularity", spec.granularity, where);
  const std::string tau = GetStringOr(object, "tau", "sqrt", where);
  if (tau.rfind("custom:", 0) == 0) {
    const std::string ratio = tau.substr(7);
    std::size_t used = 0;
    try {
      spec.tau_ratio = std::stod(ratio, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != ratio.size()) {
      throw ConfigError(where + ".tau: bad custom ratio '" + tau + "'");
    }
  } else if (tau != "sqrt") {
    throw ConfigError(where + ".tau: expected 'sqrt' or 'custom:<ratio>'");
  }
  spec.centered_bootstrap = GetBoolOr(object, "centered", false, where);
  spec.external_csv = GetStringOr(object, "csv", "", where);
  if (spec.kind == MethodKind::kBlbQuant && spec.external_csv.empty()) {
    throw ConfigError(where + ": blbquant results need a 'csv' path");
  }
  return spec;
}

}  // namespace

SizeRule SizeRule::Parse(std::string_view expression) {
  return RuleParser(expression).Parse();
}

double SizeRule::Evaluate(std::size_t n) const {
  const double x = static_cast<double>(n);
  double value = coefficient * std::pow(x, power);
  if (log_power != 0.0) value /= std::pow(std::log(x), log_power);
  return value;
}

std::size_t SizeRule::EvaluateCount(std::size_t n) const {
  const double value = Evaluate(n);
  if (!std::isfinite(value) || value < 0.0) {
    throw ConfigError("size rule evaluates to " + std::to_string(value) +
                      " at n=" + std::to_string(n));
  }
  return static_cast<std::size_t>(std::ceil(value - 1e-9));
}

MethodKind ParseMethodKind(std::string_view name) {
  if (name == "privsub") return MethodKind::kPrivSub;
  if (name == "nonprivate_subsampling") return MethodKind::kNonPrivateSubsampling;
  if (name == "bootstrap") return MethodKind::kBootstrap;
  if (name == "sample_splitting") return MethodKind::kSampleSplitting;
  if (name == "expmech_style") return MethodKind::kExpMechStyle;
  if (name == "blbquant") return MethodKind::kBlbQuant;
  if (name == "theoretical") return MethodKind::kTheoretical;
  throw ParameterError("unknown method '" + std::string(name) + "'");
}

std::string_view MethodKindName(MethodKind kind) {
  switch (kind) {
    case MethodKind::kPrivSub:
      return "privsub";
    case MethodKind::kNonPrivateSubsampling:
      return "nonprivate_subsampling";
    case MethodKind::kBootstrap:
      return "bootstrap";
    case MethodKind::kSampleSplitting:
      return "sample_splitting";
    case MethodKind::kExpMechStyle:
      return "expmech_style";
    case MethodKind::kBlbQuant:
      return "blbquant";
    case MethodKind::kTheoretical:
      return "theoretical";
  }
  return "unknown";
}

DistributionSpec ParseDistributionSpec(std::string_view json_text) {
  json object;
  try {
    object = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return DistributionFromJson(object, "distribution");
}

ExperimentConfig ParseExperimentConfig(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  CheckKeys(root,
            {"distributions", "sample_sizes", "methods", "target", "alpha",
             "replications", "root_seed", "output_path", "grid_output_path",
             "dataset_policy", "cdf_grid_points"},
            "config");
  ExperimentConfig config;

  if (!root.contains("distributions") || !root.at("distributions").is_array()) {
    throw ConfigError("config: 'distributions' must be a list");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < root.at("distributions").size(); ++i) {
    const json& d = root.at("distributions")[i];
    const std::string where = "config.distributions[" + std::to_string(i) + "]";
    DistributionSpec spec = DistributionFromJson(d, where);
    const std::string id = GetStringOr(d, "id", spec.kind(), where);
    if (!ids.insert(id).second) throw ConfigError(where + ": duplicate id '" + id + "'");
    config.distributions.push_back({id, std::move(spec)});
  }

  for (double n : GetNumberList(root, "sample_sizes", "config")) {
    if (!(n >= 1.0) || n != std::floor(n)) {
      throw ConfigError("config.sample_sizes: expected positive integers");
    }
    config.sample_sizes.push_back(static_cast<std::size_t>(n));
  }

  if (!root.contains("methods") || !root.at("methods").is_array()) {
    throw ConfigError("config: 'methods' must be a list");
  }
  ids.clear();
  for (std::size_t i = 0; i < root.at("methods").size(); ++i) {
    const std::string where = "config.methods[" + std::to_string(i) + "]";
    MethodSpec method = MethodFromJson(root.at("methods")[i], where);
    if (!ids.insert(method.id).second) {
      throw ConfigError(where + ": duplicate id '" + method.id + "'");
    }
    config.methods.push_back(std::move(method));
  }

  const std::string target = GetStringOr(root, "target", "median", "config");
  if (target == "median") {
    config.target = Target::kMedian;
  } else if (target == "mean") {
    config.target = Target::kMean;
  } else {
    throw ConfigError("config.target: expected 'median' or 'mean'");
  }
  config.alpha = GetNumberOr(root, "alpha", config.alpha, "config");
  const double reps = GetNumberOr(root, "replications", 300, "config");
  if (!(reps >= 1.0) || reps != std::floor(reps)) {
    throw ConfigError("config.replications: expected an integer >= 1");
  }
  config.replications = static_cast<std::size_t>(reps);
  if (root.contains("root_seed")) {
    const json& s = root.at("root_seed");
    if (!s.is_number_integer()) throw ConfigError("config.root_seed: expected an integer");
    config.root_seed = s.get<uint64_t>();
  }
  config.output_path = GetStringOr(root, "output_path", "", "config");
  config.grid_output_path = GetStringOr(root, "grid_output_path", "", "config");
  const std::string policy = GetStringOr(root, "dataset_policy", "shared", "config");
  if (policy == "shared") {
    config.dataset_policy = DatasetPolicy::kShared;
  } else if (policy == "independent") {
    config.dataset_policy = DatasetPolicy::kIndependent;
  } else {
    throw ConfigError("config.dataset_policy: expected 'shared' or 'independent'");
  }
  const double grid = GetNumberOr(root, "cdf_grid_points", 512, "config");
  if (!(grid >= 2.0) || grid != std::floor(grid)) {
    throw ConfigError("config.cdf_grid_points: expected an integer >= 2");
  }
  config.cdf_grid_points = static_cast<std::size_t>(grid);

  config.Validate();
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseExperimentConfig(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void ExperimentConfig::Validate() const {
  if (distributions.empty()) throw ConfigError("config: no distributions");
  if (sample_sizes.empty()) throw ConfigError("config: no sample sizes");
  if (methods.empty()) throw ConfigError("config: no methods");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config.alpha must lie in (0, 1)");
  if (replications < 1) throw ConfigError("config.replications must be >= 1");
  if (cdf_grid_points < 2) throw ConfigError("config.cdf_grid_points must be >= 2");
  for (const DistributionEntry& d : distributions) {
    for (std::size_t n : sample_sizes) {
      for (const MethodSpec& m : methods) {
        try {
          CellMethod cell(m, d, n, alpha, target);
        } catch (const ConfigError&) {
          throw;
        } catch (const Error& e) {
          throw ConfigError("cell (" + d.id + ", n=" + std::to_string(n) + ", " +
                            m.id + "): " + e.what());
        }
      }
    }
  }
}

}  // namespace dp_resample
