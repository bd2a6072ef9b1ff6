// Copyright 2026 The ganprop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ganprop/harness/config.h"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "ganprop/common/random.h"
#include "ganprop/nn/serialization.h"

namespace ganprop::harness {
namespace {

std::string Strip(std::string_view s) {
  return std::string(absl::StripAsciiWhitespace(std::string(s)));
}

absl::Status BadValue(std::string_view key, std::string_view value) {
  return absl::InvalidArgumentError(absl::StrCat(
      "bad value '", std::string(value), "' for key '", std::string(key), "'"));
}

template <typename T>
bool ParseScalar(std::string_view text, T& out) {
  const std::string s = Strip(text);
  if constexpr (std::is_same_v<T, double>) {
    return absl::SimpleAtod(s, &out);
  } else if constexpr (std::is_same_v<T, bool>) {
    return absl::SimpleAtob(s, &out);
  } else if constexpr (std::is_same_v<T, std::string>) {
    out = s;
    return true;
  } else {
    return absl::SimpleAtoi(s, &out);
  }
}

template <typename T>
std::string FormatScalar(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return FormatDouble(v);
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else {
    return absl::StrCat(v);
  }
}

struct Field {
  std::function<absl::Status(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field ScalarField(std::string key, T ExperimentConfig::*member) {
  return {[key, member](ExperimentConfig& c, std::string_view v) -> absl::Status {
            if (!ParseScalar(v, c.*member)) return BadValue(key, v);
            return absl::OkStatus();
          },
          [member](const ExperimentConfig& c) { return FormatScalar(c.*member); }};
}

template <typename T>
Field ListField(std::string key, std::vector<T> ExperimentConfig::*member) {
  return {[key, member](ExperimentConfig& c, std::string_view v) -> absl::Status {
            std::vector<T> out;
            if (!Strip(v).empty()) {
              for (const std::string& part :
                   std::vector<std::string>(absl::StrSplit(std::string(v), ','))) {
                T item;
                if (!ParseScalar(part, item)) return BadValue(key, v);
                out.push_back(item);
              }
            }
            c.*member = std::move(out);
            return absl::OkStatus();
          },
          [member](const ExperimentConfig& c) {
            std::vector<std::string> parts;
            for (const T& v : c.*member) parts.push_back(FormatScalar(v));
            return absl::StrJoin(parts, ",");
          }};
}

template <typename E>
Field EnumField(E ExperimentConfig::*member,
                std::function<absl::StatusOr<E>(std::string_view)> parse,
                std::function<std::string(E)> name) {
  return {[member, parse](ExperimentConfig& c, std::string_view v) -> absl::Status {
            absl::StatusOr<E> e = parse(Strip(v));
            if (!e.ok()) return e.status();
            c.*member = *e;
            return absl::OkStatus();
          },
          [member, name](const ExperimentConfig& c) { return name(c.*member); }};
}

const std::map<std::string, Field>& Fields() {
  using C = ExperimentConfig;
  static const auto* fields = new std::map<std::string, Field>{
      {"task", ScalarField("task", &C::task)},
      {"domain", EnumField<data::Domain>(&C::domain, data::ParseDomain,
                                         data::DomainName)},
      {"n_classes", ScalarField("n_classes", &C::n_classes)},
      {"grid", ListField("grid", &C::grid)},
      {"multiclass_property",
       ListField("multiclass_property", &C::multiclass_property)},
      {"targets_per_property",
       ScalarField("targets_per_property", &C::targets_per_property)},
      {"shadow_grid", ListField("shadow_grid", &C::shadow_grid)},
      {"shadows_per_property",
       ScalarField("shadows_per_property", &C::shadows_per_property)},
      {"train_size", ScalarField("train_size", &C::train_size)},
      {"pool_size", ScalarField("pool_size", &C::pool_size)},
      {"classifier_size", ScalarField("classifier_size", &C::classifier_size)},
      {"classifier_train_fraction",
       ScalarField("classifier_train_fraction", &C::classifier_train_fraction)},
      {"domain_shift", ScalarField("domain_shift", &C::domain_shift)},
      {"gan_loss", EnumField<gan::GanLoss>(&C::gan_loss, gan::ParseGanLoss,
                                           gan::GanLossName)},
      {"latent_prior",
       EnumField<gan::PriorKind>(&C::latent_prior, gan::ParsePriorKind,
                                 gan::PriorKindName)},
      {"latent_dim", ScalarField("latent_dim", &C::latent_dim)},
      {"gan_hidden", ListField("gan_hidden", &C::gan_hidden)},
      {"gan_steps", ScalarField("gan_steps", &C::gan_steps)},
      {"gan_lr", ScalarField("gan_lr", &C::gan_lr)},
      {"gan_beta1", ScalarField("gan_beta1", &C::gan_beta1)},
      {"gan_beta2", ScalarField("gan_beta2", &C::gan_beta2)},
      {"gan_batch", ScalarField("gan_batch", &C::gan_batch)},
      {"n_critic", ScalarField("n_critic", &C::n_critic)},
      {"gp_lambda", ScalarField("gp_lambda", &C::gp_lambda)},
      {"shared_init", ScalarField("shared_init", &C::shared_init)},
      {"clf_hidden", ListField("clf_hidden", &C::clf_hidden)},
      {"clf_epochs", ScalarField("clf_epochs", &C::clf_epochs)},
      {"clf_lr", ScalarField("clf_lr", &C::clf_lr)},
      {"clf_batch", ScalarField("clf_batch", &C::clf_batch)},
      {"phi", EnumField<attack::PhiMode>(&C::phi, attack::ParsePhiMode,
                                         attack::PhiModeName)},
      {"full_samples", ScalarField("full_samples", &C::full_samples)},
      {"sample_counts", ListField("sample_counts", &C::sample_counts)},
      {"set_size", ScalarField("set_size", &C::set_size)},
      {"trials", ScalarField("trials", &C::trials)},
      {"latent_iters", ScalarField("latent_iters", &C::latent_iters)},
      {"latent_lr", ScalarField("latent_lr", &C::latent_lr)},
      {"starts", ScalarField("starts", &C::starts)},
      {"shadow_counts", ListField("shadow_counts", &C::shadow_counts)},
      {"out_of_range_property",
       ScalarField("out_of_range_property", &C::out_of_range_property)},
      {"compare_counts", ListField("compare_counts", &C::compare_counts)},
      {"mia_k", ScalarField("mia_k", &C::mia_k)},
      {"mia_lambda", ScalarField("mia_lambda", &C::mia_lambda)},
      {"mia_members", ScalarField("mia_members", &C::mia_members)},
      {"mia_nonmembers", ScalarField("mia_nonmembers", &C::mia_nonmembers)},
      {"mia_property", ScalarField("mia_property", &C::mia_property)},
      {"mia_deviations", ListField("mia_deviations", &C::mia_deviations)},
      {"save_models", ScalarField("save_models", &C::save_models)},
      {"threads", ScalarField("threads", &C::threads)},
      {"seed", ScalarField("seed", &C::seed)},
      {"output_dir", ScalarField("output_dir", &C::output_dir)},
  };
  return *fields;
}

absl::Status Positive(std::string_view key, int64_t v) {
  if (v >= 1) return absl::OkStatus();
  return absl::InvalidArgumentError(
      absl::StrCat(std::string(key), " must be >= 1, got ", v));
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

absl::StatusOr<std::pair<std::string, std::string>> ParseAssignment(
    std::string_view text) {
  const size_t eq = text.find('=');
  if (eq == std::string_view::npos) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected key = value, got '", std::string(text), "'"));
  }
  std::string key = Strip(text.substr(0, eq));
  if (key.empty()) return absl::InvalidArgumentError("empty key");
  return std::make_pair(std::move(key), Strip(text.substr(eq + 1)));
}

absl::Status ExperimentConfig::Set(std::string_view key, std::string_view value) {
  const auto& fields = Fields();
  auto it = fields.find(std::string(key));
  if (it == fields.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown config key '", std::string(key), "'"));
  }
  return it->second.set(*this, value);
}

absl::Status ExperimentConfig::Apply(std::string_view text) {
  int line_no = 0;
  for (const std::string& full_line :
       std::vector<std::string>(absl::StrSplit(std::string(text), '\n'))) {
    std::string_view line = full_line;
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (Strip(line).empty()) continue;
    absl::StatusOr<std::pair<std::string, std::string>> kv = ParseAssignment(line);
    absl::Status s = kv.ok() ? Set(kv->first, kv->second) : kv.status();
    if (!s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", s.message()));
    }
  }
  return absl::OkStatus();
}

std::string ExperimentConfig::ToText() const {
  std::string out;
  for (const auto& [key, field] : Fields()) {
    absl::StrAppend(&out, key, " = ", field.get(*this), "\n");
  }
  return out;
}

absl::Status ExperimentConfig::Validate() const {
  for (const auto& [key, v] : std::vector<std::pair<std::string, int64_t>>{
           {"targets_per_property", targets_per_property},
           {"train_size", train_size},
           {"pool_size", pool_size},
           {"classifier_size", classifier_size},
           {"latent_dim", latent_dim},
           {"gan_batch", gan_batch},
           {"n_critic", n_critic},
           {"clf_batch", clf_batch},
           {"full_samples", full_samples},
           {"set_size", set_size},
           {"trials", trials},
           {"starts", starts},
           {"mia_k", mia_k},
           {"mia_members", mia_members},
           {"mia_nonmembers", mia_nonmembers},
           {"threads", threads}}) {
    if (absl::Status s = Positive(key, v); !s.ok()) return s;
  }
  if (shadows_per_property < 0 || gan_steps < 0 || clf_epochs < 0 ||
      latent_iters < 0) {
    return absl::InvalidArgumentError(
        "shadows_per_property, gan_steps, clf_epochs and latent_iters must be "
        "non-negative");
  }
  if (n_classes < 2) return absl::InvalidArgumentError("n_classes must be >= 2");
  std::vector<double> grid_values = grid;
  if (grid.empty() && !multiclass()) {
    return absl::InvalidArgumentError("property grid is empty");
  }
  for (double g : shadow_grid) grid_values.push_back(g);
  for (double g : grid_values) {
    if (!(g >= 0.0 && g <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("grid value ", g, " outside [0,1]"));
    }
  }
  for (double p : {out_of_range_property, mia_property}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError("proportions must lie in [0,1]");
    }
  }
  for (const std::vector<int>* list : {&sample_counts, &shadow_counts, &compare_counts}) {
    for (int v : *list) {
      if (v < 1) return absl::InvalidArgumentError("counts must be >= 1");
    }
  }
  if (absl::StatusOr<std::vector<data::PropertyDistribution>> t = TargetProperties();
      !t.ok()) {
    return t.status();
  }
  if (absl::Status s = GanConfigFor(0, 0).Validate(); !s.ok()) return s;
  return ClassifierOptions(0).optimizer.Validate();
}

absl::StatusOr<std::vector<data::PropertyDistribution>>
ExperimentConfig::TargetProperties() const {
  std::vector<data::PropertyDistribution> out;
  if (multiclass()) {
    if (multiclass_property.empty()) {
      out.push_back(data::PropertyDistribution::Uniform(n_classes));
      return out;
    }
    if (static_cast<int>(multiclass_property.size()) != n_classes) {
      return absl::InvalidArgumentError(absl::StrCat(
          "multiclass_property has ", multiclass_property.size(),
          " entries, n_classes is ", n_classes));
    }
    absl::StatusOr<data::PropertyDistribution> p =
        data::PropertyDistribution::Create(multiclass_property);
    if (!p.ok()) return p.status();
    out.push_back(*p);
    return out;
  }
  for (double g : grid) {
    absl::StatusOr<data::PropertyDistribution> p =
        data::PropertyDistribution::Binary(g);
    if (!p.ok()) return p.status();
    out.push_back(*p);
  }
  return out;
}

absl::StatusOr<std::vector<data::PropertyDistribution>>
ExperimentConfig::ShadowGrid() const {
  std::vector<data::PropertyDistribution> out;
  for (double g : shadow_grid.empty() ? grid : shadow_grid) {
    absl::StatusOr<data::PropertyDistribution> p =
        data::PropertyDistribution::Binary(g);
    if (!p.ok()) return p.status();
    out.push_back(*p);
  }
  return out;
}

gan::GanConfig ExperimentConfig::GanConfigFor(uint64_t init_seed,
                                              uint64_t train_seed) const {
  const int width = data::DomainWidth(domain);
  gan::GanConfig c =
      gan_loss == gan::GanLoss::kWganGp
          ? gan::GanConfig::WganGpDefaults(latent_dim, width, gan_hidden, init_seed)
          : gan::GanConfig::MinimaxDefaults(latent_dim, width, gan_hidden, init_seed);
  c.prior.kind = latent_prior;
  c.generator_optimizer = nn::OptimizerConfig::Adam(gan_lr, gan_beta1, gan_beta2);
  c.generator_optimizer.batch_size = gan_batch;
  c.discriminator_optimizer = c.generator_optimizer;
  c.batch_size = gan_batch;
  c.n_critic = n_critic;
  if (gan_loss == gan::GanLoss::kWganGp) c.gp_lambda = gp_lambda;
  c.train_steps = gan_steps;
  c.seed = train_seed;
  return c;
}

classifier::TrainingOptions ExperimentConfig::ClassifierOptions(
    uint64_t seed_value) const {
  classifier::TrainingOptions o;
  o.optimizer = nn::OptimizerConfig::Adam(clf_lr, 0.9, 0.999);
  o.optimizer.batch_size = clf_batch;
  o.epochs = clf_epochs;
  o.seed = seed_value;
  return o;
}

attack::LatentOptimizationOptions ExperimentConfig::LatentOptions(
    uint64_t seed_value) const {
  attack::LatentOptimizationOptions o;
  o.optimizer = nn::OptimizerConfig::Adam(latent_lr, 0.9, 0.999);
  o.iters = latent_iters;
  o.set_size = set_size;
  o.seed = seed_value;
  return o;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::filesystem::path& path) {
  absl::StatusOr<std::string> text = nn::ReadTextFile(path);
  if (!text.ok()) return text.status();
  ExperimentConfig config;
  if (absl::Status s = config.Apply(*text); !s.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path.string(), ": ", s.message()));
  }
  return config;
}

}  // namespace ganprop::harness
