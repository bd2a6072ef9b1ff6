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

#include "ganprop/harness/pipeline.h"

#include <algorithm>
#include <functional>
#include <memory>
#include <system_error>

#include "absl/strings/str_cat.h"
#include "ganprop/common/random.h"
#include "ganprop/common/status_macros.h"
#include "ganprop/data/split.h"
#include "ganprop/data/synth.h"
#include "ganprop/harness/job_pool.h"
#include "ganprop/nn/serialization.h"

namespace ganprop::harness {
namespace {

using data::LabeledDataset;
using data::PropertyDistribution;
using nn::Matrix;

void OffsetIds(LabeledDataset& d, int64_t offset) {
  for (int64_t& id : d.ids) id += offset;
}

absl::Status Tagged(std::string_view what, const absl::Status& s) {
  return absl::Status(s.code(), absl::StrCat(std::string(what), ": ", s.message()));
}

// First failure in index order, or every value.
template <typename T>
absl::StatusOr<std::vector<T>> Collect(std::vector<absl::StatusOr<T>> results) {
  std::vector<T> out;
  out.reserve(results.size());
  for (absl::StatusOr<T>& r : results) {
    if (!r.ok()) return r.status();
    out.push_back(*std::move(r));
  }
  return out;
}

std::string FigureTable(std::span<const ResultRow> rows) {
  absl::StatusOr<std::vector<SummaryRow>> summary = Summarize(rows);
  return summary.ok() ? SummaryCsv(*summary) : std::string();
}

std::string CosineCsvValue(const PropertyDistribution& a,
                           const PropertyDistribution& b) {
  absl::StatusOr<double> c = attack::CosineSimilarity(a.probs(), b.probs());
  return c.ok() ? FormatDouble(*c) : "nan";
}

PropertyDistribution FromRowVector(const std::vector<double>& v) {
  if (v.size() == 1) return *PropertyDistribution::Binary(v[0]);
  absl::StatusOr<PropertyDistribution> p = PropertyDistribution::Create(v);
  return p.ok() ? *p : PropertyDistribution::Uniform(static_cast<int>(v.size()));
}

}  // namespace

absl::StatusOr<DataPools> BuildPools(const ExperimentConfig& config) {
  const data::AttributeSpec attribute = config.attribute();
  const PropertyDistribution uniform = PropertyDistribution::Uniform(config.n_classes);
  const int corpus_n = 2 * config.pool_size + config.classifier_size;
  GANPROP_ASSIGN_OR_RETURN(
      LabeledDataset corpus,
      data::SynthDomain(config.domain, corpus_n, attribute, uniform,
                        DeriveSeed(config.seed, "corpus")));
  GANPROP_ASSIGN_OR_RETURN(
      data::SplitResult split,
      data::Split(corpus,
                  {config.pool_size, config.pool_size, config.classifier_size,
                   config.classifier_train_fraction},
                  DeriveSeed(config.seed, "split")));
  DataPools pools;
  pools.target = std::move(split.target);
  pools.shadow = std::move(split.shadow);
  pools.classifier_train = std::move(split.classifier_train);
  pools.classifier_test = std::move(split.classifier_test);
  int64_t next_id = corpus_n;
  if (config.domain_shift != 0.0) {
    data::DomainOptions options;
    options.shift = config.domain_shift;
    GANPROP_ASSIGN_OR_RETURN(
        LabeledDataset shifted,
        data::SynthDomain(config.domain, config.classifier_size, attribute,
                          uniform, DeriveSeed(config.seed, "classifier_corpus"),
                          options));
    OffsetIds(shifted, next_id);
    next_id += config.classifier_size;
    GANPROP_ASSIGN_OR_RETURN(
        data::SplitResult shifted_split,
        data::Split(shifted,
                    {0, 0, config.classifier_size, config.classifier_train_fraction},
                    DeriveSeed(config.seed, "classifier_split")));
    pools.classifier_train = std::move(shifted_split.classifier_train);
    pools.classifier_test = std::move(shifted_split.classifier_test);
  }
  GANPROP_ASSIGN_OR_RETURN(
      pools.reservoir,
      data::SynthDomain(config.domain, config.pool_size, attribute, uniform,
                        DeriveSeed(config.seed, "reservoir")));
  OffsetIds(pools.reservoir, next_id);
  return pools;
}

absl::Status WriteModelProperty(const std::filesystem::path& dir,
                                const PropertyDistribution& property) {
  nlohmann::json j;
  j["property"] = property.probs();
  return nn::WriteTextFile(dir / "property.json", j.dump(2) + "\n");
}

absl::StatusOr<PropertyDistribution> ReadModelProperty(
    const std::filesystem::path& dir) {
  GANPROP_ASSIGN_OR_RETURN(nlohmann::json j, nn::ReadJsonFile(dir / "property.json"));
  if (!j.contains("property") || !j["property"].is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat((dir / "property.json").string(), ": missing property"));
  }
  return PropertyDistribution::Create(j["property"].get<std::vector<double>>());
}

absl::StatusOr<Experiment> Experiment::Create(ExperimentConfig config) {
  GANPROP_RETURN_IF_ERROR(config.Validate());
  std::filesystem::path dir = config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  const std::string text = config.ToText();
  bool reuse = false;
  if (std::filesystem::exists(dir / "config.txt")) {
    absl::StatusOr<std::string> previous = nn::ReadTextFile(dir / "config.txt");
    reuse = previous.ok() && *previous == text;
  }
  if (!reuse) {
    std::filesystem::remove_all(dir / "models", ec);
    GANPROP_RETURN_IF_ERROR(nn::WriteTextFile(dir / "config.txt", text));
  }
  return Experiment(std::move(config), std::move(dir), reuse);
}

absl::StatusOr<const DataPools*> Experiment::Pools() {
  if (!pools_) {
    GANPROP_ASSIGN_OR_RETURN(DataPools pools, BuildPools(config_));
    pools_ = std::move(pools);
  }
  return &*pools_;
}

absl::StatusOr<const classifier::PropertyClassifier*> Experiment::Classifier() {
  if (classifier_) return &*classifier_;
  const std::filesystem::path path = dir_ / "models" / "classifier.json";
  if (reuse_ && std::filesystem::exists(path)) {
    GANPROP_ASSIGN_OR_RETURN(classifier::PropertyClassifier clf,
                             classifier::LoadClassifier(path));
    classifier_ = std::move(clf);
    return &*classifier_;
  }
  GANPROP_ASSIGN_OR_RETURN(const DataPools* pools, Pools());
  GANPROP_RETURN_IF_ERROR(
      classifier::CheckDisjointProvenance(pools->classifier_train, pools->target));
  GANPROP_RETURN_IF_ERROR(
      classifier::CheckDisjointProvenance(pools->classifier_train, pools->shadow));
  const nn::DenseNetworkSpec spec = classifier::DefaultClassifierSpec(
      data::DomainWidth(config_.domain), config_.n_classes, config_.clf_hidden,
      DeriveSeed(config_.seed, "clf_init"));
  GANPROP_ASSIGN_OR_RETURN(
      classifier::ClassifierTrainingResult trained,
      classifier::TrainClassifier(
          pools->classifier_train, pools->classifier_test, spec,
          config_.ClassifierOptions(DeriveSeed(config_.seed, "clf_train"))));
  if (trained.failed) {
    return absl::InternalError(
        absl::StrCat("classifier training failed: ", trained.failure));
  }
  if (config_.save_models) {
    GANPROP_RETURN_IF_ERROR(classifier::SaveClassifier(trained.classifier, path));
  }
  classifier_ = std::move(trained.classifier);
  return &*classifier_;
}

absl::StatusOr<std::vector<ModelRecord>> Experiment::TrainModels(
    const std::string& role, std::vector<LabeledDataset> datasets,
    std::vector<PropertyDistribution> properties) {
  if (datasets.size() != properties.size()) {
    return absl::InvalidArgumentError("one property per dataset is required");
  }
  const ExperimentConfig& c = config_;
  auto job = [&](int i) -> absl::StatusOr<ModelRecord> {
    const std::string id = absl::StrCat(role, "_", i);
    const std::filesystem::path model_dir = dir_ / "models" / role / id;
    if (reuse_ && std::filesystem::exists(model_dir / "generator.json")) {
      absl::StatusOr<gan::Generator> g = gan::LoadGenerator(model_dir);
      if (!g.ok()) return Tagged(id, g.status());
      return ModelRecord{id, properties[i], *std::move(g), datasets[i]};
    }
    const uint64_t init = c.shared_init ? DeriveSeed(c.seed, "gan_init")
                                        : DeriveSeed(c.seed, role + "_init", i);
    absl::StatusOr<gan::TrainedGan> trained = gan::TrainGan(
        datasets[i], c.GanConfigFor(init, DeriveSeed(c.seed, role + "_train", i)));
    if (!trained.ok()) return Tagged(id, trained.status());
    if (trained->log.failed) {
      return absl::InternalError(
          absl::StrCat(id, ": GAN training failed: ", trained->log.failure));
    }
    if (c.save_models) {
      if (absl::Status s = gan::SaveGan(*trained, model_dir); !s.ok()) {
        return Tagged(id, s);
      }
      if (absl::Status s = WriteModelProperty(model_dir, properties[i]); !s.ok()) {
        return Tagged(id, s);
      }
    }
    return ModelRecord{id, properties[i], trained->AsGenerator(), datasets[i]};
  };
  return Collect(RunJobs<ModelRecord>(static_cast<int>(datasets.size()),
                                      c.threads, job));
}

absl::StatusOr<std::vector<ModelRecord>> Experiment::DrawAndTrain(
    const std::string& role, const LabeledDataset& pool,
    const std::vector<PropertyDistribution>& properties) {
  std::vector<LabeledDataset> datasets;
  for (size_t i = 0; i < properties.size(); ++i) {
    absl::StatusOr<LabeledDataset> d = data::DrawWithProperty(
        pool, config_.train_size, properties[i],
        DeriveSeed(config_.seed, role + "_data", i));
    if (!d.ok()) return Tagged(absl::StrCat(role, "_", i), d.status());
    datasets.push_back(*std::move(d));
  }
  return TrainModels(role, std::move(datasets), properties);
}

absl::StatusOr<const std::vector<ModelRecord>*> Experiment::Targets() {
  if (targets_) return &*targets_;
  GANPROP_ASSIGN_OR_RETURN(std::vector<PropertyDistribution> grid,
                           config_.TargetProperties());
  std::vector<PropertyDistribution> properties;
  for (const PropertyDistribution& p : grid) {
    for (int t = 0; t < config_.targets_per_property; ++t) properties.push_back(p);
  }
  GANPROP_ASSIGN_OR_RETURN(const DataPools* pools, Pools());
  GANPROP_ASSIGN_OR_RETURN(std::vector<ModelRecord> models,
                           DrawAndTrain("target", pools->target, properties));
  targets_ = std::move(models);
  return &*targets_;
}

absl::StatusOr<const std::vector<ModelRecord>*> Experiment::Shadows() {
  if (shadows_) return &*shadows_;
  if (config_.multiclass()) {
    return absl::FailedPreconditionError("shadow models need a binary attribute");
  }
  GANPROP_ASSIGN_OR_RETURN(std::vector<PropertyDistribution> grid,
                           config_.ShadowGrid());
  const int members = config_.shadows_per_property * static_cast<int>(grid.size());
  if (members < 1) return absl::FailedPreconditionError("no shadow models configured");
  GANPROP_ASSIGN_OR_RETURN(const DataPools* pools, Pools());
  GANPROP_ASSIGN_OR_RETURN(
      std::vector<ModelRecord> models,
      DrawAndTrain("shadow", pools->shadow,
                   attack::ShadowGridProperties(grid, members)));
  shadows_ = std::move(models);
  return &*shadows_;
}

absl::StatusOr<attack::ShadowEnsemble> Experiment::Ensemble(int members) {
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* shadows, Shadows());
  if (members < 1 || members > static_cast<int>(shadows->size())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ensemble of ", members, " requested, ", shadows->size(), " shadows trained"));
  }
  attack::ShadowEnsemble ensemble;
  for (int k = 0; k < members; ++k) {
    const ModelRecord& m = (*shadows)[k];
    ensemble.members.push_back({m.generator, m.property, m.id});
  }
  return ensemble;
}

absl::StatusOr<attack::LatentCodeSet> Experiment::OptimizeCodes(
    const attack::ShadowEnsemble& ensemble, const std::string& label,
    uint64_t index) {
  GANPROP_ASSIGN_OR_RETURN(const classifier::PropertyClassifier* clf, Classifier());
  GANPROP_ASSIGN_OR_RETURN(
      attack::LatentCodeSet codes,
      attack::OptimizeLatentSet(
          ensemble, *clf,
          config_.LatentOptions(DeriveSeed(config_.seed, label, index))));
  if (codes.failed) {
    return absl::InternalError(
        absl::StrCat("latent optimization failed: ", codes.failure));
  }
  return codes;
}

ResultRow Experiment::MakeRow(const std::string& mode, const std::string& target_id,
                              const PropertyDistribution& real,
                              const PropertyDistribution& inferred,
                              double abs_diff, int query_count, int trial,
                              uint64_t seed) const {
  ResultRow row;
  row.task = config_.task;
  row.mode = mode;
  row.target_id = target_id;
  row.p_real = real.is_binary() ? std::vector<double>{real.proportion()} : real.probs();
  row.p_infer = inferred.is_binary() ? std::vector<double>{inferred.proportion()}
                                     : inferred.probs();
  row.abs_diff = abs_diff;
  row.query_count = query_count;
  row.trial = trial;
  row.seed = seed;
  return row;
}

absl::StatusOr<std::vector<ResultRow>> Experiment::FullRows(
    const std::vector<ModelRecord>& models, int samples, int trials,
    const std::string& mode) {
  GANPROP_ASSIGN_OR_RETURN(const classifier::PropertyClassifier* clf, Classifier());
  const int n = static_cast<int>(models.size()) * trials;
  auto job = [&](int j) -> absl::StatusOr<ResultRow> {
    const ModelRecord& m = models[j / trials];
    const int trial = j % trials;
    const uint64_t seed =
        DeriveSeed(config_.seed, absl::StrCat("full_", m.id, "_", samples), trial);
    GANPROP_ASSIGN_OR_RETURN(
        attack::AttackReport report,
        attack::AttackFullBb(m.generator, *clf, samples, seed, config_.phi));
    GANPROP_RETURN_IF_ERROR(report.SetGroundTruth(m.property));
    return MakeRow(mode, m.id, m.property, report.inferred, *report.abs_diff,
                   samples, trial, seed);
  };
  return Collect(RunJobs<ResultRow>(n, config_.threads, job));
}

absl::StatusOr<std::vector<ResultRow>> Experiment::PartialRows(
    const std::vector<ModelRecord>& models, const attack::LatentCodeSet& codes,
    uint64_t codes_seed, int trial, const std::string& mode) {
  GANPROP_ASSIGN_OR_RETURN(const classifier::PropertyClassifier* clf, Classifier());
  std::vector<ResultRow> rows;
  for (const ModelRecord& m : models) {
    GANPROP_ASSIGN_OR_RETURN(
        attack::AttackReport report,
        attack::AttackPartialBb(m.generator, *clf, codes, config_.phi));
    GANPROP_RETURN_IF_ERROR(report.SetGroundTruth(m.property));
    rows.push_back(MakeRow(mode, m.id, m.property, report.inferred,
                           *report.abs_diff, codes.size(), trial, codes_seed));
  }
  return rows;
}

absl::StatusOr<std::vector<ResultRow>> RunTask(const ExperimentConfig& config) {
  absl::StatusOr<Experiment> created = Experiment::Create(config);
  if (!created.ok()) return Tagged("stage config", created.status());
  Experiment& e = *created;
  ResultTable table;
  std::string stage;
  auto append = [&](std::vector<ResultRow> rows) -> absl::Status {
    for (ResultRow& r : rows) GANPROP_RETURN_IF_ERROR(table.Append(std::move(r)));
    return absl::OkStatus();
  };
  auto body = [&]() -> absl::Status {
    stage = "data";
    GANPROP_RETURN_IF_ERROR(e.Pools().status());
    stage = "classifier";
    GANPROP_RETURN_IF_ERROR(e.Classifier().status());
    stage = "targets";
    GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
    stage = "full_bb";
    GANPROP_ASSIGN_OR_RETURN(
        std::vector<ResultRow> full,
        e.FullRows(*targets, config.full_samples, config.trials, "full_bb"));
    GANPROP_RETURN_IF_ERROR(append(std::move(full)));
    if (config.multiclass() || config.shadows_per_property == 0) {
      return absl::OkStatus();
    }
    stage = "shadows";
    GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* shadows, e.Shadows());
    GANPROP_ASSIGN_OR_RETURN(attack::ShadowEnsemble ensemble,
                             e.Ensemble(static_cast<int>(shadows->size())));
    stage = "optimize_codes";
    GANPROP_ASSIGN_OR_RETURN(attack::LatentCodeSet codes,
                             e.OptimizeCodes(ensemble, "codes", 0));
    stage = "partial_bb";
    GANPROP_ASSIGN_OR_RETURN(
        std::vector<ResultRow> partial,
        e.PartialRows(*targets, codes, DeriveSeed(config.seed, "codes", 0), 0,
                      "partial_bb"));
    return append(std::move(partial));
  };
  const absl::Status status = body();
  GANPROP_RETURN_IF_ERROR(table.Close(e.dir() / "results.csv"));
  const std::filesystem::path failure = e.dir() / "failure.txt";
  if (!status.ok()) {
    const absl::Status tagged = Tagged(absl::StrCat("stage ", stage), status);
    (void)nn::WriteTextFile(failure, std::string(tagged.message()) + "\n");
    return tagged;
  }
  std::error_code ec;
  std::filesystem::remove(failure, ec);
  return table.rows();
}

namespace {

using FigureFn = std::function<absl::StatusOr<FigureResult>(Experiment&)>;

absl::StatusOr<attack::ShadowEnsemble> FullEnsemble(Experiment& e) {
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* shadows, e.Shadows());
  return e.Ensemble(static_cast<int>(shadows->size()));
}

absl::StatusOr<FigureResult> FigureF4(Experiment& e) {
  const ExperimentConfig& c = e.config();
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
  FigureResult out;
  GANPROP_ASSIGN_OR_RETURN(out.rows,
                           e.FullRows(*targets, c.full_samples, c.trials, "full_bb"));
  out.csv = FigureTable(out.rows);
  return out;
}

absl::StatusOr<FigureResult> FigureF5(Experiment& e) {
  const ExperimentConfig& c = e.config();
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
  FigureResult out;
  for (int n : c.sample_counts) {
    GANPROP_ASSIGN_OR_RETURN(std::vector<ResultRow> rows,
                             e.FullRows(*targets, n, c.trials, "full_bb"));
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  out.csv = FigureTable(out.rows);
  return out;
}

std::string LossTraceCsv(const attack::LatentCodeSet& codes) {
  std::string csv = "iteration,loss\n";
  for (size_t i = 0; i < codes.trace.size(); ++i) {
    absl::StrAppend(&csv, i, ",", FormatDouble(codes.trace[i]), "\n");
  }
  return csv;
}

absl::StatusOr<FigureResult> FigureF6(Experiment& e) {
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
  GANPROP_ASSIGN_OR_RETURN(attack::ShadowEnsemble ensemble, FullEnsemble(e));
  GANPROP_ASSIGN_OR_RETURN(attack::LatentCodeSet codes,
                           e.OptimizeCodes(ensemble, "codes", 0));
  FigureResult out;
  GANPROP_ASSIGN_OR_RETURN(
      out.rows, e.PartialRows(*targets, codes, DeriveSeed(e.config().seed, "codes", 0),
                              0, "partial_bb"));
  out.csv = FigureTable(out.rows);
  out.extras["loss"] = LossTraceCsv(codes);
  return out;
}

absl::StatusOr<FigureResult> FigureF7(Experiment& e) {
  const ExperimentConfig& c = e.config();
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
  FigureResult out;
  for (int m : c.shadow_counts) {
    GANPROP_ASSIGN_OR_RETURN(attack::ShadowEnsemble ensemble, e.Ensemble(m));
    GANPROP_ASSIGN_OR_RETURN(attack::LatentCodeSet codes,
                             e.OptimizeCodes(ensemble, "codes_members", m));
    GANPROP_ASSIGN_OR_RETURN(
        std::vector<ResultRow> rows,
        e.PartialRows(*targets, codes, DeriveSeed(c.seed, "codes_members", m), 0,
                      absl::StrCat("partial_bb_m", m)));
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  out.csv = FigureTable(out.rows);
  return out;
}

absl::StatusOr<FigureResult> FigureF8(Experiment& e) {
  const ExperimentConfig& c = e.config();
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
  GANPROP_ASSIGN_OR_RETURN(attack::ShadowEnsemble ensemble, FullEnsemble(e));
  FigureResult out;
  std::string loss = "start,initial_loss,final_loss\n";
  // Per-property mean inference of each start.
  std::map<double, std::vector<double>> means;
  for (int s = 0; s < c.starts; ++s) {
    GANPROP_ASSIGN_OR_RETURN(attack::LatentCodeSet codes,
                             e.OptimizeCodes(ensemble, "codes_start", s));
    absl::StrAppend(&loss, s, ",", FormatDouble(codes.initial_loss), ",",
                    FormatDouble(codes.final_loss), "\n");
    GANPROP_ASSIGN_OR_RETURN(
        std::vector<ResultRow> rows,
        e.PartialRows(*targets, codes, DeriveSeed(c.seed, "codes_start", s), s,
                      absl::StrCat("partial_bb_s", s)));
    std::map<double, std::pair<double, int>> acc;
    for (const ResultRow& r : rows) {
      acc[r.p_real[0]].first += r.p_infer[0];
      ++acc[r.p_real[0]].second;
    }
    for (const auto& [p, sum] : acc) means[p].push_back(sum.first / sum.second);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  std::string span = "p_real,min_mean,max_mean,span\n";
  for (const auto& [p, v] : means) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    absl::StrAppend(&span, FormatDouble(p), ",", FormatDouble(*lo), ",",
                    FormatDouble(*hi), ",", FormatDouble(*hi - *lo), "\n");
  }
  out.csv = FigureTable(out.rows);
  out.extras["span"] = span;
  out.extras["loss"] = loss;
  return out;
}

absl::StatusOr<FigureResult> FigureF9(Experiment& e) {
  const ExperimentConfig& c = e.config();
  GANPROP_ASSIGN_OR_RETURN(attack::ShadowEnsemble ensemble, FullEnsemble(e));
  GANPROP_ASSIGN_OR_RETURN(const DataPools* pools, e.Pools());
  GANPROP_ASSIGN_OR_RETURN(PropertyDistribution outside,
                           PropertyDistribution::Binary(c.out_of_range_property));
  GANPROP_ASSIGN_OR_RETURN(
      std::vector<ModelRecord> targets,
      e.DrawAndTrain("outside", pools->target,
                     std::vector<PropertyDistribution>(c.targets_per_property,
                                                       outside)));
  GANPROP_ASSIGN_OR_RETURN(attack::LatentCodeSet codes,
                           e.OptimizeCodes(ensemble, "codes", 0));
  FigureResult out;
  GANPROP_ASSIGN_OR_RETURN(
      out.rows, e.PartialRows(targets, codes, DeriveSeed(c.seed, "codes", 0), 0,
                              "partial_bb"));
  GANPROP_ASSIGN_OR_RETURN(std::vector<ResultRow> full,
                           e.FullRows(targets, codes.size(), c.trials, "full_bb"));
  out.rows.insert(out.rows.end(), full.begin(), full.end());
  out.csv = FigureTable(out.rows);
  return out;
}

absl::StatusOr<FigureResult> FigureF10(Experiment& e) {
  const ExperimentConfig& c = e.config();
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
  GANPROP_ASSIGN_OR_RETURN(attack::ShadowEnsemble ensemble, FullEnsemble(e));
  GANPROP_ASSIGN_OR_RETURN(const classifier::PropertyClassifier* clf, e.Classifier());
  std::vector<attack::AttackTarget> attack_targets;
  for (const ModelRecord& m : *targets) {
    attack_targets.push_back({&m.generator, m.property, m.id});
  }
  const uint64_t seed = DeriveSeed(c.seed, "compare");
  GANPROP_ASSIGN_OR_RETURN(
      attack::ModeComparisonResult result,
      attack::CompareModes(attack_targets, *clf, ensemble, c.compare_counts,
                           c.trials, c.LatentOptions(seed), seed));
  FigureResult out;
  for (const attack::ComparisonRecord& r : result.records) {
    const bool partial = r.mode == attack::AttackMode::kPartialBlackBox;
    const uint64_t row_seed =
        partial ? DeriveSeed(seed, "compare_codes", r.sample_count)
                : DeriveSeed(seed,
                             absl::StrCat("compare_full_", r.target_id, "_",
                                          r.sample_count),
                             r.trial);
    ResultRow row;
    row.task = c.task;
    row.mode = attack::AttackModeName(r.mode);
    row.target_id = r.target_id;
    row.p_real = {r.real};
    row.p_infer = {r.inferred};
    row.abs_diff = r.abs_diff;
    row.query_count = r.sample_count;
    row.trial = r.trial;
    row.seed = row_seed;
    out.rows.push_back(std::move(row));
  }
  out.csv = "sample_count,wins,comparisons,ratio\n";
  for (const attack::ModeComparison& m : result.summary) {
    absl::StrAppend(&out.csv, m.sample_count, ",", m.wins, ",", m.comparisons, ",",
                    FormatDouble(m.ratio), "\n");
  }
  return out;
}

absl::Status RequireMulticlass(const ExperimentConfig& c) {
  if (c.multiclass()) return absl::OkStatus();
  return absl::FailedPreconditionError("figure needs n_classes > 2");
}

absl::StatusOr<FigureResult> FigureF14(Experiment& e) {
  const ExperimentConfig& c = e.config();
  GANPROP_RETURN_IF_ERROR(RequireMulticlass(c));
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
  FigureResult out;
  GANPROP_ASSIGN_OR_RETURN(out.rows,
                           e.FullRows(*targets, c.full_samples, c.trials, "full_bb"));
  out.csv = "target_id,trial,query_count,cosine,total_variation\n";
  std::vector<double> real(c.n_classes, 0.0), inferred(c.n_classes, 0.0);
  for (const ResultRow& r : out.rows) {
    absl::StrAppend(&out.csv, r.target_id, ",", r.trial, ",", r.query_count, ",",
                    CosineCsvValue(FromRowVector(r.p_infer), FromRowVector(r.p_real)),
                    ",", FormatDouble(r.abs_diff), "\n");
    for (int k = 0; k < c.n_classes; ++k) {
      real[k] += r.p_real[k] / out.rows.size();
      inferred[k] += r.p_infer[k] / out.rows.size();
    }
  }
  std::string classes = "class,p_real,mean_p_infer\n";
  for (int k = 0; k < c.n_classes; ++k) {
    absl::StrAppend(&classes, k, ",", FormatDouble(real[k]), ",",
                    FormatDouble(inferred[k]), "\n");
  }
  out.extras["classes"] = classes;
  return out;
}

absl::StatusOr<FigureResult> FigureF15(Experiment& e) {
  const ExperimentConfig& c = e.config();
  GANPROP_RETURN_IF_ERROR(RequireMulticlass(c));
  GANPROP_ASSIGN_OR_RETURN(const std::vector<ModelRecord>* targets, e.Targets());
  GANPROP_ASSIGN_OR_RETURN(const DataPools* pools, e.Pools());
  GANPROP_ASSIGN_OR_RETURN(const classifier::PropertyClassifier* clf, e.Classifier());
  const PropertyDistribution fake = PropertyDistribution::Uniform(c.n_classes);

  std::vector<LabeledDataset> rebalanced;
  std::vector<PropertyDistribution> original;
  std::string sizes = "target_id,original_size,rebalanced_size\n";
  for (size_t i = 0; i < targets->size(); ++i) {
    const ModelRecord& m = (*targets)[i];
    GANPROP_ASSIGN_OR_RETURN(
        LabeledDataset d, data::Rebalance(m.training, fake, pools->reservoir,
                                          DeriveSeed(c.seed, "rebalance", i)));
    absl::StrAppend(&sizes, m.id, ",", m.training.size(), ",", d.size(), "\n");
    rebalanced.push_back(std::move(d));
    original.push_back(m.property);
  }
  GANPROP_ASSIGN_OR_RETURN(std::vector<ModelRecord> mitigated,
                           e.TrainModels("rebalanced", std::move(rebalanced), original));

  FigureResult out;
  GANPROP_ASSIGN_OR_RETURN(out.rows,
                           e.FullRows(*targets, c.full_samples, c.trials, "full_bb"));
  GANPROP_ASSIGN_OR_RETURN(
      std::vector<ResultRow> after,
      e.FullRows(mitigated, c.full_samples, c.trials, "full_bb_rebalanced"));
  // Report rows against the original target they protect.
  for (size_t j = 0; j < after.size(); ++j) {
    after[j].target_id = (*targets)[j / c.trials].id;
  }
  out.rows.insert(out.rows.end(), after.begin(), after.end());
  std::string gate_notes = "target_id,trial,reason\n";
  for (const ModelRecord& m : *targets) {
    for (int t = 0; t < c.trials; ++t) {
      const uint64_t seed = DeriveSeed(c.seed, absl::StrCat("gate_", m.id), t);
      GANPROP_ASSIGN_OR_RETURN(Matrix samples,
                               m.generator.SampleBlind(c.full_samples, seed));
      absl::StatusOr<Matrix> gated = classifier::GateRelease(*clf, samples, fake);
      if (!gated.ok()) {
        // A class the generator never emits cannot be released in proportion.
        absl::StrAppend(&gate_notes, m.id, ",", t, ",\"", gated.status().message(),
                        "\"\n");
        continue;
      }
      const Matrix& released = *gated;
      GANPROP_ASSIGN_OR_RETURN(Matrix probs, clf->PredictProba(released));
      GANPROP_ASSIGN_OR_RETURN(PropertyDistribution inferred,
                               attack::Phi(probs, c.phi));
      GANPROP_ASSIGN_OR_RETURN(double diff, attack::AbsDiff(inferred, m.property));
      out.rows.push_back(e.MakeRow("full_bb_gated", m.id, m.property, inferred, diff,
                                   static_cast<int>(released.rows()), t, seed));
    }
  }
  out.csv = "target_id,method,trial,query_count,cosine_to_original,cosine_to_fake\n";
  for (const ResultRow& r : out.rows) {
    const PropertyDistribution inferred = FromRowVector(r.p_infer);
    absl::StrAppend(&out.csv, r.target_id, ",", r.mode, ",", r.trial, ",",
                    r.query_count, ",",
                    CosineCsvValue(inferred, FromRowVector(r.p_real)), ",",
                    CosineCsvValue(inferred, fake), "\n");
  }
  out.extras["sizes"] = sizes;
  out.extras["gate_failures"] = gate_notes;
  return out;
}

absl::StatusOr<FigureResult> FigureF16(Experiment& e) {
  GANPROP_ASSIGN_OR_RETURN(MiaOutcome mia, RunMia(e));
  const ExperimentConfig& c = e.config();
  membership::MiaConfig mc;
  mc.k = c.mia_k;
  mc.lambda_p = c.mia_lambda;
  const std::vector<std::pair<std::string, const PropertyDistribution*>> variants = {
      {"baseline", nullptr},
      {"enhanced_true", &mia.true_property},
      {"enhanced_inferred", &mia.inferred_property}};
  FigureResult out;
  out.rows = {mia.inference_row};
  out.csv = "variant,fpr,tpr\n";
  auto members = std::make_unique<bool[]>(mia.scores.size());
  for (size_t i = 0; i < mia.scores.size(); ++i) members[i] = mia.scores[i].member;
  std::vector<double> true_margins;
  for (const auto& [name, property] : variants) {
    std::vector<double> stats;
    for (const membership::MiaScore& s : mia.scores) {
      const std::vector<PropertyDistribution> props =
          property ? std::vector<PropertyDistribution>{*property}
                   : std::vector<PropertyDistribution>{mia.true_property};
      GANPROP_ASSIGN_OR_RETURN(
          double stat, membership::DecisionStatistic(s, props, mc, property != nullptr));
      stats.push_back(stat);
    }
    if (name == "enhanced_true") true_margins = stats;
    GANPROP_ASSIGN_OR_RETURN(
        std::vector<membership::RocPoint> roc,
        membership::RocCurve(stats, std::span<const bool>(members.get(),
                                                          mia.scores.size())));
    for (const membership::RocPoint& p : roc) {
      absl::StrAppend(&out.csv, name, ",", FormatDouble(p.fpr), ",",
                      FormatDouble(p.tpr), "\n");
    }
  }
  out.extras["auc"] = absl::StrCat(
      "variant,auc\nbaseline,", FormatDouble(mia.auc_baseline), "\nenhanced_true,",
      FormatDouble(mia.auc_enhanced_true), "\nenhanced_inferred,",
      FormatDouble(mia.auc_enhanced_inferred), "\nenhanced_half,",
      FormatDouble(mia.auc_half), "\n");
  out.extras["scores"] = membership::ScoresCsv(mia.scores, true_margins);
  return out;
}

absl::StatusOr<FigureResult> FigureF17(Experiment& e) {
  GANPROP_ASSIGN_OR_RETURN(MiaOutcome mia, RunMia(e));
  FigureResult out;
  out.rows = {mia.inference_row};
  out.csv = membership::SweepCsv(mia.sweep);
  return out;
}

const std::map<std::string, FigureFn>& Figures() {
  static const auto* figures = new std::map<std::string, FigureFn>{
      {"f4", FigureF4},   {"f5", FigureF5},   {"f6", FigureF6},
      {"f7", FigureF7},   {"f8", FigureF8},   {"f9", FigureF9},
      {"f10", FigureF10}, {"f14", FigureF14}, {"f15", FigureF15},
      {"f16", FigureF16}, {"f17", FigureF17}};
  return *figures;
}

}  // namespace

absl::StatusOr<FigureResult> RunFigure(Experiment& experiment,
                                       const std::string& id) {
  auto it = Figures().find(id);
  if (it == Figures().end()) {
    return absl::InvalidArgumentError(absl::StrCat("unknown figure id '", id, "'"));
  }
  absl::StatusOr<FigureResult> result = it->second(experiment);
  if (!result.ok()) return Tagged(absl::StrCat("figure ", id), result.status());
  const std::filesystem::path& dir = experiment.dir();
  ResultTable table;
  for (const ResultRow& r : result->rows) GANPROP_RETURN_IF_ERROR(table.Append(r));
  GANPROP_RETURN_IF_ERROR(table.Close(dir / absl::StrCat("results_", id, ".csv")));
  GANPROP_RETURN_IF_ERROR(
      nn::WriteTextFile(dir / absl::StrCat("figure_", id, ".csv"), result->csv));
  for (const auto& [name, csv] : result->extras) {
    GANPROP_RETURN_IF_ERROR(
        nn::WriteTextFile(dir / absl::StrCat("figure_", id, "_", name, ".csv"), csv));
  }
  return result;
}

absl::StatusOr<FigureResult> RunFigure(const ExperimentConfig& config,
                                       const std::string& id) {
  if (!Figures().contains(id)) {
    return absl::InvalidArgumentError(absl::StrCat("unknown figure id '", id, "'"));
  }
  GANPROP_ASSIGN_OR_RETURN(Experiment e, Experiment::Create(config));
  return RunFigure(e, id);
}

absl::StatusOr<MiaOutcome> RunMia(Experiment& e) {
  const ExperimentConfig& c = e.config();
  if (c.multiclass()) {
    return absl::FailedPreconditionError("membership inference runs on binary tasks");
  }
  GANPROP_ASSIGN_OR_RETURN(const DataPools* pools, e.Pools());
  GANPROP_ASSIGN_OR_RETURN(const classifier::PropertyClassifier* clf, e.Classifier());
  MiaOutcome out;
  GANPROP_ASSIGN_OR_RETURN(out.true_property,
                           PropertyDistribution::Binary(c.mia_property));
  const PropertyDistribution half = *PropertyDistribution::Binary(0.5);

  GANPROP_ASSIGN_OR_RETURN(
      LabeledDataset members,
      data::DrawWithProperty(pools->target, c.mia_members, out.true_property,
                             DeriveSeed(c.seed, "mia_members")));
  GANPROP_ASSIGN_OR_RETURN(
      LabeledDataset nonmembers,
      data::DrawWithProperty(pools->shadow, c.mia_nonmembers, half,
                             DeriveSeed(c.seed, "mia_nonmembers")));
  GANPROP_ASSIGN_OR_RETURN(
      LabeledDataset reference_data,
      data::DrawWithProperty(pools->reservoir, c.mia_members, half,
                             DeriveSeed(c.seed, "mia_reference_data")));
  GANPROP_ASSIGN_OR_RETURN(
      std::vector<ModelRecord> models,
      e.TrainModels("mia", {members, reference_data}, {out.true_property, half}));
  const gan::Generator& target = models[0].generator;
  const gan::Generator& reference = models[1].generator;

  const LabeledDataset queries = data::Concatenate(members, nonmembers);
  GANPROP_ASSIGN_OR_RETURN(
      out.scores, membership::ScoreSamples(queries.samples, target, reference,
                                           c.mia_k, DeriveSeed(c.seed, "mia_banks")));
  for (int i = 0; i < queries.size(); ++i) {
    out.scores[i].id = queries.ids[i];
    out.scores[i].member = i < members.size();
    out.scores[i].attribute_classes = {queries.labels[i]};
  }

  const uint64_t infer_seed = DeriveSeed(c.seed, "mia_infer");
  GANPROP_ASSIGN_OR_RETURN(
      attack::AttackReport report,
      attack::AttackFullBb(target, *clf, c.full_samples, infer_seed, c.phi));
  GANPROP_RETURN_IF_ERROR(report.SetGroundTruth(out.true_property));
  out.inferred_property = report.inferred;
  out.inference_row = e.MakeRow("full_bb", models[0].id, out.true_property,
                                report.inferred, *report.abs_diff, c.full_samples,
                                0, infer_seed);

  membership::MiaConfig mc;
  mc.k = c.mia_k;
  mc.lambda_p = c.mia_lambda;
  const std::vector<PropertyDistribution> truth = {out.true_property};
  const std::vector<PropertyDistribution> inferred = {out.inferred_property};
  const std::vector<PropertyDistribution> halves = {half};
  GANPROP_ASSIGN_OR_RETURN(out.auc_baseline,
                           membership::EvaluateAuc(out.scores, truth, mc, false));
  GANPROP_ASSIGN_OR_RETURN(out.auc_enhanced_true,
                           membership::EvaluateAuc(out.scores, truth, mc, true));
  GANPROP_ASSIGN_OR_RETURN(out.auc_enhanced_inferred,
                           membership::EvaluateAuc(out.scores, inferred, mc, true));
  GANPROP_ASSIGN_OR_RETURN(out.auc_half,
                           membership::EvaluateAuc(out.scores, halves, mc, true));
  GANPROP_ASSIGN_OR_RETURN(
      out.sweep, membership::SensitivitySweep(out.scores, c.mia_property,
                                              c.mia_deviations, mc));
  return out;
}

}  // namespace ganprop::harness
