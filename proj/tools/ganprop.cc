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

// ganprop command-line driver.
//
// Every subcommand accepts --config FILE and repeatable --set key=value
// overrides applied on top of the built-in defaults. Exit codes: 0 success,
// 2 bad configuration or arguments, 3 failure in a pipeline stage; the
// diagnostic on stderr names the stage.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "ganprop/attack/attack.h"
#include "ganprop/classifier/classifier.h"
#include "ganprop/common/random.h"
#include "ganprop/common/status_macros.h"
#include "ganprop/data/dataset_io.h"
#include "ganprop/data/split.h"
#include "ganprop/data/synth.h"
#include "ganprop/gan/gan.h"
#include "ganprop/harness/config.h"
#include "ganprop/harness/pipeline.h"
#include "ganprop/harness/results.h"
#include "ganprop/membership/membership.h"
#include "ganprop/nn/serialization.h"

namespace ganprop {
namespace {

namespace fs = std::filesystem;
using harness::ExperimentConfig;
using harness::FormatDouble;
using nn::Matrix;

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
};

absl::StatusOr<ExperimentConfig> BuildConfig(const CommonOptions& common) {
  ExperimentConfig config;
  if (!common.config_path.empty()) {
    GANPROP_ASSIGN_OR_RETURN(config, harness::LoadConfig(common.config_path));
  }
  for (const std::string& s : common.sets) {
    GANPROP_ASSIGN_OR_RETURN(auto kv, harness::ParseAssignment(s));
    GANPROP_RETURN_IF_ERROR(config.Set(kv.first, kv.second));
  }
  GANPROP_RETURN_IF_ERROR(config.Validate());
  return config;
}

absl::StatusOr<std::vector<double>> ParseList(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part :
       std::vector<std::string>(absl::StrSplit(text, ','))) {
    double v;
    if (!absl::SimpleAtod(part, &v)) {
      return absl::InvalidArgumentError(absl::StrCat("bad number '", part, "'"));
    }
    out.push_back(v);
  }
  return out;
}

// "p" is a binary class-1 proportion; "a,b,c" a full distribution.
absl::StatusOr<data::PropertyDistribution> ParseProperty(const std::string& text) {
  GANPROP_ASSIGN_OR_RETURN(std::vector<double> v, ParseList(text));
  if (v.size() == 1) return data::PropertyDistribution::Binary(v[0]);
  return data::PropertyDistribution::Create(v);
}

std::string MatrixCsv(const Matrix& m, const std::string& prefix) {
  std::vector<std::string> header;
  for (Eigen::Index c = 0; c < m.cols(); ++c) header.push_back(absl::StrCat(prefix, c));
  std::string out = absl::StrCat(absl::StrJoin(header, ","), "\n");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<std::string> cells;
    for (Eigen::Index c = 0; c < m.cols(); ++c) cells.push_back(FormatDouble(m(r, c)));
    absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
  }
  return out;
}

absl::StatusOr<Matrix> ReadMatrixCsv(const fs::path& path) {
  GANPROP_ASSIGN_OR_RETURN(std::string text, nn::ReadTextFile(path));
  const std::vector<std::string> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.size() < 2) {
    return absl::InvalidArgumentError(absl::StrCat(path.string(), ": no rows"));
  }
  const size_t cols = std::vector<std::string>(absl::StrSplit(lines[0], ',')).size();
  Matrix m(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(cols));
  for (size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> cells = absl::StrSplit(lines[r], ',');
    if (cells.size() != cols) {
      return absl::InvalidArgumentError(
          absl::StrCat(path.string(), ": line ", r + 1, " has ", cells.size(),
                       " fields, expected ", cols));
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!absl::SimpleAtod(cells[c], &m(r - 1, c))) {
        return absl::InvalidArgumentError(
            absl::StrCat(path.string(), ": bad number '", cells[c], "'"));
      }
    }
  }
  return m;
}

absl::Status WriteJson(const std::string& out, const nlohmann::json& j) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return absl::OkStatus();
  }
  return nn::WriteTextFile(out, j.dump(2) + "\n");
}

using Action = std::function<absl::Status(const ExperimentConfig&, std::string&)>;

int Run(const std::string& command, const CommonOptions& common,
        const Action& action) {
  absl::StatusOr<ExperimentConfig> config = BuildConfig(common);
  if (!config.ok()) {
    std::cerr << "ganprop " << command << ": stage config: "
              << config.status().message() << "\n";
    return kExitConfig;
  }
  std::string stage = command;
  const absl::Status status = action(*config, stage);
  if (!status.ok()) {
    std::cerr << "ganprop " << command << ": stage " << stage << ": "
              << status.message() << "\n";
    return status.code() == absl::StatusCode::kInvalidArgument ? kExitConfig
                                                               : kExitStage;
  }
  return 0;
}

absl::Status Synth(const ExperimentConfig& c, std::string& stage, int n,
                   const std::string& property, const std::string& out) {
  stage = "synth";
  data::PropertyDistribution p = data::PropertyDistribution::Uniform(c.n_classes);
  if (!property.empty()) {
    GANPROP_ASSIGN_OR_RETURN(p, ParseProperty(property));
  }
  GANPROP_ASSIGN_OR_RETURN(
      data::LabeledDataset d,
      data::SynthDomain(c.domain, n > 0 ? n : c.pool_size, c.attribute(), p,
                        DeriveSeed(c.seed, "synth")));
  stage = "write";
  return data::WriteDataset(d, out);
}

absl::Status SplitCommand(const ExperimentConfig& c, std::string& stage,
                          const std::string& in, const std::string& out_dir) {
  stage = "read";
  GANPROP_ASSIGN_OR_RETURN(data::LabeledDataset d, data::ReadDataset(in));
  stage = "split";
  GANPROP_ASSIGN_OR_RETURN(
      data::SplitResult s,
      data::Split(d,
                  {c.pool_size, c.pool_size, c.classifier_size,
                   c.classifier_train_fraction},
                  DeriveSeed(c.seed, "split")));
  stage = "write";
  const fs::path dir = out_dir;
  GANPROP_RETURN_IF_ERROR(data::WriteDataset(s.target, dir / "target.csv"));
  GANPROP_RETURN_IF_ERROR(data::WriteDataset(s.shadow, dir / "shadow.csv"));
  GANPROP_RETURN_IF_ERROR(
      data::WriteDataset(s.classifier_train, dir / "classifier_train.csv"));
  return data::WriteDataset(s.classifier_test, dir / "classifier_test.csv");
}

absl::Status TrainGanCommand(const ExperimentConfig& c, std::string& stage,
                             const std::string& data_path, const std::string& out,
                             int index) {
  stage = "read";
  GANPROP_ASSIGN_OR_RETURN(data::LabeledDataset d, data::ReadDataset(data_path));
  stage = "train";
  const uint64_t init = c.shared_init ? DeriveSeed(c.seed, "gan_init")
                                      : DeriveSeed(c.seed, "cli_init", index);
  GANPROP_ASSIGN_OR_RETURN(
      gan::TrainedGan trained,
      gan::TrainGan(d, c.GanConfigFor(init, DeriveSeed(c.seed, "cli_train", index))));
  stage = "write";
  GANPROP_RETURN_IF_ERROR(gan::SaveGan(trained, out));
  GANPROP_RETURN_IF_ERROR(harness::WriteModelProperty(out, d.EmpiricalProperty()));
  if (trained.log.failed) {
    stage = "train";
    return absl::InternalError(
        absl::StrCat("training stopped early: ", trained.log.failure));
  }
  return absl::OkStatus();
}

absl::Status TrainClfCommand(const ExperimentConfig& c, std::string& stage,
                             const std::string& train_path,
                             const std::string& test_path, const std::string& out) {
  stage = "read";
  GANPROP_ASSIGN_OR_RETURN(data::LabeledDataset train, data::ReadDataset(train_path));
  GANPROP_ASSIGN_OR_RETURN(data::LabeledDataset test, data::ReadDataset(test_path));
  stage = "train";
  GANPROP_ASSIGN_OR_RETURN(
      classifier::ClassifierTrainingResult r,
      classifier::TrainClassifier(
          train, test,
          classifier::DefaultClassifierSpec(train.width(), train.attribute.n_classes,
                                            c.clf_hidden,
                                            DeriveSeed(c.seed, "clf_init")),
          c.ClassifierOptions(DeriveSeed(c.seed, "clf_train"))));
  if (r.failed) return absl::InternalError(r.failure);
  std::cout << "test_accuracy " << FormatDouble(r.classifier.test_accuracy()) << "\n";
  stage = "write";
  return classifier::SaveClassifier(r.classifier, out);
}

absl::Status AttachTruth(attack::AttackReport& report, const fs::path& gan_dir) {
  if (!fs::exists(gan_dir / "property.json")) return absl::OkStatus();
  GANPROP_ASSIGN_OR_RETURN(data::PropertyDistribution truth,
                           harness::ReadModelProperty(gan_dir));
  return report.SetGroundTruth(truth);
}

absl::Status AttackFullCommand(const ExperimentConfig& c, std::string& stage,
                               const std::string& gan_dir,
                               const std::string& clf_path, int n,
                               const std::string& out) {
  stage = "load";
  GANPROP_ASSIGN_OR_RETURN(gan::Generator g, gan::LoadGenerator(gan_dir));
  GANPROP_ASSIGN_OR_RETURN(classifier::PropertyClassifier clf,
                           classifier::LoadClassifier(clf_path));
  stage = "attack";
  GANPROP_ASSIGN_OR_RETURN(
      attack::AttackReport report,
      attack::AttackFullBb(g, clf, n > 0 ? n : c.full_samples,
                           DeriveSeed(c.seed, "cli_full"), c.phi));
  report.target_id = fs::path(gan_dir).filename().string();
  report.classifier_id = clf_path;
  GANPROP_RETURN_IF_ERROR(AttachTruth(report, gan_dir));
  stage = "write";
  return WriteJson(out, report.ToJson());
}

absl::Status OptimizeCodesCommand(const ExperimentConfig& c, std::string& stage,
                                  const std::vector<std::string>& shadow_dirs,
                                  const std::string& clf_path,
                                  const std::string& out) {
  stage = "load";
  attack::ShadowEnsemble ensemble;
  for (const std::string& dir : shadow_dirs) {
    GANPROP_ASSIGN_OR_RETURN(gan::Generator g, gan::LoadGenerator(dir));
    GANPROP_ASSIGN_OR_RETURN(data::PropertyDistribution p,
                             harness::ReadModelProperty(dir));
    ensemble.members.push_back({std::move(g), p, dir});
  }
  GANPROP_ASSIGN_OR_RETURN(classifier::PropertyClassifier clf,
                           classifier::LoadClassifier(clf_path));
  stage = "optimize";
  GANPROP_ASSIGN_OR_RETURN(
      attack::LatentCodeSet codes,
      attack::OptimizeLatentSet(ensemble, clf,
                                c.LatentOptions(DeriveSeed(c.seed, "codes", 0))));
  stage = "write";
  GANPROP_RETURN_IF_ERROR(nn::WriteTextFile(out, MatrixCsv(codes.codes, "z")));
  nlohmann::json meta;
  meta["initial_loss"] = codes.initial_loss;
  meta["final_loss"] = codes.final_loss;
  meta["iterations"] = codes.trace.size();
  meta["mean_norm"] = codes.mean_norm;
  meta["max_norm"] = codes.max_norm;
  meta["failed"] = codes.failed;
  meta["failure"] = codes.failure;
  meta["trace"] = codes.trace;
  GANPROP_RETURN_IF_ERROR(
      nn::WriteTextFile(fs::path(out).replace_extension(".json"), meta.dump(2) + "\n"));
  if (codes.failed) {
    stage = "optimize";
    return absl::InternalError(codes.failure);
  }
  return absl::OkStatus();
}

absl::Status AttackPartialCommand(const ExperimentConfig& c, std::string& stage,
                                  const std::string& gan_dir,
                                  const std::string& clf_path,
                                  const std::string& codes_path,
                                  const std::string& out) {
  stage = "load";
  GANPROP_ASSIGN_OR_RETURN(gan::Generator g, gan::LoadGenerator(gan_dir));
  GANPROP_ASSIGN_OR_RETURN(classifier::PropertyClassifier clf,
                           classifier::LoadClassifier(clf_path));
  attack::LatentCodeSet codes;
  GANPROP_ASSIGN_OR_RETURN(codes.codes, ReadMatrixCsv(codes_path));
  codes.origin = attack::CodeOrigin::kOptimized;
  stage = "attack";
  GANPROP_ASSIGN_OR_RETURN(attack::AttackReport report,
                           attack::AttackPartialBb(g, clf, codes, c.phi));
  report.target_id = fs::path(gan_dir).filename().string();
  report.classifier_id = clf_path;
  GANPROP_RETURN_IF_ERROR(AttachTruth(report, gan_dir));
  stage = "write";
  return WriteJson(out, report.ToJson());
}

absl::Status MiaCommand(const ExperimentConfig& c, std::string& stage,
                        const std::string& gan_dir, const std::string& reference_dir,
                        const std::string& members_path,
                        const std::string& nonmembers_path,
                        const std::string& property, const std::string& out_dir) {
  stage = "load";
  GANPROP_ASSIGN_OR_RETURN(gan::Generator target, gan::LoadGenerator(gan_dir));
  GANPROP_ASSIGN_OR_RETURN(gan::Generator reference, gan::LoadGenerator(reference_dir));
  GANPROP_ASSIGN_OR_RETURN(data::LabeledDataset members, data::ReadDataset(members_path));
  GANPROP_ASSIGN_OR_RETURN(data::LabeledDataset nonmembers,
                           data::ReadDataset(nonmembers_path));
  std::vector<data::PropertyDistribution> props;
  if (!property.empty()) {
    GANPROP_ASSIGN_OR_RETURN(data::PropertyDistribution p, ParseProperty(property));
    props.push_back(p);
  }
  stage = "score";
  const data::LabeledDataset queries = data::Concatenate(members, nonmembers);
  GANPROP_ASSIGN_OR_RETURN(
      std::vector<membership::MiaScore> scores,
      membership::ScoreSamples(queries.samples, target, reference, c.mia_k,
                               DeriveSeed(c.seed, "mia_banks")));
  for (int i = 0; i < queries.size(); ++i) {
    scores[i].id = queries.ids[i];
    scores[i].member = i < members.size();
    scores[i].attribute_classes = {queries.labels[i]};
  }
  membership::MiaConfig mc;
  mc.k = c.mia_k;
  mc.lambda_p = c.mia_lambda;
  const bool enhanced = !props.empty();
  std::vector<double> margins;
  for (const membership::MiaScore& s : scores) {
    GANPROP_ASSIGN_OR_RETURN(double m,
                             membership::DecisionStatistic(s, props, mc, enhanced));
    margins.push_back(m);
  }
  GANPROP_ASSIGN_OR_RETURN(double baseline,
                           membership::EvaluateAuc(scores, props, mc, false));
  std::string auc = absl::StrCat("variant,auc\nbaseline,", FormatDouble(baseline), "\n");
  if (enhanced) {
    GANPROP_ASSIGN_OR_RETURN(double enh, membership::EvaluateAuc(scores, props, mc, true));
    absl::StrAppend(&auc, "enhanced,", FormatDouble(enh), "\n");
  }
  auto flags = std::make_unique<bool[]>(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) flags[i] = scores[i].member;
  GANPROP_ASSIGN_OR_RETURN(
      std::vector<membership::RocPoint> roc,
      membership::RocCurve(margins, std::span<const bool>(flags.get(), scores.size())));
  stage = "write";
  const fs::path dir = out_dir;
  GANPROP_RETURN_IF_ERROR(
      nn::WriteTextFile(dir / "scores.csv", membership::ScoresCsv(scores, margins)));
  GANPROP_RETURN_IF_ERROR(nn::WriteTextFile(dir / "roc.csv", membership::RocCsv(roc)));
  GANPROP_RETURN_IF_ERROR(nn::WriteTextFile(dir / "auc.csv", auc));
  std::cout << auc;
  return absl::OkStatus();
}

absl::Status MitigateCommand(const ExperimentConfig& c, std::string& stage,
                             const std::string& method, const std::string& fake_text,
                             const std::string& data_path,
                             const std::string& reservoir_path,
                             const std::string& gan_dir, const std::string& clf_path,
                             int n, const std::string& out) {
  data::PropertyDistribution fake = data::PropertyDistribution::Uniform(c.n_classes);
  if (!fake_text.empty()) {
    GANPROP_ASSIGN_OR_RETURN(fake, ParseProperty(fake_text));
  }
  if (method == "rebalance") {
    stage = "read";
    GANPROP_ASSIGN_OR_RETURN(data::LabeledDataset d, data::ReadDataset(data_path));
    GANPROP_ASSIGN_OR_RETURN(data::LabeledDataset reservoir,
                             data::ReadDataset(reservoir_path));
    stage = "rebalance";
    GANPROP_ASSIGN_OR_RETURN(
        data::LabeledDataset balanced,
        data::Rebalance(d, fake, reservoir, DeriveSeed(c.seed, "rebalance")));
    stage = "write";
    return data::WriteDataset(balanced, out);
  }
  if (method == "gate") {
    stage = "load";
    GANPROP_ASSIGN_OR_RETURN(gan::Generator g, gan::LoadGenerator(gan_dir));
    GANPROP_ASSIGN_OR_RETURN(classifier::PropertyClassifier clf,
                             classifier::LoadClassifier(clf_path));
    stage = "gate";
    GANPROP_ASSIGN_OR_RETURN(
        Matrix samples,
        g.SampleBlind(n > 0 ? n : c.full_samples, DeriveSeed(c.seed, "gate")));
    GANPROP_ASSIGN_OR_RETURN(Matrix released,
                             classifier::GateRelease(clf, samples, fake));
    stage = "write";
    return nn::WriteTextFile(out, MatrixCsv(released, "f"));
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown method '", method, "' (rebalance or gate)"));
}

absl::Status FigureCommand(const ExperimentConfig& c, std::string& stage,
                           const std::string& id) {
  stage = "figure";
  GANPROP_ASSIGN_OR_RETURN(harness::FigureResult r, harness::RunFigure(c, id));
  std::cout << r.csv;
  return absl::OkStatus();
}

absl::Status SummarizeCommand(std::string& stage, const std::vector<std::string>& inputs,
                              const std::string& out) {
  stage = "read";
  std::vector<harness::ResultRow> rows;
  for (const std::string& path : inputs) {
    GANPROP_ASSIGN_OR_RETURN(std::vector<harness::ResultRow> r,
                             harness::ReadResultCsv(path));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  stage = "summarize";
  GANPROP_ASSIGN_OR_RETURN(std::vector<harness::SummaryRow> summary,
                           harness::Summarize(rows));
  const std::string csv = harness::SummaryCsv(summary);
  if (out.empty()) {
    std::cout << csv;
    return absl::OkStatus();
  }
  stage = "write";
  return nn::WriteTextFile(out, csv);
}

absl::Status RunCommand(const ExperimentConfig& c, std::string& stage) {
  stage = "run";
  GANPROP_ASSIGN_OR_RETURN(std::vector<harness::ResultRow> rows, harness::RunTask(c));
  std::cout << "wrote " << rows.size() << " rows to "
            << (fs::path(c.output_dir) / "results.csv").string() << "\n";
  return absl::OkStatus();
}

}  // namespace
}  // namespace ganprop

int main(int argc, char** argv) {
  using namespace ganprop;  // NOLINT
  CLI::App app{"GAN property inference experiments"};
  app.require_subcommand(1);
  CommonOptions common;
  app.add_option("--config", common.config_path, "key = value config file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", common.sets, "key=value override (repeatable)");

  int exit_code = 0;
  auto bind = [&](CLI::App* sub, Action action) {
    sub->callback([&, sub, action] { exit_code = Run(sub->get_name(), common, action); });
  };

  std::string out, in, property, data_path, clf_path, gan_dir, codes_path;
  std::string train_path, test_path, reference_dir, members_path, nonmembers_path;
  std::string method = "rebalance", reservoir_path, figure_id;
  std::vector<std::string> shadow_dirs, inputs;
  int n = 0, index = 0;

  CLI::App* synth = app.add_subcommand("synth", "synthesize a labeled dataset");
  synth->add_option("--n", n, "sample count (default pool_size)");
  synth->add_option("--property", property, "class-1 proportion or full distribution");
  synth->add_option("--out", out, "output CSV")->required();
  bind(synth, [&](const ExperimentConfig& c, std::string& stage) {
    return Synth(c, stage, n, property, out);
  });

  CLI::App* split = app.add_subcommand("split", "split a dataset into disjoint pools");
  split->add_option("--in", in, "input CSV")->required();
  split->add_option("--out-dir", out, "output directory")->required();
  bind(split, [&](const ExperimentConfig& c, std::string& stage) {
    return SplitCommand(c, stage, in, out);
  });

  CLI::App* train_gan = app.add_subcommand("train-gan", "train a GAN on a dataset");
  train_gan->add_option("--data", data_path, "training CSV")->required();
  train_gan->add_option("--out", out, "model directory")->required();
  train_gan->add_option("--index", index, "model index for seed derivation");
  bind(train_gan, [&](const ExperimentConfig& c, std::string& stage) {
    return TrainGanCommand(c, stage, data_path, out, index);
  });

  CLI::App* train_clf = app.add_subcommand("train-clf", "train the property classifier");
  train_clf->add_option("--train", train_path, "training CSV")->required();
  train_clf->add_option("--test", test_path, "test CSV")->required();
  train_clf->add_option("--out", out, "classifier JSON path")->required();
  bind(train_clf, [&](const ExperimentConfig& c, std::string& stage) {
    return TrainClfCommand(c, stage, train_path, test_path, out);
  });

  CLI::App* attack_full = app.add_subcommand("attack-full", "full black-box attack");
  attack_full->add_option("--gan", gan_dir, "target model directory")->required();
  attack_full->add_option("--clf", clf_path, "classifier JSON path")->required();
  attack_full->add_option("--n", n, "blind samples (default full_samples)");
  attack_full->add_option("--out", out, "report JSON (default stdout)");
  bind(attack_full, [&](const ExperimentConfig& c, std::string& stage) {
    return AttackFullCommand(c, stage, gan_dir, clf_path, n, out);
  });

  CLI::App* optimize = app.add_subcommand("optimize-codes", "optimize a latent code set");
  optimize->add_option("--shadow", shadow_dirs, "shadow model directory (repeatable)")
      ->required();
  optimize->add_option("--clf", clf_path, "classifier JSON path")->required();
  optimize->add_option("--out", out, "codes CSV")->required();
  bind(optimize, [&](const ExperimentConfig& c, std::string& stage) {
    return OptimizeCodesCommand(c, stage, shadow_dirs, clf_path, out);
  });

  CLI::App* attack_partial =
      app.add_subcommand("attack-partial", "partial black-box attack");
  attack_partial->add_option("--gan", gan_dir, "target model directory")->required();
  attack_partial->add_option("--clf", clf_path, "classifier JSON path")->required();
  attack_partial->add_option("--codes", codes_path, "codes CSV")->required();
  attack_partial->add_option("--out", out, "report JSON (default stdout)");
  bind(attack_partial, [&](const ExperimentConfig& c, std::string& stage) {
    return AttackPartialCommand(c, stage, gan_dir, clf_path, codes_path, out);
  });

  CLI::App* mia = app.add_subcommand("mia", "membership inference with calibration");
  mia->add_option("--gan", gan_dir, "target model directory")->required();
  mia->add_option("--reference", reference_dir, "reference model directory")->required();
  mia->add_option("--members", members_path, "member CSV")->required();
  mia->add_option("--nonmembers", nonmembers_path, "non-member CSV")->required();
  mia->add_option("--property", property, "inferred property for the enhancement");
  mia->add_option("--out-dir", out, "output directory")->required();
  bind(mia, [&](const ExperimentConfig& c, std::string& stage) {
    return MiaCommand(c, stage, gan_dir, reference_dir, members_path, nonmembers_path,
                      property, out);
  });

  CLI::App* mitigate = app.add_subcommand("mitigate", "rebalance data or gate release");
  mitigate->add_option("--method", method, "rebalance or gate");
  mitigate->add_option("--fake", property, "released property (default uniform)");
  mitigate->add_option("--data", data_path, "dataset CSV (rebalance)");
  mitigate->add_option("--reservoir", reservoir_path, "reservoir CSV (rebalance)");
  mitigate->add_option("--gan", gan_dir, "model directory (gate)");
  mitigate->add_option("--clf", clf_path, "classifier JSON path (gate)");
  mitigate->add_option("--n", n, "samples to draw before gating");
  mitigate->add_option("--out", out, "output CSV")->required();
  bind(mitigate, [&](const ExperimentConfig& c, std::string& stage) {
    return MitigateCommand(c, stage, method, property, data_path, reservoir_path,
                           gan_dir, clf_path, n, out);
  });

  CLI::App* figure = app.add_subcommand("figure", "run one figure analog");
  figure->add_option("--id", figure_id, "f4 f5 f6 f7 f8 f9 f10 f14 f15 f16 f17")
      ->required();
  bind(figure, [&](const ExperimentConfig& c, std::string& stage) {
    return FigureCommand(c, stage, figure_id);
  });

  CLI::App* summarize = app.add_subcommand("summarize", "per-property statistics");
  summarize->add_option("--in", inputs, "result CSV (repeatable)")->required();
  summarize->add_option("--out", out, "summary CSV (default stdout)");
  bind(summarize, [&](const ExperimentConfig&, std::string& stage) {
    return SummarizeCommand(stage, inputs, out);
  });

  CLI::App* run = app.add_subcommand("run", "full task: train, attack, write results");
  bind(run, [&](const ExperimentConfig& c, std::string& stage) {
    return RunCommand(c, stage);
  });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
