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

#include "ganprop/gan/gan.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "ganprop/common/random.h"
#include "ganprop/nn/serialization.h"
#include "ganprop/nn/tape.h"

namespace ganprop::gan {
namespace {

using nlohmann::json;
using nn::Tape;
using nn::Var;

// Cycles through shuffled epochs of row indices.
class BatchSampler {
 public:
  BatchSampler(int n, uint64_t seed) : order_(n), rng_(seed) {
    std::iota(order_.begin(), order_.end(), 0);
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  Matrix Next(const Matrix& data, int m) {
    Matrix batch(m, data.cols());
    for (int i = 0; i < m; ++i) {
      if (pos_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
      }
      batch.row(i) = data.row(order_[pos_++]);
    }
    return batch;
  }

 private:
  std::vector<int> order_;
  size_t pos_ = 0;
  Rng rng_;
};

std::vector<Matrix> Values(std::span<const Var> vars) {
  std::vector<Matrix> out;
  out.reserve(vars.size());
  for (const Var& v : vars) out.push_back(v.value());
  return out;
}

absl::Status ApplyUpdate(nn::DenseNetwork& net, nn::Optimizer& opt,
                         std::span<const Matrix> grads) {
  std::vector<Matrix> params = net.ParameterValues();
  if (absl::Status s = opt.Step(params, grads); !s.ok()) return s;
  return net.SetParameterValues(params);
}

}  // namespace

std::string GanLossName(GanLoss loss) {
  return loss == GanLoss::kMinimax ? "minimax" : "wgan_gp";
}

absl::StatusOr<GanLoss> ParseGanLoss(std::string_view name) {
  if (name == "minimax") return GanLoss::kMinimax;
  if (name == "wgan_gp") return GanLoss::kWganGp;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown GAN loss '", std::string(name), "'"));
}

absl::Status GanConfig::Validate() const {
  if (absl::Status s = generator.Validate(); !s.ok()) return s;
  if (absl::Status s = discriminator.Validate(); !s.ok()) return s;
  if (absl::Status s = generator_optimizer.Validate(); !s.ok()) return s;
  if (absl::Status s = discriminator_optimizer.Validate(); !s.ok()) return s;
  if (generator.input_width() != prior.dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "generator input width ", generator.input_width(),
        " != latent dim ", prior.dim));
  }
  if (discriminator.input_width() != generator.output_width()) {
    return absl::InvalidArgumentError(
        "discriminator input width must equal generator output width");
  }
  if (discriminator.output_width() != 1) {
    return absl::InvalidArgumentError("discriminator must have a scalar head");
  }
  const nn::ActivationKind head = discriminator.activations.back().kind;
  if (loss == GanLoss::kWganGp) {
    if (!(gp_lambda > 0.0)) {
      return absl::InvalidArgumentError("wgan_gp requires gp_lambda > 0");
    }
    if (head != nn::ActivationKind::kIdentity) {
      return absl::InvalidArgumentError(
          "wgan_gp requires an identity (linear) critic head");
    }
  } else if (head != nn::ActivationKind::kSigmoid) {
    return absl::InvalidArgumentError("minimax requires a sigmoid head");
  }
  if (n_critic < 1) return absl::InvalidArgumentError("n_critic must be >= 1");
  if (batch_size < 1) return absl::InvalidArgumentError("batch_size must be >= 1");
  if (train_steps < 0) {
    return absl::InvalidArgumentError("train_steps must be non-negative");
  }
  return absl::OkStatus();
}

GanConfig GanConfig::WganGpDefaults(int latent_dim, int sample_width,
                                    std::vector<int> hidden,
                                    uint64_t init_seed) {
  GanConfig c;
  c.prior = {PriorKind::kGaussianStandard, latent_dim};
  c.generator = nn::DenseNetworkSpec::Mlp(
      latent_dim, hidden, sample_width, nn::Activation::LeakyRelu(0.2),
      nn::Activation::Tanh(), DeriveSeed(init_seed, "generator_init"));
  c.discriminator = nn::DenseNetworkSpec::Mlp(
      sample_width, hidden, 1, nn::Activation::LeakyRelu(0.2),
      nn::Activation::Identity(), DeriveSeed(init_seed, "discriminator_init"));
  c.loss = GanLoss::kWganGp;
  c.gp_lambda = 10.0;
  c.n_critic = 3;
  c.batch_size = 100;
  c.generator_optimizer = nn::OptimizerConfig::Adam(0.0002, 0.9, 0.999);
  c.discriminator_optimizer = c.generator_optimizer;
  return c;
}

GanConfig GanConfig::MinimaxDefaults(int latent_dim, int sample_width,
                                     std::vector<int> hidden,
                                     uint64_t init_seed) {
  GanConfig c = WganGpDefaults(latent_dim, sample_width, hidden, init_seed);
  c.discriminator.activations.back() = nn::Activation::Sigmoid();
  c.loss = GanLoss::kMinimax;
  c.gp_lambda = 0.0;
  c.n_critic = 1;
  c.generator_optimizer = nn::OptimizerConfig::Adam(0.0002, 0.5, 0.999);
  c.discriminator_optimizer = c.generator_optimizer;
  return c;
}

json GanConfigToJson(const GanConfig& c) {
  return {{"generator", nn::SpecToJson(c.generator)},
          {"discriminator", nn::SpecToJson(c.discriminator)},
          {"prior", {{"kind", PriorKindName(c.prior.kind)}, {"dim", c.prior.dim}}},
          {"loss", GanLossName(c.loss)},
          {"gp_lambda", c.gp_lambda},
          {"n_critic", c.n_critic},
          {"batch_size", c.batch_size},
          {"generator_optimizer", nn::OptimizerToJson(c.generator_optimizer)},
          {"discriminator_optimizer",
           nn::OptimizerToJson(c.discriminator_optimizer)},
          {"train_steps", c.train_steps},
          {"seed", c.seed}};
}

absl::StatusOr<GanConfig> GanConfigFromJson(const json& j) {
  GanConfig c;
  try {
    auto gen = nn::SpecFromJson(j.at("generator"));
    auto disc = nn::SpecFromJson(j.at("discriminator"));
    auto prior_kind = ParsePriorKind(j.at("prior").at("kind").get<std::string>());
    auto loss = ParseGanLoss(j.at("loss").get<std::string>());
    auto gopt = nn::OptimizerFromJson(j.at("generator_optimizer"));
    auto dopt = nn::OptimizerFromJson(j.at("discriminator_optimizer"));
    for (const absl::Status& s :
         {gen.status(), disc.status(), prior_kind.status(), loss.status(),
          gopt.status(), dopt.status()}) {
      if (!s.ok()) return s;
    }
    c.generator = *gen;
    c.discriminator = *disc;
    c.prior = {*prior_kind, j.at("prior").at("dim").get<int>()};
    c.loss = *loss;
    c.gp_lambda = j.at("gp_lambda").get<double>();
    c.n_critic = j.at("n_critic").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.generator_optimizer = *gopt;
    c.discriminator_optimizer = *dopt;
    c.train_steps = j.at("train_steps").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed GAN config: ", e.what()));
  }
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

Generator TrainedGan::AsGenerator() const {
  // The config was validated at training time, so this cannot fail.
  return *Generator::Create(generator, config.prior);
}

absl::StatusOr<TrainedGan> TrainGan(const data::LabeledDataset& dataset,
                                    const GanConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (dataset.size() == 0) {
    return absl::InvalidArgumentError("GAN training set is empty");
  }
  if (dataset.width() != config.generator.output_width()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sample width ", dataset.width(), " != generator output width ",
        config.generator.output_width()));
  }
  absl::StatusOr<nn::DenseNetwork> g = nn::DenseNetwork::Create(config.generator);
  if (!g.ok()) return g.status();
  absl::StatusOr<nn::DenseNetwork> d =
      nn::DenseNetwork::Create(config.discriminator);
  if (!d.ok()) return d.status();

  TrainedGan out{*std::move(g), *std::move(d), config, {}};
  nn::Optimizer g_opt(config.generator_optimizer);
  nn::Optimizer d_opt(config.discriminator_optimizer);
  BatchSampler batches(dataset.size(), DeriveSeed(config.seed, "gan_batches"));
  Rng latent_rng(DeriveSeed(config.seed, "gan_latent"));
  Rng interp_rng(DeriveSeed(config.seed, "gan_interpolation"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = config.batch_size;
  const bool wgan = config.loss == GanLoss::kWganGp;

  auto draw_codes = [&]() {
    return config.prior.Sample(m, latent_rng());
  };
  auto fail = [&](std::string why) {
    out.log.failed = true;
    out.log.failure = std::move(why);
  };

  for (int step = 0; step < config.train_steps && !out.log.failed; ++step) {
    TrainingStep record;
    record.step = step;
    for (int c = 0; c < config.n_critic; ++c) {
      const Matrix real = batches.Next(dataset.samples, m);
      Tape tape;
      const Var z = tape.Constant(draw_codes());
      const Var fake = out.generator.Apply(out.generator.Bind(tape, false), z);
      const nn::BoundParameters dp = out.discriminator.Bind(tape, true);
      const Var real_v = tape.Constant(real);
      Var loss;
      double penalty_value = 0.0;
      if (wgan) {
        const Var d_real = out.discriminator.Apply(dp, real_v);
        const Var d_fake = out.discriminator.Apply(dp, fake);
        Matrix alpha(m, 1);
        for (int i = 0; i < m; ++i) alpha(i, 0) = unit(interp_rng);
        Matrix mixed = real;
        for (int i = 0; i < m; ++i) {
          mixed.row(i) = alpha(i, 0) * real.row(i) +
                         (1.0 - alpha(i, 0)) * fake.value().row(i);
        }
        const Var x_hat = tape.Variable(std::move(mixed));
        const Var d_hat = out.discriminator.Apply(dp, x_hat);
        absl::StatusOr<std::vector<Var>> gx =
            tape.Grad(nn::SumAll(d_hat), std::vector<Var>{x_hat},
                      /*create_graph=*/true);
        if (!gx.ok()) return gx.status();
        const Var norms =
            nn::Sqrt(nn::AddScalar(nn::RowSum(nn::Square((*gx)[0])), 1e-12));
        const Var penalty = nn::Mean(nn::Square(nn::AddScalar(norms, -1.0)));
        penalty_value = penalty.scalar();
        loss = nn::Add(nn::Sub(nn::Mean(d_fake), nn::Mean(d_real)),
                       nn::Scale(penalty, config.gp_lambda));
      } else {
        const Var a_real = out.discriminator.Apply(dp, real_v, false);
        const Var a_fake = out.discriminator.Apply(dp, fake, false);
        // -[log D(x) + log(1 - D(G(z)))] on logits.
        loss = nn::Add(nn::Mean(nn::Softplus(nn::Scale(a_real, -1.0))),
                       nn::Mean(nn::Softplus(a_fake)));
      }
      if (!std::isfinite(loss.scalar())) {
        fail(absl::StrCat("non-finite discriminator loss at step ", step));
        break;
      }
      const std::vector<Var> params = dp.All();
      absl::StatusOr<std::vector<Var>> grads =
          tape.Grad(loss, params, /*create_graph=*/false);
      if (!grads.ok()) return grads.status();
      if (absl::Status s = ApplyUpdate(out.discriminator, d_opt, Values(*grads));
          !s.ok()) {
        fail(absl::StrCat("discriminator step ", step, ": ", s.message()));
        break;
      }
      record.discriminator_loss = loss.scalar();
      record.gradient_penalty = penalty_value;
    }
    if (out.log.failed) break;

    Tape tape;
    const nn::BoundParameters gp = out.generator.Bind(tape, true);
    const Var fake = out.generator.Apply(gp, tape.Constant(draw_codes()));
    const nn::BoundParameters dp = out.discriminator.Bind(tape, false);
    Var loss;
    if (wgan) {
      loss = nn::Scale(nn::Mean(out.discriminator.Apply(dp, fake)), -1.0);
    } else {
      // Non-saturating form of the generator's side of the minimax game.
      loss = nn::Mean(
          nn::Softplus(nn::Scale(out.discriminator.Apply(dp, fake, false), -1.0)));
    }
    if (!std::isfinite(loss.scalar())) {
      fail(absl::StrCat("non-finite generator loss at step ", step));
      break;
    }
    const std::vector<Var> params = gp.All();
    absl::StatusOr<std::vector<Var>> grads =
        tape.Grad(loss, params, /*create_graph=*/false);
    if (!grads.ok()) return grads.status();
    if (absl::Status s = ApplyUpdate(out.generator, g_opt, Values(*grads));
        !s.ok()) {
      fail(absl::StrCat("generator step ", step, ": ", s.message()));
      break;
    }
    record.generator_loss = loss.scalar();
    out.log.steps.push_back(record);
  }
  return out;
}

absl::Status SaveGan(const TrainedGan& gan, const std::filesystem::path& dir) {
  if (absl::Status s = nn::SaveNetwork(gan.generator, dir / "generator.json");
      !s.ok()) {
    return s;
  }
  if (absl::Status s =
          nn::SaveNetwork(gan.discriminator, dir / "discriminator.json");
      !s.ok()) {
    return s;
  }
  json config = GanConfigToJson(gan.config);
  config["training_failed"] = gan.log.failed;
  config["training_failure"] = gan.log.failure;
  if (absl::Status s =
          nn::WriteTextFile(dir / "config.json", config.dump(1) + "\n");
      !s.ok()) {
    return s;
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "step,discriminator_loss,generator_loss,gradient_penalty\n";
  for (const TrainingStep& s : gan.log.steps) {
    csv << s.step << ',' << s.discriminator_loss << ',' << s.generator_loss
        << ',' << s.gradient_penalty << '\n';
  }
  return nn::WriteTextFile(dir / "training_log.csv", csv.str());
}

absl::StatusOr<TrainedGan> LoadGan(const std::filesystem::path& dir) {
  auto config_json = nn::ReadJsonFile(dir / "config.json");
  if (!config_json.ok()) return config_json.status();
  auto config = GanConfigFromJson(*config_json);
  if (!config.ok()) return config.status();
  auto g = nn::LoadNetwork(dir / "generator.json");
  if (!g.ok()) return g.status();
  auto d = nn::LoadNetwork(dir / "discriminator.json");
  if (!d.ok()) return d.status();
  TrainedGan out{*std::move(g), *std::move(d), *config, {}};
  out.log.failed = config_json->value("training_failed", false);
  out.log.failure = config_json->value("training_failure", std::string());
  auto log_text = nn::ReadTextFile(dir / "training_log.csv");
  if (log_text.ok()) {
    std::vector<std::string> lines =
        absl::StrSplit(*log_text, '\n', absl::SkipEmpty());
    for (size_t i = 1; i < lines.size(); ++i) {
      std::vector<std::string> cells = absl::StrSplit(lines[i], ',');
      if (cells.size() != 4) continue;
      out.log.steps.push_back({std::stoi(cells[0]), std::stod(cells[1]),
                               std::stod(cells[2]), std::stod(cells[3])});
    }
  }
  return out;
}

absl::StatusOr<Generator> LoadGenerator(const std::filesystem::path& dir) {
  auto config_json = nn::ReadJsonFile(dir / "config.json");
  if (!config_json.ok()) return config_json.status();
  LatentPrior prior;
  try {
    auto kind = ParsePriorKind(
        config_json->at("prior").at("kind").get<std::string>());
    if (!kind.ok()) return kind.status();
    prior = {*kind, config_json->at("prior").at("dim").get<int>()};
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed GAN config: ", e.what()));
  }
  auto g = nn::LoadNetwork(dir / "generator.json");
  if (!g.ok()) return g.status();
  return Generator::Create(*std::move(g), prior);
}

}  // namespace ganprop::gan
