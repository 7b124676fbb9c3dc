// Copyright 2026 The Authors.
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

#include "core/training.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "core/common.hpp"
#include "core/diagnostics.hpp"
#include "json.hpp"

namespace gits {

void TrainConfig::Validate() const {
  Require(lr > 0.0, ErrorCode::kConfig, "lr must be > 0");
  Require(clamp > 0.0, ErrorCode::kConfig, "clamp must be > 0");
  Require(patience >= 1, ErrorCode::kConfig, "patience must be >= 1");
  Require(batch_size >= 1, ErrorCode::kConfig, "batch_size must be >= 1");
  Require(epochs_max >= 0, ErrorCode::kConfig, "epochs_max must be >= 0");
  Require(min_epochs >= 0, ErrorCode::kConfig, "min_epochs must be >= 0");
  Require(grad_clip > 0.0, ErrorCode::kConfig, "grad_clip must be > 0");
}

AdamOptimizer::AdamOptimizer(std::size_t n, double lr, double beta1,
                             double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void AdamOptimizer::Step(std::vector<double>& theta,
                         std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    theta[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

double ClipGradNorm(std::vector<double>& grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grad) g *= scale;
  }
  return norm;
}

namespace {

std::vector<StartPair> TrainingPairs(std::span<const int> starts,
                                     const TrajectoryDataset& ds,
                                     int history_len) {
  Require(!starts.empty(), ErrorCode::kInvalidArgument,
          "training requires a nonempty start set");
  std::vector<int> sorted(starts.begin(), starts.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int k : sorted) {
    if (k < history_len || k > ds.t_count() - 2) {
      Throw(ErrorCode::kInvalidArgument,
            "start " + std::to_string(k) + " is not an admissible candidate");
    }
  }
  const std::vector<int> train = ds.trajectories(Split::kTrain);
  Require(!train.empty(), ErrorCode::kInvalidArgument,
          "dataset has no training trajectories");
  std::vector<StartPair> pairs;
  pairs.reserve(train.size() * sorted.size());
  for (int n : train) {
    for (int k : sorted) pairs.push_back({n, k});
  }
  return pairs;
}

}  // namespace

double OneStepLoss(const SurrogateParams& params, std::span<const int> starts,
                   const TrajectoryDataset& ds) {
  const auto pairs = TrainingPairs(starts, ds, params.arch.history_len);
  return RolloutLossGrad(params, pairs, 1, ds).loss;
}

TrainResult Train(const SurrogateParams& init, std::span<const int> starts,
                  const TrajectoryDataset& ds, const TrainConfig& cfg) {
  cfg.Validate();
  init.Validate();
  TrainResult result{init, {}, 0};
  if (cfg.epochs_max == 0) return result;

  SurrogateParams params = init;
  params.arch.clamp = cfg.clamp;
  std::vector<StartPair> pairs =
      TrainingPairs(starts, ds, params.arch.history_len);

  std::mt19937_64 rng(DeriveSeed(cfg.seed, "shuffle"));
  AdamOptimizer adam(params.theta.size(), cfg.lr);
  SurrogateParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs_max; ++epoch) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < pairs.size();
         b += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t e =
          std::min(pairs.size(), b + static_cast<std::size_t>(cfg.batch_size));
      std::span<const StartPair> batch(pairs.data() + b, e - b);
      LossGrad lg = RolloutLossGrad(params, batch, 1, ds);
      if (!std::isfinite(lg.loss)) {
        Throw(ErrorCode::kDivergence,
              "training diverged at epoch " + std::to_string(epoch) +
                  ": non-finite loss");
      }
      loss_sum += lg.loss * static_cast<double>(e - b);
      ClipGradNorm(lg.grad, cfg.grad_clip);
      adam.Step(params.theta, lg.grad);
    }
    for (double v : params.theta) {
      if (!std::isfinite(v)) {
        Throw(ErrorCode::kDivergence,
              "training diverged at epoch " + std::to_string(epoch) +
                  ": non-finite parameters");
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(pairs.size());
    rec.val_nrmse = RolloutNrmse(params, ds, Split::kVal);
    result.history.push_back(rec);
    if (!cfg.early_stopping) continue;

    if (!std::isfinite(rec.val_nrmse)) {
      Throw(ErrorCode::kDivergence,
            "training diverged at epoch " + std::to_string(epoch) +
                ": non-finite validation nRMSE");
    }
    if (rec.val_nrmse < best_val) {
      best_val = rec.val_nrmse;
      best = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (epoch >= cfg.min_epochs && since_best >= cfg.patience) break;
  }

  if (cfg.early_stopping) {
    result.params = std::move(best);
  } else {
    result.params = std::move(params);
    result.best_epoch = static_cast<int>(result.history.size());
  }
  return result;
}

namespace {

std::string_view PaddingName(Padding p) {
  return p == Padding::kPeriodic ? "periodic" : "reflect";
}

}  // namespace

void WriteCheckpoint(const Checkpoint& ckpt, const std::string& stem_in) {
  ckpt.params.Validate();
  const std::string stem = StripExtension(stem_in, ".json");
  const std::filesystem::path payload = stem + ".f64";
  const auto& a = ckpt.params.arch;
  nlohmann::json header;
  header["format_version"] = 1;
  header["arch"] = {{"history_len", a.history_len}, {"hidden", a.hidden},
                    {"radius", a.radius},           {"channels", a.channels},
                    {"padding", std::string(PaddingName(a.padding))},
                    {"clamp", a.clamp}};
  header["param_count"] = ckpt.params.theta.size();
  header["seed"] = ckpt.seed;
  header["epoch"] = ckpt.epoch;
  header["dtype"] = "float64-le";
  header["payload"] = payload.filename().string();
  {
    std::ofstream out(stem + ".json");
    Require(static_cast<bool>(out), ErrorCode::kIo,
            "cannot open " + stem + ".json for writing");
    out << header.dump(2) << "\n";
  }
  std::ofstream out(payload, std::ios::binary);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open " + payload.string() + " for writing");
  for (double v : ckpt.params.theta) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) {
      bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFFu);
    }
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "failed writing " + payload.string());
}

Checkpoint ReadCheckpoint(const std::string& stem_in) {
  const std::string stem = StripExtension(stem_in, ".json");
  std::ifstream in(stem + ".json");
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + stem + ".json");
  Checkpoint ckpt;
  std::string payload_name;
  std::size_t count = 0;
  try {
    nlohmann::json header;
    in >> header;
    Require(header.at("format_version").get<int>() == 1, ErrorCode::kFormat,
            "unsupported checkpoint format_version");
    const auto& a = header.at("arch");
    auto& arch = ckpt.params.arch;
    arch.history_len = a.at("history_len").get<int>();
    arch.hidden = a.at("hidden").get<int>();
    arch.radius = a.at("radius").get<int>();
    arch.channels = a.at("channels").get<int>();
    arch.padding = a.at("padding").get<std::string>() == "periodic"
                       ? Padding::kPeriodic
                       : Padding::kReflect;
    arch.clamp = a.at("clamp").get<double>();
    count = header.at("param_count").get<std::size_t>();
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.epoch = header.at("epoch").get<int>();
    payload_name = header.value(
        "payload", std::filesystem::path(stem).filename().string() + ".f64");
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kFormat, "malformed checkpoint header: " +
                                  std::string(e.what()));
  }
  const auto payload = std::filesystem::path(stem).parent_path() / payload_name;
  std::ifstream pin(payload, std::ios::binary | std::ios::ate);
  Require(static_cast<bool>(pin), ErrorCode::kIo,
          "cannot open " + payload.string());
  const auto size = static_cast<std::size_t>(pin.tellg());
  Require(size == count * 8, ErrorCode::kFormat,
          "checkpoint payload length mismatch");
  pin.seekg(0);
  ckpt.params.theta.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char bytes[8];
    pin.read(reinterpret_cast<char*>(bytes), 8);
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    }
    ckpt.params.theta[i] = std::bit_cast<double>(bits);
  }
  Require(static_cast<bool>(pin), ErrorCode::kIo,
          "failed reading " + payload.string());
  ckpt.params.Validate();
  return ckpt;
}

}  // namespace gits
