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

#ifndef GITS_CORE_TRAINING_HPP_
#define GITS_CORE_TRAINING_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/pde_data.hpp"
#include "core/surrogate.hpp"

namespace gits {

struct TrainConfig {
  double lr = 1e-3;
  int epochs_max = 100;
  int batch_size = 64;
  double grad_clip = 1.0;
  double clamp = 10.0;
  int min_epochs = 10;
  int patience = 5;
  std::uint64_t seed = 0;
  // When false, runs exactly epochs_max epochs and returns the final
  // parameters (pilot protocol).
  bool early_stopping = true;

  void Validate() const;
};

// Adam with bias correction; beta1=0.9, beta2=0.999, eps=1e-8.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n, double lr, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void Step(std::vector<double>& theta, std::span<const double> grad);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

// Rescales grad in place so that its L2 norm is at most max_norm. Returns
// the norm before clipping.
double ClipGradNorm(std::vector<double>& grad, double max_norm);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_nrmse = 0.0;
};

struct TrainResult {
  SurrogateParams params;
  std::vector<EpochRecord> history;
  int best_epoch = 0;  // 0 when no epoch ran
};

// Mini-batch training on the one-step loss over D(starts) drawn from the
// training split. Deterministic under cfg.seed.
TrainResult Train(const SurrogateParams& init, std::span<const int> starts,
                  const TrajectoryDataset& ds, const TrainConfig& cfg);

// Mean one-step loss over D(starts) on the training split.
double OneStepLoss(const SurrogateParams& params, std::span<const int> starts,
                   const TrajectoryDataset& ds);

struct Checkpoint {
  SurrogateParams params;
  std::uint64_t seed = 0;
  int epoch = 0;
};

// <stem>.json header (arch, seed, epoch) beside <stem>.f64 little-endian
// float64 payload.
void WriteCheckpoint(const Checkpoint& ckpt, const std::string& stem);
Checkpoint ReadCheckpoint(const std::string& stem);

}  // namespace gits

#endif  // GITS_CORE_TRAINING_HPP_
