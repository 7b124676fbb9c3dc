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

// Micro autoregressive surrogate.
//
// The model maps the L most recent frames to the next one:
//
//   x      = stack of L frames as L*C input channels
//   a      = tanh(conv_r(W1, x) + b1)          hidden channels
//   delta  = conv_r(W2, a) + b2                 C output channels
//   next   = clamp(last_frame + delta, -clamp, +clamp)
//
// conv_r is a 1D convolution of radius r with periodic or reflective
// padding. Tap t of output cell i reads cell i + t - r.
//
// theta layout: W1[hidden][L*C][2r+1], b1[hidden], W2[C][hidden][2r+1], b2[C].
// Input channel l*C + c holds channel c of history frame l, oldest first. Parameter gradients are computed by hand-written reverse mode
// through entire multi-step rollouts; the clamp passes gradient through
// inside the bound and blocks it outside.

#ifndef GITS_CORE_SURROGATE_HPP_
#define GITS_CORE_SURROGATE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/pde_data.hpp"

namespace gits {

enum class Padding { kPeriodic, kReflect };

Padding PaddingFor(Boundary b);

struct SurrogateArch {
  int history_len = 4;
  int hidden = 8;
  int radius = 2;
  int channels = 1;
  Padding padding = Padding::kPeriodic;
  double clamp = 10.0;  // normalized-space output bound

  int input_channels() const { return history_len * channels; }
  int kernel_width() const { return 2 * radius + 1; }
  std::size_t param_count() const;
  void Validate() const;
  bool operator==(const SurrogateArch&) const = default;
};

struct SurrogateParams {
  SurrogateArch arch;
  std::vector<double> theta;

  std::size_t param_count() const { return theta.size(); }
  // Throws kShape if theta does not match the architecture, kInvalidArgument
  // on non-finite entries.
  void Validate() const;
};

SurrogateParams ZeroParams(const SurrogateArch& arch);
// Scaled-uniform first layer; output layer and biases start at zero, so the
// initial model is exact persistence.
SurrogateParams InitParams(const SurrogateArch& arch, std::uint64_t seed);

// One frame, (cell, channel) layout.
using Frame = std::vector<double>;

Frame ToFrame(std::span<const float> f);

// `history` holds exactly L frames, oldest first.
Frame Forward(const SurrogateParams& params, std::span<const Frame> history);

// Output holds `steps` predicted frames; step h reads the L most recent of
// (history ++ predictions so far).
std::vector<Frame> Rollout(const SurrogateParams& params,
                           std::span<const Frame> history, int steps);

struct StartPair {
  int trajectory = 0;
  int start = 0;  // k: history is frames k-L+1..k, first target is k+1
};

// H_k = min(H, T_c - 1 - k).
int EffectiveHorizon(int horizon, int t_count, int start);

inline constexpr double kNrmseEpsilon = 1e-12;

// ||a - b|| / (||b|| + eps) over one frame.
double FrameNrmse(std::span<const double> prediction,
                  std::span<const double> target);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// loss = mean over pairs of (1/H_k) * sum_h NRMSE(pred_{k+h}, x_{k+h})^2,
// with the rollout seeded by ground-truth frames k-L+1..k. When every pair
// shares k this is the batch-mean short-rollout loss. grad is the exact
// gradient with respect to params.theta.
LossGrad RolloutLossGrad(const SurrogateParams& params,
                         std::span<const StartPair> batch, int horizon,
                         const TrajectoryDataset& ds);

}  // namespace gits

#endif  // GITS_CORE_SURROGATE_HPP_
