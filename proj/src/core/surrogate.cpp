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

#include "core/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "core/common.hpp"

namespace gits {

Padding PaddingFor(Boundary b) {
  return b == Boundary::kPeriodic ? Padding::kPeriodic : Padding::kReflect;
}

std::size_t SurrogateArch::param_count() const {
  const std::size_t h = static_cast<std::size_t>(hidden);
  const std::size_t k = static_cast<std::size_t>(kernel_width());
  const std::size_t cin = static_cast<std::size_t>(input_channels());
  const std::size_t c = static_cast<std::size_t>(channels);
  return h * cin * k + h + c * h * k + c;
}

void SurrogateArch::Validate() const {
  Require(history_len >= 1 && hidden >= 1 && radius >= 0 && channels >= 1,
          ErrorCode::kShape, "invalid surrogate architecture");
  Require(clamp > 0.0, ErrorCode::kInvalidArgument, "clamp must be > 0");
}

void SurrogateParams::Validate() const {
  arch.Validate();
  if (theta.size() != arch.param_count()) {
    Throw(ErrorCode::kShape,
          "parameter vector has " + std::to_string(theta.size()) +
              " entries, architecture requires " +
              std::to_string(arch.param_count()));
  }
  for (double v : theta) {
    Require(std::isfinite(v), ErrorCode::kInvalidArgument,
            "non-finite surrogate parameter");
  }
}

namespace {

// Offsets into theta.
//   W1[h][cin][t], b1[h], W2[c][h][t], b2[c]
struct Layout {
  int hidden, cin, channels, kernel, radius;
  std::size_t w1, b1, w2, b2;

  explicit Layout(const SurrogateArch& a)
      : hidden(a.hidden),
        cin(a.input_channels()),
        channels(a.channels),
        kernel(a.kernel_width()),
        radius(a.radius) {
    w1 = 0;
    b1 = w1 + static_cast<std::size_t>(hidden) * cin * kernel;
    w2 = b1 + static_cast<std::size_t>(hidden);
    b2 = w2 + static_cast<std::size_t>(channels) * hidden * kernel;
  }
  std::size_t W1(int h, int ci, int t) const {
    return w1 + (static_cast<std::size_t>(h) * cin + ci) * kernel + t;
  }
  std::size_t W2(int c, int h, int t) const {
    return w2 + (static_cast<std::size_t>(c) * hidden + h) * kernel + t;
  }
};

// tap[t * n + i] = source cell for output cell i and tap t.
std::vector<int> TapTable(int n, int radius, Padding padding) {
  const int kw = 2 * radius + 1;
  std::vector<int> table(static_cast<std::size_t>(kw) * n);
  for (int t = 0; t < kw; ++t) {
    for (int i = 0; i < n; ++i) {
      int j = i + t - radius;
      if (padding == Padding::kPeriodic) {
        j = ((j % n) + n) % n;
      } else {
        // Symmetric reflection about the boundary face (ghost mirrors).
        while (j < 0 || j >= n) {
          if (j < 0) j = -j - 1;
          if (j >= n) j = 2 * n - 1 - j;
        }
      }
      table[static_cast<std::size_t>(t) * n + i] = j;
    }
  }
  return table;
}

// Per-step activations retained for the reverse sweep.
struct StepTape {
  std::vector<double> x;   // cin * n, channel-major
  std::vector<double> a;   // hidden * n
  std::vector<double> y;   // frame layout, before clamping
};

class Network {
 public:
  Network(const SurrogateParams& params, int cells)
      : arch_(params.arch),
        lay_(params.arch),
        theta_(params.theta.data()),
        n_(cells),
        taps_(TapTable(cells, params.arch.radius, params.arch.padding)) {}

  int cells() const { return n_; }
  std::size_t frame_size() const {
    return static_cast<std::size_t>(n_) * arch_.channels;
  }

  // window[l] points at frame l (oldest first) of the input history.
  void ForwardStep(const double* const* window, StepTape& tape,
                   double* pred) const {
    const int n = n_;
    const int C = arch_.channels;
    const int L = arch_.history_len;
    tape.x.assign(static_cast<std::size_t>(lay_.cin) * n, 0.0);
    for (int l = 0; l < L; ++l) {
      for (int c = 0; c < C; ++c) {
        double* row = &tape.x[static_cast<std::size_t>(l * C + c) * n];
        for (int i = 0; i < n; ++i) row[i] = window[l][i * C + c];
      }
    }
    tape.a.assign(static_cast<std::size_t>(lay_.hidden) * n, 0.0);
    for (int h = 0; h < lay_.hidden; ++h) {
      double* z = &tape.a[static_cast<std::size_t>(h) * n];
      const double bias = theta_[lay_.b1 + h];
      for (int i = 0; i < n; ++i) z[i] = bias;
      for (int ci = 0; ci < lay_.cin; ++ci) {
        const double* xr = &tape.x[static_cast<std::size_t>(ci) * n];
        for (int t = 0; t < lay_.kernel; ++t) {
          const double w = theta_[lay_.W1(h, ci, t)];
          const int* tap = &taps_[static_cast<std::size_t>(t) * n];
          for (int i = 0; i < n; ++i) z[i] += w * xr[tap[i]];
        }
      }
      for (int i = 0; i < n; ++i) z[i] = std::tanh(z[i]);
    }
    tape.y.assign(frame_size(), 0.0);
    const double* last = window[L - 1];
    for (int c = 0; c < C; ++c) {
      const double bias = theta_[lay_.b2 + c];
      for (int i = 0; i < n; ++i) tape.y[i * C + c] = last[i * C + c] + bias;
      for (int h = 0; h < lay_.hidden; ++h) {
        const double* ar = &tape.a[static_cast<std::size_t>(h) * n];
        for (int t = 0; t < lay_.kernel; ++t) {
          const double w = theta_[lay_.W2(c, h, t)];
          const int* tap = &taps_[static_cast<std::size_t>(t) * n];
          for (int i = 0; i < n; ++i) tape.y[i * C + c] += w * ar[tap[i]];
        }
      }
    }
    const double bound = arch_.clamp;
    for (std::size_t j = 0; j < tape.y.size(); ++j) {
      pred[j] = std::clamp(tape.y[j], -bound, bound);
    }
  }

  // Accumulates into dtheta and, for non-null entries, dwindow[l].
  void BackwardStep(const StepTape& tape, const double* dpred, double* dtheta,
                    double* const* dwindow) const {
    const int n = n_;
    const int C = arch_.channels;
    const int L = arch_.history_len;
    const double bound = arch_.clamp;

    std::vector<double> dy(frame_size());
    for (std::size_t j = 0; j < dy.size(); ++j) {
      dy[j] = std::abs(tape.y[j]) <= bound ? dpred[j] : 0.0;
    }
    if (dwindow[L - 1] != nullptr) {
      for (std::size_t j = 0; j < dy.size(); ++j) dwindow[L - 1][j] += dy[j];
    }

    std::vector<double> da(static_cast<std::size_t>(lay_.hidden) * n, 0.0);
    for (int c = 0; c < C; ++c) {
      double db = 0.0;
      for (int i = 0; i < n; ++i) db += dy[i * C + c];
      dtheta[lay_.b2 + c] += db;
      for (int h = 0; h < lay_.hidden; ++h) {
        const double* ar = &tape.a[static_cast<std::size_t>(h) * n];
        double* dar = &da[static_cast<std::size_t>(h) * n];
        for (int t = 0; t < lay_.kernel; ++t) {
          const std::size_t wi = lay_.W2(c, h, t);
          const double w = theta_[wi];
          const int* tap = &taps_[static_cast<std::size_t>(t) * n];
          double dw = 0.0;
          for (int i = 0; i < n; ++i) {
            const double g = dy[i * C + c];
            dw += g * ar[tap[i]];
            dar[tap[i]] += g * w;
          }
          dtheta[wi] += dw;
        }
      }
    }

    std::vector<double> dx(static_cast<std::size_t>(lay_.cin) * n, 0.0);
    for (int h = 0; h < lay_.hidden; ++h) {
      const double* ar = &tape.a[static_cast<std::size_t>(h) * n];
      double* dz = &da[static_cast<std::size_t>(h) * n];
      double db = 0.0;
      for (int i = 0; i < n; ++i) {
        dz[i] *= 1.0 - ar[i] * ar[i];
        db += dz[i];
      }
      dtheta[lay_.b1 + h] += db;
      for (int ci = 0; ci < lay_.cin; ++ci) {
        const double* xr = &tape.x[static_cast<std::size_t>(ci) * n];
        double* dxr = &dx[static_cast<std::size_t>(ci) * n];
        for (int t = 0; t < lay_.kernel; ++t) {
          const std::size_t wi = lay_.W1(h, ci, t);
          const double w = theta_[wi];
          const int* tap = &taps_[static_cast<std::size_t>(t) * n];
          double dw = 0.0;
          for (int i = 0; i < n; ++i) {
            dw += dz[i] * xr[tap[i]];
            dxr[tap[i]] += dz[i] * w;
          }
          dtheta[wi] += dw;
        }
      }
    }

    for (int l = 0; l < L; ++l) {
      if (dwindow[l] == nullptr) continue;
      for (int c = 0; c < C; ++c) {
        const double* row = &dx[static_cast<std::size_t>(l * C + c) * n];
        for (int i = 0; i < n; ++i) dwindow[l][i * C + c] += row[i];
      }
    }
  }

 private:
  const SurrogateArch& arch_;
  Layout lay_;
  const double* theta_;
  int n_;
  std::vector<int> taps_;
};

int CellsOf(const SurrogateArch& arch, std::size_t frame_size) {
  Require(frame_size > 0 && frame_size % static_cast<std::size_t>(arch.channels) == 0,
          ErrorCode::kShape, "frame size is not a multiple of channel count");
  return static_cast<int>(frame_size / static_cast<std::size_t>(arch.channels));
}

void CheckHistory(const SurrogateParams& params,
                  std::span<const Frame> history) {
  params.Validate();
  if (history.size() != static_cast<std::size_t>(params.arch.history_len)) {
    Throw(ErrorCode::kShape,
          "history has " + std::to_string(history.size()) +
              " frames, model expects " +
              std::to_string(params.arch.history_len));
  }
  const std::size_t fs = history.front().size();
  CellsOf(params.arch, fs);
  for (const auto& f : history) {
    Require(f.size() == fs, ErrorCode::kShape,
            "history frames differ in size");
  }
}

}  // namespace

SurrogateParams ZeroParams(const SurrogateArch& arch) {
  arch.Validate();
  return {arch, std::vector<double>(arch.param_count(), 0.0)};
}

SurrogateParams InitParams(const SurrogateArch& arch, std::uint64_t seed) {
  SurrogateParams p = ZeroParams(arch);
  const Layout lay(arch);
  std::mt19937_64 rng(seed);
  const double fan1 = static_cast<double>(lay.cin * lay.kernel);
  const double s1 = std::sqrt(3.0 / fan1);
  // The output layer starts at zero so the residual model starts at
  // persistence; unrolled rollouts from a random output layer drift.
  std::uniform_real_distribution<double> u1(-s1, s1);
  for (std::size_t i = lay.w1; i < lay.b1; ++i) p.theta[i] = u1(rng);
  return p;
}

Frame ToFrame(std::span<const float> f) { return Frame(f.begin(), f.end()); }

Frame Forward(const SurrogateParams& params, std::span<const Frame> history) {
  CheckHistory(params, history);
  const int cells = CellsOf(params.arch, history.front().size());
  const Network net(params, cells);
  std::vector<const double*> window(history.size());
  for (std::size_t l = 0; l < history.size(); ++l) {
    window[l] = history[l].data();
  }
  StepTape tape;
  Frame out(history.front().size());
  net.ForwardStep(window.data(), tape, out.data());
  return out;
}

std::vector<Frame> Rollout(const SurrogateParams& params,
                           std::span<const Frame> history, int steps) {
  CheckHistory(params, history);
  Require(steps >= 1, ErrorCode::kInvalidArgument, "rollout steps must be >= 1");
  const int cells = CellsOf(params.arch, history.front().size());
  const Network net(params, cells);
  const int L = params.arch.history_len;

  std::vector<Frame> seq(history.begin(), history.end());
  seq.reserve(static_cast<std::size_t>(L + steps));
  std::vector<const double*> window(static_cast<std::size_t>(L));
  StepTape tape;
  for (int h = 0; h < steps; ++h) {
    for (int l = 0; l < L; ++l) {
      window[static_cast<std::size_t>(l)] =
          seq[static_cast<std::size_t>(h + l)].data();
    }
    Frame next(history.front().size());
    net.ForwardStep(window.data(), tape, next.data());
    seq.push_back(std::move(next));
  }
  return std::vector<Frame>(seq.begin() + L, seq.end());
}

int EffectiveHorizon(int horizon, int t_count, int start) {
  return std::min(horizon, t_count - 1 - start);
}

double FrameNrmse(std::span<const double> prediction,
                  std::span<const double> target) {
  Require(prediction.size() == target.size(), ErrorCode::kShape,
          "NRMSE operands differ in size");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    const double d = prediction[j] - target[j];
    num += d * d;
    den += target[j] * target[j];
  }
  return std::sqrt(num) / (std::sqrt(den) + kNrmseEpsilon);
}

LossGrad RolloutLossGrad(const SurrogateParams& params,
                         std::span<const StartPair> batch, int horizon,
                         const TrajectoryDataset& ds) {
  params.Validate();
  Require(!batch.empty(), ErrorCode::kInvalidArgument, "empty batch");
  Require(horizon >= 1, ErrorCode::kInvalidArgument, "horizon must be >= 1");
  Require(params.arch.channels == ds.channels(), ErrorCode::kShape,
          "model channel count does not match dataset");
  const int L = params.arch.history_len;
  const int T = ds.t_count();
  for (const auto& p : batch) {
    Require(p.trajectory >= 0 && p.trajectory < ds.n_traj(),
            ErrorCode::kInvalidArgument,
            "trajectory index " + std::to_string(p.trajectory) +
                " out of range");
    if (p.start < L || p.start > T - 2) {
      Throw(ErrorCode::kInvalidArgument,
            "start index " + std::to_string(p.start) + " outside [" +
                std::to_string(L) + ", " + std::to_string(T - 2) + "]");
    }
  }

  const Network net(params, ds.spatial_size());
  const std::size_t fs = net.frame_size();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  LossGrad out;
  out.grad.assign(params.theta.size(), 0.0);

  std::vector<double> seq, gseq, target(fs);
  std::vector<StepTape> tapes;
  std::vector<const double*> window(static_cast<std::size_t>(L));
  std::vector<double*> dwindow(static_cast<std::size_t>(L));

  for (const auto& pair : batch) {
    const int hk = EffectiveHorizon(horizon, T, pair.start);
    const double weight = inv_batch / hk;
    const std::size_t frames = static_cast<std::size_t>(L + hk);
    seq.assign(frames * fs, 0.0);
    gseq.assign(frames * fs, 0.0);
    tapes.resize(static_cast<std::size_t>(hk));

    for (int l = 0; l < L; ++l) {
      const auto f = ds.frame(pair.trajectory, pair.start - L + 1 + l);
      std::copy(f.begin(), f.end(), seq.begin() + static_cast<std::ptrdiff_t>(l * fs));
    }

    // Forward sweep; seq frame L-1+h holds the prediction for k+h.
    std::vector<std::vector<double>> dpreds(static_cast<std::size_t>(hk));
    for (int h = 1; h <= hk; ++h) {
      for (int l = 0; l < L; ++l) {
        window[static_cast<std::size_t>(l)] =
            &seq[static_cast<std::size_t>(h - 1 + l) * fs];
      }
      double* pred = &seq[static_cast<std::size_t>(L - 1 + h) * fs];
      net.ForwardStep(window.data(), tapes[static_cast<std::size_t>(h - 1)],
                      pred);

      const auto truth = ds.frame(pair.trajectory, pair.start + h);
      double num = 0.0, tnorm = 0.0;
      for (std::size_t j = 0; j < fs; ++j) {
        target[j] = truth[j];
        const double d = pred[j] - target[j];
        num += d * d;
        tnorm += target[j] * target[j];
      }
      const double denom =
          (std::sqrt(tnorm) + kNrmseEpsilon) * (std::sqrt(tnorm) + kNrmseEpsilon);
      out.loss += weight * num / denom;
      auto& dp = dpreds[static_cast<std::size_t>(h - 1)];
      dp.resize(fs);
      for (std::size_t j = 0; j < fs; ++j) {
        dp[j] = weight * 2.0 * (pred[j] - target[j]) / denom;
      }
    }

    // Reverse sweep. Ground-truth history frames receive no gradient.
    for (int h = hk; h >= 1; --h) {
      double* gpred = &gseq[static_cast<std::size_t>(L - 1 + h) * fs];
      const auto& dp = dpreds[static_cast<std::size_t>(h - 1)];
      for (std::size_t j = 0; j < fs; ++j) gpred[j] += dp[j];
      for (int l = 0; l < L; ++l) {
        const int idx = h - 1 + l;
        dwindow[static_cast<std::size_t>(l)] =
            idx >= L ? &gseq[static_cast<std::size_t>(idx) * fs] : nullptr;
      }
      net.BackwardStep(tapes[static_cast<std::size_t>(h - 1)], gpred,
                       out.grad.data(), dwindow.data());
    }
  }
  return out;
}

}  // namespace gits
