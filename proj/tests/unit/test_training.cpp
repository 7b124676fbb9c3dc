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

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "core/common.hpp"
#include "core/diagnostics.hpp"
#include "core/pilot_scoring.hpp"
#include "core/training.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace gits;

namespace {

std::vector<int> AllStarts(const TrajectoryDataset& ds, int L = 4) {
  return BuildCandidates(ds.t_count(), L).indices;
}

TrainConfig Quick(int epochs, std::uint64_t seed = 0) {
  TrainConfig c;
  c.epochs_max = epochs;
  c.min_epochs = 2;
  c.patience = 2;
  c.batch_size = 16;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("zero epochs returns the initial parameters") {
  const TrajectoryDataset ds = gits_test::SmallDataset(1);
  const SurrogateParams init = gits_test::RandomParams(gits_test::TinyArch(ds), 2, 0.1);
  const TrainResult r = Train(init, AllStarts(ds), ds, Quick(0));
  CHECK(r.params.theta == init.theta);
  CHECK(r.history.empty());
  CHECK(r.best_epoch == 0);
}

TEST_CASE("training is deterministic under the seed") {
  const TrajectoryDataset ds = gits_test::SmallDataset(1);
  const SurrogateParams init = gits_test::RandomParams(gits_test::TinyArch(ds), 2, 0.1);
  const std::vector<int> starts = {4, 7, 9};
  const TrainResult a = Train(init, starts, ds, Quick(4, 5));
  const TrainResult b = Train(init, starts, ds, Quick(4, 5));
  CHECK(a.params.theta == b.params.theta);
  CHECK(a.best_epoch == b.best_epoch);
  const TrainResult c = Train(init, starts, ds, Quick(4, 6));
  CHECK(a.params.theta != c.params.theta);
}

TEST_CASE("training on zero dynamics learns the identity update") {
  const TrajectoryDataset ds = gits_test::ZeroDynamicsDataset();
  const SurrogateArch arch = gits_test::TinyArch(ds);
  const std::vector<int> starts = AllStarts(ds);

  SUBCASE("from the standard initialization") {
    const TrainResult r = Train(InitParams(arch, 4), starts, ds, TrainConfig{});
    CHECK(OneStepLoss(r.params, starts, ds) < 1e-6);
  }
  SUBCASE("from a perturbed output layer") {
    SurrogateParams init = gits_test::RandomParams(arch, 4, 0.02);
    TrainConfig cfg;
    cfg.lr = 1e-2;
    cfg.epochs_max = 400;
    cfg.early_stopping = false;
    const double before = OneStepLoss(init, starts, ds);
    const TrainResult r = Train(init, starts, ds, cfg);
    const double after = OneStepLoss(r.params, starts, ds);
    CAPTURE(before);
    CHECK(after < 1e-6);
  }
}

TEST_CASE("early stopping returns the best evaluated epoch") {
  const TrajectoryDataset ds = gits_test::SmallDataset(2);
  const SurrogateParams init = gits_test::RandomParams(gits_test::TinyArch(ds), 7, 0.1);
  TrainConfig cfg = Quick(30, 1);
  cfg.lr = 5e-3;
  const TrainResult r = Train(init, AllStarts(ds), ds, cfg);
  REQUIRE_FALSE(r.history.empty());
  REQUIRE(r.best_epoch >= 1);
  const double returned = RolloutNrmse(r.params, ds, Split::kVal);
  for (const EpochRecord& e : r.history) CHECK(returned <= e.val_nrmse);
  CHECK(returned == r.history[static_cast<std::size_t>(r.best_epoch - 1)].val_nrmse);
  const int n = static_cast<int>(r.history.size());
  if (n < cfg.epochs_max) {
    CHECK(n >= cfg.min_epochs);
    CHECK(n - r.best_epoch >= cfg.patience);
  }
}

TEST_CASE("disabled early stopping runs every epoch") {
  const TrajectoryDataset ds = gits_test::SmallDataset(2);
  TrainConfig cfg = Quick(3);
  cfg.early_stopping = false;
  const TrainResult r =
      Train(InitParams(gits_test::TinyArch(ds), 1), AllStarts(ds), ds, cfg);
  CHECK(r.history.size() == 3);
  CHECK(r.best_epoch == 3);
}

TEST_CASE("adam update matches a hand computation") {
  AdamOptimizer adam(2, 0.1);
  std::vector<double> theta = {1.0, -1.0};
  const std::vector<double> g1 = {0.5, -2.0}, g2 = {1.0, 1.0};
  adam.Step(theta, g1);
  // First bias-corrected step is lr * g / (|g| + eps').
  CHECK(theta[0] == doctest::Approx(1.0 - 0.1).epsilon(1e-7));
  CHECK(theta[1] == doctest::Approx(-1.0 + 0.1).epsilon(1e-7));
  adam.Step(theta, g2);
  for (int i = 0; i < 2; ++i) {
    const double m = 0.9 * 0.1 * g1[i] + 0.1 * g2[i];
    const double v = 0.999 * 0.001 * g1[i] * g1[i] + 0.001 * g2[i] * g2[i];
    const double mh = m / (1 - 0.81), vh = v / (1 - 0.999 * 0.999);
    const double first = (i == 0 ? 1.0 : -1.0) - 0.1 * g1[i] / (std::abs(g1[i]) + 1e-8);
    CHECK(theta[i] == doctest::Approx(first - 0.1 * mh / (std::sqrt(vh) + 1e-8))
                          .epsilon(1e-12));
  }
  CHECK(adam.steps() == 2);
}

TEST_CASE("gradient clipping rescales to the bound") {
  std::vector<double> g = {3.0, 4.0};
  CHECK(ClipGradNorm(g, 1.0) == doctest::Approx(5.0));
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == doctest::Approx(0.8));
  std::vector<double> small = {0.1, 0.2};
  ClipGradNorm(small, 1.0);
  CHECK(small == std::vector<double>{0.1, 0.2});
}

TEST_CASE("invalid training inputs are rejected") {
  const TrajectoryDataset ds = gits_test::SmallDataset(1);
  const SurrogateParams p = InitParams(gits_test::TinyArch(ds), 1);
  auto code = [&](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  CHECK(code([&] { Train(p, std::vector<int>{}, ds, Quick(1)); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code([&] { Train(p, std::vector<int>{3}, ds, Quick(1)); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code([&] { Train(p, std::vector<int>{ds.t_count() - 1}, ds, Quick(1)); }) ==
        ErrorCode::kInvalidArgument);
  TrainConfig bad = Quick(1);
  bad.lr = 0.0;
  CHECK(code([&] { Train(p, std::vector<int>{4}, ds, bad); }) == ErrorCode::kConfig);
}

TEST_CASE("divergent training reports the epoch") {
  const TrajectoryDataset ds = gits_test::SmallDataset(1);
  // Without a clamp, huge weights overflow the squared error.
  SurrogateParams p = gits_test::RandomParams(gits_test::TinyArch(ds), 1, 1e200);
  TrainConfig cfg = Quick(2);
  cfg.clamp = std::numeric_limits<double>::infinity();
  try {
    Train(p, std::vector<int>{4}, ds, cfg);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDivergence);
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
  }
}

TEST_CASE("checkpoints round-trip exactly") {
  const auto dir = gits_test::TempDir("ckpt");
  const TrajectoryDataset ds = gits_test::SmallDataset(1);
  SurrogateArch arch = gits_test::TinyArch(ds);
  arch.clamp = 7.5;
  const Checkpoint c{gits_test::RandomParams(arch, 3), 42, 17};
  const std::string stem = (dir / "model").string();
  WriteCheckpoint(c, stem);
  const Checkpoint back = ReadCheckpoint(stem);
  CHECK(back.params.theta == c.params.theta);
  CHECK(back.params.arch.hidden == arch.hidden);
  CHECK(back.params.arch.radius == arch.radius);
  CHECK(back.params.arch.clamp == arch.clamp);
  CHECK(back.params.arch.padding == arch.padding);
  CHECK(back.seed == 42);
  CHECK(back.epoch == 17);
  CHECK(std::filesystem::file_size(stem + ".f64") == c.params.theta.size() * 8);

  std::filesystem::resize_file(stem + ".f64", 16);
  try {
    ReadCheckpoint(stem);
    FAIL("expected a format error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFormat);
  }
  CHECK_THROWS_AS(ReadCheckpoint((dir / "missing").string()), Error);
}
