/* Copyright 2026 The ctcg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "ctcg/guided.h"

#include <cmath>
#include <random>

#include "ctcg/ctc.h"
#include "ctcg/data.h"
#include "ctcg/seqmodel.h"
#include "doctest.h"
#include "test_util.h"

namespace ctcg {
namespace {

using testing::RandomGrid;
using testing::RandomTarget;
using testing::ThrownCode;

PosteriorGrid Rows(std::initializer_list<std::vector<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  int t = 0;
  for (const auto& row : rows) {
    for (std::size_t s = 0; s < row.size(); ++s) m(t, s) = row[s];
    ++t;
  }
  return PosteriorGrid(m);
}

TEST_CASE("mask picks the argmax and drops blank frames") {
  const SpikeMask mask = BuildMask(Rows({{0.6, 0.3, 0.1}, {0.1, 0.2, 0.7}}));
  CHECK(mask.symbol_at(0) == 0);
  CHECK(mask.symbol_at(1) == SpikeMask::kNone);
  const Matrix dense = mask.Dense();
  CHECK(dense(0, 0) == 1.0);
  CHECK(dense.row(1).sum() == 0.0);
  CHECK(dense.col(2).sum() == 0.0);
  CHECK(mask.count() == 1);

  const SpikeMask blank = BuildMask(Rows({{0.1, 0.1, 0.8}, {0.2, 0.2, 0.6}}));
  CHECK(blank.count() == 0);
}

TEST_CASE("mask tie rules") {
  CHECK(BuildMask(Rows({{0.4, 0.4, 0.2}})).symbol_at(0) == 0);
  CHECK(BuildMask(Rows({{0.4, 0.2, 0.4}})).symbol_at(0) == SpikeMask::kNone);
}

TEST_CASE("mask rejects the blank column") {
  SpikeMask mask(2, 3);
  CHECK(ThrownCode([&] { mask.Set(0, 2); }).has_value());
  mask.Set(1, 1);
  CHECK(mask.at(1, 1));
}

TEST_CASE("guide loss examples") {
  const PosteriorGrid grid = Rows({{0.5, 0.25, 0.25}, {0.25, 0.25, 0.5}});
  SpikeMask mask(2, 3);
  const LossAndGrad empty = GuideLoss(grid, mask, GuideVariant::kLinear);
  CHECK(empty.loss == 0.0);
  CHECK(empty.grad.isZero(0.0));

  mask.Set(0, 0);
  mask.Set(1, 1);
  const LossAndGrad linear = GuideLoss(grid, mask, GuideVariant::kLinear);
  CHECK(linear.loss == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK(linear.grad(0, 0) == -1.0);
  CHECK(linear.grad(1, 1) == -1.0);
  CHECK(linear.grad.sum() == -2.0);

  const LossAndGrad log = GuideLoss(grid, mask, GuideVariant::kLogarithmic);
  CHECK(log.loss == doctest::Approx(2.0794415416798357).epsilon(1e-15));
  CHECK(log.grad(0, 0) == doctest::Approx(-2.0));
  CHECK(log.grad(1, 1) == doctest::Approx(-4.0));
}

TEST_CASE("guide variant names") {
  CHECK(ParseGuideVariant("linear") == GuideVariant::kLinear);
  CHECK(ParseGuideVariant(GuideVariantName(GuideVariant::kLogarithmic)) ==
        GuideVariant::kLogarithmic);
  CHECK(ThrownCode([] { ParseGuideVariant("cubic"); }).has_value());
}

TEST_CASE("guided loss reduces to ctc") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const PosteriorGrid grid = RandomGrid(rng, 6, 4);
    const TargetSequence target = RandomTarget(rng, 3, 3, 6);
    const SpikeMask mask = BuildMask(RandomGrid(rng, 6, 4));
    const LossAndGrad ctc = CtcLoss(grid, target);

    const LossAndGrad off = GuidedCtcLoss(grid, target, mask, {0.0});
    CHECK(off.loss == ctc.loss);
    CHECK(off.grad == ctc.grad);

    const LossAndGrad none =
        GuidedCtcLoss(grid, target, SpikeMask(6, 4), {1.0});
    CHECK(none.loss == ctc.loss);
    CHECK(none.grad == ctc.grad);
  }
}

TEST_CASE("guided gradient is the weighted sum of its parts") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const PosteriorGrid grid = RandomGrid(rng, 5, 3);
    const TargetSequence target = RandomTarget(rng, 2, 3, 5);
    const SpikeMask mask = BuildMask(RandomGrid(rng, 5, 3));
    for (GuideVariant v : {GuideVariant::kLinear, GuideVariant::kLogarithmic}) {
      const GuidedLossConfig config{0.7, v};
      const LossAndGrad combined = GuidedCtcLoss(grid, target, mask, config);
      const LossAndGrad ctc = CtcLoss(grid, target);
      const LossAndGrad guide = GuideLoss(grid, mask, v);
      CHECK(std::abs(combined.loss - (ctc.loss + 0.7 * guide.loss)) <= 1e-12);
      CHECK((combined.grad - (ctc.grad + 0.7 * guide.grad))
                .cwiseAbs()
                .maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("guide loss gradients match finite differences") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix logits = testing::RandomLogits(rng, 5, 4);
    const SpikeMask mask = BuildMask(RandomGrid(rng, 5, 4, 0.5));
    const TargetSequence target = RandomTarget(rng, 3, 3, 5);
    for (GuideVariant v : {GuideVariant::kLinear, GuideVariant::kLogarithmic}) {
      const auto guide = testing::CheckGridLossViaLogits(
          logits, [&](const PosteriorGrid& g) { return GuideLoss(g, mask, v); });
      CHECK(guide.failed == 0);
      const auto full = testing::CheckGridLossViaLogits(
          logits, [&](const PosteriorGrid& g) {
            return GuidedCtcLoss(g, target, mask, {1.0, v});
          });
      CHECK_MESSAGE(full.failed == 0, full.max_relative_error);
    }
  }
}

TEST_CASE("linear guide loss is bounded by the frame count") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const PosteriorGrid grid = RandomGrid(rng, 7, 4, 3.0);
    const double loss =
        GuideLoss(grid, BuildMask(grid), GuideVariant::kLinear).loss;
    CHECK(loss <= 0.0);
    CHECK(loss >= -7.0);
  }
}

TEST_CASE("mask store caches a frozen model") {
  SyntheticTaskSpec spec;
  spec.seed = 3;
  const Dataset data = GenerateSynthetic(spec, 6);
  ModelConfig config{8, 6, 1, Direction::kUnidirectional, 7, 5};
  const SequenceModel model = SequenceModel::Init(config);
  const MaskStore store = PrecomputeMasks(model, data);
  CHECK(store.size() == 6);
  for (const Utterance& u : data.utterances()) {
    CHECK(store.at(u.id) == BuildMask(model.Forward(u.features)));
  }

  const auto dir = testing::ScratchDir("masks");
  const std::string path = (dir / "masks.bin").string();
  store.Save(path);
  CHECK(MaskStore::Load(path) == store);

  CHECK(PrecomputeMasks(model, Dataset(data.alphabet(), 8)).size() == 0);
  config.output_dim = 5;
  CHECK(ThrownCode([&] {
          PrecomputeMasks(SequenceModel::Init(config), data);
        }) == ErrorCode::kAlphabetMismatch);
  CHECK(ThrownCode([&] { store.at("nope"); }) == ErrorCode::kMissingCache);
}

}  // namespace
}  // namespace ctcg
