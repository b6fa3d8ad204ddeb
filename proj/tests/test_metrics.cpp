//------------------------------------------------------------------------------
//
//   Copyright 2026 The spnn Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace spnn;
using namespace spnn::metrics;

namespace {

ConfusionMatrix binary(std::size_t tp, std::size_t fn, std::size_t fp, std::size_t tn)
{
  return ConfusionMatrix(2, {tp, fn, fp, tn});
}

double pct(Rate r)
{
  EXPECT_TRUE(r.has_value());
  return percent_1dp(r.value_or(-1.0));
}

/// Every growable matrix seeded at `fill`, i.e. the model at sparsity 1 - fill.
template <typename M>
void at_fill(M &model, double fill)
{
  Rng rng(1);
  seed_init(model, fill, rng);
}

}  // namespace

TEST(Confusion, CountsAndMargins)
{
  std::vector<std::size_t> const labels{0, 0, 1, 1, 1, 2};
  std::vector<std::size_t> const preds{0, 1, 1, 1, 2, 2};
  auto const                     cm = confusion(preds, labels, 3);
  EXPECT_EQ(cm(0, 0), 1U);
  EXPECT_EQ(cm(0, 1), 1U);
  EXPECT_EQ(cm(1, 1), 2U);
  EXPECT_EQ(cm(1, 2), 1U);
  EXPECT_EQ(cm(2, 2), 1U);
  EXPECT_EQ(cm.total(), 6U);
  EXPECT_EQ(cm.row_total(1), 3U);
  EXPECT_EQ(cm.col_total(2), 2U);
  EXPECT_EQ(confusion(labels, labels, 3).trace(), 6U);
}

TEST(Confusion, Errors)
{
  std::vector<std::size_t> const labels{0, 1};
  EXPECT_THROW(confusion(std::vector<std::size_t>{0, 2}, labels, 2), IndexError);
  EXPECT_THROW(confusion(std::vector<std::size_t>{0}, labels, 2), ShapeError);
  EXPECT_THROW(ConfusionMatrix(1), ParameterError);
}

TEST(BinaryMetrics, ServerTable)
{
  auto const cm = binary(504, 16, 21, 465);
  EXPECT_EQ(cm.row_total(0), 520U);
  EXPECT_EQ(cm.row_total(1), 486U);
  auto const m = binary_metrics(cm);
  EXPECT_EQ(pct(m.accuracy), 96.3);
  EXPECT_EQ(pct(m.fpr), 4.3);
  EXPECT_EQ(pct(m.fnr), 3.1);
  EXPECT_EQ(pct(m.f1), 96.5);
}

TEST(BinaryMetrics, EdgeTable)
{
  auto const m = binary_metrics(binary(491, 29, 18, 468));
  EXPECT_EQ(pct(m.accuracy), 95.3);
  EXPECT_EQ(pct(m.fpr), 3.7);
  EXPECT_EQ(pct(m.fnr), 5.6);
  EXPECT_EQ(pct(m.f1), 95.4);
}

TEST(BinaryMetrics, ExactFractions)
{
  auto const m = binary_metrics(binary(504, 16, 21, 465));
  EXPECT_DOUBLE_EQ(*m.accuracy, 969.0 / 1006.0);
  EXPECT_DOUBLE_EQ(*m.fpr, 21.0 / 486.0);
  EXPECT_DOUBLE_EQ(*m.fnr, 16.0 / 520.0);
  EXPECT_DOUBLE_EQ(*m.f1, 1008.0 / 1045.0);
  EXPECT_DOUBLE_EQ(*m.accuracy + 37.0 / 1006.0, 1.0);
}

TEST(BinaryMetrics, PerfectAndDegenerate)
{
  auto const perfect = binary_metrics(binary(10, 0, 0, 7));
  EXPECT_EQ(*perfect.accuracy, 1.0);
  EXPECT_EQ(*perfect.fpr, 0.0);
  EXPECT_EQ(*perfect.fnr, 0.0);
  EXPECT_EQ(*perfect.f1, 1.0);

  auto const no_healthy = binary_metrics(binary(3, 1, 0, 0));
  EXPECT_FALSE(no_healthy.fpr.has_value());
  EXPECT_TRUE(no_healthy.fnr.has_value());
  auto const empty = binary_metrics(binary(0, 0, 0, 0));
  EXPECT_FALSE(empty.accuracy.has_value());
  EXPECT_FALSE(empty.f1.has_value());
  EXPECT_EQ(format_rate(empty.accuracy), "undefined");
  EXPECT_THROW(binary_metrics(ConfusionMatrix(3)), ParameterError);
}

TEST(BinaryMetrics, F1RangeOverAllSmallMatrices)
{
  for (std::size_t tp = 0; tp < 4; ++tp)
  {
    for (std::size_t fn = 0; fn < 4; ++fn)
    {
      for (std::size_t fp = 0; fp < 4; ++fp)
      {
        auto const f1 = binary_metrics(binary(tp, fn, fp, 2)).f1;
        if (!f1)
        {
          continue;
        }
        EXPECT_GE(*f1, 0.0);
        EXPECT_LE(*f1, 1.0);
        EXPECT_EQ(*f1 == 1.0, fp == 0 && fn == 0 && tp > 0);
      }
    }
  }
}

TEST(MulticlassMetrics, ServerTable)
{
  ConfusionMatrix const cm(3, {303, 1, 4, 5, 206, 1, 22, 10, 454});
  EXPECT_EQ(cm.row_total(0), 308U);
  EXPECT_EQ(cm.row_total(1), 212U);
  EXPECT_EQ(cm.row_total(2), 486U);
  auto const m = multiclass_metrics(cm);
  EXPECT_EQ(pct(m.accuracy), 95.7);
  EXPECT_EQ(pct(m.healthy_fpr), 6.6);
  ASSERT_EQ(m.fnr.size(), 2U);
  EXPECT_EQ(pct(m.fnr[0]), 1.6);
  EXPECT_EQ(pct(m.fnr[1]), 2.8);
}

TEST(MulticlassMetrics, EdgeTable)
{
  auto const m = multiclass_metrics(ConfusionMatrix(3, {288, 4, 16, 7, 200, 5, 12, 10, 464}));
  EXPECT_EQ(pct(m.accuracy), 94.6);
  EXPECT_EQ(pct(m.healthy_fpr), 4.5);
  EXPECT_EQ(pct(m.fnr[0]), 6.5);
  EXPECT_EQ(pct(m.fnr[1]), 5.7);
}

TEST(MulticlassMetrics, DiagonalAndEmptyRows)
{
  auto const d = multiclass_metrics(ConfusionMatrix(3, {5, 0, 0, 0, 6, 0, 0, 0, 7}));
  EXPECT_EQ(*d.accuracy, 1.0);
  EXPECT_EQ(*d.healthy_fpr, 0.0);
  EXPECT_EQ(*d.fnr[0], 0.0);
  EXPECT_EQ(*d.fnr[1], 0.0);
  auto const e = multiclass_metrics(ConfusionMatrix(3, {5, 0, 0, 0, 0, 0, 0, 0, 7}));
  EXPECT_FALSE(e.fnr[1].has_value());
  EXPECT_THROW(multiclass_metrics(ConfusionMatrix(3), 3), IndexError);
}

TEST(Percent, RoundsHalfAwayFromZero)
{
  EXPECT_EQ(percent_1dp(0.0625), 6.3);
  EXPECT_EQ(percent_1dp(0.8125), 81.3);
  EXPECT_EQ(percent_1dp(-0.0625), -6.3);
  EXPECT_EQ(percent_1dp(1.0), 100.0);
  EXPECT_EQ(format_rate(0.5), "50.0%");
}

TEST(Cost, DenseCountsMatchWidthArithmetic)
{
  Rng        rng(1);
  auto const server = build_server<double>(2, rng);
  auto const edge   = build_edge<double>(2, rng);
  auto const s      = count_params(server);
  auto const e      = count_params(edge);
  EXPECT_EQ(s.dense_params, 4497536U);
  EXPECT_EQ(e.dense_params, 89088U);
  ASSERT_EQ(s.layers.size(), 6U);
  EXPECT_EQ(s.layers[0].dense, 3712U * 1024U);
  ASSERT_EQ(e.layers.size(), 8U);
  EXPECT_EQ(e.layers[0].dense, 96U * 136U);
  EXPECT_EQ(e.layers[1].dense, 96U * 96U);
}

TEST(Cost, ServerAtReportedSparsity)
{
  Rng  rng(1);
  auto server = build_server<double>(2, rng);
  at_fill(server, 1.0 - 0.905);
  auto const c = count_flops(server);
  EXPECT_NEAR(static_cast<double>(c.nonzero_params), 429.1e3, 0.01 * 429.1e3);
  EXPECT_NEAR(static_cast<double>(c.total_flops), 858.2e3, 0.01 * 858.2e3);
  EXPECT_EQ(c.total_flops, 2 * c.nonzero_params);
  EXPECT_NEAR(c.sparsity(), 0.905, 1e-4);
}

TEST(Cost, EdgeAtReportedSparsity)
{
  Rng  rng(1);
  auto edge = build_edge<double>(2, rng);
  at_fill(edge, 1.0 - 0.963);
  auto const c = count_flops(edge);
  EXPECT_NEAR(static_cast<double>(c.nonzero_params), 3.3e3, 0.01 * 3.3e3);
  EXPECT_NEAR(static_cast<double>(c.total_flops), 392.8e3, 0.01 * 392.8e3);
  EXPECT_EQ(c.head_flops, 2U * 96U * 2U);
  EXPECT_EQ(c.total_flops, 60 * 2 * c.nonzero_params + c.head_flops);
}

TEST(Cost, FlopsLinearInNonzeros)
{
  Rng  rng(2);
  auto edge = build_edge<double>(EdgeShape{6, 8, 8, 10, 2, 0.2}, rng);
  at_fill(edge, 0.25);
  auto const a = count_flops(edge);
  at_fill(edge, 0.5);
  auto const b = count_flops(edge);
  EXPECT_EQ(b.nonzero_params, 2 * a.nonzero_params);
  EXPECT_EQ(b.total_flops - b.head_flops, 2 * (a.total_flops - a.head_flops));
  EXPECT_EQ(count_flops(edge, 20).total_flops - b.head_flops, 2 * (b.total_flops - b.head_flops));
}

TEST(Cost, EmptyServerHasNoFlops)
{
  Rng  rng(3);
  auto server = build_server<double>(ServerShape{10, {5}, 2, 0.2}, rng);
  for (auto *m : server.growable())
  {
    std::fill(m->mask().begin(), m->mask().end(), std::uint8_t{0});
    m->apply_mask();
  }
  auto const c = count_flops(server);
  EXPECT_EQ(c.nonzero_params, 0U);
  EXPECT_EQ(c.total_flops, 0U);
  EXPECT_EQ(c.sparsity(), 1.0);
}
