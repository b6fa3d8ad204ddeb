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

#pragma once

#include "spnn/core/error.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spnn::metrics {

/// k x k counts, rows = true label, columns = prediction. For the diagnosis tasks the last class is
/// "healthy"; in the binary task class 0 (diabetic) is the positive class.
class ConfusionMatrix
{
public:
  explicit ConfusionMatrix(std::size_t k = 2)
    : k_(k)
    , counts_(k * k, 0)
  {
    if (k < 2)
    {
      throw ParameterError("confusion matrix needs at least two classes");
    }
  }

  ConfusionMatrix(std::size_t k, std::vector<std::size_t> counts)
    : k_(k)
    , counts_(std::move(counts))
  {
    if (counts_.size() != k * k)
    {
      throw ShapeError("confusion matrix counts", k * k, counts_.size());
    }
  }

  std::size_t k() const { return k_; }

  std::size_t &operator()(std::size_t label, std::size_t pred) { return counts_[label * k_ + pred]; }
  std::size_t  operator()(std::size_t label, std::size_t pred) const { return counts_[label * k_ + pred]; }

  std::size_t total() const
  {
    std::size_t t = 0;
    for (auto c : counts_)
    {
      t += c;
    }
    return t;
  }

  std::size_t row_total(std::size_t label) const
  {
    std::size_t t = 0;
    for (std::size_t j = 0; j < k_; ++j)
    {
      t += (*this)(label, j);
    }
    return t;
  }

  std::size_t col_total(std::size_t pred) const
  {
    std::size_t t = 0;
    for (std::size_t i = 0; i < k_; ++i)
    {
      t += (*this)(i, pred);
    }
    return t;
  }

  std::size_t trace() const
  {
    std::size_t t = 0;
    for (std::size_t i = 0; i < k_; ++i)
    {
      t += (*this)(i, i);
    }
    return t;
  }

  bool operator==(ConfusionMatrix const &) const = default;

private:
  std::size_t              k_;
  std::vector<std::size_t> counts_;
};

inline ConfusionMatrix confusion(std::span<std::size_t const> predictions, std::span<std::size_t const> labels,
                                 std::size_t k)
{
  if (predictions.size() != labels.size())
  {
    throw ShapeError("confusion prediction count", labels.size(), predictions.size());
  }
  ConfusionMatrix cm(k);
  for (std::size_t n = 0; n < labels.size(); ++n)
  {
    if (labels[n] >= k || predictions[n] >= k)
    {
      throw IndexError("class index " + std::to_string(std::max(labels[n], predictions[n])) + " >= " +
                       std::to_string(k));
    }
    ++cm(labels[n], predictions[n]);
  }
  return cm;
}

/// A ratio, or nullopt when its denominator is zero.
using Rate = std::optional<double>;

inline Rate ratio(std::size_t num, std::size_t den)
{
  if (den == 0)
  {
    return std::nullopt;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

struct BinaryMetrics
{
  Rate accuracy;
  Rate fpr;
  Rate fnr;
  Rate f1;
};

/// Accuracy, FPR = FP / (TN + FP), FNR = FN / (TP + FN), F1 = 2TP / (2TP + FP + FN).
inline BinaryMetrics binary_metrics(ConfusionMatrix const &cm)
{
  if (cm.k() != 2)
  {
    throw ParameterError("binary_metrics needs a 2-class confusion matrix");
  }
  std::size_t const tp = cm(0, 0);
  std::size_t const fn = cm(0, 1);
  std::size_t const fp = cm(1, 0);
  std::size_t const tn = cm(1, 1);
  return {ratio(tp + tn, tp + fp + fn + tn), ratio(fp, tn + fp), ratio(fn, tp + fn), ratio(2 * tp, 2 * tp + fp + fn)};
}

struct MulticlassMetrics
{
  Rate              accuracy;
  Rate              healthy_fpr;
  std::vector<Rate> fnr;  // per non-healthy class, in class order
};

/// Healthy FPR is the share of healthy instances predicted as any other class; the FNR of class c is
/// the share of its instances predicted as anything else.
inline MulticlassMetrics multiclass_metrics(ConfusionMatrix const &cm, std::optional<std::size_t> healthy = {})
{
  std::size_t const h = healthy.value_or(cm.k() - 1);
  if (h >= cm.k())
  {
    throw IndexError("healthy class index out of range");
  }
  MulticlassMetrics m;
  m.accuracy    = ratio(cm.trace(), cm.total());
  m.healthy_fpr = ratio(cm.row_total(h) - cm(h, h), cm.row_total(h));
  for (std::size_t c = 0; c < cm.k(); ++c)
  {
    if (c != h)
    {
      m.fnr.push_back(ratio(cm.row_total(c) - cm(c, c), cm.row_total(c)));
    }
  }
  return m;
}

/// Percentage with one decimal, rounding half away from zero.
inline double percent_1dp(double fraction)
{
  return std::round(fraction * 1000.0) / 10.0;
}

inline std::string format_rate(Rate r)
{
  if (!r)
  {
    return "undefined";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", percent_1dp(*r));
  return buf;
}

}  // namespace spnn::metrics
