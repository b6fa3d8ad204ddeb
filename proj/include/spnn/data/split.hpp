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
#include "spnn/data/stream.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace spnn::data {

struct SplitFractions
{
  double train{0.7};
  double val{0.1};
  double test{0.2};
};

struct SplitCounts
{
  std::size_t train{0};
  std::size_t val{0};
  std::size_t test{0};

  bool operator==(SplitCounts const &) const = default;
};

struct WindowedDataset
{
  std::vector<Instance> instances;

  SplitCounts counts() const
  {
    SplitCounts c;
    for (auto const &i : instances)
    {
      (i.split == SplitTag::kTrain ? c.train : i.split == SplitTag::kVal ? c.val : c.test) += 1;
    }
    return c;
  }

  std::vector<Instance const *> select(SplitTag tag) const
  {
    std::vector<Instance const *> out;
    for (auto const &i : instances)
    {
      if (i.split == tag)
      {
        out.push_back(&i);
      }
    }
    return out;
  }
};

namespace detail {

/// Largest-remainder apportionment of `total` proportional to `weights`, respecting per-group capacity.
inline std::vector<std::size_t> apportion(std::vector<std::size_t> const &weights, std::size_t weight_sum,
                                          std::size_t total, std::vector<std::size_t> const &capacity)
{
  std::size_t const        n = weights.size();
  std::vector<std::size_t> out(n, 0);
  std::vector<double>      frac(n, 0.0);
  std::size_t              assigned = 0;
  for (std::size_t i = 0; i < n; ++i)
  {
    double const q = static_cast<double>(weights[i]) * static_cast<double>(total) / static_cast<double>(weight_sum);
    out[i]         = std::min(static_cast<std::size_t>(std::floor(q)), capacity[i]);
    frac[i]        = q - std::floor(q);
    assigned += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  while (assigned < total)
  {
    bool progressed = false;
    for (auto i : order)
    {
      if (assigned == total)
      {
        break;
      }
      if (out[i] < capacity[i])
      {
        ++out[i];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed)
    {
      throw DataError("not enough instances to apportion split");
    }
  }
  return out;
}

}  // namespace detail

/// Time-ordered split: within each subject the earliest windows go to train, the next to validation and
/// the latest to test, so no split overlaps another in time. Global counts are round(f * N) for train
/// and validation, the remainder for test; per-subject shares follow largest-remainder apportionment.
inline WindowedDataset split(std::vector<Instance> instances, SplitFractions const &f = {})
{
  std::size_t const n = instances.size();
  if (f.train <= 0.0 || f.val <= 0.0 || f.test <= 0.0 || std::abs(f.train + f.val + f.test - 1.0) > 1e-9)
  {
    throw ParameterError("split fractions must be positive and sum to 1");
  }
  auto const n_train = static_cast<std::size_t>(std::llround(f.train * static_cast<double>(n)));
  auto const n_val   = static_cast<std::size_t>(std::llround(f.val * static_cast<double>(n)));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n)
  {
    throw DataError("too few instances (" + std::to_string(n) + ") to populate train/validation/test splits");
  }

  // group by subject in order of first appearance, each group sorted by start time
  std::vector<std::string>                 subjects;
  std::map<std::string, std::size_t>       slot;
  std::vector<std::vector<std::size_t>>    groups;
  for (std::size_t i = 0; i < n; ++i)
  {
    auto [it, inserted] = slot.try_emplace(instances[i].subject, groups.size());
    if (inserted)
    {
      subjects.push_back(instances[i].subject);
      groups.emplace_back();
    }
    groups[it->second].push_back(i);
  }
  std::vector<std::size_t> sizes;
  for (auto &g : groups)
  {
    std::stable_sort(g.begin(), g.end(),
                     [&](std::size_t a, std::size_t b) { return instances[a].start_s < instances[b].start_s; });
    sizes.push_back(g.size());
  }

  auto const               train_share = detail::apportion(sizes, n, n_train, sizes);
  std::vector<std::size_t> left(sizes.size());
  for (std::size_t s = 0; s < sizes.size(); ++s)
  {
    left[s] = sizes[s] - train_share[s];
  }
  auto const val_share = detail::apportion(sizes, n, n_val, left);

  for (std::size_t s = 0; s < groups.size(); ++s)
  {
    for (std::size_t k = 0; k < groups[s].size(); ++k)
    {
      auto &inst = instances[groups[s][k]];
      inst.split = k < train_share[s] ? SplitTag::kTrain
                   : k < train_share[s] + val_share[s] ? SplitTag::kVal
                                                       : SplitTag::kTest;
    }
  }
  return {std::move(instances)};
}

/// True when, for every subject, no window of one split intersects a window of another split.
inline bool time_disjoint(WindowedDataset const &ds)
{
  std::map<std::string, std::vector<Instance const *>> by_subject;
  for (auto const &i : ds.instances)
  {
    by_subject[i.subject].push_back(&i);
  }
  for (auto const &[_, list] : by_subject)
  {
    for (auto const *a : list)
    {
      for (auto const *b : list)
      {
        if (a->split != b->split && a->start_s < b->end_s() && b->start_s < a->end_s())
        {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace spnn::data
