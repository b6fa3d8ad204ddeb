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

#include "spnn/spnn.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace spnn::testing {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir
{
public:
  explicit TempDir(std::string const &tag)
  {
    path_ = std::filesystem::temp_directory_path() /
            ("spnn_" + tag + "_" + std::to_string(std::random_device{}()) + "_" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(TempDir const &)            = delete;
  TempDir &operator=(TempDir const &) = delete;

  std::filesystem::path const &path() const { return path_; }
  std::filesystem::path        operator/(std::string const &name) const { return path_ / name; }

private:
  static int &counter()
  {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

inline std::vector<double> random_vector(std::size_t n, Rng &rng, double lo = -1.0, double hi = 1.0)
{
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double>                    v(n);
  for (auto &x : v)
  {
    x = d(rng);
  }
  return v;
}

/// Random values with a random mask of the given density, dormant entries zeroed.
inline MaskedMatrix<double> random_masked(std::size_t rows, std::size_t cols, double density, Rng &rng)
{
  MaskedMatrix<double>                   m(rows, cols);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  for (std::size_t i = 0; i < m.size(); ++i)
  {
    m.mask()[i]        = u(rng) < density ? 1 : 0;
    m.values().flat()[i] = w(rng);
  }
  m.apply_mask();
  return m;
}

/// Random weights and biases everywhere (biases included) so that gradient checks see every path.
template <typename T>
void randomize(Model<T> &model, Rng &rng, double scale = 0.5)
{
  std::uniform_real_distribution<double> d(-scale, scale);
  for (auto &p : model.params())
  {
    for (auto &v : p.values)
    {
      v = static_cast<T>(d(rng));
    }
    if (p.matrix != nullptr)
    {
      p.matrix->apply_mask();
    }
  }
}

template <typename T>
Sample<T> random_sample(Model<T> const &model, std::size_t label, Rng &rng)
{
  Sample<T> s;
  s.steps = model.input_steps();
  s.width = model.input_width();
  s.label = label;
  for (double v : random_vector(s.steps * s.width, rng))
  {
    s.values.push_back(static_cast<T>(v));
  }
  return s;
}

/// Two well-separated Gaussian clouds of flat samples: class c has mean +/-1 on every feature.
inline TrainData<double> separable_data(std::size_t width, std::size_t train, std::size_t val, std::size_t test,
                                        Rng &rng, std::size_t classes = 2)
{
  std::normal_distribution<double> noise(0.0, 0.3);
  auto make = [&](std::size_t n) {
    std::vector<Sample<double>> out;
    for (std::size_t i = 0; i < n; ++i)
    {
      Sample<double> s;
      s.width = width;
      s.label = i % classes;
      for (std::size_t j = 0; j < width; ++j)
      {
        double const centre = (j % classes == s.label) ? 1.0 : -1.0;
        s.values.push_back(centre + noise(rng));
      }
      out.push_back(std::move(s));
    }
    return out;
  };
  TrainData<double> d;
  d.train = make(train);
  d.val   = make(val);
  d.test  = make(test);
  return d;
}

/// Sort-based reference for grow (descent on already-active weights): the k-th largest |g| after a
/// full descending sort is the threshold; dormant entries strictly above it activate at +lr * g.
inline MaskedMatrix<double> oracle_grow(MaskedMatrix<double> m, std::vector<double> const &g, double alpha, double lr)
{
  std::vector<double> mags;
  for (double v : g)
  {
    mags.push_back(std::abs(v));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  auto const k = std::max<std::size_t>(
    1, std::min(mags.size(), static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(mags.size()) - 1e-9))));
  double const thres = mags[k - 1];
  auto         w     = m.values().flat();
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    if (m.mask()[i] != 0)
    {
      w[i] -= lr * g[i];
    }
    else if (std::abs(g[i]) > thres)
    {
      m.mask()[i] = 1;
      w[i] += lr * g[i];
    }
  }
  return m;
}

/// Sort-based reference for prune: the ceil(beta * nnz)-th smallest active |W| is the threshold and
/// active entries strictly below it are removed.
inline MaskedMatrix<double> oracle_prune(MaskedMatrix<double> m, double beta)
{
  auto                w = m.values().flat();
  std::vector<double> active;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    if (m.mask()[i] != 0)
    {
      active.push_back(std::abs(w[i]));
    }
  }
  if (active.empty())
  {
    return m;
  }
  std::sort(active.begin(), active.end());
  auto const k = std::max<std::size_t>(
    1, std::min(active.size(), static_cast<std::size_t>(std::ceil(beta * static_cast<double>(active.size()) - 1e-9))));
  double const thres = active[k - 1];
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    if (m.mask()[i] != 0 && std::abs(w[i]) < thres)
    {
      m.mask()[i] = 0;
      w[i]        = 0.0;
    }
  }
  return m;
}

/// Runs grow then prune on `trials` random matrices up to 32 x 32 and counts disagreements with the
/// oracles in masks or values (compared exactly).
inline std::size_t grow_prune_oracle_mismatches(std::size_t trials, std::uint64_t seed)
{
  Rng                                    rng(seed);
  std::uniform_int_distribution<int>     dim(1, 32);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  std::size_t                            bad = 0;
  for (std::size_t t = 0; t < trials; ++t)
  {
    std::size_t const rows  = static_cast<std::size_t>(dim(rng));
    std::size_t const cols  = static_cast<std::size_t>(dim(rng));
    auto              m     = random_masked(rows, cols, frac(rng), rng);
    double const      alpha = frac(rng);
    double const      beta  = frac(rng);
    double const      lr    = 0.05;
    auto const        g     = random_vector(m.size(), rng);

    auto const want_grown = oracle_grow(m, g, alpha, lr);
    grow<double>(m, g, alpha, lr);
    bool same = m.mask() == want_grown.mask() && m.values() == want_grown.values();

    auto const want_pruned = oracle_prune(m, beta);
    prune(m, beta);
    same = same && m.mask() == want_pruned.mask() && m.values() == want_pruned.values();
    bad += same ? 0 : 1;
  }
  return bad;
}

struct GradCheck
{
  std::size_t probes{0};
  double      max_rel_error{0};
};

/// Central finite differences of the single-sample cross-entropy against the analytic gradient at
/// randomly probed parameter entries. The training-mode forward is replayed with the same seed so
/// that dropout masks agree. A dormant probe is switched active at value 0 (the same function) so
/// its dense gradient can be checked too. Relative error uses a 1e-6 magnitude floor.
inline GradCheck gradient_check(Model<double> &model, Sample<double> const &x, std::size_t probes,
                                std::uint64_t seed, double h = 1e-4)
{
  auto loss = [&] {
    Rng r(seed);
    return softmax_cross_entropy<double>(forward<double>(model, x, Mode::kTrain, r), x.label).loss;
  };
  auto                   params = model.params();
  GradientBuffer<double> grads(params);
  ForwardRecord<double>  rec;
  {
    Rng r(seed);
    accumulate_sample_gradient<double>(model, x, Mode::kTrain, r, grads, rec);
  }
  std::size_t total = 0;
  for (auto const &p : params)
  {
    total += p.values.size();
  }
  Rng       pick(seed ^ 0x9e3779b97f4a7c15ULL);
  GradCheck out;
  for (std::size_t k = 0; k < probes; ++k)
  {
    std::size_t flat = pick() % total;
    std::size_t pi   = 0;
    while (flat >= params[pi].values.size())
    {
      flat -= params[pi].values.size();
      ++pi;
    }
    auto        &p        = params[pi];
    bool const   dormant  = p.matrix != nullptr && p.matrix->mask()[flat] == 0;
    if (dormant)
    {
      p.matrix->mask()[flat] = 1;
    }
    double const centre = p.values[flat];
    p.values[flat]      = centre + h;
    double const up     = loss();
    p.values[flat]      = centre - h;
    double const down   = loss();
    p.values[flat]      = centre;
    if (dormant)
    {
      p.matrix->mask()[flat] = 0;
    }
    double const numeric  = (up - down) / (2 * h);
    double const analytic = grads[pi][flat];
    double const scale    = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    out.max_rel_error     = std::max(out.max_rel_error, std::abs(numeric - analytic) / scale);
    ++out.probes;
  }
  return out;
}

}  // namespace spnn::testing
