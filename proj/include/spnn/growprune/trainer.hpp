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
#include "spnn/core/random.hpp"
#include "spnn/growprune/grow_prune.hpp"
#include "spnn/growprune/report.hpp"
#include "spnn/growprune/schedule.hpp"
#include "spnn/nn/model.hpp"
#include "spnn/numerics/sgd.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace spnn {

template <typename T>
struct TrainData
{
  std::vector<Sample<T>> train;
  std::vector<Sample<T>> val;
  std::vector<Sample<T>> test;
};

enum class MaskEvent
{
  kGrow,
  kPrune,
};

/// Observation points for monitoring a run. Masks are passed in growable-matrix order.
template <typename T>
struct TrainHooks
{
  std::function<void(Model<T> const &)> after_step;
  std::function<void(MaskEvent, std::vector<std::vector<std::uint8_t>> const &before, Model<T> const &after)>
    after_mask_update;
};

template <typename T>
std::vector<std::vector<std::uint8_t>> snapshot_masks(Model<T> const &model)
{
  std::vector<std::vector<std::uint8_t>> out;
  for (auto const *m : model.growable())
  {
    out.push_back(m->mask());
  }
  return out;
}

struct EvalResult
{
  double                   loss{0};
  double                   accuracy{0};
  std::vector<std::size_t> predictions;
};

template <typename T>
EvalResult evaluate(Model<T> const &model, std::vector<Sample<T>> const &set)
{
  EvalResult r;
  if (set.empty())
  {
    return r;
  }
  Rng         unused(0);
  std::size_t correct = 0;
  double      loss    = 0;
  r.predictions.reserve(set.size());
  for (auto const &s : set)
  {
    auto logits = forward<T>(model, s, Mode::kEval, unused);
    auto sl     = softmax_cross_entropy<T>(logits, s.label);
    auto pred   = argmax<T>(logits);
    loss += static_cast<double>(sl.loss);
    correct += pred == s.label ? 1 : 0;
    r.predictions.push_back(pred);
  }
  r.loss     = loss / static_cast<double>(set.size());
  r.accuracy = static_cast<double>(correct) / static_cast<double>(set.size());
  return r;
}

struct EpochStats
{
  double loss{0};
  double accuracy{0};
};

/// One shuffled pass of mini-batch momentum SGD with the mean batch gradient. When `epoch_sum` is
/// given, every per-sample gradient is also added to it (its sample count grows accordingly).
template <typename T>
EpochStats train_epoch(Model<T> &model, std::vector<Sample<T>> const &train, OptimizerState<T> &opt,
                       std::size_t batch_size, Rng &rng, GradientBuffer<T> *epoch_sum = nullptr,
                       TrainHooks<T> const *hooks = nullptr)
{
  if (train.empty())
  {
    throw DataError("training split is empty");
  }
  auto const               params = model.params();
  GradientBuffer<T>        batch(params);
  ForwardRecord<T>         record;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  double      loss    = 0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < order.size(); start += batch_size)
  {
    std::size_t const end = std::min(order.size(), start + batch_size);
    batch.zero();
    for (std::size_t k = start; k < end; ++k)
    {
      auto const &s = train[order[k]];
      auto        r = accumulate_sample_gradient<T>(model, s, Mode::kTrain, rng, batch, record);
      loss += static_cast<double>(r.loss);
      correct += r.prediction == s.label ? 1 : 0;
    }
    if (epoch_sum != nullptr)
    {
      epoch_sum->accumulate(batch);
    }
    sgd_step<T>(params, batch.mean(), opt);
    model.check_mask_consistency();
    if (hooks != nullptr && hooks->after_step)
    {
      hooks->after_step(model);
    }
  }
  return {loss / static_cast<double>(train.size()), static_cast<double>(correct) / static_cast<double>(train.size())};
}

struct PlateauOptions
{
  double      learning_rate{0.005};
  double      momentum{0.9};
  double      lr_decay_factor{10.0};
  std::size_t patience{50};
  std::size_t max_epochs{200};
  std::size_t max_lr_decays{2};
  std::size_t batch_size{256};

  static PlateauOptions from(GrowPruneSchedule const &s)
  {
    return {s.learning_rate, s.momentum, s.lr_decay_factor, s.plateau_patience, s.max_epochs, s.max_lr_decays,
            s.batch_size};
  }
};

/// Learning-rate schedule driven by validation accuracy. `observe` is called once per epoch with
/// that epoch's accuracy and reports what the trainer should do next.
class PlateauTracker
{
public:
  enum class Step
  {
    kImproved,
    kBad,
    kDecay,
    kStop,
  };

  PlateauTracker(double baseline, std::size_t patience, std::size_t max_decays)
    : best_(baseline)
    , patience_(patience)
    , max_decays_(max_decays)
  {}

  Step observe(double accuracy)
  {
    if (accuracy > best_)
    {
      best_ = accuracy;
      bad_  = 0;
      return Step::kImproved;
    }
    if (++bad_ <= patience_)
    {
      return Step::kBad;
    }
    if (decays_ == max_decays_)
    {
      return Step::kStop;
    }
    ++decays_;
    bad_ = 0;
    return Step::kDecay;
  }

  double      best() const { return best_; }
  std::size_t decays() const { return decays_; }

private:
  double      best_;
  std::size_t patience_;
  std::size_t max_decays_;
  std::size_t bad_{0};
  std::size_t decays_{0};
};

/// Trains until validation accuracy plateaus. The starting model is the epoch-0 baseline; an epoch
/// that does not beat the best so far counts as bad, and once more than `patience` bad epochs
/// accumulate the learning rate is divided by the decay factor. The phase ends at max_epochs or at
/// the plateau following `max_lr_decays` decays. The model is left at its best-validation weights;
/// the best validation accuracy is returned.
template <typename T>
double train_to_plateau(Model<T> &model, TrainData<T> const &data, PlateauOptions const &o, Rng &rng,
                        TrainReport &report, std::string const &phase, double pruning_ratio = 0.0,
                        TrainHooks<T> const *hooks = nullptr)
{
  if (data.train.empty() || data.val.empty())
  {
    throw DataError("train_to_plateau needs non-empty train and validation splits");
  }
  OptimizerState<T> opt(model.params(), static_cast<T>(o.learning_rate), static_cast<T>(o.momentum));
  Model<T>          best_model = model;
  PlateauTracker    plateau(evaluate(model, data.val).accuracy, o.patience, o.max_lr_decays);

  for (std::size_t e = 1; e <= o.max_epochs; ++e)
  {
    auto const t0  = std::chrono::steady_clock::now();
    auto const st  = train_epoch<T>(model, data.train, opt, o.batch_size, rng, nullptr, hooks);
    auto const val = evaluate(model, data.val);
    auto const t1  = std::chrono::steady_clock::now();
    report.epochs.push_back({phase, report.next_epoch(), e, st.loss, st.accuracy, val.loss, val.accuracy,
                             sparsity(model), static_cast<double>(opt.learning_rate), pruning_ratio,
                             std::chrono::duration<double>(t1 - t0).count()});
    auto const step = plateau.observe(val.accuracy);
    if (step == PlateauTracker::Step::kImproved)
    {
      best_model = model;
    }
    else if (step == PlateauTracker::Step::kDecay)
    {
      opt.learning_rate /= static_cast<T>(o.lr_decay_factor);
    }
    else if (step == PlateauTracker::Step::kStop)
    {
      break;
    }
  }
  model = std::move(best_model);
  return plateau.best();
}

/// Growth phase: each epoch trains normally while summing per-sample gradients, then grows every
/// growable matrix from the epoch-average gradient at the current learning rate.
template <typename T>
void run_growth_phase(Model<T> &model, TrainData<T> const &data, GrowPruneSchedule const &sched, Rng &rng,
                      TrainReport &report, TrainHooks<T> const *hooks = nullptr)
{
  sched.validate();
  if (sched.growth_epochs == 0)
  {
    return;
  }
  auto              params = model.params();
  OptimizerState<T> opt(params, static_cast<T>(sched.learning_rate), static_cast<T>(sched.momentum));

  // parameter index of each growable matrix
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < params.size(); ++i)
  {
    if (params[i].growable)
    {
      slots.push_back(i);
    }
  }

  for (std::size_t e = 1; e <= sched.growth_epochs; ++e)
  {
    auto const        t0 = std::chrono::steady_clock::now();
    GradientBuffer<T> epoch_sum(params);
    auto const        st     = train_epoch<T>(model, data.train, opt, sched.batch_size, rng, &epoch_sum, hooks);
    auto const        avg    = epoch_sum.mean();
    auto const        before = snapshot_masks(model);
    double const      sp0    = sparsity(model);
    std::size_t       grown  = 0;
    for (std::size_t g = 0; g < slots.size(); ++g)
    {
      grown += grow<T>(*params[slots[g]].matrix, avg[slots[g]], sched.growth_ratio, opt.learning_rate,
                       sched.growth_update)
                 .changed;
    }
    model.check_mask_consistency();
    if (hooks != nullptr && hooks->after_mask_update)
    {
      hooks->after_mask_update(MaskEvent::kGrow, before, model);
    }
    auto const val = data.val.empty() ? EvalResult{} : evaluate(model, data.val);
    auto const t1  = std::chrono::steady_clock::now();
    report.epochs.push_back({"grow", report.next_epoch(), e, st.loss, st.accuracy, val.loss, val.accuracy,
                             sparsity(model), static_cast<double>(opt.learning_rate), 0.0,
                             std::chrono::duration<double>(t1 - t0).count()});
    report.phases.push_back({"grow", e, sched.growth_ratio, grown, sp0, sparsity(model), val.accuracy, true});
  }
}

/// Plateau training followed by the iterative prune/retrain loop. A pruning iteration is accepted when
/// the retrained validation accuracy stays within the recovery tolerance of the best accepted accuracy;
/// otherwise the pre-prune weights are restored and the ratio is halved. The loop ends once the ratio
/// falls below the floor.
template <typename T>
void run_pruning_phase(Model<T> &model, TrainData<T> const &data, GrowPruneSchedule const &sched, Rng &rng,
                       TrainReport &report, TrainHooks<T> const *hooks = nullptr)
{
  sched.validate();
  auto const opts = PlateauOptions::from(sched);
  double     best = train_to_plateau<T>(model, data, opts, rng, report, "train", 0.0, hooks);
  report.pre_prune_peak = best;

  double      beta      = sched.initial_pruning_ratio;
  std::size_t iteration = 0;
  while (beta >= sched.pruning_ratio_floor)
  {
    ++iteration;
    Model<T>     checkpoint = model;
    auto const   before     = snapshot_masks(model);
    double const sp0        = sparsity(model);
    std::size_t  removed    = 0;
    for (auto *m : model.growable())
    {
      removed += prune(*m, beta).changed;
    }
    model.check_mask_consistency();
    if (hooks != nullptr && hooks->after_mask_update)
    {
      hooks->after_mask_update(MaskEvent::kPrune, before, model);
    }
    if (removed == 0)
    {
      report.phases.push_back({"prune", iteration, beta, 0, sp0, sp0, best, false});
      beta /= 2.0;
      continue;
    }
    double const sp1 = sparsity(model);
    double const acc = train_to_plateau<T>(model, data, opts, rng, report, "retrain", beta, hooks);
    bool const   ok  = acc >= best - sched.recovery_tolerance;
    report.phases.push_back({"prune", iteration, beta, removed, sp0, sp1, acc, ok});
    if (ok)
    {
      best = std::max(best, acc);
    }
    else
    {
      model = std::move(checkpoint);
      beta /= 2.0;
    }
  }
}

/// Fills in the census and final validation accuracy of a finished run.
template <typename T>
void finalize_report(Model<T> const &model, TrainData<T> const &data, TrainReport &report)
{
  report.census             = mask_census(model);
  report.final_sparsity     = sparsity(model);
  report.final_val_accuracy = data.val.empty() ? report.final_val_accuracy : evaluate(model, data.val).accuracy;
  if (!data.test.empty())
  {
    report.final_test_accuracy = evaluate(model, data.test).accuracy;
  }
}

/// The complete flow on a seed-initialised model: growth, plateau training, iterative pruning.
template <typename T>
TrainReport grow_and_prune(Model<T> &model, TrainData<T> const &data, GrowPruneSchedule const &sched, Rng &rng,
                           TrainHooks<T> const *hooks = nullptr)
{
  TrainReport report;
  run_growth_phase<T>(model, data, sched, rng, report, hooks);
  run_pruning_phase<T>(model, data, sched, rng, report, hooks);
  finalize_report<T>(model, data, report);
  return report;
}

}  // namespace spnn
