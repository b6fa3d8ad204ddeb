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

#include "spnn/app/config.hpp"
#include "spnn/app/pipeline.hpp"
#include "spnn/core/error.hpp"
#include "spnn/core/random.hpp"
#include "spnn/data/dataset_io.hpp"
#include "spnn/data/synth.hpp"
#include "spnn/growprune/grow_prune.hpp"
#include "spnn/growprune/report.hpp"
#include "spnn/growprune/trainer.hpp"
#include "spnn/io/checkpoint.hpp"
#include "spnn/io/model_file.hpp"
#include "spnn/metrics/confusion.hpp"
#include "spnn/metrics/cost.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace spnn::app {

namespace fs = std::filesystem;

enum ExitCode : int
{
  kExitOk     = 0,
  kExitConfig = 1,
  kExitData   = 2,
};

/// Usage and configuration problems map to 1, everything else (data, formats, I/O) to 2.
inline int exit_code_for(std::exception const &e)
{
  if (dynamic_cast<ConfigError const *>(&e) != nullptr || dynamic_cast<ParameterError const *>(&e) != nullptr)
  {
    return kExitConfig;
  }
  return kExitData;
}

template <typename F>
decltype(auto) with_precision(int precision, F &&f)
{
  if (precision == 32)
  {
    return f(std::type_identity<float>{});
  }
  return f(std::type_identity<double>{});
}

namespace detail {

inline void require(std::string const &value, char const *key, char const *command)
{
  if (value.empty())
  {
    throw ConfigError(std::string(command) + " needs --" + key);
  }
}

inline void make_dir(fs::path const &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
  {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }
}

inline void write_text_file(fs::path const &p, std::string const &text)
{
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os || !(os << text))
  {
    throw IoError("cannot write " + p.string());
  }
}

inline std::string pct(double fraction)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", metrics::percent_1dp(fraction));
  return buf;
}

inline std::string rate_csv(metrics::Rate r)
{
  return r ? format_double(*r) : "nan";
}

}  // namespace detail

// ---------------------------------------------------------------- synth

struct SynthCensus
{
  std::vector<std::size_t> subjects_per_class;
  std::vector<std::size_t> instances_per_class;
  std::size_t              min_windows{0};
  std::size_t              max_windows{0};
};

inline SynthCensus cmd_synth(RunConfig const &cfg, std::ostream &os)
{
  detail::require(cfg.out, "out", "synth");
  auto const  schema = data::SensorSchema::standard();
  fs::path const root(cfg.out);
  detail::make_dir(root);

  SynthCensus c;
  c.subjects_per_class.assign(cfg.synth.num_classes, 0);
  c.instances_per_class.assign(cfg.synth.num_classes, 0);
  c.min_windows = static_cast<std::size_t>(-1);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < cfg.synth.total_subjects(); ++i)
  {
    auto const subject = data::synth_subject(cfg.synth, schema, i, cfg.seed);
    data::write_subject(root, subject);
    auto const n = data::subject_instances(subject, schema).size();
    ++c.subjects_per_class[subject.label];
    c.instances_per_class[subject.label] += n;
    c.min_windows = std::min(c.min_windows, n);
    c.max_windows = std::max(c.max_windows, n);
    ids.push_back(subject.id);
  }
  data::write_manifest(root, ids);

  std::size_t total = 0;
  for (auto n : c.instances_per_class)
  {
    total += n;
  }
  if (cfg.format == "csv")
  {
    os << "name,value\n";
    os << "subjects," << ids.size() << '\n';
    for (std::size_t k = 0; k < c.subjects_per_class.size(); ++k)
    {
      os << "subjects.class" << k << ',' << c.subjects_per_class[k] << '\n';
    }
    os << "instances," << total << '\n';
    for (std::size_t k = 0; k < c.instances_per_class.size(); ++k)
    {
      os << "instances.class" << k << ',' << c.instances_per_class[k] << '\n';
    }
    os << "windows_per_subject.min," << c.min_windows << '\n';
    os << "windows_per_subject.max," << c.max_windows << '\n';
  }
  else
  {
    os << "wrote " << ids.size() << " subjects to " << root.string() << '\n';
    for (std::size_t k = 0; k < c.subjects_per_class.size(); ++k)
    {
      os << "  class " << k << ": " << c.subjects_per_class[k] << " subjects, " << c.instances_per_class[k]
         << " windows\n";
    }
    os << "  total windows: " << total << " (" << c.min_windows << " to " << c.max_windows << " per subject)\n";
  }
  return c;
}

// ---------------------------------------------------------------- train

template <typename T>
Model<T> build_model(RunConfig const &cfg, std::size_t steps, std::size_t width, Rng &rng)
{
  if (cfg.kind == ModelKind::kServer)
  {
    ServerShape shape;
    shape.input_width  = width;
    shape.hidden       = cfg.server_hidden;
    shape.num_classes  = cfg.classes;
    shape.dropout_rate = cfg.schedule.dropout_rate;
    return build_server<T>(shape, rng);
  }
  EdgeShape shape;
  shape.input_width  = width;
  shape.state_width  = cfg.edge_state;
  shape.hidden_width = cfg.edge_hidden;
  shape.steps        = steps;
  shape.num_classes  = cfg.classes;
  shape.dropout_rate = cfg.schedule.dropout_rate;
  return build_edge<T>(shape, rng);
}

/// Files written by a finished training run.
struct TrainArtifacts
{
  fs::path model;
  fs::path epochs;
  fs::path phases;
  fs::path summary;

  explicit TrainArtifacts(fs::path const &dir)
    : model(dir / "model.spnn")
    , epochs(dir / "epochs.csv")
    , phases(dir / "phases.csv")
    , summary(dir / "summary.csv")
  {}
};

template <typename T>
TrainReport train_with(RunConfig const &cfg, std::ostream &os, TrainHooks<T> const *hooks = nullptr)
{
  detail::require(cfg.data, "data", "train");
  detail::require(cfg.out, "out", "train");
  auto prep = prepare_dataset<T>(cfg.data, cfg.kind, cfg.classes);

  Rng         init_rng(derive_seed(cfg.seed, 1));
  Rng         rng(derive_seed(cfg.seed, 2));
  Model<T>    model;
  TrainReport report;
  if (!cfg.resume.empty())
  {
    auto ck = io::load_checkpoint<T>(cfg.resume);
    if (ck.file.model.kind() != cfg.kind || ck.file.model.num_classes() != cfg.classes)
    {
      throw ConfigError("checkpoint model does not match the configured kind and class count");
    }
    if (!(ck.file.scaler == prep.scaler))
    {
      throw ConfigError("checkpoint was made on a different dataset");
    }
    model  = std::move(ck.file.model);
    rng    = ck.rng;
    report = std::move(ck.report);
  }
  else
  {
    model = build_model<T>(cfg, prep.steps, prep.width, init_rng);
    seed_init(model, cfg.schedule.seed_fill_rate, init_rng);
    run_growth_phase<T>(model, prep.data, cfg.schedule, rng, report, hooks);
    if (!cfg.checkpoint.empty())
    {
      io::save_checkpoint<T>(cfg.checkpoint, model, prep.scaler, rng, report);
    }
    if (cfg.stop_after == "growth")
    {
      os << "stopped after the growth phase (sparsity " << detail::pct(sparsity(model)) << ")\n";
      return report;
    }
  }
  run_pruning_phase<T>(model, prep.data, cfg.schedule, rng, report, hooks);
  finalize_report<T>(model, prep.data, report);

  fs::path const out(cfg.out);
  detail::make_dir(out);
  TrainArtifacts const files(out);
  io::save_model<T>(files.model, model, prep.scaler);
  std::ostringstream epochs;
  write_epoch_csv(epochs, report);
  detail::write_text_file(files.epochs, epochs.str());
  std::ostringstream phases;
  write_phase_csv(phases, report);
  detail::write_text_file(files.phases, phases.str());
  std::ostringstream summary;
  write_summary_csv(summary, report);
  detail::write_text_file(files.summary, summary.str());

  if (cfg.format == "csv")
  {
    os << summary.str();
  }
  else
  {
    os << to_string(cfg.kind) << " model, " << cfg.classes << " classes, " << prep.counts.train << '/'
       << prep.counts.val << '/' << prep.counts.test << " train/val/test windows\n";
    os << "  epochs: " << report.epochs.size() << '\n';
    os << "  pre-prune peak val accuracy: " << detail::pct(report.pre_prune_peak) << '\n';
    os << "  final val accuracy: " << detail::pct(report.final_val_accuracy) << '\n';
    os << "  final test accuracy: " << detail::pct(report.final_test_accuracy) << '\n';
    os << "  final sparsity: " << detail::pct(report.final_sparsity) << '\n';
    os << "  wrote " << files.model.string() << '\n';
  }
  return report;
}

inline TrainReport cmd_train(RunConfig const &cfg, std::ostream &os)
{
  return with_precision(cfg.precision, [&]<typename T>(std::type_identity<T>) { return train_with<T>(cfg, os); });
}

// ---------------------------------------------------------------- eval

struct EvalSummary
{
  std::string                split;
  ModelKind                  kind{ModelKind::kServer};
  metrics::ConfusionMatrix   confusion;
  double                     accuracy{0};
  metrics::BinaryMetrics     binary;
  metrics::MulticlassMetrics multiclass;
  metrics::CostReport        cost;
};

template <typename T>
EvalSummary eval_with(RunConfig const &cfg)
{
  detail::require(cfg.model, "model", "eval");
  detail::require(cfg.data, "data", "eval");
  auto       file = io::load_model<T>(cfg.model);
  auto const prep = prepare_dataset<T>(cfg.data, file.model.kind(), file.model.num_classes(), file.scaler);
  if (prep.width != file.model.input_width() || prep.steps != file.model.input_steps())
  {
    throw ConfigError("dataset encoding does not match the model input shape");
  }
  auto const &set = select_split(prep.data, cfg.split);
  if (set.empty())
  {
    throw DataError("the " + cfg.split + " split is empty");
  }
  auto const               res = evaluate(file.model, set);
  std::vector<std::size_t> labels;
  for (auto const &s : set)
  {
    labels.push_back(s.label);
  }
  EvalSummary e;
  e.split     = cfg.split;
  e.kind      = file.model.kind();
  e.confusion = metrics::confusion(res.predictions, labels, file.model.num_classes());
  e.accuracy  = res.accuracy;
  if (e.confusion.k() == 2)
  {
    e.binary = metrics::binary_metrics(e.confusion);
  }
  e.multiclass = metrics::multiclass_metrics(e.confusion);
  e.cost       = metrics::count_flops(file.model);
  return e;
}

inline void print_eval(EvalSummary const &e, std::string const &format, std::ostream &os)
{
  auto const &cm = e.confusion;
  if (format == "csv")
  {
    os << "name,value\n";
    os << "split," << e.split << '\n';
    os << "instances," << cm.total() << '\n';
    os << "accuracy," << format_double(e.accuracy) << '\n';
    if (cm.k() == 2)
    {
      os << "fpr," << detail::rate_csv(e.binary.fpr) << '\n';
      os << "fnr," << detail::rate_csv(e.binary.fnr) << '\n';
      os << "f1," << detail::rate_csv(e.binary.f1) << '\n';
    }
    else
    {
      os << "healthy_fpr," << detail::rate_csv(e.multiclass.healthy_fpr) << '\n';
      for (std::size_t c = 0; c < e.multiclass.fnr.size(); ++c)
      {
        os << "fnr.class" << c << ',' << detail::rate_csv(e.multiclass.fnr[c]) << '\n';
      }
    }
    for (std::size_t i = 0; i < cm.k(); ++i)
    {
      for (std::size_t j = 0; j < cm.k(); ++j)
      {
        os << "confusion." << i << '.' << j << ',' << cm(i, j) << '\n';
      }
    }
    os << "params.dense," << e.cost.dense_params << '\n';
    os << "params.nonzero," << e.cost.nonzero_params << '\n';
    os << "sparsity," << format_double(e.cost.sparsity()) << '\n';
    os << "flops," << e.cost.total_flops << '\n';
    return;
  }
  os << to_string(e.kind) << " model on the " << e.split << " split (" << cm.total() << " windows)\n";
  os << "confusion matrix, rows = true class, columns = predicted class:\n";
  for (std::size_t i = 0; i < cm.k(); ++i)
  {
    os << "  ";
    for (std::size_t j = 0; j < cm.k(); ++j)
    {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%8zu", cm(i, j));
      os << buf;
    }
    os << '\n';
  }
  os << "accuracy: " << detail::pct(e.accuracy) << " (" << cm.trace() << '/' << cm.total() << ")\n";
  if (cm.k() == 2)
  {
    os << "false positive rate: " << metrics::format_rate(e.binary.fpr) << '\n';
    os << "false negative rate: " << metrics::format_rate(e.binary.fnr) << '\n';
    os << "F1 score: " << metrics::format_rate(e.binary.f1) << '\n';
  }
  else
  {
    os << "healthy false positive rate: " << metrics::format_rate(e.multiclass.healthy_fpr) << '\n';
    for (std::size_t c = 0; c < e.multiclass.fnr.size(); ++c)
    {
      os << "class " << c << " false negative rate: " << metrics::format_rate(e.multiclass.fnr[c]) << '\n';
    }
  }
  os << "parameters: " << e.cost.nonzero_params << " of " << e.cost.dense_params << " (sparsity "
     << detail::pct(e.cost.sparsity()) << ")\n";
  os << "FLOPs per inference: " << e.cost.total_flops << '\n';
}

inline EvalSummary cmd_eval(RunConfig const &cfg, std::ostream &os)
{
  auto e = with_precision(cfg.precision, [&]<typename T>(std::type_identity<T>) { return eval_with<T>(cfg); });
  print_eval(e, cfg.format, os);
  return e;
}

// ---------------------------------------------------------------- inspect

inline void cmd_inspect(RunConfig const &cfg, std::ostream &os)
{
  detail::require(cfg.model, "model", "inspect");
  auto const  bytes = io::read_file(cfg.model);
  auto const  file  = io::load_model_bytes<double>(bytes);
  auto const &m     = file.model;
  auto const  cost  = metrics::count_flops(m);
  bool const  csv   = cfg.format == "csv";
  if (csv)
  {
    os << "name,value\n";
    os << "version," << io::kModelVersion << '\n';
    os << "kind," << to_string(m.kind()) << '\n';
    os << "classes," << m.num_classes() << '\n';
    os << "bytes," << bytes.size() << '\n';
    os << "scaler_channels," << file.scaler.channels() << '\n';
    for (auto const &l : cost.layers)
    {
      os << "layer." << l.name << ".rows," << l.rows << '\n';
      os << "layer." << l.name << ".cols," << l.cols << '\n';
      os << "layer." << l.name << ".nnz," << l.nnz << '\n';
    }
    os << "params.dense," << cost.dense_params << '\n';
    os << "params.nonzero," << cost.nonzero_params << '\n';
    os << "sparsity," << format_double(cost.sparsity()) << '\n';
    os << "flops," << cost.total_flops << '\n';
    return;
  }
  os << "model file version " << io::kModelVersion << ", " << bytes.size() << " bytes\n";
  os << "kind: " << to_string(m.kind()) << ", classes: " << m.num_classes() << ", input: " << m.input_steps()
     << " x " << m.input_width() << '\n';
  if (m.kind() == ModelKind::kServer)
  {
    for (auto const &l : m.server().layers)
    {
      os << "  sc " << l.in_width() << " -> " << l.out_width() << ", " << to_string(l.activation) << ", dropout "
         << format_double(l.dropout_rate) << '\n';
    }
  }
  else
  {
    auto const &e = m.edge();
    os << "  h-lstm state " << e.cell.state_width << ", gate hidden " << e.cell.hidden_width << ", dropout "
       << format_double(e.cell.dropout_rate) << "; dense head " << e.head.cols() << " -> " << e.head.rows() << '\n';
  }
  os << "mask census:\n";
  for (auto const &l : cost.layers)
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-32s %5zu x %-5zu %9zu / %-9zu %s\n", l.name.c_str(), l.rows, l.cols, l.nnz,
                  l.dense, detail::pct(1.0 - l.sparsity()).c_str());
    os << buf;
  }
  os << "parameters: " << cost.nonzero_params << " of " << cost.dense_params << " (sparsity "
     << detail::pct(cost.sparsity()) << ")\n";
  os << "FLOPs per inference: " << cost.total_flops << '\n';
  os << "scaler channels: " << file.scaler.channels() << '\n';
}

// ---------------------------------------------------------------- sweep

/// Trains and evaluates one configuration per entry file, each in out/<entry stem>, and writes the
/// combined results to out/sweep.csv. Each entry is layered over `base` and under `overrides`.
inline std::string cmd_sweep(ConfigMap const &base, ConfigMap const &overrides, std::vector<std::string> const &entries,
                             std::ostream &os)
{
  if (entries.empty())
  {
    throw ConfigError("sweep needs at least one config file");
  }
  auto const top = resolve_config([&] {
    ConfigMap m = base;
    for (auto const &[k, v] : overrides)
    {
      m[k] = v;
    }
    return m;
  }());
  detail::require(top.out, "out", "sweep");
  detail::make_dir(top.out);

  std::ostringstream table;
  table << "config,kind,classes,final_sparsity,nonzero_params,flops,val_accuracy,test_accuracy,fpr,fnr,f1\n";
  for (auto const &entry : entries)
  {
    ConfigMap m = base;
    for (auto const &[k, v] : read_config_file(entry))
    {
      m[k] = v;
    }
    for (auto const &[k, v] : overrides)
    {
      m[k] = v;
    }
    auto const stem = fs::path(entry).stem().string();
    m["out"]        = (fs::path(top.out) / stem).string();
    auto cfg        = resolve_config(m);
    std::ostringstream quiet;
    auto const report = cmd_train(cfg, quiet);
    cfg.model         = TrainArtifacts(cfg.out).model.string();
    cfg.split         = "test";
    auto const e      = cmd_eval(cfg, quiet);

    std::string fpr;
    std::string fnr;
    std::string f1;
    if (e.confusion.k() == 2)
    {
      fpr = detail::rate_csv(e.binary.fpr);
      fnr = detail::rate_csv(e.binary.fnr);
      f1  = detail::rate_csv(e.binary.f1);
    }
    else
    {
      fpr = detail::rate_csv(e.multiclass.healthy_fpr);
      for (std::size_t c = 0; c < e.multiclass.fnr.size(); ++c)
      {
        fnr += (c == 0 ? "" : ";") + detail::rate_csv(e.multiclass.fnr[c]);
      }
      f1 = "nan";
    }
    table << stem << ',' << to_string(cfg.kind) << ',' << cfg.classes << ',' << format_double(report.final_sparsity)
          << ',' << e.cost.nonzero_params << ',' << e.cost.total_flops << ',' << format_double(report.final_val_accuracy)
          << ',' << format_double(e.accuracy) << ',' << fpr << ',' << fnr << ',' << f1 << '\n';
    os << "finished " << stem << ": test accuracy " << detail::pct(e.accuracy) << ", sparsity "
       << detail::pct(report.final_sparsity) << '\n';
  }
  auto const path = fs::path(top.out) / "sweep.csv";
  detail::write_text_file(path, table.str());
  os << "wrote " << path.string() << '\n';
  return table.str();
}

}  // namespace spnn::app
