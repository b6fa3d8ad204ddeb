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

#include "spnn/app/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct Subcommand
{
  CLI::App                          *app{nullptr};
  std::string                        config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option *> options;
  std::vector<std::string>           entries;  // sweep only
};

std::string dashed(std::string_view key)
{
  std::string s(key);
  for (auto &ch : s)
  {
    ch = ch == '_' ? '-' : ch;
  }
  return s;
}

void add_common(Subcommand &sub)
{
  sub.app->add_option("--config", sub.config, "key=value settings file");
  for (auto key : spnn::app::kConfigKeys)
  {
    std::string const k(key);
    sub.options[k] = sub.app->add_option("--" + dashed(key), sub.values[k], "override " + k);
  }
}

spnn::app::ConfigMap overrides_of(Subcommand const &sub)
{
  spnn::app::ConfigMap m;
  for (auto const &[k, opt] : sub.options)
  {
    if (opt->count() > 0)
    {
      m[k] = sub.values.at(k);
    }
  }
  return m;
}

spnn::app::RunConfig resolve(Subcommand const &sub)
{
  spnn::app::ConfigMap m;
  if (!sub.config.empty())
  {
    m = spnn::app::read_config_file(sub.config);
  }
  for (auto const &[k, v] : overrides_of(sub))
  {
    m[k] = v;
  }
  return spnn::app::resolve_config(m);
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Sparse grow-and-prune classifiers for multi-rate wearable sensor data"};
  app.require_subcommand(1);

  Subcommand synth;
  synth.app = app.add_subcommand("synth", "generate a synthetic dataset directory");
  Subcommand train;
  train.app = app.add_subcommand("train", "seed, grow and prune a model on a dataset");
  Subcommand eval;
  eval.app = app.add_subcommand("eval", "evaluate a model file on one split of a dataset");
  Subcommand sweep;
  sweep.app = app.add_subcommand("sweep", "train and evaluate a list of configs, concatenating the reports");
  Subcommand inspect;
  inspect.app = app.add_subcommand("inspect", "print a model file's header and mask census");
  for (auto *sub : {&synth, &train, &eval, &sweep, &inspect})
  {
    add_common(*sub);
  }
  sweep.app->add_option("entries", sweep.entries, "config files, one per run")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &e)
  {
    return app.exit(e);
  }
  catch (CLI::CallForAllHelp const &e)
  {
    return app.exit(e);
  }
  catch (CLI::ParseError const &e)
  {
    app.exit(e);
    return spnn::app::kExitConfig;
  }

  try
  {
    if (synth.app->parsed())
    {
      spnn::app::cmd_synth(resolve(synth), std::cout);
    }
    else if (train.app->parsed())
    {
      spnn::app::cmd_train(resolve(train), std::cout);
    }
    else if (eval.app->parsed())
    {
      spnn::app::cmd_eval(resolve(eval), std::cout);
    }
    else if (sweep.app->parsed())
    {
      spnn::app::ConfigMap base;
      if (!sweep.config.empty())
      {
        base = spnn::app::read_config_file(sweep.config);
      }
      spnn::app::cmd_sweep(base, overrides_of(sweep), sweep.entries, std::cout);
    }
    else if (inspect.app->parsed())
    {
      spnn::app::cmd_inspect(resolve(inspect), std::cout);
    }
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return spnn::app::exit_code_for(e);
  }
  return spnn::app::kExitOk;
}
