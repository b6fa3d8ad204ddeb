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

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

using spnn::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Run
{
  int         code{-1};
  std::string out;
};

Run spnn_cli(std::string const &args)
{
  std::string const cmd = std::string(SPNN_CLI_PATH) + " " + args + " 2>&1";
  FILE             *pipe = popen(cmd.c_str(), "r");
  Run               r;
  if (pipe == nullptr)
  {
    return r;
  }
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;)
  {
    r.out.append(buf, n);
  }
  int const status = pclose(pipe);
  r.code           = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(fs::path const &p)
{
  std::ifstream      in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree(fs::path const &root)
{
  std::map<std::string, std::string> out;
  for (auto const &e : fs::recursive_directory_iterator(root))
  {
    if (e.is_regular_file())
    {
      out[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
  }
  return out;
}

std::map<std::string, std::string> csv_pairs(std::string const &text)
{
  std::map<std::string, std::string> out;
  std::istringstream                 in(text);
  std::string                        line;
  while (std::getline(in, line))
  {
    auto const comma = line.find(',');
    if (comma != std::string::npos)
    {
      out[line.substr(0, comma)] = line.substr(comma + 1);
    }
  }
  return out;
}

std::string const kSmallTrain = " --server-hidden 16,8 --growth-epochs 2 --plateau-patience 2 --max-epochs 4"
                                " --batch-size 16 --learning-rate 0.01 --max-lr-decays 0 --initial-pruning-ratio 0.5";

/// Two small synthetic datasets shared by every test in the suite.
class Cli : public ::testing::Test
{
protected:
  static void SetUpTestSuite()
  {
    root_ = new TempDir("cli");
    auto const two = spnn_cli("synth --out " + binary_data().string() +
                              " --subjects 4,4 --duration-min-h 0.25 --duration-max-h 0.25 --seed 3");
    ASSERT_EQ(two.code, 0) << two.out;
    auto const three = spnn_cli("synth --classes 3 --out " + ternary_data().string() +
                                " --subjects 3,3,3 --duration-min-h 0.25 --duration-max-h 0.25 --seed 4");
    ASSERT_EQ(three.code, 0) << three.out;
  }
  static void TearDownTestSuite()
  {
    delete root_;
    root_ = nullptr;
  }

  static fs::path binary_data() { return *root_ / "binary"; }
  static fs::path ternary_data() { return *root_ / "ternary"; }
  static fs::path scratch(std::string const &name) { return *root_ / name; }

private:
  static TempDir *root_;
};

TempDir *Cli::root_ = nullptr;

}  // namespace

TEST_F(Cli, HelpAndUsageErrors)
{
  EXPECT_EQ(spnn_cli("--help").code, 0);
  EXPECT_EQ(spnn_cli("train --help").code, 0);
  EXPECT_EQ(spnn_cli("").code, 1);
  EXPECT_EQ(spnn_cli("frobnicate").code, 1);
  EXPECT_EQ(spnn_cli("train --no-such-flag 1").code, 1);
  EXPECT_EQ(spnn_cli("train --data x --out y --precision 16").code, 1);
  EXPECT_EQ(spnn_cli("eval --data " + binary_data().string()).code, 1);  // no model given
}

TEST_F(Cli, ConfigFileKeysAreChecked)
{
  auto const cfg = scratch("bad.cfg");
  std::ofstream(cfg) << "# comment\nseed=3\nno_such_key=1\n";
  auto const r = spnn_cli("synth --config " + cfg.string() + " --out " + scratch("unused").string());
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("no_such_key"), std::string::npos) << r.out;
}

TEST_F(Cli, SynthIsByteIdenticalForEqualSeeds)
{
  auto const again = scratch("binary_again");
  auto const r = spnn_cli("synth --out " + again.string() +
                          " --subjects 4,4 --duration-min-h 0.25 --duration-max-h 0.25 --seed 3");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(tree(again), tree(binary_data()));
  EXPECT_NE(r.out.find("8 subjects"), std::string::npos) << r.out;

  auto const other = scratch("binary_other");
  ASSERT_EQ(spnn_cli("synth --out " + other.string() +
                     " --subjects 4,4 --duration-min-h 0.25 --duration-max-h 0.25 --seed 5")
              .code,
            0);
  EXPECT_NE(tree(other), tree(binary_data()));
}

TEST_F(Cli, TrainThenEvalReproducesRecordedAccuracies)
{
  auto const out = scratch("run");
  auto const t   = spnn_cli("train --data " + binary_data().string() + " --out " + out.string() + kSmallTrain);
  ASSERT_EQ(t.code, 0) << t.out;
  auto const summary = csv_pairs(slurp(out / "summary.csv"));

  auto const test = spnn_cli("eval --format csv --model " + (out / "model.spnn").string() + " --data " +
                             binary_data().string() + " --split test");
  ASSERT_EQ(test.code, 0) << test.out;
  auto const test_rows = csv_pairs(test.out);
  EXPECT_EQ(test_rows.at("accuracy"), summary.at("final_test_accuracy"));
  EXPECT_EQ(test_rows.at("sparsity"), summary.at("final_sparsity"));

  auto const val = spnn_cli("eval --format csv --model " + (out / "model.spnn").string() + " --data " +
                            binary_data().string() + " --split val");
  ASSERT_EQ(val.code, 0) << val.out;
  EXPECT_EQ(csv_pairs(val.out).at("accuracy"), summary.at("final_val_accuracy"));

  // every csv line is name,value
  std::istringstream lines(test.out);
  std::string        line;
  std::getline(lines, line);
  EXPECT_EQ(line, "name,value");
  while (std::getline(lines, line))
  {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 1) << line;
  }
  for (auto const *key : {"fpr", "fnr", "f1", "confusion.0.0", "confusion.1.1", "params.nonzero", "flops"})
  {
    EXPECT_EQ(test_rows.count(key), 1U) << key;
  }

  auto const text = spnn_cli("eval --model " + (out / "model.spnn").string() + " --data " + binary_data().string());
  EXPECT_EQ(text.code, 0);
  EXPECT_EQ(text.out, spnn_cli("eval --model " + (out / "model.spnn").string() + " --data " +
                               binary_data().string())
                        .out);
  EXPECT_NE(text.out.find("F1 score"), std::string::npos) << text.out;

  auto const inspect = spnn_cli("inspect --format csv --model " + (out / "model.spnn").string());
  EXPECT_EQ(inspect.code, 0) << inspect.out;
}

TEST_F(Cli, ThreeClassRunHasThreeLogits)
{
  auto const out = scratch("run3");
  auto const t   = spnn_cli("train --classes 3 --data " + ternary_data().string() + " --out " + out.string() +
                            kSmallTrain);
  ASSERT_EQ(t.code, 0) << t.out;
  auto const file = spnn::io::load_model<double>(out / "model.spnn");
  EXPECT_EQ(file.model.num_classes(), 3U);
  auto const e = spnn_cli("eval --format csv --model " + (out / "model.spnn").string() + " --data " +
                          ternary_data().string());
  ASSERT_EQ(e.code, 0) << e.out;
  auto const rows = csv_pairs(e.out);
  EXPECT_EQ(rows.count("healthy_fpr"), 1U);
  EXPECT_EQ(rows.count("fnr.class1"), 1U);
  EXPECT_EQ(rows.count("confusion.2.2"), 1U);
}

TEST_F(Cli, ClassMismatchIsAConfigError)
{
  auto const r = spnn_cli("train --classes 3 --data " + binary_data().string() + " --out " +
                          scratch("mismatch").string() + kSmallTrain);
  EXPECT_EQ(r.code, 1) << r.out;
  auto const e = spnn_cli("train --kind edge --data " + scratch("nowhere").string() + " --out " +
                          scratch("nowhere_out").string());
  EXPECT_EQ(e.code, 2) << e.out;
}

TEST_F(Cli, DamagedModelIsADataError)
{
  auto const out = scratch("damaged");
  fs::create_directories(out);
  std::ofstream(out / "model.spnn", std::ios::binary) << "SPNNMODL garbage";
  auto const r = spnn_cli("eval --model " + (out / "model.spnn").string() + " --data " + binary_data().string());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_EQ(spnn_cli("inspect --model " + (out / "absent.spnn").string()).code, 2);
}

TEST_F(Cli, ResumeFromCheckpointMatchesUninterruptedRun)
{
  auto const whole = scratch("whole");
  auto const part  = scratch("part");
  auto const ck    = scratch("ck");
  auto const data  = " --data " + binary_data().string() + " --seed 9" + kSmallTrain;
  ASSERT_EQ(spnn_cli("train --out " + whole.string() + data).code, 0);
  auto const stop = spnn_cli("train --out " + part.string() + " --checkpoint " + ck.string() +
                             " --stop-after growth" + data);
  ASSERT_EQ(stop.code, 0) << stop.out;
  EXPECT_FALSE(fs::exists(part / "model.spnn"));
  auto const resumed = spnn_cli("train --out " + part.string() + " --resume " + ck.string() + data);
  ASSERT_EQ(resumed.code, 0) << resumed.out;
  EXPECT_EQ(tree(part), tree(whole));

  auto const wrong = spnn_cli("train --classes 3 --out " + scratch("wrong").string() + " --resume " + ck.string() +
                              " --data " + ternary_data().string() + kSmallTrain);
  EXPECT_EQ(wrong.code, 1) << wrong.out;
}

TEST_F(Cli, SweepRunsEveryEntry)
{
  auto const a = scratch("a.cfg");
  auto const b = scratch("b.cfg");
  std::ofstream(a) << "seed=1\n";
  std::ofstream(b) << "seed=2\nserver_hidden=8\n";
  auto const out = scratch("sweep");
  auto const r   = spnn_cli("sweep --data " + binary_data().string() + " --out " + out.string() + kSmallTrain + " " +
                          a.string() + " " + b.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto const table = slurp(out / "sweep.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(out / "a" / "model.spnn"));
  EXPECT_TRUE(fs::exists(out / "b" / "model.spnn"));
}
