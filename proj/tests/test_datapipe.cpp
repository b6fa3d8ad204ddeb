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

#include <algorithm>
#include <cmath>
#include <set>

using namespace spnn;
using namespace spnn::data;
using spnn::testing::TempDir;

namespace {

Stream make_stream(std::string name, double rate, std::int64_t start_ms, std::size_t n)
{
  Stream s;
  s.name     = std::move(name);
  s.rate_hz  = rate;
  s.start_ms = start_ms;
  for (std::size_t i = 0; i < n; ++i)
  {
    s.samples.push_back(static_cast<double>(i));
  }
  return s;
}

/// One 15 s window of the standard schema; channel c, sample k holds 1000 c + k.
Instance tagged_instance(SensorSchema const &schema)
{
  Instance inst;
  inst.subject = "s";
  for (std::size_t c = 0; c < schema.size(); ++c)
  {
    std::vector<double> ch(schema.samples_per_window(c, 15.0));
    for (std::size_t k = 0; k < ch.size(); ++k)
    {
      ch[k] = 1000.0 * static_cast<double>(c) + static_cast<double>(k);
    }
    inst.channels.push_back(std::move(ch));
  }
  inst.demographics = {-1, -2, -3, -4, -5, -6, -7};
  return inst;
}

std::vector<Instance> timeline(std::vector<std::size_t> const &per_subject)
{
  std::vector<Instance> out;
  for (std::size_t s = 0; s < per_subject.size(); ++s)
  {
    for (std::size_t k = 0; k < per_subject[s]; ++k)
    {
      Instance inst;
      inst.subject = "subject" + std::to_string(s);
      inst.start_s = 45.0 * static_cast<double>(per_subject[s] - 1 - k);  // reverse order on purpose
      out.push_back(std::move(inst));
    }
  }
  return out;
}

}  // namespace

TEST(Schema, StandardLayout)
{
  auto const s = SensorSchema::standard();
  EXPECT_EQ(s.size(), 33U);
  EXPECT_EQ(s.count(Source::kWatch), 7U);
  EXPECT_EQ(s.count(Source::kPhone), 26U);
  EXPECT_EQ(s.readings_per_window(Source::kWatch, 15.0), 2535U);
  EXPECT_EQ(s.readings_per_window(Source::kPhone, 15.0), 1170U);
  EXPECT_EQ(s.flat_width(15.0), 3712U);
  EXPECT_EQ(s.step_width(), 40U);
  EXPECT_EQ(s.scaler_channels(), 40U);
}

TEST(Synchronize, IdenticalStartsUnchanged)
{
  std::vector<Stream> in{make_stream("a", 4, 1000, 20), make_stream("b", 32, 1000, 160)};
  EXPECT_EQ(synchronize(in), in);
}

TEST(Synchronize, EarlyStreamLosesLeadingSamples)
{
  std::vector<Stream> in{make_stream("early", 4, 1000, 40), make_stream("late", 1, 2000, 10)};
  auto const          out = synchronize(in);
  ASSERT_EQ(out[0].samples.size(), 36U);
  EXPECT_EQ(out[0].samples.front(), 4.0);
  EXPECT_EQ(out[1].samples.size(), 10U);
  for (auto const &s : out)
  {
    EXPECT_EQ(s.start_ms, 2000);
  }
}

TEST(Synchronize, ClockOffsetsAndEmptyResult)
{
  std::vector<Stream> in{make_stream("a", 4, 0, 40), make_stream("b", 4, 0, 40)};
  auto const          out = synchronize(in, {0, 500});
  EXPECT_EQ(out[0].samples.size(), 38U);
  EXPECT_EQ(out[1].samples.size(), 40U);
  EXPECT_THROW(synchronize(in, {0}), ShapeError);
  std::vector<Stream> doomed{make_stream("a", 1, 0, 3), make_stream("b", 1, 5000, 3)};
  EXPECT_THROW(synchronize(doomed), DataError);
}

TEST(Window, StrideFortyFive)
{
  std::vector<Stream> in{make_stream("a", 4, 0, 4 * 105), make_stream("b", 1, 0, 105)};
  auto const          w = window(in);
  ASSERT_EQ(w.size(), 3U);
  EXPECT_EQ(w[0].start_s, 0.0);
  EXPECT_EQ(w[1].start_s, 45.0);
  EXPECT_EQ(w[2].start_s, 90.0);
  EXPECT_EQ(w[1].channels[0].size(), 60U);
  EXPECT_EQ(w[1].channels[0].front(), 180.0);
  EXPECT_EQ(w[2].channels[1].size(), 15U);
  EXPECT_EQ(w[2].channels[1].front(), 90.0);
}

TEST(Window, CountFormula)
{
  WindowSpec const spec;
  EXPECT_EQ(spec.count_for(14.9), 0U);
  EXPECT_EQ(spec.count_for(15.0), 1U);
  EXPECT_EQ(spec.count_for(59.9), 1U);
  EXPECT_EQ(spec.count_for(60.0), 2U);
  for (double d = 15; d < 4000; d += 7.3)
  {
    EXPECT_EQ(spec.count_for(d), static_cast<std::size_t>(std::floor((d - 15.0) / 45.0)) + 1);
  }
  std::vector<Stream> short_rec{make_stream("a", 4, 0, 40)};
  EXPECT_TRUE(window(short_rec).empty());
}

TEST(Window, PerChannelSampleCounts)
{
  auto const          schema = SensorSchema::standard();
  std::vector<Stream> streams;
  for (auto const &c : schema.channels)
  {
    streams.push_back(make_stream(c.name, c.rate_hz, 0, static_cast<std::size_t>(c.rate_hz * 100)));
  }
  auto const w = window(streams);
  ASSERT_EQ(w.size(), 2U);
  std::size_t watch = 0;
  std::size_t phone = 0;
  for (std::size_t c = 0; c < schema.size(); ++c)
  {
    (schema.channels[c].source == Source::kWatch ? watch : phone) += w[0].channels[c].size();
  }
  EXPECT_EQ(watch, 2535U);
  EXPECT_EQ(phone, 1170U);
  std::multiset<std::size_t> watch_sizes;
  for (std::size_t c = 0; c < 7; ++c)
  {
    watch_sizes.insert(w[0].channels[c].size());
  }
  EXPECT_EQ(watch_sizes, (std::multiset<std::size_t>{15, 60, 60, 480, 480, 480, 960}));
}

TEST(Scaler, AffineMapAndDegenerateChannel)
{
  Instance a;
  a.channels     = {{0, 5}, {3, 3}};
  a.demographics = {1};
  Instance b;
  b.channels     = {{10}, {3}};
  b.demographics = {1};
  auto const scaler = fit_scaler(std::vector<Instance const *>{&a, &b});
  auto const sa     = apply_scaler(scaler, a);
  auto const sb     = apply_scaler(scaler, b);
  EXPECT_EQ(sa.channels[0], (std::vector<double>{0.0, 0.5}));
  EXPECT_EQ(sb.channels[0], (std::vector<double>{1.0}));
  EXPECT_EQ(sa.channels[1], (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(sa.demographics, (std::vector<double>{0.0}));

  Instance c = b;
  c.channels[0] = {12};
  EXPECT_DOUBLE_EQ(apply_scaler(scaler, c).channels[0][0], 1.2);
}

TEST(Scaler, FitsTrainingSplitOnlyAndRejectsUnfitted)
{
  Instance tr;
  tr.channels     = {{0, 1}};
  tr.split        = SplitTag::kTrain;
  Instance te     = tr;
  te.channels     = {{-50, 50}};
  te.split        = SplitTag::kTest;
  auto const sc   = fit_scaler(std::vector<Instance>{tr, te});
  EXPECT_EQ(sc.min(), (std::vector<double>{0.0}));
  EXPECT_EQ(sc.max(), (std::vector<double>{1.0}));
  EXPECT_THROW(apply_scaler(Scaler{}, tr), StateError);
  EXPECT_THROW(fit_scaler(std::vector<Instance const *>{}), DataError);
}

TEST(Encode, FlattenLayout)
{
  auto const schema = SensorSchema::standard();
  auto const inst   = tagged_instance(schema);
  auto const x      = flatten_server<double>(schema, inst);
  ASSERT_EQ(x.values.size(), 3712U);
  EXPECT_EQ(x.width, 3712U);
  for (std::size_t d = 0; d < 7; ++d)
  {
    EXPECT_EQ(x.values[3705 + d], -static_cast<double>(d + 1));
  }
  // first watch channel is contiguous at the front, the first phone channel follows all watch readings
  EXPECT_EQ(x.values[0], 0.0);
  EXPECT_EQ(x.values[59], 59.0);
  EXPECT_EQ(x.values[60], 1000.0);
  EXPECT_EQ(x.values[2535], 7000.0);

  Instance zero = inst;
  for (auto &ch : zero.channels)
  {
    std::fill(ch.begin(), ch.end(), 0.0);
  }
  std::fill(zero.demographics.begin(), zero.demographics.end(), 0.0);
  auto const z = flatten_server<double>(schema, zero);
  EXPECT_TRUE(std::all_of(z.values.begin(), z.values.end(), [](double v) { return v == 0.0; }));

  Instance broken = inst;
  broken.channels[3].pop_back();
  EXPECT_THROW(flatten_server<double>(schema, broken), DataError);
}

TEST(Encode, EdgeStepsHoldAndSubsample)
{
  auto const schema = SensorSchema::standard();
  auto const inst   = tagged_instance(schema);
  auto const x      = step_encode_edge<double>(schema, inst);
  ASSERT_EQ(x.steps, 60U);
  ASSERT_EQ(x.width, 40U);
  ASSERT_EQ(x.values.size(), 2400U);
  auto at = [&](std::size_t t, std::size_t col) { return x.values[t * 40 + col]; };
  for (std::size_t t = 0; t < 60; ++t)
  {
    EXPECT_EQ(at(t, 0), 0.0 + static_cast<double>(t));             // 4 Hz: one reading per step
    EXPECT_EQ(at(t, 2), 2000.0 + static_cast<double>(8 * t));       // 32 Hz: reading at the step time
    EXPECT_EQ(at(t, 5), 5000.0 + static_cast<double>(t / 4));       // 1 Hz: held for 4 steps
    EXPECT_EQ(at(t, 6), 6000.0 + static_cast<double>(16 * t));      // 64 Hz
    EXPECT_EQ(at(t, 7), 7000.0 + std::floor(0.75 * static_cast<double>(t) + 1e-9));  // 3 Hz phone
    for (std::size_t d = 0; d < 7; ++d)
    {
      EXPECT_EQ(at(t, 33 + d), -static_cast<double>(d + 1));
    }
  }
}

TEST(Encode, EdgeValuesAppearInFlatSegment)
{
  auto const schema = SensorSchema::standard();
  auto const inst   = tagged_instance(schema);
  auto const flat   = flatten_server<double>(schema, inst);
  auto const edge   = step_encode_edge<double>(schema, inst);
  std::size_t offset = 0;
  for (std::size_t c = 0; c < 7; ++c)
  {
    std::size_t const len = inst.channels[c].size();
    std::set<double> const segment(flat.values.begin() + static_cast<std::ptrdiff_t>(offset),
                                   flat.values.begin() + static_cast<std::ptrdiff_t>(offset + len));
    for (std::size_t t = 0; t < 60; ++t)
    {
      EXPECT_TRUE(segment.count(edge.values[t * 40 + c]) == 1) << "channel " << c << " step " << t;
    }
    offset += len;
  }
}

TEST(Split, PaperScaleCounts)
{
  // 52 subjects holding 5030 windows between them
  std::vector<std::size_t> sizes(52, 96);
  for (std::size_t i = 0; i < 38; ++i)
  {
    ++sizes[i];
  }
  auto const ds = split(timeline(sizes));
  EXPECT_EQ(ds.counts(), (SplitCounts{3521, 503, 1006}));
  EXPECT_TRUE(time_disjoint(ds));
}

TEST(Split, TenInstances)
{
  auto const ds = split(timeline({10}));
  EXPECT_EQ(ds.counts(), (SplitCounts{7, 1, 2}));
  for (auto const &i : ds.instances)
  {
    SplitTag const want = i.start_s < 7 * 45.0 ? SplitTag::kTrain : (i.start_s < 8 * 45.0 ? SplitTag::kVal : SplitTag::kTest);
    EXPECT_EQ(i.split, want) << i.start_s;
  }
}

TEST(Split, EveryTestWindowFollowsTrainingWindowsInTime)
{
  auto const ds = split(timeline({13, 40, 7, 90, 21}));
  auto const c  = ds.counts();
  EXPECT_NEAR(static_cast<double>(c.train), 0.7 * 171, 1.0);
  EXPECT_NEAR(static_cast<double>(c.val), 0.1 * 171, 1.0);
  EXPECT_NEAR(static_cast<double>(c.test), 0.2 * 171, 1.0);
  EXPECT_TRUE(time_disjoint(ds));
  for (auto const &a : ds.instances)
  {
    for (auto const &b : ds.instances)
    {
      if (a.subject == b.subject && a.split == SplitTag::kTrain && b.split != SplitTag::kTrain)
      {
        EXPECT_LT(a.start_s, b.start_s);
      }
    }
  }
}

TEST(Split, TooFewInstances)
{
  EXPECT_THROW(split(timeline({3})), DataError);
  EXPECT_THROW(split(timeline({10}), SplitFractions{0.5, 0.5, 0.0}), ParameterError);
}

TEST(Synth, SchemaAndDeterminism)
{
  auto const schema = SensorSchema::standard();
  auto       cfg    = SynthConfig::defaults(2);
  cfg.subjects_per_class = {2, 2};
  cfg.duration_min_h     = 0.05;
  cfg.duration_max_h     = 0.05;
  auto const a = synth_generate(cfg, schema, 42);
  auto const b = synth_generate(cfg, schema, 42);
  auto const c = synth_generate(cfg, schema, 43);
  ASSERT_EQ(a.size(), 4U);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    EXPECT_EQ(a[i].label, i < 2 ? 0U : 1U);
    EXPECT_EQ(a[i].demographics.size(), 7U);
    ASSERT_EQ(a[i].streams.size(), 33U);
    for (std::size_t k = 0; k < 33; ++k)
    {
      EXPECT_EQ(a[i].streams[k].name, schema.channels[k].name);
      EXPECT_EQ(a[i].streams[k].rate_hz, schema.channels[k].rate_hz);
      EXPECT_NEAR(a[i].streams[k].duration_s(), 180.0, 1.0);
    }
    EXPECT_NO_THROW(subject_instances(a[i], schema));
  }
  cfg.duration_min_h = 0.0;
  EXPECT_THROW(synth_generate(cfg, schema, 1), ParameterError);
}

TEST(DatasetIo, SubjectsRoundTripThroughDisk)
{
  auto const schema = SensorSchema::standard();
  auto       cfg    = SynthConfig::defaults(3);
  cfg.subjects_per_class = {1, 1, 1};
  cfg.duration_min_h     = 0.02;
  cfg.duration_max_h     = 0.03;
  auto const subjects = synth_generate(cfg, schema, 5);
  TempDir    dir("dataset");
  write_dataset(dir.path(), subjects);
  auto const ids = read_manifest(dir.path());
  ASSERT_EQ(ids.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i)
  {
    auto const back = read_subject(dir.path(), ids[i], schema);
    EXPECT_EQ(back, subjects[i]);
    EXPECT_EQ(subject_instances(back, schema), subject_instances(subjects[i], schema));
  }
  EXPECT_THROW(read_subject(dir.path(), "missing", schema), Error);
}

static double pipeline_test_accuracy(double separation)
{
  auto const schema = SensorSchema::standard();
  auto       cfg    = SynthConfig::defaults(2);
  cfg.subjects_per_class = {20, 20};
  cfg.duration_min_h     = 1.0;
  cfg.duration_max_h     = 1.0;
  cfg.separation         = separation;
  cfg.subject_offset     = 0.0;
  cfg.demographic_jitter = 0.0;

  std::vector<Instance> all;
  for (std::size_t i = 0; i < cfg.total_subjects(); ++i)
  {
    auto inst = subject_instances(synth_subject(cfg, schema, i, 2024), schema);
    std::move(inst.begin(), inst.end(), std::back_inserter(all));
  }
  auto const ds     = split(std::move(all));
  auto const scaler = fit_scaler(ds.instances);
  TrainData<double> d;
  for (auto const &inst : ds.instances)
  {
    auto x = flatten_server<double>(schema, apply_scaler(scaler, inst));
    (inst.split == SplitTag::kTrain ? d.train : inst.split == SplitTag::kVal ? d.val : d.test).push_back(std::move(x));
  }

  Rng  rng(7);
  auto m = build_server<double>(ServerShape{3712, {32, 16}, 2, 0.2}, rng);
  seed_init(m, 0.2, rng);
  PlateauOptions o;
  o.learning_rate = 0.01;
  o.patience      = 2;
  o.max_epochs    = 8;
  o.max_lr_decays = 0;
  o.batch_size    = 32;
  TrainReport r;
  train_to_plateau<double>(m, d, o, rng, r, "train");
  return evaluate(m, d.test).accuracy;
}

TEST(Synth, NullSignalGivesChanceAccuracy)
{
  double const acc = pipeline_test_accuracy(0.0);
  EXPECT_GE(acc, 0.45);
  EXPECT_LE(acc, 0.55);
}

TEST(Synth, SeparatedSignalIsLearnedByTheSamePipeline)
{
  EXPECT_GE(pipeline_test_accuracy(1.0), 0.9);
}
