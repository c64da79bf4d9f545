// Copyright 2026 The spatialcl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "spatialcl/cli.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "spatialcl/errors.h"
#include "spatialcl/eval.h"
#include "testing_util.h"

namespace spatialcl {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "spatialcl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = CliMain(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kData;
}

TEST(RunSettingsTest, ReadsIniSections) {
  const fs::path dir = testing::MakeTempDir("cli_ini");
  WriteFile(dir / "run.ini",
            "[pretrain]\nepochs = 7\nbase_lr = 0.05\n"
            "[augment]\nmixup = false\ndrop_probability = 0.25\n");
  const RunSettings s = RunSettings::FromFile(dir / "run.ini");
  EXPECT_EQ(s.GetInt("pretrain.epochs", 0), 7);
  EXPECT_DOUBLE_EQ(s.GetDouble("pretrain.base_lr", 0), 0.05);
  EXPECT_FALSE(s.GetBool("augment.mixup", true));
  EXPECT_FALSE(s.Has("pretrain.batch_pairs"));

  const PretrainConfig c = PretrainFromSettings(s, 4);
  EXPECT_EQ(c.epochs, 7);
  EXPECT_EQ(c.batch_pairs, 64);
  EXPECT_FALSE(c.plan.mixup);
  EXPECT_TRUE(c.plan.channel_swap);
  EXPECT_DOUBLE_EQ(c.plan.channel_drop_params.drop_probability, 0.25);
  EXPECT_EQ(c.seed, 4u);
}

TEST(RunSettingsTest, RejectsBadInput) {
  const fs::path dir = testing::MakeTempDir("cli_bad");
  WriteFile(dir / "typo.ini", "[pretrain]\nepoch = 7\n");
  EXPECT_EQ(KindOf([&] { RunSettings::FromFile(dir / "typo.ini"); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { RunSettings::FromFile(dir / "absent.ini"); }), ErrorKind::kConfig);

  RunSettings s;
  EXPECT_EQ(KindOf([&] { s.SetAssignment("pretrain.epochs"); }), ErrorKind::kConfig);
  s.Set("pretrain.epochs", "ten");
  EXPECT_EQ(KindOf([&] { s.GetInt("pretrain.epochs", 0); }), ErrorKind::kConfig);
  s.Set("augment.mixup", "maybe");
  EXPECT_EQ(KindOf([&] { s.GetBool("augment.mixup", true); }), ErrorKind::kConfig);

  RunSettings ranges;
  ranges.Set("augment.rrc_scale_lo", "0.9");
  ranges.Set("augment.rrc_scale_hi", "0.5");
  EXPECT_EQ(KindOf([&] { PlanFromSettings(ranges); }), ErrorKind::kConfig);
  RunSettings drop;
  drop.Set("augment.drop_probability", "1.5");
  EXPECT_EQ(KindOf([&] { PlanFromSettings(drop); }), ErrorKind::kConfig);
}

TEST(CliTest, ArgumentErrorsExitNonzero) {
  EXPECT_EQ(RunCli({"--help"}).code, 0);
  EXPECT_NE(RunCli({}).code, 0);
  EXPECT_NE(RunCli({"simulate", "--n", "1"}).code, 0);  // no --seed
  EXPECT_NE(RunCli({"simulate", "--seed", "1", "--bogus"}).code, 0);

  const CliRun missing = RunCli({"pretrain", "--seed", "1", "--config", "/nonexistent/run.ini"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("/nonexistent/run.ini"), std::string::npos) << missing.err;

  const CliRun unknown = RunCli({"simulate", "--seed", "1", "--set", "dataset.nscenes=3"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("dataset.nscenes"), std::string::npos);

  const CliRun no_out = RunCli({"simulate", "--seed", "1", "--n", "1"});
  EXPECT_EQ(no_out.code, 1);
  EXPECT_NE(no_out.err.find("dataset.out_dir"), std::string::npos);
}

TEST(CliTest, SimulateIsReproducible) {
  const fs::path dir = testing::MakeTempDir("cli_sim");
  for (const char* sub : {"a", "b"}) {
    const CliRun r = RunCli({"simulate", "--n", "10", "--seed", "7", "--clip-seconds", "1",
                          "--out", (dir / sub).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const std::string a = Slurp(dir / "a" / "pretrain.jsonl");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 10);
  const Manifest ma = ReadManifest(dir / "a" / "pretrain.jsonl");
  const Manifest mb = ReadManifest(dir / "b" / "pretrain.jsonl");
  ASSERT_EQ(ma.entries.size(), mb.entries.size());
  for (size_t i = 0; i < ma.entries.size(); ++i) {
    EXPECT_EQ(ma.entries[i].seed, mb.entries[i].seed);
    EXPECT_EQ(ma.entries[i].azimuth_deg, mb.entries[i].azimuth_deg);
    EXPECT_EQ(Slurp(ma.Resolve(ma.entries[i])), Slurp(mb.Resolve(mb.entries[i])));
  }
}

TEST(CliTest, ReportRendersTable) {
  const fs::path dir = testing::MakeTempDir("cli_report");
  EvalReport a;
  a.name = "CS+CD";
  a.protocol = "linear_probe";
  a.encoder_init = "pretrained";
  a.accuracy_percent = 81.25;
  a.azimuth_error_deg = 12.5;
  a.num_test = 100;
  EvalReport b = a;
  b.name = "Random";
  b.encoder_init = "random";
  b.accuracy_percent = 40.0;
  WriteReportJson(a, dir / "a.json");
  WriteReportJson(b, dir / "b.json");
  const CliRun r = RunCli({"report", (dir / "a.json").string(), (dir / "b.json").string(),
                        "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("| CS+CD"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Random"), std::string::npos);
  EXPECT_EQ(Slurp(dir / "out" / "table.md"), r.out);
  EXPECT_TRUE(fs::exists(dir / "out" / "table.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "curve.csv"));
  EXPECT_EQ(RunCli({"report", (dir / "missing.json").string()}).code, 2);
}

TEST(CliTest, ProbeAndPretrainSmoke) {
  const fs::path dir = testing::MakeTempDir("cli_smoke");
  const std::string cfg = (dir / "run.ini").string();
  WriteFile(cfg,
            "[dataset]\nclasses = 2\nclip_seconds = 1\n"
            "[pretrain]\nbatch_pairs = 4\nwarmup_epochs = 0\nstats_recordings = 8\n"
            "[eval]\nbatch_size = 8\nwarmup_epochs = 0\n");
  for (const char* split : {"pretrain", "train", "test"}) {
    ASSERT_EQ(RunCli({"simulate", "--config", cfg, "--seed", "3", "--n", "12", "--split",
                   split, "--out", (dir / "data").string()})
                  .code,
              0);
  }
  const CliRun pre = RunCli({"pretrain", "--config", cfg, "--seed", "3", "--epochs", "1",
                          "--manifest", (dir / "data" / "pretrain.jsonl").string(),
                          "--out", (dir / "run").string(), "--augment", "cs,cd"});
  ASSERT_EQ(pre.code, 0) << pre.err;
  ASSERT_TRUE(fs::exists(dir / "run" / "checkpoint.bin"));

  const CliRun probe = RunCli({"probe", "--config", cfg, "--seed", "3", "--epochs", "1",
                            "--checkpoint", (dir / "run" / "checkpoint.bin").string(),
                            "--train", (dir / "data" / "train.jsonl").string(),
                            "--test", (dir / "data" / "test.jsonl").string(),
                            "--out", (dir / "probe").string(), "--name", "smoke"});
  ASSERT_EQ(probe.code, 0) << probe.err;
  const EvalReport report = ReadReportJson(dir / "probe" / "report.json");
  EXPECT_EQ(report.name, "smoke");
  EXPECT_EQ(report.protocol, "linear_probe");
  EXPECT_EQ(report.encoder_init, "pretrained");
  EXPECT_EQ(report.num_test, 12);
  EXPECT_TRUE(fs::exists(dir / "probe" / "predictions.csv"));
  EXPECT_TRUE(fs::exists(dir / "probe" / "history.csv"));
}

}  // namespace
}  // namespace spatialcl
