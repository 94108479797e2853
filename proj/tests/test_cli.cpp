#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "cli_harness.hpp"
#include "tailgame/checkpoint.hpp"
#include "tailgame/config.hpp"
#include "tailgame/error.hpp"

using namespace tailgame;
using harness::read_file;
using harness::run_cli;
using harness::write_file;
using nlohmann::json;

namespace {

const char* kSmall = R"({
  "seed": 5,
  "output_dir": "out",
  "data": {"synthetic": {"num_labels": 12, "feature_dim": 6, "num_samples": 400}, "split": [0.5, 0.25, 0.25]},
  "train": {"players": 3, "overlap": 0.4, "epochs": 3, "batch_size": 32},
  "ablate": {"seeds": [1, 2]},
  "sweep": {"seeds": [1]}
})";

std::string throws_message(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_run_config(kSmall, "/base");
  CHECK(cfg.seed == 5);
  CHECK(cfg.output_dir == "/base/out");
  CHECK(cfg.data.synthetic->num_labels == 12);
  CHECK(cfg.train.players == 3);
  CHECK(cfg.train.overlap == 0.4);
  CHECK(cfg.ablate_seeds == std::vector<std::uint64_t>{1, 2});

  CHECK(throws_message(R"({"data": {"synthetic": {}}, "train": {"playerz": 2}})").find("train.playerz") !=
        std::string::npos);
  CHECK(throws_message(R"({"data": {"synthetic": {}}, "train": {"players": "two"}})").find("train.players") !=
        std::string::npos);
  CHECK(!throws_message("{not json").empty());
  CHECK(!throws_message(R"({"train": {}})").empty());  // no data source
}

TEST_CASE("checkpoint round trip is exact") {
  SynthSpec spec;
  spec.num_labels = 9;
  spec.feature_dim = 4;
  spec.num_samples = 300;
  const auto sp = split_dataset(generate_synthetic(spec, 2), {0.6, 0.2, 0.2}, 2);
  TrainConfig tc;
  tc.players = 2;
  tc.overlap = 0.5;
  tc.epochs = 2;
  tc.tune_thresholds = true;
  const auto model = train(sp.train, sp.val, tc).model;
  const auto text = checkpoint_json(model);
  const auto back = parse_checkpoint(text);
  CHECK(back.players == model.players);
  CHECK(back.partition.blocks == model.partition.blocks);
  CHECK(back.partition.cores == model.partition.cores);
  CHECK(back.frequencies.counts == model.frequencies.counts);
  CHECK(back.fusion.thresholds == model.fusion.thresholds);
  CHECK(checkpoint_json(back) == text);

  auto j = json::parse(text);
  j["format_version"] = 99;
  CHECK_THROWS_AS(parse_checkpoint(j.dump()), InputError);
  j = json::parse(text);
  j["players"][0]["bias"].erase(0);
  CHECK_THROWS_AS(parse_checkpoint(j.dump()), InputError);
}

TEST_CASE("generate is byte-deterministic and seed-sensitive") {
  const auto dir = harness::scratch_dir("gen");
  write_file(dir / "c.json", kSmall);
  const auto c = (dir / "c.json").string();
  REQUIRE(run_cli(dir, "generate --config " + c + " --out " + (dir / "a").string()).code == 0);
  REQUIRE(run_cli(dir, "generate --config " + c + " --out " + (dir / "b").string()).code == 0);
  REQUIRE(run_cli(dir, "generate --config " + c + " --seed 6 --out " + (dir / "s").string()).code == 0);
  for (const char* f : {"train.txt", "val.txt", "test.txt", "manifest.json"}) {
    CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
  }
  CHECK(read_file(dir / "a" / "train.txt") != read_file(dir / "s" / "train.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
  const auto dir = harness::scratch_dir("codes");
  write_file(dir / "bad.json", R"({"data": {"synthetic": {}}, "train": {"playerz": 2}})");
  auto r = run_cli(dir, "train --config " + (dir / "bad.json").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("train.playerz") != std::string::npos);

  CHECK(run_cli(dir, "train").code == 2);
  CHECK(run_cli(dir, "train --config " + (dir / "missing.json").string()).code == 2);

  // adaptive moments move every weight by about eta per step, so two steps overflow
  write_file(dir / "div.json", R"({"seed": 3, "output_dir": "o",
    "data": {"synthetic": {"num_labels": 8, "feature_dim": 4, "num_samples": 200}},
    "train": {"players": 2, "epochs": 2, "learning_rate": 1e308, "optimizer": {"kind": "adaptive_moments"}}})");
  r = run_cli(dir, "train --config " + (dir / "div.json").string());
  CHECK(r.code == 3);
  CHECK(r.err.find("numerical divergence") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("train then eval on files") {
  const auto dir = harness::scratch_dir("eval");
  write_file(dir / "c.json", kSmall);
  REQUIRE(run_cli(dir, "generate --config " + (dir / "c.json").string() + " --out " + (dir / "data").string())
              .code == 0);
  write_file(dir / "f.json", R"({"seed": 5, "output_dir": "run",
    "data": {"files": {"train": "data/train.txt", "val": "data/val.txt", "test": "data/test.txt"}},
    "train": {"players": 3, "overlap": 0.4, "epochs": 3, "batch_size": 32}})");
  const auto f = (dir / "f.json").string();
  const auto t = run_cli(dir, "train --config " + f);
  REQUIRE(t.code == 0);
  CHECK(t.out.find("rare_f1 ") != std::string::npos);
  for (const char* a : {"checkpoint.json", "diagnostics.jsonl", "summary.json", "metrics.json"}) {
    CHECK(std::filesystem::exists(dir / "run" / a));
  }
  const auto train_metrics = json::parse(read_file(dir / "run" / "metrics.json"))["metrics"];
  const auto e = run_cli(dir, "eval --config " + f + " --checkpoint " + (dir / "run" / "checkpoint.json").string() +
                                  " --data " + (dir / "data" / "test.txt").string());
  REQUIRE(e.code == 0);
  const auto eval = json::parse(read_file(dir / "run" / "eval.json"));
  CHECK(eval["metrics"]["micro_f1"].get<double>() == train_metrics["micro_f1"].get<double>());
  CHECK(eval["metrics"]["rare_f1"].get<double>() == train_metrics["rare_f1"].get<double>());

  // one line per epoch
  const auto diag = read_file(dir / "run" / "diagnostics.jsonl");
  CHECK(std::count(diag.begin(), diag.end(), '\n') == 3);

  // wrong feature dimension
  write_file(dir / "other.txt", "1 3 12\n0 0:0.5 1:1 2:2\n");
  const auto bad = run_cli(dir, "eval --config " + f + " --checkpoint " +
                                    (dir / "run" / "checkpoint.json").string() + " --data " +
                                    (dir / "other.txt").string());
  CHECK(bad.code == 2);
  CHECK(bad.err.find("dimension mismatch") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("single player eval ranks first") {
  const auto dir = harness::scratch_dir("one");
  write_file(dir / "c.json", R"({"seed": 2, "output_dir": "run",
    "data": {"synthetic": {"num_labels": 10, "feature_dim": 5, "num_samples": 300}},
    "train": {"players": 1, "epochs": 2}})");
  const auto c = (dir / "c.json").string();
  REQUIRE(run_cli(dir, "generate --config " + c).code == 0);
  REQUIRE(run_cli(dir, "train --config " + c).code == 0);
  REQUIRE(run_cli(dir, "eval --config " + c + " --checkpoint " + (dir / "run" / "checkpoint.json").string() +
                           " --data " + (dir / "run" / "test.txt").string())
              .code == 0);
  const auto ranks = json::parse(read_file(dir / "run" / "eval.json"))["specialization_ranks"];
  CHECK(ranks["head"][0]["rank"] == 1);
  CHECK(ranks["tail"][0]["rank"] == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ablate and sweep") {
  const auto dir = harness::scratch_dir("abl");
  write_file(dir / "c.json", kSmall);
  const auto c = (dir / "c.json").string();
  const auto a = run_cli(dir, "ablate --config " + c);
  REQUIRE(a.code == 0);
  const auto abl = json::parse(read_file(dir / "out" / "ablation.json"));
  REQUIRE(abl["variants"].size() == 3);
  CHECK(abl["variants"][0]["variant"] == "full");
  CHECK(abl["variants"][1]["config"]["alpha"] == 0.0);
  CHECK(abl["variants"][2]["config"]["players"] == 1);
  CHECK(abl["variants"][0]["per_seed"].size() == 2);

  const auto s = run_cli(dir, "sweep --config " + c + " --param n_players --values 2,20");
  REQUIRE(s.code == 0);
  const auto sweep = json::parse(read_file(dir / "out" / "sweep.json"));
  CHECK(sweep["summary"][0]["status"] == "ok");
  CHECK(sweep["summary"][1]["status"] == "error");
  const auto csv = read_file(dir / "out" / "sweep.csv");
  CHECK(csv.rfind("value,mean_rare_f1,mean_micro_f1,status\n", 0) == 0);
  CHECK(csv.find("20.0,,,error") != std::string::npos);

  CHECK(run_cli(dir, "sweep --config " + c + " --param gamma --values 1").code == 2);

  const auto p = run_cli(dir, "inspect-partition --config " + c);
  REQUIRE(p.code == 0);
  CHECK(json::parse(p.out)["blocks"].size() == 3);
  std::filesystem::remove_all(dir);
}
