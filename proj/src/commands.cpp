#include "tailgame/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "tailgame/checkpoint.hpp"
#include "tailgame/error.hpp"
#include "tailgame/json_io.hpp"

namespace tailgame {

namespace fs = std::filesystem;

namespace {

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

RunConfig with_seed(const RunConfig& config, std::uint64_t seed) {
  RunConfig c = config;
  c.seed = seed;
  c.train.seed = seed;
  return c;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation; 0 for a single value.
MeanStd summarize(const std::vector<double>& v) {
  MeanStd s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

LoadedData load_data(const RunConfig& config) {
  LoadedData d;
  const auto& src = config.data;
  if (src.synthetic) {
    const auto all = generate_synthetic(*src.synthetic, config.seed);
    d.splits = split_dataset(all, src.split, config.seed);
    d.source = all.provenance();
  } else {
    d.splits.train = load_sparse(src.train_file);
    d.splits.val = load_sparse(src.val_file);
    d.splits.test = load_sparse(src.test_file);
    d.source = src.train_file.string();
    for (const auto* other : {&d.splits.val, &d.splits.test}) {
      if (other->num_labels() != d.splits.train.num_labels() ||
          other->feature_dim() != d.splits.train.feature_dim()) {
        throw InputError("data files disagree on feature or label dimension");
      }
    }
  }
  if (src.downsample) {
    d.splits.train = downsample_rare(d.splits.train, src.downsample->k_rarest, src.downsample->fraction, config.seed);
  }
  return d;
}

void cmd_generate(const RunConfig& config, std::ostream& out) {
  if (!config.data.synthetic) throw InputError("generate needs a data.synthetic section");
  prepare_output(config.output_dir);
  const auto data = load_data(config);
  save_sparse(config.output_dir / "train.txt", data.splits.train);
  save_sparse(config.output_dir / "val.txt", data.splits.val);
  save_sparse(config.output_dir / "test.txt", data.splits.test);

  Json m;
  m["seed"] = config.seed;
  m["spec"] = to_json(*config.data.synthetic);
  m["split_ratios"] = config.data.split;
  m["split_sizes"] = {{"train", data.splits.train.size()},
                      {"val", data.splits.val.size()},
                      {"test", data.splits.test.size()}};
  if (config.data.downsample) {
    m["downsample"] = {{"k_rarest", config.data.downsample->k_rarest},
                       {"fraction", config.data.downsample->fraction}};
  }
  m["label_counts"] = {{"train", data.splits.train.label_counts()},
                       {"val", data.splits.val.label_counts()},
                       {"test", data.splits.test.label_counts()}};
  write_text(config.output_dir / "manifest.json", m.dump(1) + "\n");
  out << "wrote " << data.splits.train.size() << "/" << data.splits.val.size() << "/" << data.splits.test.size()
      << " samples to " << config.output_dir.string() << "\n";
}

void cmd_train(const RunConfig& config, std::ostream& out) {
  prepare_output(config.output_dir);
  const auto data = load_data(config);

  const auto diag_path = config.output_dir / "diagnostics.jsonl";
  std::ofstream diag(diag_path, std::ios::binary);
  if (!diag) throw InputError("cannot write " + diag_path.string());
  const auto result = train(data.splits.train, data.splits.val, config.train, [&](const EpochDiagnostics& d) {
    diag << to_json(d).dump() << "\n";
    diag.flush();
  });
  diag.close();

  save_checkpoint(config.output_dir / "checkpoint.json", result.model);

  Json summary;
  if (result.diagnostics.size() >= 2) {
    summary = to_json(trace_summary(result.diagnostics));
  } else {
    summary = {{"epochs", result.diagnostics.size()}};
  }
  summary["initial_phi"] = result.initial_phi;
  summary["final_phi"] = result.diagnostics.empty() ? result.initial_phi : result.diagnostics.back().phi;
  summary["stationarity"] = result.stationarity;
  write_text(config.output_dir / "summary.json", summary.dump(1) + "\n");

  const auto& test = data.splits.test;
  const auto report = evaluate_model(result.model, test, config.train.tail_rule, config.train.ks);
  const auto split = split_head_tail(result.model.frequencies, config.train.tail_rule);
  const auto ranks = specialization_ranks(result.model.players, test.feature_matrix(), test.label_matrix(), split,
                                          result.model.partition, config.train.threshold);
  Json metrics;
  metrics["split"] = "test";
  metrics["config"] = to_json(config.train);
  metrics["metrics"] = to_json(report);
  metrics["specialization_ranks"] = to_json(ranks);
  write_text(config.output_dir / "metrics.json", metrics.dump(1) + "\n");

  out << "rare_f1 " << fixed(report.rare_f1) << "\n";
  out << "micro_f1 " << fixed(report.micro_f1) << "\n";
}

void cmd_eval(const RunConfig& config, const fs::path& checkpoint, const fs::path& data_path, std::ostream& out) {
  const auto model = load_checkpoint(checkpoint);
  const auto data = load_sparse(data_path);
  const std::size_t d = model.players.front().feature_dim;
  if (data.num_labels() != model.partition.num_labels || data.feature_dim() != d) {
    throw InputError("dimension mismatch: checkpoint has d=" + std::to_string(d) +
                     " L=" + std::to_string(model.partition.num_labels) + ", data has d=" +
                     std::to_string(data.feature_dim()) + " L=" + std::to_string(data.num_labels()));
  }
  if (data.empty()) throw InputError("empty dataset");
  const auto report = evaluate_model(model, data, config.train.tail_rule, config.train.ks);
  const auto split = split_head_tail(model.frequencies, config.train.tail_rule);
  const auto ranks = specialization_ranks(model.players, data.feature_matrix(), data.label_matrix(), split,
                                          model.partition, config.train.threshold);
  Json j;
  j["checkpoint"] = checkpoint.string();
  j["data"] = data_path.string();
  j["metrics"] = to_json(report);
  j["specialization_ranks"] = to_json(ranks);
  prepare_output(config.output_dir);
  write_text(config.output_dir / "eval.json", j.dump(1) + "\n");
  Json brief = j;
  brief["metrics"] = to_json(report, false);
  out << brief.dump(1) << "\n";
}

void cmd_ablate(const RunConfig& config, std::ostream& out) {
  prepare_output(config.output_dir);
  const auto seeds = config.ablate_seeds.empty() ? std::vector<std::uint64_t>{config.seed} : config.ablate_seeds;
  const AblationVariant variants[] = {AblationVariant::full, AblationVariant::no_curiosity,
                                      AblationVariant::single_predictor};
  std::map<AblationVariant, std::vector<MetricReport>> reports;
  std::map<AblationVariant, TrainConfig> configs;
  for (std::uint64_t seed : seeds) {
    const auto run = with_seed(config, seed);
    const auto data = load_data(run);
    for (auto v : variants) {
      const auto outcome = ablation_run(data.splits.train, data.splits.val, data.splits.test, run.train, v);
      reports[v].push_back(outcome.test_metrics);
      configs[v] = outcome.config;
    }
  }

  Json rows = Json::array();
  for (auto v : variants) {
    Json row;
    row["variant"] = to_string(v);
    Json cfg = to_json(configs[v]);
    cfg.erase("seed");
    row["config"] = cfg;
    Json per_seed = Json::array();
    std::vector<double> map, micro, rare;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& r = reports[v][s];
      per_seed.push_back({{"seed", seeds[s]}, {"map", r.map}, {"micro_f1", r.micro_f1}, {"rare_f1", r.rare_f1}});
      map.push_back(r.map);
      micro.push_back(r.micro_f1);
      rare.push_back(r.rare_f1);
    }
    for (const auto& [name, values] : {std::pair{"map", map}, {"micro_f1", micro}, {"rare_f1", rare}}) {
      const auto s = summarize(values);
      row[name] = {{"mean", s.mean}, {"std", s.std}};
    }
    row["per_seed"] = per_seed;
    rows.push_back(row);
    out << to_string(v) << " rare_f1 " << fixed(row["rare_f1"]["mean"].get<double>()) << " micro_f1 "
        << fixed(row["micro_f1"]["mean"].get<double>()) << " map " << fixed(row["map"]["mean"].get<double>())
        << "\n";
  }
  Json j;
  j["seeds"] = seeds;
  j["split"] = "test";
  j["variants"] = rows;
  write_text(config.output_dir / "ablation.json", j.dump(1) + "\n");
}

void cmd_sweep(const RunConfig& config, const std::string& parameter, const std::vector<double>& values,
               std::ostream& out) {
  if (parameter != "alpha" && parameter != "beta" && parameter != "rho" && parameter != "n_players") {
    throw InputError("unknown sweep parameter '" + parameter + "' (expected alpha, n_players, beta or rho)");
  }
  if (values.empty()) throw InputError("sweep needs at least one value");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("sweep values must be finite");
    if (parameter == "n_players" && (v < 1.0 || v != std::floor(v))) {
      throw InputError("n_players values must be positive integers");
    }
  }
  prepare_output(config.output_dir);
  const auto seeds = config.sweep_seeds.empty() ? std::vector<std::uint64_t>{config.seed} : config.sweep_seeds;

  Json rows = Json::array();
  Json summary = Json::array();
  std::string csv = "value,mean_rare_f1,mean_micro_f1,status\n";
  std::vector<LoadedData> data;
  for (std::uint64_t seed : seeds) data.push_back(load_data(with_seed(config, seed)));

  for (double value : values) {
    std::vector<double> rare, micro;
    bool failed = false;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      TrainConfig tc = config.train;
      tc.seed = seeds[s];
      if (parameter == "alpha") tc.curiosity.alpha = value;
      if (parameter == "beta") tc.curiosity.beta = value;
      if (parameter == "rho") tc.overlap = value;
      if (parameter == "n_players") {
        tc.players = static_cast<std::size_t>(value);
        tc.player_learning_rates.clear();
      }
      Json row{{"value", value}, {"seed", seeds[s]}};
      try {
        const auto& split = data[s].splits;
        const auto result = train(split.train, split.val, tc);
        const auto r = evaluate_model(result.model, split.test, tc.tail_rule, tc.ks);
        row["status"] = "ok";
        row["rare_f1"] = r.rare_f1;
        row["micro_f1"] = r.micro_f1;
        rare.push_back(r.rare_f1);
        micro.push_back(r.micro_f1);
      } catch (const Error& e) {
        row["status"] = "error";
        row["message"] = e.what();
        failed = true;
      }
      rows.push_back(row);
    }
    Json srow{{"value", value}};
    if (failed) {
      srow["status"] = "error";
      csv += Json(value).dump() + ",,,error\n";
      out << parameter << "=" << Json(value).dump() << " error\n";
    } else {
      const double mr = summarize(rare).mean, mm = summarize(micro).mean;
      srow["status"] = "ok";
      srow["mean_rare_f1"] = mr;
      srow["mean_micro_f1"] = mm;
      csv += Json(value).dump() + "," + Json(mr).dump() + "," + Json(mm).dump() + ",ok\n";
      out << parameter << "=" << Json(value).dump() << " rare_f1 " << fixed(mr) << " micro_f1 " << fixed(mm) << "\n";
    }
    summary.push_back(srow);
  }
  Json j;
  j["parameter"] = parameter;
  j["seeds"] = seeds;
  j["rows"] = rows;
  j["summary"] = summary;
  write_text(config.output_dir / "sweep.json", j.dump(1) + "\n");
  write_text(config.output_dir / "sweep.csv", csv);
}

void cmd_inspect_partition(const RunConfig& config, std::ostream& out) {
  const auto data = load_data(config);
  const auto ft = compute_frequencies(data.splits.train);
  const auto partition = partition_labels(ft, config.train.players, config.train.overlap);
  Json j = to_json(partition, ft);
  j["frequency_order"] = frequency_order(ft);
  const auto tail = split_head_tail(ft, config.train.tail_rule);
  const auto diag = split_head_tail(ft, config.train.diagnostics_rule);
  j["tail_rule"] = to_json(config.train.tail_rule);
  j["tail"] = tail.tail;
  j["diagnostics_split"] = to_json(config.train.diagnostics_rule);
  j["diagnostics_head"] = diag.head;
  out << j.dump(1) << "\n";
}

}  // namespace tailgame
