#include "tailgame/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tailgame/error.hpp"
#include "tailgame/json_io.hpp"

namespace tailgame {

namespace {

using Handler = std::function<void(const Json&, const std::string&)>;

// Dispatches each key of `j` to its handler; unknown keys are an error.
void visit(const Json& j, const std::string& path, const std::map<std::string, Handler>& handlers) {
  if (!j.is_object()) throw InputError("config key '" + path + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const std::string full = path.empty() ? key : path + "." + key;
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw InputError("unknown config key '" + full + "'");
    it->second(value, full);
  }
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw InputError("config key '" + path + "' must be a number");
  return v.get<double>();
}

std::size_t count(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw InputError("config key '" + path + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

bool boolean(const Json& v, const std::string& path) {
  if (!v.is_boolean()) throw InputError("config key '" + path + "' must be true or false");
  return v.get<bool>();
}

std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) throw InputError("config key '" + path + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::uint64_t> seed_list(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw InputError("config key '" + path + "' must be a non-empty array");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(count(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

HeadTailRule head_tail_rule(const Json& v, const std::string& path) {
  HeadTailRule rule;
  bool has_kind = false;
  visit(v, path,
        {{"kind",
          [&](const Json& x, const std::string& p) {
            const auto k = text(x, p);
            if (k == "count_fraction") {
              rule.kind = HeadTailRule::Kind::count_fraction;
            } else if (k == "cumulative_mass") {
              rule.kind = HeadTailRule::Kind::cumulative_mass;
            } else {
              throw InputError("config key '" + p + "' must be count_fraction or cumulative_mass");
            }
            has_kind = true;
          }},
         {"fraction", [&](const Json& x, const std::string& p) { rule.fraction = number(x, p); }}});
  if (!has_kind) throw InputError("config key '" + path + ".kind' is required");
  if (!(rule.fraction > 0.0 && rule.fraction <= 1.0)) {
    throw InputError("config key '" + path + ".fraction' must lie in (0,1]");
  }
  return rule;
}

void parse_synthetic(const Json& v, const std::string& path, SynthSpec& s) {
  visit(v, path,
        {{"num_labels", [&](const Json& x, const std::string& p) { s.num_labels = count(x, p); }},
         {"feature_dim", [&](const Json& x, const std::string& p) { s.feature_dim = count(x, p); }},
         {"num_samples", [&](const Json& x, const std::string& p) { s.num_samples = count(x, p); }},
         {"power_exponent", [&](const Json& x, const std::string& p) { s.power_exponent = number(x, p); }},
         {"base_prevalence", [&](const Json& x, const std::string& p) { s.base_prevalence = number(x, p); }},
         {"correlated", [&](const Json& x, const std::string& p) { s.correlated = boolean(x, p); }},
         {"noise_rate", [&](const Json& x, const std::string& p) { s.noise_rate = number(x, p); }}});
  s.validate();
}

void parse_data(const Json& v, const std::string& path, DataSource& d, const std::filesystem::path& base) {
  bool files = false;
  auto resolve = [&](const Json& x, const std::string& p) {
    std::filesystem::path f = text(x, p);
    return f.is_relative() && !base.empty() ? base / f : f;
  };
  visit(v, path,
        {{"synthetic",
          [&](const Json& x, const std::string& p) {
            d.synthetic.emplace();
            parse_synthetic(x, p, *d.synthetic);
          }},
         {"files",
          [&](const Json& x, const std::string& p) {
            files = true;
            visit(x, p,
                  {{"train", [&](const Json& y, const std::string& q) { d.train_file = resolve(y, q); }},
                   {"val", [&](const Json& y, const std::string& q) { d.val_file = resolve(y, q); }},
                   {"test", [&](const Json& y, const std::string& q) { d.test_file = resolve(y, q); }}});
            if (d.train_file.empty() || d.val_file.empty() || d.test_file.empty()) {
              throw InputError("config key '" + p + "' needs train, val and test");
            }
          }},
         {"split",
          [&](const Json& x, const std::string& p) {
            if (!x.is_array() || x.size() != 3) throw InputError("config key '" + p + "' must hold three ratios");
            double sum = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
              d.split[i] = number(x[i], p);
              if (!(d.split[i] > 0.0)) throw InputError("config key '" + p + "' ratios must be positive");
              sum += d.split[i];
            }
            if (std::abs(sum - 1.0) > 1e-9) throw InputError("config key '" + p + "' ratios must sum to 1");
          }},
         {"downsample", [&](const Json& x, const std::string& p) {
            DownsampleSpec ds;
            visit(x, p,
                  {{"k_rarest", [&](const Json& y, const std::string& q) { ds.k_rarest = count(y, q); }},
                   {"fraction", [&](const Json& y, const std::string& q) { ds.fraction = number(y, q); }}});
            if (!(ds.fraction >= 0.0 && ds.fraction <= 1.0)) {
              throw InputError("config key '" + p + ".fraction' must lie in [0,1]");
            }
            d.downsample = ds;
          }}});
  if (d.synthetic && files) throw InputError("config key '" + path + "' takes either synthetic or files, not both");
  if (!d.synthetic && !files) throw InputError("config key '" + path + "' needs synthetic or files");
}

void parse_train(const Json& v, const std::string& path, TrainConfig& t) {
  visit(v, path,
        {{"players", [&](const Json& x, const std::string& p) { t.players = count(x, p); }},
         {"overlap", [&](const Json& x, const std::string& p) { t.overlap = number(x, p); }},
         {"epochs", [&](const Json& x, const std::string& p) { t.epochs = count(x, p); }},
         {"batch_size", [&](const Json& x, const std::string& p) { t.batch_size = count(x, p); }},
         {"full_batch", [&](const Json& x, const std::string& p) { t.full_batch = boolean(x, p); }},
         {"learning_rate", [&](const Json& x, const std::string& p) { t.learning_rate = number(x, p); }},
         {"learning_rates",
          [&](const Json& x, const std::string& p) {
            if (!x.is_array()) throw InputError("config key '" + p + "' must be an array");
            t.player_learning_rates.clear();
            for (const auto& e : x) t.player_learning_rates.push_back(number(e, p));
          }},
         {"optimizer",
          [&](const Json& x, const std::string& p) {
            visit(x, p,
                  {{"kind",
                    [&](const Json& y, const std::string& q) {
                      const auto k = text(y, q);
                      if (k == "sgd") {
                        t.optimizer.kind = OptimizerKind::sgd;
                      } else if (k == "adaptive_moments") {
                        t.optimizer.kind = OptimizerKind::adaptive_moments;
                      } else {
                        throw InputError("config key '" + q + "' must be sgd or adaptive_moments");
                      }
                    }},
                   {"beta1", [&](const Json& y, const std::string& q) { t.optimizer.beta1 = number(y, q); }},
                   {"beta2", [&](const Json& y, const std::string& q) { t.optimizer.beta2 = number(y, q); }},
                   {"epsilon", [&](const Json& y, const std::string& q) { t.optimizer.epsilon = number(y, q); }}});
          }},
         {"init_sigma", [&](const Json& x, const std::string& p) { t.init_sigma = number(x, p); }},
         {"alpha", [&](const Json& x, const std::string& p) { t.curiosity.alpha = number(x, p); }},
         {"beta", [&](const Json& x, const std::string& p) { t.curiosity.beta = number(x, p); }},
         {"correctness",
          [&](const Json& x, const std::string& p) {
            const auto m = text(x, p);
            if (m == "soft_probability") {
              t.curiosity.mode = CorrectnessMode::soft_probability;
            } else if (m == "hard_indicator") {
              t.curiosity.mode = CorrectnessMode::hard_indicator;
            } else {
              throw InputError("config key '" + p + "' must be soft_probability or hard_indicator");
            }
          }},
         {"surrogate",
          [&](const Json& x, const std::string& p) {
            const auto s = text(x, p);
            if (s == "soft_f1") {
              t.surrogate = SurrogateKind::soft_f1;
            } else if (s == "neg_bce") {
              t.surrogate = SurrogateKind::neg_bce;
            } else {
              throw InputError("config key '" + p + "' must be soft_f1 or neg_bce");
            }
          }},
         {"stopping",
          [&](const Json& x, const std::string& p) {
            visit(x, p,
                  {{"kind",
                    [&](const Json& y, const std::string& q) {
                      const auto k = text(y, q);
                      if (k == "fixed_epochs") {
                        t.stopping.kind = StoppingRule::Kind::fixed_epochs;
                      } else if (k == "patience") {
                        t.stopping.kind = StoppingRule::Kind::patience;
                      } else {
                        throw InputError("config key '" + q + "' must be fixed_epochs or patience");
                      }
                    }},
                   {"patience", [&](const Json& y, const std::string& q) { t.stopping.patience = count(y, q); }}});
          }},
         {"probe_size", [&](const Json& x, const std::string& p) { t.probe_size = count(x, p); }}});
}

void parse_fusion(const Json& v, const std::string& path, TrainConfig& t) {
  visit(v, path,
        {{"strategy",
          [&](const Json& x, const std::string& p) {
            const auto s = text(x, p);
            if (s == "weighted_average") {
              t.fusion = FusionStrategy::weighted_average;
            } else if (s == "max_pool") {
              t.fusion = FusionStrategy::max_pool;
            } else {
              throw InputError("config key '" + p + "' must be weighted_average or max_pool");
            }
          }},
         {"threshold", [&](const Json& x, const std::string& p) { t.threshold = number(x, p); }},
         {"tune_thresholds", [&](const Json& x, const std::string& p) { t.tune_thresholds = boolean(x, p); }}});
}

void parse_metrics(const Json& v, const std::string& path, TrainConfig& t) {
  visit(v, path,
        {{"tail_rule", [&](const Json& x, const std::string& p) { t.tail_rule = head_tail_rule(x, p); }},
         {"diagnostics_split",
          [&](const Json& x, const std::string& p) { t.diagnostics_rule = head_tail_rule(x, p); }},
         {"k", [&](const Json& x, const std::string& p) {
            if (!x.is_array() || x.empty()) throw InputError("config key '" + p + "' must be a non-empty array");
            t.ks.clear();
            for (const auto& e : x) {
              const auto k = count(e, p);
              if (k == 0) throw InputError("config key '" + p + "' values must be >= 1");
              t.ks.push_back(k);
            }
          }}});
}

}  // namespace

RunConfig parse_run_config(const std::string& source, const std::filesystem::path& base_dir,
                           const std::string& source_name) {
  Json j;
  try {
    j = Json::parse(source);
  } catch (const Json::exception& e) {
    throw InputError(source_name + ": " + e.what());
  }
  RunConfig cfg;
  bool has_data = false;
  try {
    visit(j, "",
          {{"seed", [&](const Json& x, const std::string& p) { cfg.seed = count(x, p); }},
           {"output_dir",
            [&](const Json& x, const std::string& p) {
              std::filesystem::path out = text(x, p);
              cfg.output_dir = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
            }},
           {"data",
            [&](const Json& x, const std::string& p) {
              parse_data(x, p, cfg.data, base_dir);
              has_data = true;
            }},
           {"train", [&](const Json& x, const std::string& p) { parse_train(x, p, cfg.train); }},
           {"fusion", [&](const Json& x, const std::string& p) { parse_fusion(x, p, cfg.train); }},
           {"metrics", [&](const Json& x, const std::string& p) { parse_metrics(x, p, cfg.train); }},
           {"ablate",
            [&](const Json& x, const std::string& p) {
              visit(x, p, {{"seeds", [&](const Json& y, const std::string& q) { cfg.ablate_seeds = seed_list(y, q); }}});
            }},
           {"sweep", [&](const Json& x, const std::string& p) {
              visit(x, p, {{"seeds", [&](const Json& y, const std::string& q) { cfg.sweep_seeds = seed_list(y, q); }}});
            }}});
    if (!has_data) throw InputError("config key 'data' is required");
    cfg.train.seed = cfg.seed;
    cfg.train.validate();
  } catch (const InputError& e) {
    throw InputError(source_name + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path(), path.string());
}

}  // namespace tailgame
