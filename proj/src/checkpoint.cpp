#include "tailgame/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "tailgame/error.hpp"
#include "tailgame/json_io.hpp"

namespace tailgame {

std::string checkpoint_json(const TrainedModel& model) {
  Json j;
  j["format_version"] = kCheckpointVersion;
  j["feature_dim"] = model.players.empty() ? 0 : model.players.front().feature_dim;
  j["partition"] = to_json(model.partition, model.frequencies);
  Json fusion;
  fusion["strategy"] = to_string(model.fusion.strategy);
  fusion["weights"] = model.fusion.weights;
  fusion["thresholds"] = model.fusion.thresholds;
  j["fusion"] = fusion;
  Json players = Json::array();
  for (const auto& p : model.players) {
    Json w = Json::array();
    for (std::size_t r = 0; r < p.weights.rows(); ++r) {
      const auto row = p.weights.row(r);
      w.push_back(std::vector<double>(row.begin(), row.end()));
    }
    players.push_back({{"id", p.id}, {"label_block", p.block}, {"weights", w}, {"bias", p.bias}});
  }
  j["players"] = players;
  return j.dump(1) + "\n";
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("checkpoint: missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

TrainedModel parse_checkpoint(const std::string& text, const std::string& source_name) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(source_name + ": " + e.what());
  }
  try {
    if (field(j, "format_version").get<int>() != kCheckpointVersion) {
      throw InputError("unsupported checkpoint format_version");
    }
    TrainedModel model;
    const auto d = field(j, "feature_dim").get<std::size_t>();
    const Json& pj = field(j, "partition");
    const auto L = field(pj, "num_labels").get<std::size_t>();
    model.frequencies = frequencies_from_counts(field(pj, "counts").get<std::vector<std::size_t>>(),
                                                field(pj, "source_count").get<std::size_t>());
    if (model.frequencies.num_labels() != L) throw InputError("checkpoint: counts length differs from num_labels");
    model.partition = make_partition(L, field(pj, "overlap_ratio").get<double>(),
                                     field(pj, "blocks").get<std::vector<std::vector<LabelId>>>(),
                                     field(pj, "cores").get<std::vector<std::vector<LabelId>>>());

    const Json& fj = field(j, "fusion");
    const auto strategy = field(fj, "strategy").get<std::string>();
    if (strategy == "weighted_average") {
      model.fusion.strategy = FusionStrategy::weighted_average;
    } else if (strategy == "max_pool") {
      model.fusion.strategy = FusionStrategy::max_pool;
    } else {
      throw InputError("checkpoint: unknown fusion strategy '" + strategy + "'");
    }
    model.fusion.weights = field(fj, "weights").get<std::vector<std::vector<double>>>();
    model.fusion.thresholds = field(fj, "thresholds").get<std::vector<double>>();
    validate_fusion(model.fusion, model.partition);

    const Json& players = field(j, "players");
    if (!players.is_array() || players.size() != model.partition.num_players()) {
      throw InputError("checkpoint: player count differs from partition");
    }
    for (std::size_t i = 0; i < players.size(); ++i) {
      const Json& p = players[i];
      PlayerModel m;
      m.id = field(p, "id").get<PlayerId>();
      m.block = field(p, "label_block").get<std::vector<LabelId>>();
      m.feature_dim = d;
      if (m.id != i || m.block != model.partition.blocks[i]) {
        throw InputError("checkpoint: player " + std::to_string(i) + " does not match its partition block");
      }
      const auto rows = field(p, "weights").get<std::vector<std::vector<double>>>();
      m.bias = field(p, "bias").get<std::vector<double>>();
      if (rows.size() != m.block.size() || m.bias.size() != m.block.size()) {
        throw InputError("checkpoint: player " + std::to_string(i) + " parameter shape mismatch");
      }
      m.weights = Matrix(rows.size(), d);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != d) throw InputError("checkpoint: weight row length differs from feature_dim");
        for (std::size_t c = 0; c < d; ++c) m.weights(r, c) = rows[r][c];
      }
      if (!m.all_finite()) throw InputError("checkpoint: non-finite parameters");
      model.players.push_back(std::move(m));
    }
    return model;
  } catch (const Json::exception& e) {
    throw InputError(source_name + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(source_name + ": " + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << checkpoint_json(model);
  if (!out) throw InputError("failed writing " + path.string());
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str(), path.string());
}

}  // namespace tailgame
