#pragma once

#include <json.hpp>

#include "tailgame/diagnostics.hpp"
#include "tailgame/label_space.hpp"
#include "tailgame/metrics.hpp"
#include "tailgame/training.hpp"

namespace tailgame {

using Json = nlohmann::ordered_json;

Json to_json(const MetricReport& report, bool per_label = true);
Json to_json(const EpochDiagnostics& diag);
Json to_json(const TraceSummary& summary);
Json to_json(const SetRanking& ranking);
Json to_json(const SpecializationRanks& ranks);
Json to_json(const Partition& partition, const FrequencyTable& ft);
Json to_json(const HeadTailRule& rule);
Json to_json(const TrainConfig& config);
Json to_json(const SynthSpec& spec);

std::string to_string(FusionStrategy s);
std::string to_string(SurrogateKind k);
std::string to_string(CorrectnessMode m);
std::string to_string(OptimizerKind k);

}  // namespace tailgame
