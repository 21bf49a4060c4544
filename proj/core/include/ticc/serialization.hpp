#pragma once

#include "ticc/metrics.hpp"
#include "ticc/synth.hpp"
#include "ticc/ticc.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace ticc {

using json = nlohmann::json;

void to_json(json& j, const BlockToeplitzMatrix& theta);
BlockToeplitzMatrix toeplitz_from_json(const json& j);

void to_json(json& j, const AdmmConfig& config);
void from_json(const json& j, AdmmConfig& config);

void to_json(json& j, const TiccConfig& config);
void from_json(const json& j, TiccConfig& config);

/// {config, clusters: [{mu, count, theta}], assignment, objective_trace,
///  converged, em_iters_run}
json model_to_json(const TiccModel& model, const TiccConfig& config);
TiccModel model_from_json(const json& j, TiccConfig* config = nullptr);

void to_json(json& j, const MatchResult& result);

json read_json(const std::filesystem::path& path);
void write_json(const json& j, const std::filesystem::path& path);

}  // namespace ticc
