#pragma once

// JSON bindings for the on-disk formats (trial files, configs, models, reports).

#include "iws/data.hpp"

#include <json.hpp>

namespace iws {

nlohmann::json to_json(const Trial& trial);
Trial trial_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SynthConfig& config);
/// Missing fields keep their defaults; wrongly typed fields raise ConfigError naming the field.
SynthConfig synth_config_from_json(const nlohmann::json& j);

/// Parses a JSON file, mapping open failures to IoError and syntax errors to ConfigError.
nlohmann::json read_config_file(const std::filesystem::path& path);

}  // namespace iws
