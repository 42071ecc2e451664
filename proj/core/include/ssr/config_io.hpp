#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ssr/harness.hpp"

namespace ssr {

using Json = nlohmann::json;

// Rates are exchanged in Hz (kappa / 2 pi) and gains either linear or in dB.
Json to_json(const NetworkParams& p);
NetworkParams network_from_json(const Json& j, const NetworkParams& defaults);

Json to_json(const SynthConfig& c);
SynthConfig synth_from_json(const Json& j, const SynthConfig& defaults);

Json to_json(const PipelineConfig& c);
PipelineConfig pipeline_from_json(const Json& j, const PipelineConfig& defaults);

Json to_json(const ScanConfig& c);
ScanConfig scan_from_json(const Json& j, const ScanConfig& defaults);

Json to_json(const HaloscopePhysical& h);
HaloscopePhysical axion_from_json(const Json& j, const HaloscopePhysical& defaults);

Json to_json(const ExperimentConfig& c);

/// Parses an experiment configuration. Missing keys take the defaults of the
/// configured scale; unknown keys and malformed values raise ConfigError.
ExperimentConfig experiment_from_json(const Json& j);
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(const std::string& bytes);

/// Hash of the canonical serialization of the configuration.
std::uint64_t config_hash(const ExperimentConfig& c);

std::string hex64(std::uint64_t x);

}  // namespace ssr
