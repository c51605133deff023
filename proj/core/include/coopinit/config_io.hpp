#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "coopinit/datasets.hpp"
#include "coopinit/trainer.hpp"

namespace coopinit {

inline constexpr int kRunConfigFormatVersion = 1;

// Contents of a run-config file: the dataset plus the training schedule.
struct RunConfig {
  TrainConfig train;
  DatasetSpec dataset;
};

// JSON round trip. Parsing is strict: missing fields, bad values and
// unknown keys raise ConfigError naming the offending field.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical serialization (sorted keys, stable number formatting); two
// equal configs always produce identical text.
std::string canonical_config_text(const RunConfig& cfg);
std::string canonical_dataset_text(const DatasetSpec& spec);

// Canonical text with the seed field zeroed; runs differing only by seed
// share an id. Used to group runs in comparisons.
std::string config_group_text(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& text);
std::string config_group_id(const RunConfig& cfg);

}  // namespace coopinit
