#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "spreadcast/dists/family.hpp"

namespace spreadcast::pipeline {

struct PipelineConfig {
    std::filesystem::path manifest;          // dataset manifest, needed by ingest
    std::filesystem::path out = "out";
    std::vector<dists::Family> families{dists::kSkewFamilies.begin(), dists::kSkewFamilies.end()};
    std::optional<int> train_last;           // 1-based day, overrides the split
    std::optional<int> validation_last;
    std::optional<int> window;               // default: every row before the test period
    std::optional<int> horizon;              // default: the whole test period
    int max_missing = 200;
    std::vector<double> costs = {5.0, 10.0, 15.0};
    std::vector<double> levels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::uint64_t seed = 1;
    int threads = 1;

    /// Throws ConfigError on unknown keys, bad types or invalid values.
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::filesystem::path& file);
    nlohmann::json to_json() const;
    /// Relative paths resolved, families deduplicated; ConfigError when invalid.
    void validate() const;
};

}  // namespace spreadcast::pipeline
