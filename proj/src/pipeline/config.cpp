#include "spreadcast/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "spreadcast/errors.hpp"

namespace spreadcast::pipeline {

using nlohmann::json;

namespace {

const std::set<std::string> kKeys = {"manifest", "out",     "families", "train_last", "validation_last",
                                     "window",   "horizon", "max_missing", "costs",   "levels",
                                     "seed",     "threads"};

template <class T>
T get(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!kKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    PipelineConfig c;
    if (j.contains("manifest")) c.manifest = get<std::string>(j, "manifest");
    if (j.contains("out")) c.out = get<std::string>(j, "out");
    if (j.contains("families")) {
        c.families.clear();
        for (const auto& name : get<std::vector<std::string>>(j, "families")) {
            try {
                c.families.push_back(dists::parse_family(name));
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
        }
    }
    auto opt_int = [&](const char* key, std::optional<int>& dst) {
        if (j.contains(key) && !j.at(key).is_null()) dst = get<int>(j, key);
    };
    opt_int("train_last", c.train_last);
    opt_int("validation_last", c.validation_last);
    opt_int("window", c.window);
    opt_int("horizon", c.horizon);
    if (j.contains("max_missing")) c.max_missing = get<int>(j, "max_missing");
    if (j.contains("costs")) c.costs = get<std::vector<double>>(j, "costs");
    if (j.contains("levels")) c.levels = get<std::vector<double>>(j, "levels");
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
    if (j.contains("threads")) c.threads = get<int>(j, "threads");
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    PipelineConfig c = from_json(j);
    const auto base = file.parent_path();
    if (!c.manifest.empty() && c.manifest.is_relative()) c.manifest = base / c.manifest;
    return c;
}

json PipelineConfig::to_json() const {
    json j;
    j["manifest"] = manifest.string();
    j["out"] = out.string();
    j["families"] = json::array();
    for (auto f : families) j["families"].push_back(std::string(dists::to_string(f)));
    auto opt = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
    j["train_last"] = opt(train_last);
    j["validation_last"] = opt(validation_last);
    j["window"] = opt(window);
    j["horizon"] = opt(horizon);
    j["max_missing"] = max_missing;
    j["costs"] = costs;
    j["levels"] = levels;
    j["seed"] = seed;
    j["threads"] = threads;
    return j;
}

void PipelineConfig::validate() const {
    if (families.empty()) throw ConfigError("family whitelist is empty");
    std::set<dists::Family> seen(families.begin(), families.end());
    if (seen.size() != families.size()) throw ConfigError("family whitelist repeats a family");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (window && *window < 30) throw ConfigError("window must be at least 30 rows");
    if (horizon && *horizon < 1) throw ConfigError("horizon must be at least 1");
    if (max_missing < 0) throw ConfigError("max_missing must be non-negative");
    if (costs.empty() || levels.empty()) throw ConfigError("costs and levels must be non-empty");
    for (double b : levels) {
        if (!(b >= 0.0 && b < 1.0)) throw ConfigError("battery levels must lie in [0, 1)");
    }
    for (double c : costs) {
        if (!(c >= 0.0)) throw ConfigError("costs must be non-negative");
    }
    if (train_last && validation_last && *validation_last <= *train_last) {
        throw ConfigError("validation_last must follow train_last");
    }
}

}  // namespace spreadcast::pipeline
