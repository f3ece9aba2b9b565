#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spreadcast/data/spreads.hpp"
#include "spreadcast/pipeline/config.hpp"

namespace spreadcast::pipeline {

inline constexpr const char* kVersion = "spreadcast 1.0.0";

enum class Stage { Ingest, Select, Forecast, Report, Backtest };

inline constexpr Stage kAllStages[] = {Stage::Ingest, Stage::Select, Stage::Forecast, Stage::Report,
                                       Stage::Backtest};

std::string to_string(Stage s);
Stage parse_stage(const std::string& name);  // ConfigError

/// Per-spread outcome of a stage: fitted, non-convergent or unavailable.
struct SpreadStatus {
    int spread = 0;
    std::string status;
    std::string family;
};

struct StageRecord {
    std::string input_hash;
    double seconds = 0.0;
    bool skipped = false;
    std::vector<SpreadStatus> spreads;  // empty for stages without per-spread work
};

struct RunManifest {
    std::string version = kVersion;
    nlohmann::json config;
    std::map<std::string, StageRecord> stages;

    static RunManifest read(const std::filesystem::path& file);  // empty manifest when absent
    void write(const std::filesystem::path& file) const;
};

/// Artifact locations under the output directory.
struct Layout {
    std::filesystem::path root;

    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path panel() const { return root / "ingest" / "panel.csv"; }
    std::filesystem::path repair_log() const { return root / "ingest" / "repair_log.csv"; }
    std::filesystem::path aic() const { return root / "select" / "aic.csv"; }
    std::filesystem::path validation() const { return root / "select" / "validation.csv"; }
    std::filesystem::path selection() const { return root / "select" / "selection.csv"; }
    std::filesystem::path best_archive() const { return root / "forecast" / "best.csv"; }
    std::filesystem::path normal_archive() const { return root / "forecast" / "normal.csv"; }
    std::filesystem::path report_dir() const { return root / "report"; }
    std::filesystem::path sweep() const { return root / "backtest" / "sweep.csv"; }
    std::filesystem::path best_levels() const { return root / "backtest" / "best_levels.csv"; }
    std::filesystem::path trades() const { return root / "backtest" / "trades.csv"; }
};

/// Selected family per spread, or none when every candidate failed.
struct SelectionRow {
    int spread = 0;
    std::optional<dists::Family> family;
    std::string status;
};

std::vector<SelectionRow> read_selection(const std::filesystem::path& file);

/// Zero-based spread-panel rows of each period (row r is day r + 2).
struct RowSplit {
    int train_first = 0, train_count = 0;
    int validation_first = 0, validation_count = 0;
    int test_first = 0, test_count = 0;
};

RowSplit row_split(int days, const PipelineConfig& config);

/// Runs stages against the output directory. A stage whose inputs hash to
/// the value recorded in the manifest, with its outputs present, is skipped
/// unless `force` is set.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config, bool force = false);

    void run(const std::vector<Stage>& stages);
    void run(Stage stage);

    const RunManifest& manifest() const noexcept { return manifest_; }
    const Layout& layout() const noexcept { return layout_; }

private:
    std::string input_hash(Stage stage) const;
    std::vector<std::filesystem::path> outputs(Stage stage) const;
    std::vector<SpreadStatus> execute(Stage stage);

    std::vector<SpreadStatus> ingest();
    std::vector<SpreadStatus> select();
    std::vector<SpreadStatus> forecast();
    std::vector<SpreadStatus> report();
    std::vector<SpreadStatus> backtest();

    PipelineConfig config_;
    bool force_;
    Layout layout_;
    RunManifest manifest_;
};

}  // namespace spreadcast::pipeline
