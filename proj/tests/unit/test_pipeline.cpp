#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spreadcast/data/synthetic.hpp"
#include "spreadcast/errors.hpp"
#include "spreadcast/evalx/rolling.hpp"
#include "spreadcast/pipeline/pipeline.hpp"
#include "spreadcast/util/csv.hpp"
#include "spreadcast/util/hash.hpp"

using namespace spreadcast;
using namespace spreadcast::pipeline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("spreadcast_test_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// 120 days of normal shocks: split 72 / 24 / 24, test rows 95..118.
const fs::path& normal_dataset() {
    static const fs::path manifest = [] {
        data::SyntheticConfig sc;
        sc.days = 120;
        sc.family = dists::Family::Normal;
        sc.seed = 3;
        return data::write_raw_dataset(data::synthetic_panel(sc), scratch("raw") / "raw", 2, 3);
    }();
    return manifest;
}

PipelineConfig normal_config(const fs::path& out) {
    PipelineConfig c;
    c.manifest = normal_dataset();
    c.out = out;
    c.families = {dists::Family::Normal};
    c.window = 60;
    c.horizon = 12;
    return c;
}

// Completed NORMAL-only run shared by the read-only checks below.
const Layout& normal_run() {
    static const Layout layout = [] {
        Pipeline p(normal_config(scratch("normal") / "out"));
        p.run(std::vector<Stage>(std::begin(kAllStages), std::end(kAllStages)));
        return p.layout();
    }();
    return layout;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& f) {
    csv::Reader r(f);
    std::vector<std::vector<std::string>> out;
    std::vector<std::string_view> cells;
    while (r.next(cells)) out.emplace_back(cells.begin(), cells.end());
    return out;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = PipelineConfig::from_json(
        nlohmann::json{{"families", {"ST2", "NO"}}, {"window", 200}, {"threads", 2}, {"costs", {5.0}}});
    CHECK(c.families == std::vector{dists::Family::ST2, dists::Family::Normal});
    CHECK(c.window == 200);
    CHECK_FALSE(c.horizon.has_value());
    CHECK(c.threads == 2);
    CHECK(PipelineConfig::from_json(c.to_json()).to_json() == c.to_json());

    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json{{"windw", 3}}), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json{{"families", {"XYZ"}}}), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json{{"threads", 0}}), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json{{"window", "long"}}), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config file resolves the manifest against its directory") {
    const fs::path dir = scratch("cfg");
    std::ofstream(dir / "run.json") << R"({"manifest": "raw/manifest.json", "seed": 9})";
    const auto c = PipelineConfig::load(dir / "run.json");
    CHECK(c.manifest == dir / "raw" / "manifest.json");
    CHECK(c.seed == 9);
}

TEST_CASE("stage names") {
    for (Stage s : kAllStages) CHECK(parse_stage(to_string(s)) == s);
    CHECK_THROWS_AS(parse_stage("plot"), ConfigError);
}

TEST_CASE("row split") {
    PipelineConfig c;
    // 300 days: training 2..180, validation 181..240, test 241..300
    const RowSplit r = row_split(300, c);
    CHECK(r.train_first == 0);
    CHECK(r.train_count == 179);
    CHECK(r.validation_first == 179);
    CHECK(r.validation_count == 60);
    CHECK(r.test_first == 239);
    CHECK(r.test_count == 60);

    const RowSplit full = row_split(1917, c);
    CHECK(full.validation_count == 384);
    CHECK(full.test_count == 383);
    CHECK(full.test_first == 1533);

    c.train_last = 200;
    c.validation_last = 250;
    const RowSplit o = row_split(300, c);
    CHECK(o.validation_first == 199);
    CHECK(o.test_first == 249);
    CHECK(o.test_count == 50);
    c.validation_last = 400;
    CHECK_THROWS_AS(row_split(300, c), ConfigError);
}

TEST_CASE("ingest is deterministic and logs repairs") {
    const fs::path a = scratch("ingest_a"), b = scratch("ingest_b");
    PipelineConfig c = normal_config(a);
    Pipeline(c).run(Stage::Ingest);
    c.out = b;
    Pipeline(c).run(Stage::Ingest);
    CHECK(slurp(a / "ingest" / "panel.csv") == slurp(b / "ingest" / "panel.csv"));
    const auto log = read_rows(a / "ingest" / "repair_log.csv");
    int spring = 0, fills = 0;
    for (const auto& row : log) {
        spring += row[1] == "dst_interpolate";
        fills += row[1] == "fill_7day";
    }
    CHECK(spring == 1);  // one spring clock change in 120 days from January
    CHECK(fills >= 2);
}

TEST_CASE("whitelist of one family selects it everywhere") {
    const Layout& l = normal_run();
    const auto sel = read_selection(l.selection());
    REQUIRE(sel.size() == 276);
    for (std::size_t i = 0; i < sel.size(); ++i) {
        CHECK(sel[i].spread == static_cast<int>(i) + 1);
        REQUIRE(sel[i].family.has_value());
        CHECK(*sel[i].family == dists::Family::Normal);
    }
    CHECK(read_rows(l.aic()).size() == 276);
}

TEST_CASE("forecast archives cover every spread") {
    const Layout& l = normal_run();
    const auto best = evalx::read_archive(l.best_archive());
    const auto normal = evalx::read_archive(l.normal_archive());
    CHECK(best.size() == 276 * 12);
    CHECK(normal.size() == 276 * 12);
    // NORMAL as the selected family reuses the benchmark run
    CHECK(slurp(l.best_archive()) == slurp(l.normal_archive()));
}

TEST_CASE("report matrices") {
    const Layout& l = normal_run();
    const auto pl = read_rows(l.report_dir() / "pl_difference.csv");
    REQUIRE(pl.size() == 24);
    int populated = 0;
    for (int h1 = 0; h1 < 24; ++h1) {
        for (int h2 = 0; h2 < 24; ++h2) {
            const std::string& cell = pl[h1][h2 + 1];
            if (h2 <= h1) {
                CHECK(cell == "NA");
            } else if (cell != "NA") {
                ++populated;
                CHECK(std::stod(cell) == 0.0);  // best and benchmark coincide
            }
        }
    }
    CHECK(populated == 276);

    for (const auto& row : read_rows(l.report_dir() / "dm_pvalues.csv")) {
        for (std::size_t j = 1; j < row.size(); ++j) {
            if (row[j] == "NA") continue;
            const double p = std::stod(row[j]);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
    CHECK(read_rows(l.report_dir() / "summary.csv").size() == 276);
    CHECK(read_rows(l.report_dir() / "moments.csv").size() == 4 * 12);
    CHECK(read_rows(l.report_dir() / "skewness.csv").size() == 24);
}

TEST_CASE("report sweep equals the backtest sweep") {
    const Layout& l = normal_run();
    CHECK(slurp(l.report_dir() / "sweep.csv") == slurp(l.sweep()));
    const auto sweep = read_rows(l.sweep());
    CHECK(sweep.size() == 30);
    const auto best = read_rows(l.best_levels());
    CHECK(best.size() == 3);
    // one trades row per test day for each cost
    CHECK(read_rows(l.trades()).size() == 3 * 12);
}

TEST_CASE("manifest records every spread once per stage") {
    const Layout& l = normal_run();
    const RunManifest m = RunManifest::read(l.manifest());
    CHECK(m.version == kVersion);
    for (const char* stage : {"select", "forecast", "report"}) {
        const auto& spreads = m.stages.at(stage).spreads;
        REQUIRE(spreads.size() == 276);
        for (std::size_t i = 0; i < spreads.size(); ++i) CHECK(spreads[i].spread == static_cast<int>(i) + 1);
    }
    CHECK(m.stages.size() == 5);
    CHECK(m.config.at("window") == 60);
}

TEST_CASE("stages are resumable") {
    const fs::path out = scratch("resume") / "out";
    PipelineConfig c = normal_config(out);
    c.horizon = 3;
    const std::vector<Stage> head = {Stage::Ingest, Stage::Select};
    {
        Pipeline p(c);
        p.run(head);
        CHECK_FALSE(p.manifest().stages.at("select").skipped);
    }
    const auto stamp = fs::last_write_time(out / "select" / "selection.csv");
    {
        Pipeline p(c);
        p.run(head);
        CHECK(p.manifest().stages.at("ingest").skipped);
        CHECK(p.manifest().stages.at("select").skipped);
    }
    CHECK(fs::last_write_time(out / "select" / "selection.csv") == stamp);
    {
        Pipeline p(c, true);
        p.run(Stage::Select);
        CHECK_FALSE(p.manifest().stages.at("select").skipped);
    }
    {
        // a new split changes the select inputs but not the ingest inputs
        c.train_last = 70;
        Pipeline p(c);
        p.run(head);
        CHECK(p.manifest().stages.at("ingest").skipped);
        CHECK_FALSE(p.manifest().stages.at("select").skipped);
    }
}

TEST_CASE("report without archives") {
    PipelineConfig c;
    c.out = scratch("empty") / "out";
    Pipeline p(c);
    CHECK_THROWS_AS(p.run(Stage::Report), MissingArchive);
    CHECK_THROWS_AS(p.run(Stage::Backtest), MissingArchive);
    CHECK_THROWS_AS(p.run(Stage::Forecast), MissingArchive);
}

TEST_CASE("sha-256") {
    util::Hasher h;
    h.add("");
    const std::string a = h.hex();
    util::Hasher g;
    g.add("");
    CHECK(a == g.hex());
    CHECK(a.size() == 64);
    util::Hasher x, y;
    x.add("ab").add("c");
    y.add("a").add("bc");
    CHECK(x.hex() != y.hex());
}

#ifdef SPREADCAST_CLI
TEST_CASE("cli reports errors as json") {
    const fs::path dir = scratch("cli");
    const std::string cmd = std::string(SPREADCAST_CLI) + " report --out " + (dir / "out").string() + " 2>&1 1>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string text;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) text += buf;
    const int status = pclose(pipe);
    CHECK(status != 0);
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("error") == "MissingArchive");
    CHECK_FALSE(j.at("message").get<std::string>().empty());

    FILE* bad = popen((std::string(SPREADCAST_CLI) + " run --families XYZ 2>&1 1>/dev/null").c_str(), "r");
    text.clear();
    while (std::fgets(buf, sizeof buf, bad) != nullptr) text += buf;
    CHECK(pclose(bad) != 0);
    CHECK(nlohmann::json::parse(text).at("error") == "ConfigError");
}
#endif
