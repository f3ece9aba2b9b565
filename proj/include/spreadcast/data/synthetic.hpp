#pragma once

#include <cstdint>
#include <filesystem>

#include "spreadcast/data/panel.hpp"
#include "spreadcast/dists/family.hpp"

namespace spreadcast::data {

/// Seeded market with a known spread law: each hour's price is
/// base_h + a_load * load_h + a_wind * wind_h + w_h * scale * e_t with
/// w_h = 1 + 0.2 h and one shock e_t per day drawn from `family`. Every
/// spread is then exactly that family in location-scale form, with its
/// location linear in the wind and load differences.
struct SyntheticConfig {
    int days = 300;
    dists::Family family = dists::Family::ST2;
    double nu = 1.0;
    double tau = 6.0;
    double scale = 2.0;
    double a_load = 0.004;
    double a_wind = -0.002;
    std::uint64_t seed = 1;
    std::string start = "2015-01-01";
};

HourlyPanel synthetic_panel(const SyntheticConfig& config);

/// Writes the raw CSV set plus `manifest.json` into `dir`: spring-forward
/// days lose hour 02, fall-back days repeat it, and `missing_cells`
/// hourly values after the first week are blanked. Returns the manifest path.
std::filesystem::path write_raw_dataset(const HourlyPanel& panel, const std::filesystem::path& dir,
                                        int missing_cells = 0, std::uint64_t seed = 1);

}  // namespace spreadcast::data
