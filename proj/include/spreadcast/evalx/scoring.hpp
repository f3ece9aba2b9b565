#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spreadcast/dists/family.hpp"
#include "spreadcast/dists/params.hpp"

namespace spreadcast::evalx {

/// Fallback tier: 99 = levels 1..99, 97 = 2..98, 95 = 3..97.
enum class Tier { Full = 99, Trim97 = 97, Trim95 = 95, Failed = 0 };

struct QuantileGrid {
    std::vector<int> levels;  // percent, ascending
    std::vector<double> values;
    Tier tier = Tier::Failed;

    bool ok() const noexcept { return tier != Tier::Failed; }
    /// Value at `level` percent, NaN when the level is not in the grid.
    double at(int level) const;
};

/// Pinball loss of quantile q at level a% for outcome y.
double pinball_value(double q, int a, double y);

/// Tries levels 1..99, then 2..98, then 3..97 with `quantile(level)`. A tier
/// fails when any call throws QuantileFailure or the values are not finite
/// and strictly increasing.
QuantileGrid extract_quantiles(const std::function<double(double)>& quantile);
QuantileGrid extract_quantiles(dists::Family family, const dists::ParamVector& p);

/// Mean pinball loss over the grid's levels. DomainError for a failed grid.
double pinball_score(const QuantileGrid& grid, double y);

struct PinballReport {
    double measure = 0.0;  // mean over evaluated steps
    int omitted = 0;       // n
    int evaluated = 0;     // J_b = horizon - n
};

/// NaN entries are omitted steps. Throws EmptyHorizon when none is evaluated.
PinballReport pinball_measure(std::span<const double> scores);

/// Root mean squared error over pairs where both values are finite.
double rmse(std::span<const double> forecast, std::span<const double> realized);

/// Family with the smallest finite measure; ties go to the earlier family in
/// the fixed order JSU, JSUo, SEP1, SEP2, ST1, ST2, ST5, NO. Throws NoCandidate.
dists::Family select_best(const std::vector<std::pair<dists::Family, double>>& measures);

/// |a - b| / b, the relative gap between two measures.
double relative_gap(double a, double b);

struct DmResult {
    double statistic = 0.0;
    double p_value = 0.5;  // one-sided, small when series 1 scores lower
    int horizon = 0;       // pairwise-complete steps used
};

/// Harvey-corrected Diebold-Mariano test on Delta_t = |s1_t| - |s2_t| with a
/// lag-0 variance and t(n - 1) reference. Steps with a NaN in either series
/// are dropped. Delta identically 0 gives statistic 0 and p = 0.5; any other
/// constant Delta throws DegenerateVariance. DomainError below 10 steps or
/// for unequal lengths.
DmResult dm_test(std::span<const double> s1, std::span<const double> s2);

}  // namespace spreadcast::evalx
