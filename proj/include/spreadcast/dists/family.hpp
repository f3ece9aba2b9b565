#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace spreadcast::dists {

/// Continuous four-parameter families with (identity, log, identity, log)
/// links on (mu, sigma, nu, tau). NORMAL is the two-parameter benchmark.
enum class Family : std::uint8_t { Normal, JSU, JSUo, SEP1, SEP2, ST1, ST2, ST5 };

enum class Link : std::uint8_t { Identity, Log };

inline constexpr std::array<Family, 8> kAllFamilies = {
    Family::Normal, Family::JSU,  Family::JSUo, Family::SEP1,
    Family::SEP2,   Family::ST1,  Family::ST2,  Family::ST5};

/// The seven skew/kurtotic candidates in their canonical listing order. This
/// order is the tie-break order used by model selection (first wins).
inline constexpr std::array<Family, 7> kSkewFamilies = {
    Family::JSU, Family::JSUo, Family::SEP1, Family::SEP2,
    Family::ST1, Family::ST2,  Family::ST5};

/// Number of distribution parameters the family actually uses (2 or 4).
constexpr int parameter_count(Family f) noexcept {
    return f == Family::Normal ? 2 : 4;
}

/// Link of parameter k (0 = mu, 1 = sigma, 2 = nu, 3 = tau).
constexpr Link link_of(int k) noexcept {
    return (k == 1 || k == 3) ? Link::Log : Link::Identity;
}

/// Position in the canonical order; NORMAL sorts after every skew family.
constexpr int selection_rank(Family f) noexcept {
    for (std::size_t i = 0; i < kSkewFamilies.size(); ++i) {
        if (kSkewFamilies[i] == f) return static_cast<int>(i);
    }
    return static_cast<int>(kSkewFamilies.size());
}

std::string_view to_string(Family f) noexcept;

/// Case-insensitive parse of "NO"/"NORMAL", "JSU", "JSUo", "SEP1", ...
/// Throws DomainError on unknown names.
Family parse_family(std::string_view name);

}  // namespace spreadcast::dists
