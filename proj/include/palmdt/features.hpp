#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "palmdt/triangulation.hpp"

namespace palmdt {

enum class FeatureGroup { RelativeLength, RelativeArea, Angle, RelativeIncenter };

std::string_view group_name(FeatureGroup group) noexcept;

/// Class boundaries for one feature group.
///
/// Ratio groups: the first class is [b0, b1] and also absorbs values below b0;
/// later classes are (b_i, b_{i+1}]. Angle group: classes are [b_i, b_{i+1}).
struct BinScheme {
    enum class Inclusion { ClosedFirstThenLeftOpen, RightOpen };

    FeatureGroup group;
    std::vector<double> boundaries;
    Inclusion inclusion;

    std::size_t bins() const noexcept { return boundaries.size() - 1; }

    /// Throws Error unless boundaries are strictly increasing with >= 2 entries.
    void validate() const;

    static BinScheme relative_length();
    static BinScheme relative_area();
    static BinScheme angle();
    static BinScheme relative_incenter();
};

/// Each value divided by the maximum. Throws Error on an empty list or a
/// nonpositive value.
std::vector<double> relative_ratios(std::span<const double> values);

/// Per-class counts. Throws Error for a value outside the scheme's range.
std::vector<std::size_t> classify(std::span<const double> values, const BinScheme& scheme);

/// Twenty-one proportion bins plus the triangle count of one triangulation.
struct FeatureVector {
    std::array<double, 5> dl{};      ///< relative edge length classes
    std::array<double, 5> da{};      ///< relative triangle area classes
    std::array<double, 6> dtheta{};  ///< edge angle classes, 30 degrees wide
    std::array<double, 5> dc{};      ///< relative inradius classes
    int triangle_count = 0;

    /// The 21 bins in dl, da, dtheta, dc order.
    std::array<double, 21> flatten() const noexcept;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Throws Error for a triangulation without triangles.
FeatureVector extract_features(const Triangulation& tri);

}  // namespace palmdt
