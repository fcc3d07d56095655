#include "palmdt/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "palmdt/error.hpp"

namespace palmdt {

namespace {

template <std::size_t N>
std::array<double, N> proportions(const std::vector<std::size_t>& counts, std::size_t total) {
    std::array<double, N> out{};
    if (total == 0) return out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return out;
}

}  // namespace

std::string_view group_name(FeatureGroup group) noexcept {
    switch (group) {
        case FeatureGroup::RelativeLength: return "DL";
        case FeatureGroup::RelativeArea: return "DA";
        case FeatureGroup::Angle: return "Dtheta";
        case FeatureGroup::RelativeIncenter: return "DC";
    }
    return "?";
}

void BinScheme::validate() const {
    if (boundaries.size() < 2) {
        throw Error("bin scheme needs at least two boundaries");
    }
    for (std::size_t i = 1; i < boundaries.size(); ++i) {
        if (!(boundaries[i] > boundaries[i - 1])) {
            throw Error("bin boundaries must be strictly increasing");
        }
    }
}

BinScheme BinScheme::relative_length() {
    return {FeatureGroup::RelativeLength, {0.2, 0.4, 0.6, 0.8, 1.0, 1.8}, Inclusion::ClosedFirstThenLeftOpen};
}

BinScheme BinScheme::relative_area() {
    return {FeatureGroup::RelativeArea, {0.2, 0.4, 0.6, 0.8, 1.0, 1.8}, Inclusion::ClosedFirstThenLeftOpen};
}

BinScheme BinScheme::angle() {
    return {FeatureGroup::Angle, {0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0}, Inclusion::RightOpen};
}

BinScheme BinScheme::relative_incenter() {
    return {FeatureGroup::RelativeIncenter, {0.2, 0.4, 0.6, 0.8, 1.0, 1.2}, Inclusion::ClosedFirstThenLeftOpen};
}

std::vector<double> relative_ratios(std::span<const double> values) {
    if (values.empty()) {
        throw Error("relative ratios of an empty list");
    }
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error("relative ratios need positive finite values");
        }
    }
    const double max = *std::max_element(values.begin(), values.end());
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(v / max);
    return out;
}

std::vector<std::size_t> classify(std::span<const double> values, const BinScheme& scheme) {
    scheme.validate();
    const auto& b = scheme.boundaries;
    std::vector<std::size_t> counts(scheme.bins(), 0);
    for (double v : values) {
        if (std::isnan(v)) {
            throw Error("cannot classify NaN");
        }
        std::size_t cls = 0;
        if (scheme.inclusion == BinScheme::Inclusion::RightOpen) {
            if (v < b.front() || v >= b.back()) {
                throw Error(std::string(group_name(scheme.group)) + " value out of range: " + std::to_string(v));
            }
            cls = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), v) - b.begin()) - 1;
        } else {
            if (v > b.back()) {
                throw Error(std::string(group_name(scheme.group)) + " value out of range: " + std::to_string(v));
            }
            // First index whose boundary is >= v; the first class also takes underflow.
            const auto upper = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), v) - b.begin());
            cls = upper <= 1 ? 0 : upper - 1;
        }
        ++counts[cls];
    }
    return counts;
}

std::array<double, 21> FeatureVector::flatten() const noexcept {
    std::array<double, 21> out{};
    auto it = std::copy(dl.begin(), dl.end(), out.begin());
    it = std::copy(da.begin(), da.end(), it);
    it = std::copy(dtheta.begin(), dtheta.end(), it);
    std::copy(dc.begin(), dc.end(), it);
    return out;
}

FeatureVector extract_features(const Triangulation& tri) {
    if (tri.triangle_count() == 0) {
        throw Error("cannot extract features from an empty triangulation");
    }
    std::vector<double> lengths;
    std::vector<double> angles;
    lengths.reserve(tri.edge_count());
    angles.reserve(tri.edge_count());
    for (std::size_t i = 0; i < tri.edge_count(); ++i) {
        const Edge e = tri.edge(i);
        lengths.push_back(edge_length(e));
        angles.push_back(edge_angle(e));
    }

    std::vector<double> areas;
    std::vector<double> inradii;
    areas.reserve(tri.triangle_count());
    inradii.reserve(tri.triangle_count());
    for (std::size_t i = 0; i < tri.triangle_count(); ++i) {
        const Triangle t = tri.triangle(i);
        areas.push_back(triangle_area(t));
        inradii.push_back(triangle_inradius(t));
    }

    FeatureVector fv;
    fv.dl = proportions<5>(classify(relative_ratios(lengths), BinScheme::relative_length()), lengths.size());
    fv.da = proportions<5>(classify(relative_ratios(areas), BinScheme::relative_area()), areas.size());
    fv.dtheta = proportions<6>(classify(angles, BinScheme::angle()), angles.size());
    fv.dc = proportions<5>(classify(relative_ratios(inradii), BinScheme::relative_incenter()), inradii.size());
    fv.triangle_count = static_cast<int>(tri.triangle_count());
    return fv;
}

}  // namespace palmdt
