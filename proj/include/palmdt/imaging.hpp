#pragma once

#include "palmdt/image.hpp"

namespace palmdt {

/// Line extraction settings: Niblack threshold plus skeleton cleanup.
struct NiblackParams {
    int window = 41;        ///< odd side length of the local window
    double k = -1.5;        ///< threshold = mean + k * stddev
    int min_component = 10; ///< skeleton components smaller than this are dropped
    int min_spur = 4;       ///< junction branches shorter than this are pruned
    bool invert = false;    ///< treat bright lines on dark skin as lines

    /// Throws Error when any field is out of range.
    void validate() const;

    friend bool operator==(const NiblackParams&, const NiblackParams&) = default;
};

/// Local adaptive threshold. A pixel is a line pixel iff
/// I < mean_w + k * stddev_w, with window statistics taken over replicated
/// borders.
BinaryImage niblack_binarize(const GrayImage& image, const NiblackParams& params);

/// Iterative directional thinning that only removes simple points, so
/// 8-connected components survive and the result is a fixed point.
BinaryImage skeletonize(const BinaryImage& mask);

/// Drops small components and prunes short junction spurs.
BinaryImage clean(const BinaryImage& skeleton, const NiblackParams& params);

/// Pixels with exactly one 8-neighbor, as (column, row) points in raster order.
PointSet detect_endpoints(const BinaryImage& skeleton);

/// Number of set pixels among the 8 neighbors of (x, y).
int neighbor_count(const BinaryImage& mask, int x, int y) noexcept;

/// Number of 8-connected components.
std::size_t component_count(const BinaryImage& mask);

}  // namespace palmdt
