#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "palmdt/image.hpp"

namespace palmdt {

/// Incircle tolerance, in coordinates normalized to the unit bounding box.
inline constexpr double kIncircleEpsilon = 1e-10;

struct Edge {
    Point a;
    Point b;
};

struct Triangle {
    Point a;
    Point b;
    Point c;
};

/// Twice the signed area of (a, b, c); positive when counterclockwise in the
/// (x, y) frame.
double orientation(const Point& a, const Point& b, const Point& c) noexcept;

double edge_length(const Edge& e) noexcept;

/// Angle of the undirected edge against the +x axis, in degrees, in [0, 180).
/// Throws Error for a zero-length edge.
double edge_angle(const Edge& e);

/// Zero for collinear vertices.
double triangle_area(const Triangle& t) noexcept;

/// area / semiperimeter. Throws Error for a degenerate triangle.
double triangle_inradius(const Triangle& t);

/// True iff p lies strictly inside the circumcircle of t. The test runs on
/// coordinates normalized to the bounding box of the four points; points
/// within epsilon of the circle count as outside. Throws Error for a
/// degenerate triangle.
bool circumcircle_contains(const Triangle& t, const Point& p, double epsilon = kIncircleEpsilon);

/// Delaunay triangulation over a fixed site set.
///
/// Triangles are counterclockwise index triples into sites(), each rotated to
/// start at its smallest index, and the list is sorted. Edges are the
/// deduplicated (low, high) index pairs of all triangle sides, sorted.
class Triangulation {
public:
    Triangulation(PointSet sites, std::vector<std::array<int, 3>> triangles);

    const PointSet& sites() const noexcept { return sites_; }
    std::span<const std::array<int, 3>> triangles() const noexcept { return triangles_; }
    std::span<const std::array<int, 2>> edges() const noexcept { return edges_; }

    std::size_t triangle_count() const noexcept { return triangles_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    Triangle triangle(std::size_t i) const noexcept;
    Edge edge(std::size_t i) const noexcept;

    /// Plain-text listing: site coordinates followed by triangle triples.
    std::string to_text() const;

private:
    PointSet sites_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edges_;
};

/// Bowyer-Watson insertion in lexicographic site order, followed by hull
/// completion and edge-flip legalization. Cocircular quadrilaterals take the
/// diagonal whose lexicographically smaller endpoint is smallest.
///
/// Throws Error("insufficient sites") for fewer than 3 sites and
/// Error("degenerate site set") when all sites are collinear.
Triangulation delaunay(const PointSet& sites);

}  // namespace palmdt
