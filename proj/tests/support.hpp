#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "palmdt/features.hpp"
#include "palmdt/image.hpp"
#include "palmdt/triangulation.hpp"

namespace testing_support {

using palmdt::BinaryImage;
using palmdt::Point;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// '#' marks a set pixel, anything else is clear. Rows must be equally long.
BinaryImage mask_from(const std::vector<std::string>& rows);

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n);

// Brute force: no site lies strictly inside any triangle's circumcircle.
// The circle is computed explicitly (circumcenter and radius) in long double
// on coordinates normalized to the site bounding box; a site counts as inside
// when its squared distance is below r^2 by more than tol. Returns the number
// of violations.
std::size_t empty_circle_violations(const palmdt::Triangulation& t, double tol);

// Vertices of the convex hull (monotone chain, collinear points excluded).
std::size_t hull_vertex_count(std::vector<Point> pts);

// Mean and standard deviation of a window with replicated borders, by direct
// summation in long double.
struct WindowStats {
    long double mean;
    long double stddev;
};
WindowStats window_stats(const palmdt::GrayImage& img, int x, int y, int window);

// 8-connected components by flood fill.
std::size_t count_components(const BinaryImage& mask);

// Greedy nearest pairing within radius, shortest pairs first; returns the
// number of points of `truth` that were matched.
std::size_t greedy_matches(const std::vector<Point>& truth, const std::vector<Point>& found, double radius);

bool structural_zeros(const palmdt::FeatureVector& fv);

struct Similarity {
    double degrees = 0.0;
    double scale = 1.0;
    double tx = 0.0;
    double ty = 0.0;

    Point apply(const Point& p) const noexcept;
};

Similarity random_similarity(std::mt19937_64& rng);

// Triangulates the sites before and after the transform and compares: index
// triples must be identical, dl/da/dc equal within 1e-9, and dtheta equal to
// the histogram of the original edge angles shifted by the rotation. Returns
// an empty string on success, otherwise a description of the first mismatch.
std::string similarity_mismatch(const std::vector<Point>& sites, const Similarity& s);

std::string read_file(const std::filesystem::path& p);

// Writes a grayscale PNG with the given bit depth (8 or 16) through libpng.
void write_png_gray(const std::filesystem::path& p, int width, int height, int bit_depth,
                    const std::vector<std::uint16_t>& samples);
// Writes an 8-bit RGB PNG.
void write_png_rgb(const std::filesystem::path& p, int width, int height, const std::vector<std::uint8_t>& rgb);

}  // namespace testing_support
