#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace palmdt {

/// A location in pixel units; x is the column and y is the row.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend auto operator<=>(const Point&, const Point&) = default;
};

/// 8-bit grayscale raster, row-major. Immutable once constructed.
class GrayImage {
public:
    static constexpr int kMinSide = 16;

    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);
    GrayImage(int width, int height, std::uint8_t fill);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::uint8_t at(int x, int y) const noexcept {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }
    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

/// Boolean raster with the same layout as GrayImage; true marks a line pixel.
class BinaryImage {
public:
    BinaryImage(int width, int height);
    BinaryImage(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool inside(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }
    bool at(int x, int y) const noexcept {
        return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    /// Out-of-frame reads are false.
    bool get(int x, int y) const noexcept { return inside(x, y) && at(x, y); }
    void set(int x, int y, bool value) noexcept {
        bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
    }

    std::size_t count() const noexcept;
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Distinct points in insertion order. Exact duplicates are dropped.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::vector<Point> points);

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const Point& operator[](std::size_t i) const noexcept { return points_[i]; }
    std::span<const Point> points() const noexcept { return points_; }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::vector<Point> points_;
};

struct LoadOptions {
    /// When false, 16-bit inputs are rejected; when true they are reduced to
    /// their high byte.
    bool downconvert_16bit = false;
};

/// Reads an 8-bit PGM (P5) or PNG. Color PNGs are converted by luminance.
GrayImage load_grayscale(const std::filesystem::path& path, const LoadOptions& options = {});

void save_pgm(const GrayImage& image, const std::filesystem::path& path);
/// Line pixels are written black on white.
void save_pgm(const BinaryImage& mask, const std::filesystem::path& path);
void save_png(const GrayImage& image, const std::filesystem::path& path);

}  // namespace palmdt
