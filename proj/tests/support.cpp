#include "support.hpp"

#include <png.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace testing_support {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("palmdt_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

BinaryImage mask_from(const std::vector<std::string>& rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.at(0).size());
    BinaryImage m(w, h);
    for (int y = 0; y < h; ++y) {
        if (static_cast<int>(rows[y].size()) != w) throw std::invalid_argument("ragged mask rows");
        for (int x = 0; x < w; ++x) m.set(x, y, rows[y][x] == '#');
    }
    return m;
}

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return pts;
}

std::size_t empty_circle_violations(const palmdt::Triangulation& t, double tol) {
    const auto sites = t.sites().points();
    long double min_x = sites[0].x, max_x = sites[0].x, min_y = sites[0].y, max_y = sites[0].y;
    for (const Point& p : sites) {
        min_x = std::min<long double>(min_x, p.x);
        max_x = std::max<long double>(max_x, p.x);
        min_y = std::min<long double>(min_y, p.y);
        max_y = std::max<long double>(max_y, p.y);
    }
    const long double extent = std::max(max_x - min_x, max_y - min_y);
    auto nx = [&](const Point& p) { return (p.x - min_x) / extent; };
    auto ny = [&](const Point& p) { return (p.y - min_y) / extent; };

    std::size_t bad = 0;
    for (const auto& tri : t.triangles()) {
        const Point& a = sites[tri[0]];
        const Point& b = sites[tri[1]];
        const Point& c = sites[tri[2]];
        const long double ax = nx(a), ay = ny(a), bx = nx(b), by = ny(b), cx = nx(c), cy = ny(c);
        const long double d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        if (d == 0) {
            ++bad;
            continue;
        }
        const long double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
        const long double ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        const long double uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        const long double r2 = (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy);
        for (std::size_t i = 0; i < sites.size(); ++i) {
            if (static_cast<int>(i) == tri[0] || static_cast<int>(i) == tri[1] || static_cast<int>(i) == tri[2]) {
                continue;
            }
            const long double px = nx(sites[i]), py = ny(sites[i]);
            const long double d2 = (px - ux) * (px - ux) + (py - uy) * (py - uy);
            if (d2 < r2 - tol) ++bad;
        }
    }
    return bad;
}

std::size_t hull_vertex_count(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts.size();
    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return static_cast<long double>(a.x - o.x) * (b.y - o.y) - static_cast<long double>(a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Point& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    return k - 1;
}

WindowStats window_stats(const palmdt::GrayImage& img, int x, int y, int window) {
    const int r = window / 2;
    auto clampi = [](int v, int n) { return std::clamp(v, 0, n - 1); };
    long double sum = 0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) sum += img.at(clampi(x + dx, img.width()), clampi(y + dy, img.height()));
    }
    const long double n = static_cast<long double>(window) * window;
    const long double mean = sum / n;
    long double ss = 0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const long double v = img.at(clampi(x + dx, img.width()), clampi(y + dy, img.height())) - mean;
            ss += v * v;
        }
    }
    return {mean, std::sqrt(ss / n)};
}

std::size_t count_components(const BinaryImage& mask) {
    std::vector<char> seen(static_cast<std::size_t>(mask.width()) * mask.height(), 0);
    std::size_t n = 0;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y) || seen[static_cast<std::size_t>(y) * mask.width() + x]) continue;
            ++n;
            stack = {{x, y}};
            seen[static_cast<std::size_t>(y) * mask.width() + x] = 1;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int px = cx + dx, py = cy + dy;
                        if (!mask.get(px, py)) continue;
                        char& s = seen[static_cast<std::size_t>(py) * mask.width() + px];
                        if (!s) {
                            s = 1;
                            stack.emplace_back(px, py);
                        }
                    }
                }
            }
        }
    }
    return n;
}

std::size_t greedy_matches(const std::vector<Point>& truth, const std::vector<Point>& found, double radius) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (std::size_t j = 0; j < found.size(); ++j) {
            const double d = std::hypot(truth[i].x - found[j].x, truth[i].y - found[j].y);
            if (d <= radius) pairs.emplace_back(d, i, j);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> ut(truth.size(), 0), uf(found.size(), 0);
    std::size_t matched = 0;
    for (const auto& [d, i, j] : pairs) {
        if (ut[i] || uf[j]) continue;
        ut[i] = uf[j] = 1;
        ++matched;
    }
    return matched;
}

bool structural_zeros(const palmdt::FeatureVector& fv) {
    return fv.dl[4] == 0.0 && fv.da[4] == 0.0 && fv.dc[4] == 0.0;
}

Point Similarity::apply(const Point& p) const noexcept {
    const double r = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(r), sn = std::sin(r);
    return {scale * (c * p.x - sn * p.y) + tx, scale * (sn * p.x + c * p.y) + ty};
}

Similarity random_similarity(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> deg(0.0, 360.0), sc(0.5, 2.0), t(-50.0, 50.0);
    Similarity s;
    s.degrees = deg(rng);
    s.scale = sc(rng);
    s.tx = t(rng);
    s.ty = t(rng);
    return s;
}

std::string similarity_mismatch(const std::vector<Point>& sites, const Similarity& s) {
    std::vector<Point> moved;
    for (const Point& p : sites) moved.push_back(s.apply(p));
    const auto before = palmdt::delaunay(palmdt::PointSet(sites));
    const auto after = palmdt::delaunay(palmdt::PointSet(moved));

    if (!std::equal(before.triangles().begin(), before.triangles().end(), after.triangles().begin(),
                    after.triangles().end())) {
        return "triangle index triples differ";
    }
    const auto fa = palmdt::extract_features(before);
    const auto fb = palmdt::extract_features(after);
    auto close = [](const auto& x, const auto& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::fabs(x[i] - y[i]) > 1e-9) return false;
        }
        return true;
    };
    if (!close(fa.dl, fb.dl)) return "dl differs";
    if (!close(fa.da, fb.da)) return "da differs";
    if (!close(fa.dc, fb.dc)) return "dc differs";

    std::vector<double> shifted;
    for (std::size_t i = 0; i < before.edge_count(); ++i) {
        const double a = std::fmod(palmdt::edge_angle(before.edge(i)) + s.degrees, 180.0);
        shifted.push_back(a < 0 ? a + 180.0 : a);
    }
    const auto counts = palmdt::classify(shifted, palmdt::BinScheme::angle());
    double mass = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = static_cast<double>(counts[i]) / static_cast<double>(shifted.size());
        if (std::fabs(expected - fb.dtheta[i]) > 1e-9) return "dtheta is not the shifted histogram";
        mass += fb.dtheta[i];
    }
    if (std::fabs(mass - 1.0) > 1e-9) return "dtheta mass is not 1";
    return {};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

void write_png(const fs::path& p, int width, int height, int bit_depth, int color_type,
               const std::vector<std::vector<png_byte>>& rows) {
    FILE* f = std::fopen(p.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + p.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(f);
        throw std::runtime_error("libpng write failed");
    }
    png_init_io(png, f);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (const auto& row : rows) png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
}

}  // namespace

void write_png_gray(const fs::path& p, int width, int height, int bit_depth, const std::vector<std::uint16_t>& samples) {
    std::vector<std::vector<png_byte>> rows(height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::uint16_t v = samples[static_cast<std::size_t>(y) * width + x];
            if (bit_depth == 16) {
                rows[y].push_back(static_cast<png_byte>(v >> 8));  // big-endian samples
                rows[y].push_back(static_cast<png_byte>(v & 0xff));
            } else {
                rows[y].push_back(static_cast<png_byte>(v));
            }
        }
    }
    write_png(p, width, height, bit_depth, PNG_COLOR_TYPE_GRAY, rows);
}

void write_png_rgb(const fs::path& p, int width, int height, const std::vector<std::uint8_t>& rgb) {
    std::vector<std::vector<png_byte>> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y].assign(rgb.begin() + static_cast<std::ptrdiff_t>(y) * width * 3,
                       rgb.begin() + static_cast<std::ptrdiff_t>(y + 1) * width * 3);
    }
    write_png(p, width, height, 8, PNG_COLOR_TYPE_RGB, rows);
}

}  // namespace testing_support
