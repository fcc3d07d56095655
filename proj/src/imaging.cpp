#include "palmdt/imaging.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "palmdt/error.hpp"

namespace palmdt {

namespace {

// Neighbor offsets in cyclic order E, NE, N, NW, W, SW, S, SE (y grows down).
constexpr std::array<int, 8> kDx = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr std::array<int, 8> kDy = {0, -1, -1, -1, 0, 1, 1, 1};

std::array<bool, 8> neighborhood(const BinaryImage& mask, int x, int y) noexcept {
    std::array<bool, 8> n{};
    for (int i = 0; i < 8; ++i) {
        n[i] = mask.get(x + kDx[i], y + kDy[i]);
    }
    return n;
}

// Yokoi connectivity number for 8-connected foreground. A border pixel is
// simple (removable without changing topology) iff this equals 1.
int connectivity_number(const std::array<bool, 8>& n) noexcept {
    auto bg = [&](int i) { return n[i % 8] ? 0 : 1; };
    int c = 0;
    for (int k = 0; k < 8; k += 2) {
        c += bg(k) - bg(k) * bg(k + 1) * bg(k + 2);
    }
    return c;
}

int clamp_index(int v, int size) noexcept {
    return v < 0 ? 0 : (v >= size ? size - 1 : v);
}

std::vector<std::vector<std::pair<int, int>>> components(const BinaryImage& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<std::vector<std::pair<int, int>>> out;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || seen[static_cast<std::size_t>(y) * w + x]) continue;
            auto& comp = out.emplace_back();
            stack.assign(1, {x, y});
            seen[static_cast<std::size_t>(y) * w + x] = 1;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                comp.emplace_back(cx, cy);
                for (int i = 0; i < 8; ++i) {
                    const int nx = cx + kDx[i];
                    const int ny = cy + kDy[i];
                    if (mask.get(nx, ny) && !seen[static_cast<std::size_t>(ny) * w + nx]) {
                        seen[static_cast<std::size_t>(ny) * w + nx] = 1;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
        }
    }
    return out;
}

// Walks from an endpoint along degree-2 pixels. Returns the visited pixels if
// the walk hits a junction within max_len pixels, otherwise an empty list.
std::vector<std::pair<int, int>> trace_spur(const BinaryImage& mask, int x, int y, int max_len) {
    std::vector<std::pair<int, int>> path{{x, y}};
    int px = -1, py = -1;
    int cx = x, cy = y;
    while (static_cast<int>(path.size()) < max_len) {
        int nx = -1, ny = -1;
        for (int i = 0; i < 8; ++i) {
            const int tx = cx + kDx[i];
            const int ty = cy + kDy[i];
            if (mask.get(tx, ty) && !(tx == px && ty == py)) {
                nx = tx;
                ny = ty;
                break;
            }
        }
        if (nx < 0) return {};
        const int degree = neighbor_count(mask, nx, ny);
        if (degree >= 3) return path;
        if (degree <= 1) return {};  // isolated segment, not a branch
        for (const auto& visited : path) {
            if (visited.first == nx && visited.second == ny) return {};
        }
        path.emplace_back(nx, ny);
        px = cx;
        py = cy;
        cx = nx;
        cy = ny;
    }
    return {};
}

}  // namespace

void NiblackParams::validate() const {
    if (window < 3 || window % 2 == 0) {
        throw Error("niblack window must be odd and >= 3, got " + std::to_string(window));
    }
    if (!std::isfinite(k)) {
        throw Error("niblack k must be finite");
    }
    if (min_component < 1) {
        throw Error("min_component must be >= 1");
    }
    if (min_spur < 0) {
        throw Error("min_spur must be >= 0");
    }
}

int neighbor_count(const BinaryImage& mask, int x, int y) noexcept {
    int n = 0;
    for (int i = 0; i < 8; ++i) {
        n += mask.get(x + kDx[i], y + kDy[i]) ? 1 : 0;
    }
    return n;
}

std::size_t component_count(const BinaryImage& mask) {
    return components(mask).size();
}

BinaryImage niblack_binarize(const GrayImage& image, const NiblackParams& params) {
    params.validate();
    const int w = image.width();
    const int h = image.height();
    if (params.window > w || params.window > h) {
        throw Error("niblack window larger than image");
    }
    const int r = params.window / 2;
    const int pw = w + 2 * r;
    const int ph = h + 2 * r;

    auto value = [&](int x, int y) -> std::int64_t {
        const std::int64_t v = image.at(clamp_index(x, w), clamp_index(y, h));
        return params.invert ? 255 - v : v;
    };

    // Summed-area tables over the border-replicated image, exact in integers.
    const std::size_t stride = static_cast<std::size_t>(pw) + 1;
    std::vector<std::int64_t> sum(stride * (ph + 1), 0);
    std::vector<std::int64_t> sq(stride * (ph + 1), 0);
    for (int y = 0; y < ph; ++y) {
        std::int64_t row_sum = 0;
        std::int64_t row_sq = 0;
        for (int x = 0; x < pw; ++x) {
            const std::int64_t v = value(x - r, y - r);
            row_sum += v;
            row_sq += v * v;
            sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row_sum;
            sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + row_sq;
        }
    }
    auto box = [&](const std::vector<std::int64_t>& t, int x0, int y0) {
        const int x1 = x0 + params.window;
        const int y1 = y0 + params.window;
        return t[y1 * stride + x1] - t[y0 * stride + x1] - t[y1 * stride + x0] + t[y0 * stride + x0];
    };

    const std::int64_t n = static_cast<std::int64_t>(params.window) * params.window;
    const double nd = static_cast<double>(n);
    BinaryImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // Padded coordinates of the window's top-left corner are (x, y).
            const std::int64_t s = box(sum, x, y);
            const std::int64_t q = box(sq, x, y);
            const std::int64_t spread = n * q - s * s;
            const double mean = static_cast<double>(s) / nd;
            const double stddev = std::sqrt(static_cast<double>(spread)) / nd;
            const double threshold = mean + params.k * stddev;
            out.set(x, y, static_cast<double>(value(x, y)) < threshold);
        }
    }
    return out;
}

BinaryImage skeletonize(const BinaryImage& mask) {
    BinaryImage img = mask;
    const int w = img.width();
    const int h = img.height();
    // Pass order N, S, E, W; each pass only considers pixels whose 4-neighbor
    // in that direction is background.
    constexpr std::array<std::pair<int, int>, 4> kDirections = {{{0, -1}, {0, 1}, {1, 0}, {-1, 0}}};

    std::vector<std::pair<int, int>> candidates;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [dx, dy] : kDirections) {
            candidates.clear();
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (img.at(x, y) && !img.get(x + dx, y + dy)) {
                        candidates.emplace_back(x, y);
                    }
                }
            }
            for (const auto& [x, y] : candidates) {
                const auto n = neighborhood(img, x, y);
                int degree = 0;
                for (bool b : n) degree += b ? 1 : 0;
                if (degree >= 2 && connectivity_number(n) == 1) {
                    img.set(x, y, false);
                    changed = true;
                }
            }
        }
    }
    return img;
}

BinaryImage clean(const BinaryImage& skeleton, const NiblackParams& params) {
    params.validate();
    BinaryImage img = skeleton;

    if (params.min_spur > 0) {
        std::vector<std::pair<int, int>> doomed;
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                if (img.at(x, y) && neighbor_count(img, x, y) == 1) {
                    auto spur = trace_spur(img, x, y, params.min_spur);
                    doomed.insert(doomed.end(), spur.begin(), spur.end());
                }
            }
        }
        for (const auto& [x, y] : doomed) img.set(x, y, false);
        // The pixel where a spur met the line is usually left as a stub.
        if (!doomed.empty()) img = skeletonize(img);
    }

    if (params.min_component > 1) {
        for (const auto& comp : components(img)) {
            if (static_cast<int>(comp.size()) < params.min_component) {
                for (const auto& [x, y] : comp) img.set(x, y, false);
            }
        }
    }
    return img;
}

PointSet detect_endpoints(const BinaryImage& skeleton) {
    std::vector<Point> points;
    for (int y = 0; y < skeleton.height(); ++y) {
        for (int x = 0; x < skeleton.width(); ++x) {
            if (skeleton.at(x, y) && neighbor_count(skeleton, x, y) == 1) {
                points.push_back({static_cast<double>(x), static_cast<double>(y)});
            }
        }
    }
    return PointSet(std::move(points));
}

}  // namespace palmdt
