#include "palmdt/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <tuple>

#include "palmdt/error.hpp"

namespace palmdt {

using nlohmann::json;

namespace {

constexpr double kMargin = 0.1;
constexpr double kEndClearance = 0.07;  // unit-square distance between a stroke end and any other stroke
constexpr double kBackground = 200.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

// mt19937_64 output is fully specified by the standard; the std
// distributions are not, so the transforms live here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

Point bezier(const std::array<Point, 4>& c, double t) {
    const double s = 1.0 - t;
    const double b0 = s * s * s, b1 = 3 * s * s * t, b2 = 3 * s * t * t, b3 = t * t * t;
    return {b0 * c[0].x + b1 * c[1].x + b2 * c[2].x + b3 * c[3].x,
            b0 * c[0].y + b1 * c[1].y + b2 * c[2].y + b3 * c[3].y};
}

std::vector<Point> sample_curve(const std::array<Point, 4>& c, int segments) {
    std::vector<Point> pts;
    pts.reserve(segments + 1);
    for (int i = 0; i <= segments; ++i) pts.push_back(bezier(c, static_cast<double>(i) / segments));
    return pts;
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, {a.x + t * dx, a.y + t * dy});
}

bool inside_margin(const std::array<Point, 4>& c) {
    return std::all_of(c.begin(), c.end(), [](const Point& p) {
        return p.x >= kMargin && p.x <= 1.0 - kMargin && p.y >= kMargin && p.y <= 1.0 - kMargin;
    });
}

Stroke random_stroke(Rng& rng, bool principal) {
    const double length = principal ? rng.uniform(0.45, 0.7) : rng.uniform(0.12, 0.25);
    const double bend = principal ? 0.08 : 0.04;
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const Point center{rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75)};
    const double ux = std::cos(angle), uy = std::sin(angle);
    const Point start{center.x - ux * length / 2, center.y - uy * length / 2};
    Stroke s;
    s.principal = principal;
    s.control[0] = start;
    for (int i = 1; i <= 2; ++i) {
        const double along = length * i / 3.0;
        const double off = rng.normal() * bend;
        s.control[i] = {start.x + ux * along - uy * off, start.y + uy * along + ux * off};
    }
    s.control[3] = {center.x + ux * length / 2, center.y + uy * length / 2};
    s.width = principal ? rng.uniform(2.5, 3.0) : rng.uniform(2.0, 2.5);
    s.contrast = principal ? rng.uniform(110.0, 130.0) : rng.uniform(100.0, 120.0);
    return s;
}

// Stroke ends must stay clear of every other stroke so that each one shows
// up as a skeleton endpoint rather than merging into a junction.
bool compatible(const Stroke& s, const std::vector<Stroke>& placed) {
    const auto curve = sample_curve(s.control, 64);
    for (const Stroke& other : placed) {
        const auto other_curve = sample_curve(other.control, 64);
        for (const Point& end : {s.control[0], s.control[3]}) {
            for (std::size_t i = 0; i + 1 < other_curve.size(); ++i) {
                if (segment_distance(end, other_curve[i], other_curve[i + 1]) < kEndClearance) return false;
            }
        }
        for (const Point& end : {other.control[0], other.control[3]}) {
            for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
                if (segment_distance(end, curve[i], curve[i + 1]) < kEndClearance) return false;
            }
        }
    }
    return true;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Unit-variance fine-grained Gaussian field.
std::vector<double> texture_field(Rng& rng, int size) {
    const auto k = gaussian_kernel(0.5);
    const int r = static_cast<int>(k.size() / 2);
    const std::size_t n = static_cast<std::size_t>(size) * size;
    std::vector<double> white(n), tmp(n, 0.0), out(n, 0.0);
    for (double& v : white) v = rng.normal();
    auto wrap = [size](int i) { return ((i % size) + size) % size; };
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * white[static_cast<std::size_t>(y) * size + wrap(x + i)];
            tmp[static_cast<std::size_t>(y) * size + x] = acc;
        }
    }
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp[static_cast<std::size_t>(wrap(y + i)) * size + x];
            out[static_cast<std::size_t>(y) * size + x] = acc;
        }
    }
    double k2 = 0.0;
    for (double v : k) k2 += v * v;
    const double norm = 1.0 / k2;  // the 2-D kernel's sum of squares is k2 * k2
    for (double& v : out) v *= norm;
    return out;
}

void paint_stroke(std::vector<double>& darkness, int size, const std::vector<Point>& pixels, const Stroke& s) {
    const double half = s.width / 2.0;
    const double reach = half + 1.0;
    for (std::size_t i = 0; i + 1 < pixels.size(); ++i) {
        const Point& a = pixels[i];
        const Point& b = pixels[i + 1];
        // Slight intensity variation along the stroke.
        const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(pixels.size() - 1);
        const double contrast = s.contrast * (0.92 + 0.08 * std::sin(2.0 * std::numbers::pi * t));
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - reach)));
        const int x1 = std::min(size - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + reach)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - reach)));
        const int y1 = std::min(size - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + reach)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d = segment_distance({static_cast<double>(x), static_cast<double>(y)}, a, b);
                const double coverage = std::clamp(half + 0.5 - d, 0.0, 1.0);
                double& dst = darkness[static_cast<std::size_t>(y) * size + x];
                dst = std::max(dst, coverage * contrast);
            }
        }
    }
}

std::string zero_padded(int v, int width) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%0*d", width, v);
    return buf;
}

}  // namespace

std::vector<Point> LineTemplate::endpoints() const {
    std::vector<Point> out;
    out.reserve(strokes.size() * 2);
    for (const Stroke& s : strokes) {
        out.push_back(s.control[0]);
        out.push_back(s.control[3]);
    }
    return out;
}

void SampleParams::validate() const {
    if (!(jitter >= 0.0)) throw Error("jitter must be >= 0");
    if (!(rotation >= -20.0 && rotation <= 20.0)) throw Error("rotation must be within [-20, 20] degrees");
    if (!(scale >= 0.8 && scale <= 1.25)) throw Error("scale must be within [0.8, 1.25]");
    if (!(noise >= 0.0)) throw Error("noise must be >= 0");
    if (size < GrayImage::kMinSide) throw Error("image size must be >= 16");
}

json SampleParams::to_json() const {
    return {{"jitter", jitter}, {"rotation", rotation}, {"scale", scale}, {"noise", noise}, {"size", size}};
}

json PoseSpread::to_json() const {
    return {{"rotation", rotation}, {"scale", scale}};
}

LineTemplate generate_template(std::uint64_t seed) {
    Rng rng(mix(seed, 0x7e3a1a7e));
    LineTemplate t;
    t.seed = seed;
    const int principal = 3;
    const int wrinkles = rng.uniform_int(4, 9);
    for (int i = 0; i < principal + wrinkles; ++i) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            Stroke s = random_stroke(rng, i < principal);
            if (inside_margin(s.control) && compatible(s, t.strokes)) {
                t.strokes.push_back(s);
                break;
            }
        }
    }
    return t;
}

RenderedSample render_sample(const LineTemplate& t, const SampleParams& p, std::uint64_t noise_seed) {
    p.validate();
    Rng rng(mix(noise_seed, 0x5a3b1e));
    const int size = p.size;
    const double unit_to_px = static_cast<double>(size - 1);
    const double theta = p.rotation * std::numbers::pi / 180.0;
    const double cs = std::cos(theta), sn = std::sin(theta);
    auto pose = [&](const Point& u) {
        const double dx = u.x - 0.5, dy = u.y - 0.5;
        const Point v{0.5 + p.scale * (cs * dx - sn * dy), 0.5 + p.scale * (sn * dx + cs * dy)};
        return Point{v.x * unit_to_px, v.y * unit_to_px};
    };

    std::vector<double> darkness(static_cast<std::size_t>(size) * size, 0.0);
    std::vector<Point> truth;
    for (const Stroke& s : t.strokes) {
        std::array<Point, 4> c = s.control;
        for (Point& q : c) {
            q.x += rng.normal() * p.jitter / unit_to_px;
            q.y += rng.normal() * p.jitter / unit_to_px;
        }
        const auto unit_curve = sample_curve(c, 96);
        std::vector<Point> px;
        px.reserve(unit_curve.size());
        for (const Point& q : unit_curve) px.push_back(pose(q));
        paint_stroke(darkness, size, px, s);
        truth.push_back(pose(c[0]));
        truth.push_back(pose(c[3]));
    }

    std::vector<double> texture;
    if (p.noise > 0.0) texture = texture_field(rng, size);
    std::vector<std::uint8_t> pixels(darkness.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const double bg = kBackground + (texture.empty() ? 0.0 : p.noise * texture[i]);
        pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(bg - darkness[i]), 0L, 255L));
    }
    return {GrayImage(size, size, std::move(pixels)), std::move(truth)};
}

double unmatched_fraction(const std::vector<Point>& a, const std::vector<Point>& b, double radius) {
    if (a.empty()) return 0.0;
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d = distance(a[i], b[j]);
            if (d <= radius) pairs.emplace_back(d, i, j);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
    std::size_t matched = 0;
    for (const auto& [d, i, j] : pairs) {
        if (used_a[i] || used_b[j]) continue;
        used_a[i] = used_b[j] = 1;
        ++matched;
    }
    return 1.0 - static_cast<double>(matched) / static_cast<double>(a.size());
}

json generate_corpus(const std::filesystem::path& root, int n_subjects, int samples_per_subject,
                     const SampleParams& base, std::uint64_t seed, const PoseSpread& spread) {
    namespace fs = std::filesystem;
    if (n_subjects < 2 || samples_per_subject < 2) {
        throw Error("corpus needs at least 2 subjects with 2 samples each");
    }
    base.validate();
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec || !fs::is_directory(root)) {
        throw Error("cannot create corpus directory: " + root.string());
    }

    json subjects = json::array();
    std::vector<LineTemplate> templates;
    for (int s = 0; s < n_subjects; ++s) {
        LineTemplate t;
        for (std::uint64_t attempt = 0;; ++attempt) {
            t = generate_template(mix(mix(seed, static_cast<std::uint64_t>(s)), attempt));
            const auto ends = t.endpoints();
            const bool collides = std::any_of(templates.begin(), templates.end(), [&](const LineTemplate& prev) {
                return unmatched_fraction(ends, prev.endpoints(), 0.03) < 0.2;
            });
            if (!collides || attempt > 100) break;
        }
        templates.push_back(t);

        const std::string label = "S" + zero_padded(s, 3);
        const fs::path dir = root / label;
        fs::create_directories(dir, ec);
        if (ec) throw Error("cannot create directory: " + dir.string());

        json samples = json::array();
        for (int k = 0; k < samples_per_subject; ++k) {
            const std::uint64_t sample_seed = mix(mix(seed ^ 0xc0ffee, static_cast<std::uint64_t>(s)), k);
            Rng pose_rng(sample_seed);
            SampleParams sp = base;
            sp.rotation = std::clamp(base.rotation + pose_rng.uniform(-spread.rotation, spread.rotation), -20.0, 20.0);
            sp.scale = std::clamp(base.scale * pose_rng.uniform(1.0 - spread.scale, 1.0 + spread.scale), 0.8, 1.25);
            const RenderedSample r = render_sample(t, sp, sample_seed);
            const std::string file = label + "/" + zero_padded(k, 2) + ".png";
            save_png(r.image, root / file);

            json ends = json::array();
            for (const Point& q : r.endpoints) ends.push_back({q.x, q.y});
            samples.push_back({{"file", file},
                               {"session", k < (samples_per_subject + 1) / 2 ? 1 : 2},
                               {"rotation", sp.rotation},
                               {"scale", sp.scale},
                               {"endpoints", ends}});
        }
        subjects.push_back({{"label", label}, {"template_seed", t.seed}, {"strokes", t.strokes.size()}, {"samples", samples}});
    }

    json manifest = {{"seed", seed},
                     {"params", base.to_json()},
                     {"pose_spread", spread.to_json()},
                     {"subjects", subjects}};
    std::ofstream out(root / "manifest.json");
    if (!out) throw Error("cannot write manifest in " + root.string());
    out << manifest.dump(2) << '\n';
    return manifest;
}

}  // namespace palmdt
