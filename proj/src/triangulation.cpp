#include "palmdt/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include "palmdt/error.hpp"

namespace palmdt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCollinearEpsilon = 1e-12;

// Positive iff d is inside the circumcircle of counterclockwise (a, b, c).
double incircle(const Point& a, const Point& b, const Point& c, const Point& d) noexcept {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
           clift * (adx * bdy - bdx * ady);
}

struct Bounds {
    double min_x, min_y, extent;

    Point apply(const Point& p) const noexcept {
        return {(p.x - min_x) / extent, (p.y - min_y) / extent};
    }
};

Bounds bounds_of(std::span<const Point> pts) {
    double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
    for (const Point& p : pts) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double extent = std::max(max_x - min_x, max_y - min_y);
    return {min_x, min_y, extent > 0.0 ? extent : 1.0};
}

using Tri = std::array<int, 3>;
using DirectedEdge = std::pair<int, int>;

// Works on sites renumbered in lexicographic order, so the tie-break on the
// lexicographically smallest endpoint is a plain integer comparison.
class Builder {
public:
    explicit Builder(std::vector<Point> normalized) : pts_(std::move(normalized)), n_(static_cast<int>(pts_.size())) {}

    std::vector<Tri> run() {
        insert_all();
        drop_super_vertices();
        fill_hull_pockets();
        legalize();
        break_cocircular_ties();
        return std::move(tris_);
    }

private:
    double orient(int a, int b, int c) const noexcept { return orientation(pts_[a], pts_[b], pts_[c]); }
    // Rounding in the normalized frame can give collinear triples a tiny sign.
    bool ccw(int a, int b, int c) const noexcept { return orient(a, b, c) > kCollinearEpsilon; }
    double incircle(const Tri& t, int d) const noexcept {
        return palmdt::incircle(pts_[t[0]], pts_[t[1]], pts_[t[2]], pts_[d]);
    }

    void insert_all() {
        // Super triangle well outside the unit box.
        pts_.push_back({-200.0, -100.0});
        pts_.push_back({200.0, -100.0});
        pts_.push_back({0.5, 200.0});
        tris_.push_back({n_, n_ + 1, n_ + 2});
        for (int p = 0; p < n_; ++p) insert(p);
    }

    void insert(int p) {
        std::vector<char> bad(tris_.size(), 0);
        bool any = false;
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            if (incircle(tris_[i], p) > kIncircleEpsilon) {
                bad[i] = 1;
                any = true;
            }
        }
        if (!any) {
            // Within tolerance of every circle; fall back to the containing triangle.
            for (std::size_t i = 0; i < tris_.size(); ++i) {
                const Tri& t = tris_[i];
                if (orient(t[0], t[1], p) >= 0 && orient(t[1], t[2], p) >= 0 && orient(t[2], t[0], p) >= 0) {
                    bad[i] = 1;
                    break;
                }
            }
        }

        // Grow the cavity until p sees every boundary edge strictly from the left.
        std::vector<DirectedEdge> boundary;
        for (;;) {
            boundary = cavity_boundary(bad);
            bool grown = false;
            for (const auto& [a, b] : boundary) {
                if (ccw(a, b, p)) continue;
                const int across = find_triangle_with(b, a);
                if (across >= 0 && !bad[across]) {
                    bad[across] = 1;
                    grown = true;
                }
            }
            if (!grown) break;
        }

        std::vector<Tri> kept;
        kept.reserve(tris_.size() + boundary.size());
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            if (!bad[i]) kept.push_back(tris_[i]);
        }
        for (const auto& [a, b] : boundary) {
            if (ccw(a, b, p)) kept.push_back({a, b, p});
        }
        tris_ = std::move(kept);
    }

    std::vector<DirectedEdge> cavity_boundary(const std::vector<char>& bad) const {
        std::vector<DirectedEdge> edges;
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            if (!bad[i]) continue;
            const Tri& t = tris_[i];
            for (int k = 0; k < 3; ++k) edges.emplace_back(t[k], t[(k + 1) % 3]);
        }
        std::vector<DirectedEdge> out;
        for (const auto& [a, b] : edges) {
            if (std::find(edges.begin(), edges.end(), DirectedEdge{b, a}) == edges.end()) {
                out.emplace_back(a, b);
            }
        }
        return out;
    }

    int find_triangle_with(int a, int b) const {
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const Tri& t = tris_[i];
            for (int k = 0; k < 3; ++k) {
                if (t[k] == a && t[(k + 1) % 3] == b) return static_cast<int>(i);
            }
        }
        return -1;
    }

    void drop_super_vertices() {
        std::erase_if(tris_, [&](const Tri& t) { return t[0] >= n_ || t[1] >= n_ || t[2] >= n_; });
        pts_.resize(n_);
    }

    // A finite super triangle can leave reflex notches on the hull; close them.
    void fill_hull_pockets() {
        bool changed = true;
        while (changed && !tris_.empty()) {
            changed = false;
            std::map<DirectedEdge, int> directed;
            for (const Tri& t : tris_) {
                for (int k = 0; k < 3; ++k) directed[{t[k], t[(k + 1) % 3]}] = 1;
            }
            std::map<int, int> next;
            for (const auto& [e, unused] : directed) {
                if (!directed.count({e.second, e.first})) next[e.first] = e.second;
            }
            for (const auto& [a, b] : next) {
                const auto it = next.find(b);
                if (it == next.end()) continue;
                const int c = it->second;
                if (c != a && ccw(a, c, b)) {
                    tris_.push_back({a, c, b});
                    changed = true;
                    break;
                }
            }
        }
    }

    struct Quad {
        int t1, t2;  // t1 holds a->b with apex c, t2 holds b->a with apex d
        int a, b, c, d;
    };

    std::vector<Quad> interior_quads() const {
        std::map<DirectedEdge, std::pair<int, int>> owner;  // edge -> (triangle, apex)
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const Tri& t = tris_[i];
            for (int k = 0; k < 3; ++k) {
                owner[{t[k], t[(k + 1) % 3]}] = {static_cast<int>(i), t[(k + 2) % 3]};
            }
        }
        std::vector<Quad> quads;
        for (const auto& [e, tri_apex] : owner) {
            if (e.first > e.second) continue;
            const auto it = owner.find({e.second, e.first});
            if (it == owner.end()) continue;
            quads.push_back({tri_apex.first, it->second.first, e.first, e.second, tri_apex.second,
                             it->second.second});
        }
        return quads;
    }

    bool flippable(const Quad& q) const noexcept {
        return ccw(q.a, q.d, q.c) && ccw(q.d, q.b, q.c);
    }

    void flip(const Quad& q) {
        tris_[q.t1] = {q.a, q.d, q.c};
        tris_[q.t2] = {q.d, q.b, q.c};
    }

    void legalize() {
        // Bounded as a guard against cycling on near-degenerate input.
        for (std::size_t round = 0; round < 64 * (tris_.size() + 1); ++round) {
            bool flipped = false;
            for (const Quad& q : interior_quads()) {
                if (incircle(tris_[q.t1], q.d) > kIncircleEpsilon && flippable(q)) {
                    flip(q);
                    flipped = true;
                    break;
                }
            }
            if (!flipped) return;
        }
    }

    void break_cocircular_ties() {
        // Each flip lowers the sum over edges of the smaller endpoint rank, so
        // this terminates.
        for (;;) {
            bool flipped = false;
            for (const Quad& q : interior_quads()) {
                if (std::abs(incircle(tris_[q.t1], q.d)) > kIncircleEpsilon) continue;
                if (std::min(q.c, q.d) < std::min(q.a, q.b) && flippable(q)) {
                    flip(q);
                    flipped = true;
                    break;
                }
            }
            if (!flipped) return;
        }
    }

    std::vector<Point> pts_;
    int n_;
    std::vector<Tri> tris_;
};

bool all_collinear(std::span<const Point> pts) {
    std::size_t far = 1;
    double best = -1.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double d = std::hypot(pts[i].x - pts[0].x, pts[i].y - pts[0].y);
        if (d > best) {
            best = d;
            far = i;
        }
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (std::abs(orientation(pts[0], pts[far], pts[i])) > kCollinearEpsilon) return false;
    }
    return true;
}

}  // namespace

double orientation(const Point& a, const Point& b, const Point& c) noexcept {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double edge_length(const Edge& e) noexcept {
    return std::hypot(e.b.x - e.a.x, e.b.y - e.a.y);
}

double edge_angle(const Edge& e) {
    double dx = e.b.x - e.a.x;
    double dy = e.b.y - e.a.y;
    if (dx == 0.0 && dy == 0.0) {
        throw Error("zero-length edge has no angle");
    }
    // Pick the direction in the upper half-plane so both orientations agree bit-for-bit.
    if (dy < 0.0 || (dy == 0.0 && dx < 0.0)) {
        dx = -dx;
        dy = -dy;
    }
    double deg = std::atan2(dy, dx) * (180.0 / kPi);
    if (deg >= 180.0) deg -= 180.0;
    if (deg < 0.0) deg = 0.0;
    return deg;
}

double triangle_area(const Triangle& t) noexcept {
    return std::abs(orientation(t.a, t.b, t.c)) / 2.0;
}

double triangle_inradius(const Triangle& t) {
    const double area = triangle_area(t);
    if (!(area > 0.0)) {
        throw Error("degenerate triangle has no inradius");
    }
    const double s = (edge_length({t.a, t.b}) + edge_length({t.b, t.c}) + edge_length({t.c, t.a})) / 2.0;
    return area / s;
}

bool circumcircle_contains(const Triangle& t, const Point& p, double epsilon) {
    const std::array<Point, 4> raw = {t.a, t.b, t.c, p};
    const Bounds box = bounds_of(raw);
    Point a = box.apply(t.a);
    Point b = box.apply(t.b);
    const Point c = box.apply(t.c);
    const Point q = box.apply(p);
    const double o = orientation(a, b, c);
    if (std::abs(o) <= kCollinearEpsilon) {
        throw Error("degenerate triangle has no circumcircle");
    }
    if (o < 0.0) std::swap(a, b);
    return incircle(a, b, c, q) > epsilon;
}

Triangulation::Triangulation(PointSet sites, std::vector<std::array<int, 3>> triangles)
    : sites_(std::move(sites)), triangles_(std::move(triangles)) {
    const int n = static_cast<int>(sites_.size());
    for (auto& t : triangles_) {
        for (int v : t) {
            if (v < 0 || v >= n) throw Error("triangle references a missing site");
        }
        if (orientation(sites_[t[0]], sites_[t[1]], sites_[t[2]]) < 0.0) std::swap(t[1], t[2]);
        std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
    }
    std::sort(triangles_.begin(), triangles_.end());
    for (const auto& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            const int u = t[k];
            const int v = t[(k + 1) % 3];
            edges_.push_back({std::min(u, v), std::max(u, v)});
        }
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

Triangle Triangulation::triangle(std::size_t i) const noexcept {
    const auto& t = triangles_[i];
    return {sites_[t[0]], sites_[t[1]], sites_[t[2]]};
}

Edge Triangulation::edge(std::size_t i) const noexcept {
    const auto& e = edges_[i];
    return {sites_[e[0]], sites_[e[1]]};
}

std::string Triangulation::to_text() const {
    std::ostringstream out;
    out << "sites " << sites_.size() << '\n';
    char buf[64];
    for (const Point& p : sites_) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x, p.y);
        out << buf;
    }
    out << "triangles " << triangles_.size() << '\n';
    for (const auto& t : triangles_) {
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    return out.str();
}

Triangulation delaunay(const PointSet& sites) {
    if (sites.size() < 3) {
        throw Error("insufficient sites");
    }
    const Bounds box = bounds_of(sites.points());

    std::vector<int> order(sites.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return sites[i] < sites[j]; });

    std::vector<Point> normalized;
    normalized.reserve(sites.size());
    for (int idx : order) normalized.push_back(box.apply(sites[idx]));
    if (all_collinear(normalized)) {
        throw Error("degenerate site set");
    }

    std::vector<Tri> tris = Builder(std::move(normalized)).run();
    if (tris.empty()) {
        throw Error("degenerate site set");
    }
    for (Tri& t : tris) {
        for (int& v : t) v = order[v];
    }
    return Triangulation(sites, std::move(tris));
}

}  // namespace palmdt
