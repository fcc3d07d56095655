#include "palmdt/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <tuple>

#include "palmdt/error.hpp"

namespace palmdt {

namespace {

bool all_zero(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double group_distance(std::span<const double> u, std::span<const double> v) {
    if (all_zero(u) && all_zero(v)) return 0.0;
    return sorensen(u, v);
}

bool ranks_before(const Candidate& a, const Candidate& b) {
    return std::tie(a.score.total, a.label, a.sample_id) < std::tie(b.score.total, b.label, b.sample_id);
}

}  // namespace

void MatchWeights::validate() const {
    for (double w : {alpha, beta, gamma, delta}) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error("match weights must be nonnegative");
        }
    }
    if (std::abs(alpha + beta + gamma + delta - 1.0) > 1e-12) {
        throw Error("match weights must sum to 1");
    }
}

double sorensen(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error("sorensen: length mismatch");
    }
    double diff = 0.0;
    double mass = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k] < 0.0 || v[k] < 0.0) {
            throw Error("sorensen: negative entry");
        }
        diff += std::abs(u[k] - v[k]);
        mass += u[k] + v[k];
    }
    if (mass == 0.0) {
        throw Error("sorensen: both vectors are all-zero");
    }
    return diff / mass;
}

MatchScore weighted_score(const FeatureVector& a, const FeatureVector& b, const MatchWeights& w) {
    w.validate();
    MatchScore s;
    s.per_group = {group_distance(a.dl, b.dl), group_distance(a.da, b.da), group_distance(a.dtheta, b.dtheta),
                   group_distance(a.dc, b.dc)};
    s.total = w.alpha * s.per_group[0] + w.beta * s.per_group[1] + w.gamma * s.per_group[2] +
              w.delta * s.per_group[3];
    s.total = std::clamp(s.total, 0.0, 1.0);
    return s;
}

bool triangle_count_filter(int n_query, int n_gallery, double tau) noexcept {
    const int larger = std::max(n_query, n_gallery);
    if (larger <= 0) return true;
    const double gap = static_cast<double>(std::abs(n_query - n_gallery)) / static_cast<double>(larger);
    return gap <= tau;
}

std::vector<Candidate> identify(const FeatureVector& query, std::span<const GalleryEntry> gallery,
                                const MatchWeights& w, double tau) {
    if (gallery.empty()) {
        throw Error("identify: empty gallery");
    }
    w.validate();
    std::vector<Candidate> all;
    all.reserve(gallery.size());
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        all.push_back({i, gallery[i].label, gallery[i].sample_id, weighted_score(query, gallery[i].features, w)});
    }
    std::vector<Candidate> kept;
    for (const Candidate& c : all) {
        if (triangle_count_filter(query.triangle_count, gallery[c.index].features.triangle_count, tau)) {
            kept.push_back(c);
        }
    }
    if (kept.empty()) kept = std::move(all);
    std::sort(kept.begin(), kept.end(), ranks_before);
    return kept;
}

std::string knn_classify(const FeatureVector& query, std::span<const GalleryEntry> gallery, int k,
                         const MatchWeights& w) {
    if (gallery.empty()) {
        throw Error("knn: empty gallery");
    }
    if (k < 1 || static_cast<std::size_t>(k) > gallery.size()) {
        throw Error("knn: k must be in [1, gallery size]");
    }
    w.validate();
    std::vector<Candidate> ranked;
    ranked.reserve(gallery.size());
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        ranked.push_back({i, gallery[i].label, gallery[i].sample_id, weighted_score(query, gallery[i].features, w)});
    }
    std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end(), ranks_before);

    struct Vote {
        int count = 0;
        double distance = 0.0;
    };
    std::map<std::string, Vote> votes;
    for (int i = 0; i < k; ++i) {
        auto& v = votes[ranked[i].label];
        ++v.count;
        v.distance += ranked[i].score.total;
    }
    // std::map iterates labels in ascending order, which settles the last tie.
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
        if (it->second.count > best->second.count ||
            (it->second.count == best->second.count && it->second.distance < best->second.distance)) {
            best = it;
        }
    }
    return best->first;
}

}  // namespace palmdt
