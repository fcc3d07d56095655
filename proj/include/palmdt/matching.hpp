#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "palmdt/features.hpp"

namespace palmdt {

/// Weights of the DL, DA, Dtheta and DC distances. Must be nonnegative and sum to 1.
struct MatchWeights {
    double alpha = 0.3;
    double beta = 0.3;
    double gamma = 0.2;
    double delta = 0.2;

    void validate() const;

    friend bool operator==(const MatchWeights&, const MatchWeights&) = default;
};

struct MatchScore {
    double total = 0.0;
    /// d_DL, d_DA, d_Dtheta, d_DC
    std::array<double, 4> per_group{};
};

struct GalleryEntry {
    std::string label;
    std::string sample_id;
    FeatureVector features;
};

struct Candidate {
    std::size_t index;  ///< position in the gallery
    std::string label;
    std::string sample_id;
    MatchScore score;
};

/// Sorensen (Bray-Curtis) dissimilarity sum|u-v| / (sum u + sum v).
/// Throws Error on a length mismatch, a negative entry, or two all-zero vectors.
double sorensen(std::span<const double> u, std::span<const double> v);

/// Weighted sum of the four per-group Sorensen distances. A group that is
/// all-zero on both sides contributes 0.
MatchScore weighted_score(const FeatureVector& a, const FeatureVector& b, const MatchWeights& w);

/// True when the relative triangle-count difference is within tau.
bool triangle_count_filter(int n_query, int n_gallery, double tau) noexcept;

/// Gallery entries passing the triangle-count filter, ascending by total
/// score, ties by (label, sample_id). When the filter rejects everything the
/// whole gallery is ranked instead. Throws Error for an empty gallery.
std::vector<Candidate> identify(const FeatureVector& query, std::span<const GalleryEntry> gallery,
                                const MatchWeights& w, double tau);

/// Majority label among the k nearest entries (no prefilter). Majority ties
/// go to the smallest summed distance, then the smallest label.
std::string knn_classify(const FeatureVector& query, std::span<const GalleryEntry> gallery, int k,
                         const MatchWeights& w);

}  // namespace palmdt
