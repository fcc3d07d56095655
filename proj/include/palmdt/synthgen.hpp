#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "palmdt/image.hpp"

namespace palmdt {

/// One palm line: a cubic Bezier curve in the unit square.
struct Stroke {
    std::array<Point, 4> control;
    double width = 2.0;     ///< pixels
    double contrast = 100;  ///< gray levels below the background
    bool principal = false;
};

/// A subject's palm-line layout. Strokes stay inside a 10% margin.
struct LineTemplate {
    std::uint64_t seed = 0;
    std::vector<Stroke> strokes;

    /// Stroke ends in unit-square coordinates, two per stroke.
    std::vector<Point> endpoints() const;
};

/// Per-sample acquisition conditions.
struct SampleParams {
    double jitter = 0.3;       ///< control-point noise, pixels (1 sigma)
    double rotation = 0.0;     ///< degrees about the image center, within [-20, 20]
    double scale = 1.0;        ///< about the image center, within [0.8, 1.25]
    double noise = 3.0;        ///< background texture amplitude, gray levels (1 sigma)
    int size = 128;            ///< square image side, pixels

    void validate() const;
    nlohmann::json to_json() const;
};

/// Per-sample pose variation applied on top of SampleParams inside a corpus.
struct PoseSpread {
    double rotation = 2.0;  ///< uniform in [-rotation, rotation] degrees
    double scale = 0.03;    ///< uniform in [1 - scale, 1 + scale]

    nlohmann::json to_json() const;
};

struct RenderedSample {
    GrayImage image;
    std::vector<Point> endpoints;  ///< ground-truth stroke ends in pixel coordinates
};

/// Deterministic in seed.
LineTemplate generate_template(std::uint64_t seed);

/// Dark anti-aliased strokes on a light textured background. noise_seed
/// drives the jitter and the texture.
RenderedSample render_sample(const LineTemplate& t, const SampleParams& p, std::uint64_t noise_seed);

/// Fraction of `a` left unmatched by greedy nearest pairing with `b` within radius.
double unmatched_fraction(const std::vector<Point>& a, const std::vector<Point>& b, double radius);

/// Writes root/<subject>/<sample>.png and root/manifest.json. Subject
/// templates whose endpoints overlap an earlier subject's by more than 80%
/// are regenerated. Returns the manifest.
nlohmann::json generate_corpus(const std::filesystem::path& root, int n_subjects, int samples_per_subject,
                               const SampleParams& base, std::uint64_t seed, const PoseSpread& spread = {});

}  // namespace palmdt
