#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "palmdt/error.hpp"
#include "palmdt/matching.hpp"
#include "palmdt/pipeline.hpp"
#include "palmdt/synthgen.hpp"
#include "support.hpp"

using namespace palmdt;
using testing_support::TempDir;

namespace {

SampleParams clean_params() {
    SampleParams p;
    p.jitter = 0.0;
    p.noise = 0.0;
    return p;
}

}  // namespace

TEST(Template, DeterministicInSeed) {
    const LineTemplate a = generate_template(42);
    const LineTemplate b = generate_template(42);
    ASSERT_EQ(a.strokes.size(), b.strokes.size());
    EXPECT_EQ(a.endpoints(), b.endpoints());
    EXPECT_EQ(render_sample(a, SampleParams{}, 3).image, render_sample(b, SampleParams{}, 3).image);
    EXPECT_NE(render_sample(a, SampleParams{}, 3).image, render_sample(a, SampleParams{}, 4).image);
}

TEST(Template, DifferentSeedsGiveDifferentLayouts) {
    EXPECT_GE(unmatched_fraction(generate_template(1).endpoints(), generate_template(2).endpoints(), 0.03), 0.2);
}

TEST(Template, StrokeCountsAndMargin) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const LineTemplate t = generate_template(seed);
        ASSERT_GE(t.strokes.size(), 3u) << seed;
        EXPECT_LE(t.strokes.size(), 12u);
        for (std::size_t i = 0; i < t.strokes.size(); ++i) {
            EXPECT_EQ(t.strokes[i].principal, i < 3);
            for (const Point& c : t.strokes[i].control) {
                EXPECT_GE(c.x, 0.1);
                EXPECT_LE(c.x, 0.9);
                EXPECT_GE(c.y, 0.1);
                EXPECT_LE(c.y, 0.9);
            }
        }
        EXPECT_EQ(t.endpoints().size(), 2 * t.strokes.size());
    }
}

TEST(Render, RotationTurnsEndpointsAboutTheCenter) {
    const LineTemplate t = generate_template(8);
    SampleParams p = clean_params();
    const RenderedSample flat = render_sample(t, p, 1);
    p.rotation = 10.0;
    const RenderedSample turned = render_sample(t, p, 1);
    const double c = (p.size - 1) / 2.0;
    const double r = 10.0 * std::numbers::pi / 180.0;
    ASSERT_EQ(flat.endpoints.size(), turned.endpoints.size());
    for (std::size_t i = 0; i < flat.endpoints.size(); ++i) {
        const double dx = flat.endpoints[i].x - c, dy = flat.endpoints[i].y - c;
        EXPECT_NEAR(turned.endpoints[i].x, c + std::cos(r) * dx - std::sin(r) * dy, 1e-9);
        EXPECT_NEAR(turned.endpoints[i].y, c + std::sin(r) * dx + std::cos(r) * dy, 1e-9);
    }
}

TEST(Render, NoiselessBackgroundIsFlat) {
    const RenderedSample r = render_sample(generate_template(4), clean_params(), 1);
    int darkest = 255, brightest = 0;
    for (auto v : r.image.pixels()) {
        darkest = std::min<int>(darkest, v);
        brightest = std::max<int>(brightest, v);
    }
    EXPECT_EQ(brightest, 200);
    EXPECT_LT(darkest, 120);
    EXPECT_EQ(r.image.at(0, 0), 200);
    EXPECT_EQ(r.image.at(127, 127), 200);
}

// Without noise every pixel under the background level is ink, so the ink
// mask's component count is the reference for the extracted skeleton.
TEST(Render, NoiselessSkeletonKeepsStrokeComponents) {
    const NiblackParams nb;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const RenderedSample r = render_sample(generate_template(seed), clean_params(), seed);
        BinaryImage ink(r.image.width(), r.image.height());
        for (int y = 0; y < ink.height(); ++y) {
            for (int x = 0; x < ink.width(); ++x) ink.set(x, y, r.image.at(x, y) < 200);
        }
        const BinaryImage sk = clean(skeletonize(niblack_binarize(r.image, nb)), nb);
        EXPECT_EQ(component_count(sk), testing_support::count_components(ink)) << "seed " << seed;
    }
}

TEST(Render, NoiselessEndpointsAreRecovered) {
    std::size_t truth = 0, matched = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const RenderedSample r = render_sample(generate_template(seed), clean_params(), seed);
        const PointSet found = extract_endpoints(r.image, NiblackParams{});
        const std::vector<Point> f(found.begin(), found.end());
        truth += r.endpoints.size();
        matched += testing_support::greedy_matches(r.endpoints, f, 3.0);
    }
    EXPECT_GE(static_cast<double>(matched) / static_cast<double>(truth), 0.8);
}

TEST(Render, ParameterValidation) {
    const LineTemplate t = generate_template(1);
    SampleParams p;
    p.rotation = 25;
    EXPECT_THROW(render_sample(t, p, 1), Error);
    p = {};
    p.scale = 0.5;
    EXPECT_THROW(render_sample(t, p, 1), Error);
    p = {};
    p.noise = -1;
    EXPECT_THROW(render_sample(t, p, 1), Error);
    p = {};
    p.size = 8;
    EXPECT_THROW(render_sample(t, p, 1), Error);
}

TEST(UnmatchedFraction, GreedyPairing) {
    const std::vector<Point> a{{0, 0}, {1, 0}, {5, 5}};
    const std::vector<Point> b{{0.1, 0}, {9, 9}};
    EXPECT_NEAR(unmatched_fraction(a, b, 0.5), 2.0 / 3.0, 1e-12);
    EXPECT_EQ(unmatched_fraction(a, a, 0.0), 0.0);
    EXPECT_EQ(unmatched_fraction({}, b, 1.0), 0.0);
}

TEST(Corpus, LayoutAndRerunAreStable) {
    TempDir one("corpus"), two("corpus");
    const auto m = generate_corpus(one.path(), 2, 2, SampleParams{}, 3);
    generate_corpus(two.path(), 2, 2, SampleParams{}, 3);
    ASSERT_EQ(m.at("subjects").size(), 2u);
    for (const auto& s : m.at("subjects")) {
        ASSERT_EQ(s.at("samples").size(), 2u);
        for (const auto& sample : s.at("samples")) {
            const std::string file = sample.at("file");
            EXPECT_EQ(file.substr(0, 5), s.at("label").get<std::string>() + "/");
            EXPECT_EQ(testing_support::read_file(one / file), testing_support::read_file(two / file));
            EXPECT_EQ(load_grayscale(one / file).width(), 128);
        }
    }
    EXPECT_EQ(testing_support::read_file(one / "manifest.json"), testing_support::read_file(two / "manifest.json"));
    EXPECT_THROW(generate_corpus(one / "x", 1, 2, SampleParams{}, 3), Error);
}

TEST(Corpus, SameSubjectScoresCloserThanOthers) {
    TempDir dir("corpus");
    const auto m = generate_corpus(dir.path(), 5, 3, SampleParams{}, 11);
    std::vector<std::pair<std::string, FeatureVector>> fvs;
    for (const auto& s : m.at("subjects")) {
        for (const auto& sample : s.at("samples")) {
            const GrayImage img = load_grayscale(dir / sample.at("file").get<std::string>());
            fvs.emplace_back(s.at("label"), run_pipeline(img, NiblackParams{}).features);
        }
    }
    double intra = 0, inter = 0;
    int n_intra = 0, n_inter = 0;
    for (std::size_t i = 0; i < fvs.size(); ++i) {
        for (std::size_t j = i + 1; j < fvs.size(); ++j) {
            const double d = weighted_score(fvs[i].second, fvs[j].second, MatchWeights{}).total;
            if (fvs[i].first == fvs[j].first) {
                intra += d;
                ++n_intra;
            } else {
                inter += d;
                ++n_inter;
            }
        }
    }
    EXPECT_LT(intra / n_intra, inter / n_inter);
}
