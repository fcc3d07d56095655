#include "palmdt/pipeline.hpp"

#include <chrono>

namespace palmdt {

namespace {

class StageClock {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double seconds = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return seconds;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

PipelineResult run_pipeline(const GrayImage& image, const NiblackParams& params, StageTimes* times) {
    StageTimes local;
    StageClock clock;

    BinaryImage binary = niblack_binarize(image, params);
    local.binarize = clock.lap();

    BinaryImage skeleton = skeletonize(binary);
    BinaryImage cleaned = clean(skeleton, params);
    PointSet endpoints = detect_endpoints(cleaned);
    local.skeleton_endpoints = clock.lap();

    Triangulation tri = delaunay(endpoints);
    local.triangulate = clock.lap();

    FeatureVector features = extract_features(tri);
    local.features = clock.lap();

    if (times) *times = local;
    return {std::move(binary), std::move(skeleton), std::move(cleaned), std::move(endpoints), std::move(tri),
            features};
}

PointSet extract_endpoints(const GrayImage& image, const NiblackParams& params) {
    return detect_endpoints(clean(skeletonize(niblack_binarize(image, params)), params));
}

}  // namespace palmdt
