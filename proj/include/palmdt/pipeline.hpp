#pragma once

#include "palmdt/features.hpp"
#include "palmdt/image.hpp"
#include "palmdt/imaging.hpp"
#include "palmdt/triangulation.hpp"

namespace palmdt {

/// Wall-clock seconds spent in each stage of one pipeline run.
struct StageTimes {
    double binarize = 0.0;
    double skeleton_endpoints = 0.0;  ///< thinning, cleanup and endpoint detection
    double triangulate = 0.0;
    double features = 0.0;

    double sum() const noexcept { return binarize + skeleton_endpoints + triangulate + features; }
};

struct PipelineResult {
    BinaryImage binary;
    BinaryImage skeleton;
    BinaryImage cleaned;
    PointSet endpoints;
    Triangulation triangulation;
    FeatureVector features;
};

/// Image to feature vector: binarize, thin, clean, detect endpoints,
/// triangulate, extract features. Throws Error from whichever stage fails.
PipelineResult run_pipeline(const GrayImage& image, const NiblackParams& params, StageTimes* times = nullptr);

/// Endpoints only (binarize, thin, clean, detect).
PointSet extract_endpoints(const GrayImage& image, const NiblackParams& params);

}  // namespace palmdt
