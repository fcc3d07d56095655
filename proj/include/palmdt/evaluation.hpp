#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "palmdt/config.hpp"
#include "palmdt/features.hpp"

namespace palmdt {

struct DatasetEntry {
    std::string label;
    std::string sample_id;
    std::filesystem::path path;              ///< empty when features are given directly
    std::optional<FeatureVector> features;   ///< precomputed or cached features
};

/// Labeled samples in (label, sample_id) order.
struct Dataset {
    std::vector<DatasetEntry> entries;
    std::vector<std::string> warnings;

    std::size_t subject_count() const;
    /// Throws Error unless there are >= 2 subjects, each with >= 2 samples.
    void validate() const;
};

/// Reads root/<subject>/<sample>.(pgm|png). Subjects with fewer than two
/// samples are dropped with a warning.
Dataset load_dataset(const std::filesystem::path& root);

/// Runs the image pipeline on every entry that has no features yet. Entries
/// whose extraction fails keep no features; the failure text is returned per
/// entry (empty on success).
std::vector<std::string> cache_features(Dataset& ds, const NiblackParams& params, unsigned workers = 1);

struct QueryOutcome {
    std::string label;
    std::string sample_id;
    std::string predicted;       ///< empty when extraction failed
    std::string matched_sample;  ///< rank-1 sample (weighted classifier only)
    double score = 0.0;          ///< rank-1 total (weighted classifier only)
    bool correct = false;
    std::string error;
};

struct SubjectStats {
    std::string label;
    int total = 0;
    int correct = 0;
};

struct RecognitionReport {
    int total = 0;
    int correct = 0;
    double rate = 0.0;
    std::vector<SubjectStats> per_subject;
    Classifier classifier = Classifier::Weighted;
    Config config;
    std::vector<QueryOutcome> queries;

    nlohmann::json to_json() const;
    /// One row per query.
    std::string to_csv() const;
};

/// Every entry is queried against all others; a query is correct when the
/// predicted label (rank-1 of identify, or the k-NN vote) is its own.
/// Entries whose features cannot be extracted count as incorrect and are
/// left out of every gallery.
RecognitionReport leave_one_out(const Dataset& ds, const Config& config, unsigned workers = 1);

struct RuntimeStats {
    std::size_t images = 0;
    double binarize = 0.0;
    double skeleton_endpoints = 0.0;
    double triangulate = 0.0;
    double features = 0.0;
    double total = 0.0;  ///< mean wall time per image for the whole pipeline
    std::size_t failures = 0;

    nlohmann::json to_json() const;
};

/// Sequential per-stage means over all image-backed entries. File reading is
/// excluded from the measurement.
RuntimeStats timing_report(const Dataset& ds, const Config& config);

/// CSV header and rows for ranked identification results.
std::string match_csv_header();
std::string match_csv_row(const std::string& query_id, const std::string& label, const std::string& sample,
                          const std::array<double, 4>& per_group, double total, std::size_t rank);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace palmdt
