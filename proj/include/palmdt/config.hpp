#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "palmdt/features.hpp"
#include "palmdt/imaging.hpp"
#include "palmdt/matching.hpp"

namespace palmdt {

enum class Classifier { Weighted, Knn };

std::string_view classifier_name(Classifier c) noexcept;
Classifier parse_classifier(std::string_view name);

/// Every tunable of the pipeline in one place. Echoed into all artifacts.
struct Config {
    NiblackParams niblack;
    MatchWeights weights;
    double tau = 0.3;
    int knn_k = 1;
    Classifier classifier = Classifier::Weighted;
    std::uint64_t seed = 7;

    void validate() const;

    /// Includes the fixed bin boundaries as a read-only echo.
    nlohmann::json to_json() const;

    /// Fields missing from j keep their values from base. Unknown keys and the
    /// "bins" echo are ignored.
    static Config from_json(const nlohmann::json& j, const Config& base);
    static Config from_json(const nlohmann::json& j);
    static Config load(const std::filesystem::path& path);

    friend bool operator==(const Config&, const Config&) = default;
};

/// Stable 64-bit FNV-1a digest of the line-extraction parameters, hex encoded.
std::string params_hash(const NiblackParams& params);

/// Enrollment template: a feature vector plus provenance.
struct Template {
    FeatureVector features;
    std::string source;
    std::string params_hash;
    nlohmann::json config = nlohmann::json::object();
};

nlohmann::json template_to_json(const Template& t);
/// Throws Error on a malformed document.
Template template_from_json(const nlohmann::json& j);

void save_template(const Template& t, const std::filesystem::path& path);
Template load_template(const std::filesystem::path& path);

nlohmann::json features_to_json(const FeatureVector& fv);

}  // namespace palmdt
