#include "palmdt/config.hpp"

#include <cstdio>
#include <fstream>

#include "palmdt/error.hpp"

namespace palmdt {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(std::string("config: bad value for '") + key + "'");
    }
}

template <std::size_t N>
std::array<double, N> read_bins(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != N) {
        throw Error(std::string("template: '") + key + "' must be an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        const json& v = j.at(key)[i];
        if (!v.is_number()) {
            throw Error(std::string("template: '") + key + "' must hold numbers");
        }
        out[i] = v.get<double>();
        if (out[i] < 0.0) {
            throw Error(std::string("template: '") + key + "' has a negative bin");
        }
    }
    return out;
}

}  // namespace

std::string_view classifier_name(Classifier c) noexcept {
    return c == Classifier::Knn ? "knn" : "weighted";
}

Classifier parse_classifier(std::string_view name) {
    if (name == "weighted") return Classifier::Weighted;
    if (name == "knn") return Classifier::Knn;
    throw Error("unknown classifier: " + std::string(name));
}

void Config::validate() const {
    niblack.validate();
    weights.validate();
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw Error("tau must be in [0, 1]");
    }
    if (knn_k < 1) {
        throw Error("knn k must be >= 1");
    }
}

json Config::to_json() const {
    auto scheme = [](const BinScheme& s) { return s.boundaries; };
    return {
        {"niblack",
         {{"window", niblack.window},
          {"k", niblack.k},
          {"min_component", niblack.min_component},
          {"min_spur", niblack.min_spur},
          {"invert", niblack.invert}}},
        {"bins",
         {{"dl", scheme(BinScheme::relative_length())},
          {"da", scheme(BinScheme::relative_area())},
          {"dtheta", scheme(BinScheme::angle())},
          {"dc", scheme(BinScheme::relative_incenter())}}},
        {"weights", {{"alpha", weights.alpha}, {"beta", weights.beta}, {"gamma", weights.gamma}, {"delta", weights.delta}}},
        {"tau", tau},
        {"knn_k", knn_k},
        {"classifier", classifier_name(classifier)},
        {"seed", seed},
    };
}

Config Config::from_json(const json& j, const Config& base) {
    if (!j.is_object()) {
        throw Error("config must be a JSON object");
    }
    Config c = base;
    if (j.contains("niblack")) {
        const json& n = j.at("niblack");
        read_field(n, "window", c.niblack.window);
        read_field(n, "k", c.niblack.k);
        read_field(n, "min_component", c.niblack.min_component);
        read_field(n, "min_spur", c.niblack.min_spur);
        read_field(n, "invert", c.niblack.invert);
    }
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        read_field(w, "alpha", c.weights.alpha);
        read_field(w, "beta", c.weights.beta);
        read_field(w, "gamma", c.weights.gamma);
        read_field(w, "delta", c.weights.delta);
    }
    read_field(j, "tau", c.tau);
    read_field(j, "knn_k", c.knn_k);
    read_field(j, "seed", c.seed);
    if (j.contains("classifier")) {
        std::string name;
        read_field(j, "classifier", name);
        c.classifier = parse_classifier(name);
    }
    c.validate();
    return c;
}

Config Config::from_json(const json& j) { return from_json(j, Config{}); }

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config: " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("config is not valid JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

std::string params_hash(const NiblackParams& p) {
    char text[128];
    std::snprintf(text, sizeof(text), "w=%d;k=%.17g;mc=%d;ms=%d;inv=%d", p.window, p.k, p.min_component,
                  p.min_spur, p.invert ? 1 : 0);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char* c = text; *c; ++c) {
        h ^= static_cast<unsigned char>(*c);
        h *= 0x100000001b3ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

json features_to_json(const FeatureVector& fv) {
    return {{"dl", fv.dl}, {"da", fv.da}, {"dtheta", fv.dtheta}, {"dc", fv.dc}, {"n_triangles", fv.triangle_count}};
}

json template_to_json(const Template& t) {
    json j = features_to_json(t.features);
    j["meta"] = {{"source", t.source}, {"params_hash", t.params_hash}, {"config", t.config}};
    return j;
}

Template template_from_json(const json& j) {
    if (!j.is_object()) {
        throw Error("template must be a JSON object");
    }
    Template t;
    t.features.dl = read_bins<5>(j, "dl");
    t.features.da = read_bins<5>(j, "da");
    t.features.dtheta = read_bins<6>(j, "dtheta");
    t.features.dc = read_bins<5>(j, "dc");
    if (!j.contains("n_triangles") || !j.at("n_triangles").is_number_integer() ||
        j.at("n_triangles").get<long long>() < 1) {
        throw Error("template: 'n_triangles' must be a positive integer");
    }
    t.features.triangle_count = j.at("n_triangles").get<int>();
    if (j.contains("meta") && j.at("meta").is_object()) {
        const json& m = j.at("meta");
        if (m.contains("source") && m.at("source").is_string()) t.source = m.at("source").get<std::string>();
        if (m.contains("params_hash") && m.at("params_hash").is_string()) {
            t.params_hash = m.at("params_hash").get<std::string>();
        }
        if (m.contains("config")) t.config = m.at("config");
    }
    return t;
}

void save_template(const Template& t, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write template: " + path.string());
    }
    out << template_to_json(t).dump(2) << '\n';
}

Template load_template(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open template: " + path.string());
    }
    try {
        return template_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error("malformed template JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace palmdt
