#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "palmdt/config.hpp"
#include "palmdt/error.hpp"
#include "palmdt/evaluation.hpp"
#include "palmdt/pipeline.hpp"
#include "palmdt/synthgen.hpp"

namespace palmdt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
    std::string config_file;
    int window = 0;
    double k = 0.0;
    int min_component = 0;
    int min_spur = 0;
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
    double tau = 0;
    int knn_k = 0;
    std::string classifier;
    std::uint64_t seed = 0;

    CLI::Option* o_window = nullptr;
    CLI::Option* o_k = nullptr;
    CLI::Option* o_min_component = nullptr;
    CLI::Option* o_min_spur = nullptr;
    CLI::Option* o_invert = nullptr;
    CLI::Option* o_alpha = nullptr;
    CLI::Option* o_beta = nullptr;
    CLI::Option* o_gamma = nullptr;
    CLI::Option* o_delta = nullptr;
    CLI::Option* o_tau = nullptr;
    CLI::Option* o_knn_k = nullptr;
    CLI::Option* o_classifier = nullptr;
    CLI::Option* o_seed = nullptr;

    void attach(CLI::App& app) {
        app.add_option("--config", config_file, "JSON config file; flags override it")->check(CLI::ExistingFile);
        o_window = app.add_option("--window", window, "Niblack window side (odd)");
        o_k = app.add_option("--k", k, "Niblack k coefficient");
        o_min_component = app.add_option("--min-component", min_component, "smallest kept skeleton component");
        o_min_spur = app.add_option("--min-spur", min_spur, "shortest kept junction branch");
        o_invert = app.add_flag("--invert", "bright lines on dark background");
        o_alpha = app.add_option("--alpha", alpha, "weight of the relative length distance");
        o_beta = app.add_option("--beta", beta, "weight of the relative area distance");
        o_gamma = app.add_option("--gamma", gamma, "weight of the angle distance");
        o_delta = app.add_option("--delta", delta, "weight of the relative incenter distance");
        o_tau = app.add_option("--tau", tau, "triangle-count filter tolerance in [0, 1]");
        o_knn_k = app.add_option("--knn-k", knn_k, "neighbors for the knn classifier");
        o_classifier = app.add_option("--classifier", classifier, "weighted or knn")
                           ->check(CLI::IsMember({"weighted", "knn"}));
        o_seed = app.add_option("--seed", seed, "random seed");
    }

    Config resolve() const {
        Config c = config_file.empty() ? Config{} : Config::load(config_file);
        if (o_window->count()) c.niblack.window = window;
        if (o_k->count()) c.niblack.k = k;
        if (o_min_component->count()) c.niblack.min_component = min_component;
        if (o_min_spur->count()) c.niblack.min_spur = min_spur;
        if (o_invert->count()) c.niblack.invert = true;
        if (o_alpha->count()) c.weights.alpha = alpha;
        if (o_beta->count()) c.weights.beta = beta;
        if (o_gamma->count()) c.weights.gamma = gamma;
        if (o_delta->count()) c.weights.delta = delta;
        if (o_tau->count()) c.tau = tau;
        if (o_knn_k->count()) c.knn_k = knn_k;
        if (o_classifier->count()) c.classifier = parse_classifier(classifier);
        if (o_seed->count()) c.seed = seed;
        c.validate();
        return c;
    }
};

// Raised for bad flag values so they map to the usage exit code.
struct UsageError : Error {
    using Error::Error;
};

Config resolve_config(const Overrides& o) {
    try {
        return o.resolve();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path.string());
    f << text;
    if (!f) throw Error("cannot write file: " + path.string());
}

bool is_template_path(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".json";
}

std::string config_comment(const Config& c) { return "# config=" + c.to_json().dump() + "\n"; }

// ---------------------------------------------------------------------------

struct ExtractArgs {
    std::string image;
    std::string out;
    std::string debug_dir;
};

int cmd_extract(const ExtractArgs& a, const Config& config, std::ostream& out) {
    const GrayImage image = load_grayscale(a.image);
    const PipelineResult r = run_pipeline(image, config.niblack);
    if (!a.debug_dir.empty()) {
        fs::create_directories(a.debug_dir);
        save_pgm(r.binary, fs::path(a.debug_dir) / "binary.pgm");
        save_pgm(r.skeleton, fs::path(a.debug_dir) / "skeleton.pgm");
        save_pgm(r.cleaned, fs::path(a.debug_dir) / "cleaned.pgm");
        write_text(fs::path(a.debug_dir) / "triangulation.txt", r.triangulation.to_text());
    }
    Template t{r.features, a.image, params_hash(config.niblack), config.to_json()};
    const std::string text = template_to_json(t).dump(2) + "\n";
    if (a.out.empty()) {
        out << text;
    } else {
        write_text(a.out, text);
    }
    return kOk;
}

struct MatchArgs {
    std::string a;
    std::string b;
};

int cmd_match(const MatchArgs& a, const Config& config, std::ostream& out) {
    const Template ta = load_template(a.a);
    const Template tb = load_template(a.b);
    const MatchScore s = weighted_score(ta.features, tb.features, config.weights);
    const json j = {{"d_DL", s.per_group[0]},
                    {"d_DA", s.per_group[1]},
                    {"d_Dtheta", s.per_group[2]},
                    {"d_DC", s.per_group[3]},
                    {"total", s.total},
                    {"config", config.to_json()}};
    out << j.dump(2) << '\n';
    return kOk;
}

struct IdentifyArgs {
    std::string query;
    std::string gallery;
    std::string out;
};

std::vector<GalleryEntry> load_gallery(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("gallery is not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& f : fs::recursive_directory_iterator(dir)) {
        if (f.is_regular_file() && is_template_path(f.path())) files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<GalleryEntry> gallery;
    for (const auto& f : files) {
        const fs::path rel = f.lexically_relative(dir);
        const bool nested = std::distance(rel.begin(), rel.end()) > 1;
        const std::string label = nested ? f.parent_path().filename().string() : f.stem().string();
        gallery.push_back({label, f.stem().string(), load_template(f).features});
    }
    if (gallery.empty()) throw Error("gallery contains no templates: " + dir.string());
    return gallery;
}

int cmd_identify(const IdentifyArgs& a, const Config& config, std::ostream& out) {
    const FeatureVector query = is_template_path(a.query)
                                    ? load_template(a.query).features
                                    : run_pipeline(load_grayscale(a.query), config.niblack).features;
    const auto gallery = load_gallery(a.gallery);
    const auto ranked = identify(query, gallery, config.weights, config.tau);
    const std::string query_id = fs::path(a.query).stem().string();
    std::string text = config_comment(config) + match_csv_header();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const Candidate& c = ranked[i];
        text += match_csv_row(query_id, c.label, c.sample_id, c.score.per_group, c.score.total, i + 1);
    }
    if (a.out.empty()) {
        out << text;
    } else {
        write_text(a.out, text);
    }
    return kOk;
}

struct EvaluateArgs {
    std::string corpus;
    std::string out;
    bool timing = false;
    unsigned workers = 1;
};

int cmd_evaluate(const EvaluateArgs& a, const Config& config, std::ostream& out, std::ostream& err) {
    const Dataset ds = load_dataset(a.corpus);
    for (const auto& w : ds.warnings) err << "warning: " << w << '\n';
    const RecognitionReport report = leave_one_out(ds, config, a.workers);

    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "report.json", report.to_json().dump(2) + "\n");
    write_text(fs::path(a.out) / "queries.csv", config_comment(config) + report.to_csv());
    out << "classifier=" << classifier_name(config.classifier) << " correct=" << report.correct
        << " total=" << report.total << " rate=" << format_double(report.rate) << '\n';

    if (a.timing) {
        const RuntimeStats stats = timing_report(ds, config);
        json j = stats.to_json();
        j["config"] = config.to_json();
        write_text(fs::path(a.out) / "timing.json", j.dump(2) + "\n");
        out << "timing images=" << stats.images << " mean_total_s=" << format_double(stats.total)
            << " binarize=" << format_double(stats.binarize)
            << " skeleton_endpoints=" << format_double(stats.skeleton_endpoints)
            << " triangulate=" << format_double(stats.triangulate) << " features=" << format_double(stats.features)
            << '\n';
    }
    return kOk;
}

struct SynthArgs {
    int subjects = 40;
    int samples = 6;
    std::string out;
    SampleParams params;
    PoseSpread spread;
};

int cmd_synth(const SynthArgs& a, const Config& config, std::ostream& out) {
    generate_corpus(a.out, a.subjects, a.samples, a.params, config.seed, a.spread);
    out << "wrote " << a.subjects * a.samples << " images for " << a.subjects << " subjects to " << a.out << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delaunay-triangulation palmprint recognition", "palmdt"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides overrides;
    overrides.attach(app);

    ExtractArgs extract;
    auto* sc_extract = app.add_subcommand("extract", "extract a feature template from an image");
    sc_extract->add_option("image", extract.image, "input PGM or PNG")->required();
    sc_extract->add_option("--out", extract.out, "template path (default: stdout)");
    sc_extract->add_option("--debug-dir", extract.debug_dir, "dump intermediate masks and the triangulation");

    MatchArgs match;
    auto* sc_match = app.add_subcommand("match", "score two templates");
    sc_match->add_option("template_a", match.a)->required();
    sc_match->add_option("template_b", match.b)->required();

    IdentifyArgs ident;
    auto* sc_identify = app.add_subcommand("identify", "rank a gallery of templates against a query");
    sc_identify->add_option("query", ident.query, "query image or template")->required();
    sc_identify->add_option("gallery", ident.gallery, "directory of templates")->required();
    sc_identify->add_option("--out", ident.out, "CSV path (default: stdout)");

    EvaluateArgs eval;
    auto* sc_evaluate = app.add_subcommand("evaluate", "leave-one-out evaluation of a labeled corpus");
    sc_evaluate->add_option("corpus", eval.corpus, "root/<subject>/<sample>.(pgm|png|json)")->required();
    sc_evaluate->add_option("--out", eval.out, "report directory")->required();
    sc_evaluate->add_flag("--timing", eval.timing, "also measure per-stage runtime");
    sc_evaluate->add_option("--workers", eval.workers, "threads for the evaluation loop")->check(CLI::PositiveNumber);

    SynthArgs synth;
    auto* sc_synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
    sc_synth->add_option("--subjects", synth.subjects, "number of subjects")->check(CLI::Range(2, 100000));
    sc_synth->add_option("--samples", synth.samples, "samples per subject")->check(CLI::Range(2, 100000));
    sc_synth->add_option("--out", synth.out, "output directory")->required();
    sc_synth->add_option("--jitter", synth.params.jitter, "control point noise, pixels");
    sc_synth->add_option("--noise", synth.params.noise, "background texture amplitude, gray levels");
    sc_synth->add_option("--size", synth.params.size, "image side, pixels");
    sc_synth->add_option("--rotation-spread", synth.spread.rotation, "per-sample rotation range, degrees");
    sc_synth->add_option("--scale-spread", synth.spread.scale, "per-sample scale range");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const Config config = resolve_config(overrides);
        if (*sc_extract) return cmd_extract(extract, config, out);
        if (*sc_match) return cmd_match(match, config, out);
        if (*sc_identify) return cmd_identify(ident, config, out);
        if (*sc_evaluate) return cmd_evaluate(eval, config, out, err);
        if (*sc_synth) return cmd_synth(synth, config, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kPipeline;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kPipeline;
    }
    return kUsage;
}

}  // namespace palmdt::cli
