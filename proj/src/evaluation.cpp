#include "palmdt/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "palmdt/error.hpp"
#include "palmdt/pipeline.hpp"

namespace palmdt {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Runs body(i) for i in [0, n) on up to `workers` threads; results must be
// written to per-index slots so the outcome does not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::size_t Dataset::subject_count() const {
    std::set<std::string> labels;
    for (const auto& e : entries) labels.insert(e.label);
    return labels.size();
}

void Dataset::validate() const {
    std::map<std::string, int> per_label;
    for (const auto& e : entries) {
        if (e.label.empty()) throw Error("dataset entry with an empty label");
        ++per_label[e.label];
    }
    if (per_label.size() < 2) {
        throw Error("dataset needs at least 2 subjects");
    }
    for (const auto& [label, count] : per_label) {
        if (count < 2) throw Error("subject '" + label + "' has fewer than 2 samples");
    }
}

Dataset load_dataset(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) {
        throw Error("dataset root is not a directory: " + root.string());
    }
    std::vector<fs::path> subjects;
    for (const auto& d : fs::directory_iterator(root)) {
        if (d.is_directory()) subjects.push_back(d.path());
    }
    std::sort(subjects.begin(), subjects.end());

    Dataset ds;
    for (const auto& dir : subjects) {
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(dir)) {
            const std::string ext = lower(f.path().extension().string());
            if (f.is_regular_file() && (ext == ".pgm" || ext == ".png" || ext == ".json")) {
                files.push_back(f.path());
            }
        }
        std::sort(files.begin(), files.end());
        const std::string label = dir.filename().string();
        if (files.size() < 2) {
            ds.warnings.push_back("subject '" + label + "' has " + std::to_string(files.size()) +
                                  " sample(s); excluded (leave-one-out needs 2)");
            continue;
        }
        for (const auto& f : files) {
            DatasetEntry e{label, f.stem().string(), f, std::nullopt};
            if (lower(f.extension().string()) == ".json") {
                e.features = load_template(f).features;
            }
            ds.entries.push_back(std::move(e));
        }
    }
    if (ds.entries.empty()) {
        throw Error("dataset is empty: " + root.string());
    }
    return ds;
}

std::vector<std::string> cache_features(Dataset& ds, const NiblackParams& params, unsigned workers) {
    std::vector<std::string> errors(ds.entries.size());
    parallel_for(ds.entries.size(), workers, [&](std::size_t i) {
        DatasetEntry& e = ds.entries[i];
        if (e.features) return;
        try {
            e.features = run_pipeline(load_grayscale(e.path), params).features;
        } catch (const Error& err) {
            errors[i] = err.what();
        }
    });
    return errors;
}

RecognitionReport leave_one_out(const Dataset& input, const Config& config, unsigned workers) {
    config.validate();
    input.validate();
    Dataset ds = input;
    const std::vector<std::string> errors = cache_features(ds, config.niblack, workers);

    std::vector<GalleryEntry> usable;
    std::vector<std::size_t> usable_index(ds.entries.size(), SIZE_MAX);
    for (std::size_t i = 0; i < ds.entries.size(); ++i) {
        if (ds.entries[i].features) {
            usable_index[i] = usable.size();
            usable.push_back({ds.entries[i].label, ds.entries[i].sample_id, *ds.entries[i].features});
        }
    }

    std::vector<QueryOutcome> outcomes(ds.entries.size());
    parallel_for(ds.entries.size(), workers, [&](std::size_t i) {
        const DatasetEntry& e = ds.entries[i];
        QueryOutcome& out = outcomes[i];
        out.label = e.label;
        out.sample_id = e.sample_id;
        if (!e.features) {
            out.error = errors[i];
            return;
        }
        std::vector<GalleryEntry> gallery;
        gallery.reserve(usable.size());
        for (std::size_t j = 0; j < usable.size(); ++j) {
            if (j != usable_index[i]) gallery.push_back(usable[j]);
        }
        if (gallery.empty()) {
            out.error = "empty gallery";
            return;
        }
        if (config.classifier == Classifier::Weighted) {
            const auto ranked = identify(*e.features, gallery, config.weights, config.tau);
            out.predicted = ranked.front().label;
            out.matched_sample = ranked.front().sample_id;
            out.score = ranked.front().score.total;
        } else {
            const int k = std::min<int>(config.knn_k, static_cast<int>(gallery.size()));
            out.predicted = knn_classify(*e.features, gallery, k, config.weights);
        }
        out.correct = out.predicted == e.label;
    });

    RecognitionReport report;
    report.classifier = config.classifier;
    report.config = config;
    std::map<std::string, SubjectStats> subjects;
    for (const auto& q : outcomes) {
        auto& s = subjects[q.label];
        s.label = q.label;
        ++s.total;
        ++report.total;
        if (q.correct) {
            ++s.correct;
            ++report.correct;
        }
    }
    for (auto& [label, s] : subjects) report.per_subject.push_back(s);
    report.rate = report.total > 0 ? static_cast<double>(report.correct) / report.total : 0.0;
    report.queries = std::move(outcomes);
    return report;
}

json RecognitionReport::to_json() const {
    json subjects = json::array();
    for (const auto& s : per_subject) {
        subjects.push_back({{"label", s.label},
                            {"total", s.total},
                            {"correct", s.correct},
                            {"rate", s.total > 0 ? static_cast<double>(s.correct) / s.total : 0.0}});
    }
    std::size_t failures = 0;
    for (const auto& q : queries) failures += q.error.empty() ? 0 : 1;
    return {
        {"protocol", "leave-one-out"},
        {"scoring", classifier == Classifier::Weighted ? "rank-1 of weighted-sum identification"
                                                       : "k-nearest-neighbor majority vote"},
        {"classifier", classifier_name(classifier)},
        {"total", total},
        {"correct", correct},
        {"rate", rate},
        {"extraction_failures", failures},
        {"per_subject", subjects},
        {"config", config.to_json()},
    };
}

std::string RecognitionReport::to_csv() const {
    std::ostringstream out;
    out << "query_label,query_sample,predicted_label,matched_sample,score,correct,error\n";
    for (const auto& q : queries) {
        out << csv_field(q.label) << ',' << csv_field(q.sample_id) << ',' << csv_field(q.predicted) << ','
            << csv_field(q.matched_sample) << ',' << format_double(q.score) << ',' << (q.correct ? 1 : 0) << ','
            << csv_field(q.error) << '\n';
    }
    return out.str();
}

RuntimeStats timing_report(const Dataset& ds, const Config& config) {
    config.validate();
    RuntimeStats stats;
    StageTimes sum;
    double total = 0.0;
    for (const auto& e : ds.entries) {
        if (e.path.empty() || lower(e.path.extension().string()) == ".json") continue;
        const GrayImage image = load_grayscale(e.path);
        StageTimes t;
        const auto start = std::chrono::steady_clock::now();
        try {
            run_pipeline(image, config.niblack, &t);
        } catch (const Error&) {
            ++stats.failures;
            continue;
        }
        total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        sum.binarize += t.binarize;
        sum.skeleton_endpoints += t.skeleton_endpoints;
        sum.triangulate += t.triangulate;
        sum.features += t.features;
        ++stats.images;
    }
    if (stats.images > 0) {
        const double n = static_cast<double>(stats.images);
        stats.binarize = sum.binarize / n;
        stats.skeleton_endpoints = sum.skeleton_endpoints / n;
        stats.triangulate = sum.triangulate / n;
        stats.features = sum.features / n;
        stats.total = std::max(total / n, sum.sum() / n);
    }
    return stats;
}

json RuntimeStats::to_json() const {
    return {{"images", images},
            {"failures", failures},
            {"mode", "single-threaded, file I/O excluded"},
            {"mean_seconds",
             {{"binarize", binarize},
              {"skeleton_endpoints", skeleton_endpoints},
              {"triangulate", triangulate},
              {"features", features},
              {"total", total}}}};
}

std::string match_csv_header() {
    return "query_id,candidate_label,candidate_sample,d_DL,d_DA,d_Dtheta,d_DC,total,rank\n";
}

std::string match_csv_row(const std::string& query_id, const std::string& label, const std::string& sample,
                          const std::array<double, 4>& per_group, double total, std::size_t rank) {
    std::string row = csv_field(query_id) + ',' + csv_field(label) + ',' + csv_field(sample);
    for (double d : per_group) row += ',' + format_double(d);
    row += ',' + format_double(total) + ',' + std::to_string(rank) + '\n';
    return row;
}

}  // namespace palmdt
