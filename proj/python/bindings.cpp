#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "palmdt/config.hpp"
#include "palmdt/error.hpp"
#include "palmdt/evaluation.hpp"
#include "palmdt/pipeline.hpp"
#include "palmdt/synthgen.hpp"

namespace py = pybind11;
using namespace palmdt;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

GrayImage to_gray(const U8Array& a) {
    if (a.ndim() != 2) throw Error("expected a 2-D uint8 array");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    std::vector<std::uint8_t> px(a.data(), a.data() + a.size());
    return GrayImage(w, h, std::move(px));
}

U8Array from_gray(const GrayImage& g) {
    U8Array a({g.height(), g.width()});
    std::memcpy(a.mutable_data(), g.pixels().data(), g.pixels().size());
    return a;
}

BinaryImage to_mask(const BoolArray& a) {
    if (a.ndim() != 2) throw Error("expected a 2-D bool array");
    std::vector<std::uint8_t> bits(a.size());
    for (py::ssize_t i = 0; i < a.size(); ++i) bits[i] = a.data()[i] ? 1 : 0;
    return BinaryImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::move(bits));
}

BoolArray from_mask(const BinaryImage& m) {
    BoolArray a({m.height(), m.width()});
    bool* out = a.mutable_data();
    for (std::size_t i = 0; i < m.bits().size(); ++i) out[i] = m.bits()[i] != 0;
    return a;
}

using XY = std::pair<double, double>;

std::vector<XY> to_xy(std::span<const Point> pts) {
    std::vector<XY> out;
    out.reserve(pts.size());
    for (const Point& p : pts) out.emplace_back(p.x, p.y);
    return out;
}

PointSet to_points(const std::vector<XY>& xy) {
    std::vector<Point> pts;
    pts.reserve(xy.size());
    for (const auto& [x, y] : xy) pts.push_back({x, y});
    return PointSet(std::move(pts));
}

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<GalleryEntry> to_gallery(const std::vector<std::tuple<std::string, std::string, FeatureVector>>& g) {
    std::vector<GalleryEntry> out;
    out.reserve(g.size());
    for (const auto& [label, sample, fv] : g) out.push_back({label, sample, fv});
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Delaunay-triangulation palmprint recognition";
    py::register_exception<Error>(m, "PalmError", PyExc_ValueError);

    py::class_<NiblackParams>(m, "NiblackParams")
        .def(py::init<>())
        .def_readwrite("window", &NiblackParams::window)
        .def_readwrite("k", &NiblackParams::k)
        .def_readwrite("min_component", &NiblackParams::min_component)
        .def_readwrite("min_spur", &NiblackParams::min_spur)
        .def_readwrite("invert", &NiblackParams::invert)
        .def("validate", &NiblackParams::validate);

    py::class_<MatchWeights>(m, "MatchWeights")
        .def(py::init<>())
        .def(py::init([](double a, double b, double g, double d) { return MatchWeights{a, b, g, d}; }),
             py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("delta"))
        .def_readwrite("alpha", &MatchWeights::alpha)
        .def_readwrite("beta", &MatchWeights::beta)
        .def_readwrite("gamma", &MatchWeights::gamma)
        .def_readwrite("delta", &MatchWeights::delta)
        .def("validate", &MatchWeights::validate);

    py::class_<FeatureVector>(m, "FeatureVector")
        .def(py::init<>())
        .def_readwrite("dl", &FeatureVector::dl)
        .def_readwrite("da", &FeatureVector::da)
        .def_readwrite("dtheta", &FeatureVector::dtheta)
        .def_readwrite("dc", &FeatureVector::dc)
        .def_readwrite("triangle_count", &FeatureVector::triangle_count)
        .def("flatten", &FeatureVector::flatten)
        .def("to_dict", [](const FeatureVector& fv) { return json_to_py(features_to_json(fv)); })
        .def(py::self == py::self);

    py::class_<MatchScore>(m, "MatchScore")
        .def_readonly("total", &MatchScore::total)
        .def_readonly("per_group", &MatchScore::per_group);

    py::class_<Triangulation>(m, "Triangulation")
        .def_property_readonly("sites", [](const Triangulation& t) { return to_xy(t.sites().points()); })
        .def_property_readonly("triangles",
                               [](const Triangulation& t) {
                                   return std::vector<std::array<int, 3>>(t.triangles().begin(), t.triangles().end());
                               })
        .def_property_readonly("edges",
                               [](const Triangulation& t) {
                                   return std::vector<std::array<int, 2>>(t.edges().begin(), t.edges().end());
                               })
        .def("to_text", &Triangulation::to_text);

    py::class_<Config>(m, "Config")
        .def(py::init<>())
        .def_readwrite("niblack", &Config::niblack)
        .def_readwrite("weights", &Config::weights)
        .def_readwrite("tau", &Config::tau)
        .def_readwrite("knn_k", &Config::knn_k)
        .def_property(
            "classifier", [](const Config& c) { return std::string(classifier_name(c.classifier)); },
            [](Config& c, const std::string& name) { c.classifier = parse_classifier(name); })
        .def_readwrite("seed", &Config::seed)
        .def("to_dict", [](const Config& c) { return json_to_py(c.to_json()); });

    py::class_<SampleParams>(m, "SampleParams")
        .def(py::init<>())
        .def_readwrite("jitter", &SampleParams::jitter)
        .def_readwrite("rotation", &SampleParams::rotation)
        .def_readwrite("scale", &SampleParams::scale)
        .def_readwrite("noise", &SampleParams::noise)
        .def_readwrite("size", &SampleParams::size);

    py::class_<PoseSpread>(m, "PoseSpread")
        .def(py::init<>())
        .def_readwrite("rotation", &PoseSpread::rotation)
        .def_readwrite("scale", &PoseSpread::scale);

    py::class_<LineTemplate>(m, "LineTemplate")
        .def_readonly("seed", &LineTemplate::seed)
        .def_property_readonly("stroke_count", [](const LineTemplate& t) { return t.strokes.size(); })
        .def("endpoints", [](const LineTemplate& t) { return to_xy(t.endpoints()); });

    // Imaging
    m.def("load_grayscale", [](const std::filesystem::path& p) { return from_gray(load_grayscale(p)); },
          py::arg("path"));
    m.def("niblack_binarize", [](const U8Array& img, const NiblackParams& p) {
        return from_mask(niblack_binarize(to_gray(img), p));
    }, py::arg("image"), py::arg("params") = NiblackParams{});
    m.def("skeletonize", [](const BoolArray& mask) { return from_mask(skeletonize(to_mask(mask))); });
    m.def("clean", [](const BoolArray& mask, const NiblackParams& p) { return from_mask(clean(to_mask(mask), p)); },
          py::arg("skeleton"), py::arg("params") = NiblackParams{});
    m.def("detect_endpoints", [](const BoolArray& mask) { return to_xy(detect_endpoints(to_mask(mask)).points()); });

    // Triangulation and features
    m.def("delaunay", [](const std::vector<XY>& pts) { return delaunay(to_points(pts)); }, py::arg("points"));
    m.def("extract_features", &extract_features, py::arg("triangulation"));
    m.def("extract_image_features", [](const U8Array& img, const NiblackParams& p) {
        return run_pipeline(to_gray(img), p).features;
    }, py::arg("image"), py::arg("params") = NiblackParams{});
    m.def("load_template", [](const std::filesystem::path& p) { return load_template(p).features; });

    // Matching
    m.def("sorensen", [](const std::vector<double>& u, const std::vector<double>& v) { return sorensen(u, v); });
    m.def("weighted_score", &weighted_score, py::arg("a"), py::arg("b"), py::arg("weights") = MatchWeights{});
    m.def("triangle_count_filter", &triangle_count_filter);
    m.def("identify", [](const FeatureVector& q, const std::vector<std::tuple<std::string, std::string, FeatureVector>>& g,
                         const MatchWeights& w, double tau) {
        const auto gallery = to_gallery(g);
        py::list out;
        for (const Candidate& c : identify(q, gallery, w, tau)) {
            out.append(py::make_tuple(c.label, c.sample_id, c.score.total));
        }
        return out;
    }, py::arg("query"), py::arg("gallery"), py::arg("weights") = MatchWeights{}, py::arg("tau") = 0.3);
    m.def("knn_classify", [](const FeatureVector& q, const std::vector<std::tuple<std::string, std::string, FeatureVector>>& g,
                             int k, const MatchWeights& w) { return knn_classify(q, to_gallery(g), k, w); },
          py::arg("query"), py::arg("gallery"), py::arg("k") = 1, py::arg("weights") = MatchWeights{});

    // Synthetic data and evaluation
    m.def("generate_template", &generate_template, py::arg("seed"));
    m.def("render_sample", [](const LineTemplate& t, const SampleParams& p, std::uint64_t seed) {
        RenderedSample r = render_sample(t, p, seed);
        return py::make_tuple(from_gray(r.image), to_xy(r.endpoints));
    }, py::arg("template"), py::arg("params") = SampleParams{}, py::arg("seed") = 0);
    m.def("generate_corpus", [](const std::filesystem::path& root, int subjects, int samples, const SampleParams& p,
                                std::uint64_t seed, const PoseSpread& spread) {
        return json_to_py(generate_corpus(root, subjects, samples, p, seed, spread));
    }, py::arg("root"), py::arg("subjects"), py::arg("samples"), py::arg("params") = SampleParams{},
       py::arg("seed") = 7, py::arg("spread") = PoseSpread{});
    m.def("evaluate", [](const std::filesystem::path& root, const Config& c, unsigned workers) {
        Dataset ds = load_dataset(root);
        RecognitionReport r;
        {
            py::gil_scoped_release release;
            r = leave_one_out(ds, c, workers);
        }
        return json_to_py(r.to_json());
    }, py::arg("root"), py::arg("config") = Config{}, py::arg("workers") = 1);
}
