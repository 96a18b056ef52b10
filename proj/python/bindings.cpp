// Python bindings for the scribble-generation core: volume I/O, scribble
// synthesis, partial losses with gradients, Dice scoring and aggregation.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "scribkit/config.hpp"
#include "scribkit/losses.hpp"
#include "scribkit/metrics.hpp"
#include "scribkit/nifti.hpp"
#include "scribkit/nurbs.hpp"
#include "scribkit/phantom.hpp"
#include "scribkit/scribble.hpp"
#include "scribkit/volume.hpp"

namespace py = pybind11;
using namespace scribkit;

namespace {

// (nx, ny, nz) Fortran-ordered array: matches the in-memory x-fastest layout.
py::array_t<uint32_t> volume_data(const LabelVolume& v) {
    py::array_t<uint32_t> arr({v.dims[0], v.dims[1], v.dims[2]},
                              {sizeof(uint32_t), sizeof(uint32_t) * v.dims[0],
                               sizeof(uint32_t) * v.dims[0] * v.dims[1]});
    std::copy(v.data.begin(), v.data.end(), arr.mutable_data());
    return arr;
}

void set_volume_data(LabelVolume& v, py::array arr) {
    auto a = py::array_t<uint32_t, py::array::f_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 3) throw std::invalid_argument("data must be a 3D array");
    v.dims = {static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
              static_cast<int>(a.shape(2))};
    v.data.assign(a.data(), a.data() + a.size());
}

LabelVolume volume_from_array(py::array arr, std::array<float, 3> spacing, uint32_t ignore) {
    auto a = py::array_t<uint32_t, py::array::f_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 3) throw std::invalid_argument("data must be a 3D array");
    LabelVolume v = LabelVolume::create({static_cast<int>(a.shape(0)),
                                         static_cast<int>(a.shape(1)),
                                         static_cast<int>(a.shape(2))},
                                        spacing, 0, ignore);
    v.data.assign(a.data(), a.data() + a.size());
    return v;
}

py::array_t<double> affine_array(const LabelVolume& v) {
    const Affine a = v.affine();
    py::array_t<double> arr({4, 4});
    auto r = arr.mutable_unchecked<2>();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = a[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return arr;
}

std::string value_to_config_string(const py::handle& value) {
    if (py::isinstance<py::bool_>(value)) return value.cast<bool>() ? "true" : "false";
    if (py::isinstance<py::str>(value)) return value.cast<std::string>();
    if (py::isinstance<py::tuple>(value) || py::isinstance<py::list>(value)) {
        const auto seq = value.cast<py::sequence>();
        if (seq.size() == 2)
            return value_to_config_string(seq[0]) + ".." + value_to_config_string(seq[1]);
        std::string out;
        for (size_t i = 0; i < seq.size(); ++i)
            out += (i ? "," : "") + value_to_config_string(seq[i]);
        return out;
    }
    return py::str(value).cast<std::string>();
}

ScribbleConfig config_from_dict(const py::dict& d) {
    ScribbleConfig cfg;
    std::map<std::string, std::string> overrides;
    for (const auto& [k, v] : d)
        overrides[k.cast<std::string>()] = value_to_config_string(v);
    apply_config_overrides(cfg, overrides);
    return cfg;
}

std::pair<LogitField, SparseTarget> fields_from_arrays(py::array logits_arr,
                                                       py::array labels_arr, int32_t ignore) {
    auto logits =
        py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(logits_arr);
    if (!logits || logits.ndim() != 2)
        throw std::invalid_argument("logits must be a (classes, voxels) array");
    auto labels =
        py::array_t<int32_t, py::array::c_style | py::array::forcecast>::ensure(labels_arr);
    if (!labels || labels.ndim() != 1)
        throw std::invalid_argument("labels must be a 1D array");
    if (labels.shape(0) != logits.shape(1))
        throw std::invalid_argument("labels length must equal the voxel count");

    LogitField field(static_cast<int>(logits.shape(0)), logits.shape(1));
    std::copy(logits.data(), logits.data() + logits.size(), field.values.begin());
    SparseTarget target;
    target.ignore = ignore;
    target.labels.assign(labels.data(), labels.data() + labels.shape(0));
    return {std::move(field), std::move(target)};
}

py::tuple loss_to_python(const LossResult& r, int classes, int64_t voxels) {
    py::array_t<double> grad({static_cast<py::ssize_t>(classes), static_cast<py::ssize_t>(voxels)});
    std::copy(r.grad.begin(), r.grad.end(), grad.mutable_data());
    return py::make_tuple(r.value, grad);
}

LossFn loss_by_name(const std::string& name, double w_ce, double w_dice, double smooth) {
    if (name == "pce")
        return [](const LogitField& l, const SparseTarget& t) {
            return partial_cross_entropy(l, t);
        };
    if (name == "pdice")
        return [smooth](const LogitField& l, const SparseTarget& t) {
            return partial_dice(l, t, smooth);
        };
    if (name == "pl")
        return [w_ce, w_dice, smooth](const LogitField& l, const SparseTarget& t) {
            return partial_loss(l, t, w_ce, w_dice, smooth);
        };
    throw std::invalid_argument("loss must be one of 'pce', 'pdice', 'pl'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "scribble synthesis, partial losses and Dice benchmarking";

    py::class_<LabelVolume>(m, "Volume")
        .def(py::init([](py::array data, std::array<float, 3> spacing, uint32_t ignore_label) {
                 return volume_from_array(std::move(data), spacing, ignore_label);
             }),
             py::arg("data"), py::arg("spacing") = std::array<float, 3>{1.f, 1.f, 1.f},
             py::arg("ignore_label") = 255u)
        .def_property("data", &volume_data, &set_volume_data,
                      "labels as a (nx, ny, nz) uint32 array, Fortran order")
        .def_property_readonly("dims", [](const LabelVolume& v) { return v.dims; })
        .def_property_readonly("spacing", [](const LabelVolume& v) { return v.spacing; })
        .def_property_readonly("affine", &affine_array)
        .def_readwrite("ignore_label", &LabelVolume::ignore_label)
        .def("present_labels", &LabelVolume::present_labels)
        .def("__repr__", [](const LabelVolume& v) {
            std::ostringstream s;
            s << "Volume(dims=(" << v.dims[0] << ", " << v.dims[1] << ", " << v.dims[2]
              << "), ignore_label=" << v.ignore_label << ")";
            return s.str();
        });

    m.def("read_nifti", &read_nifti, py::arg("path"), py::arg("ignore_label") = py::none(),
          "read a single-file NIfTI-1 label volume");
    m.def("write_nifti", &write_nifti, py::arg("volume"), py::arg("path"),
          "write a NIfTI-1 label volume (gzip when path ends in .gz)");

    m.def("default_config",
          [] { return serialize_config(ScribbleConfig{}); },
          "default generation config in config-file syntax");
    m.def(
        "generate_scribbles",
        [](const LabelVolume& v, py::object config, const std::string& volume_id) {
            ScribbleConfig cfg;
            if (config.is_none()) {
                // defaults
            } else if (py::isinstance<py::dict>(config)) {
                cfg = config_from_dict(config.cast<py::dict>());
            } else {
                cfg = parse_config(config.cast<std::string>());
            }
            return generate_volume(v, cfg, volume_id);
        },
        py::arg("volume"), py::arg("config") = py::none(), py::arg("volume_id") = "",
        "synthesize interior + border scribbles for every class of a dense volume");

    m.def(
        "partial_cross_entropy",
        [](py::array logits, py::array labels, int32_t ignore) {
            auto [field, target] = fields_from_arrays(std::move(logits), std::move(labels), ignore);
            return loss_to_python(partial_cross_entropy(field, target), field.num_classes,
                                  field.num_voxels);
        },
        py::arg("logits"), py::arg("labels"), py::arg("ignore") = -1,
        "-> (value, gradient); mean NLL over labeled voxels only");
    m.def(
        "partial_dice",
        [](py::array logits, py::array labels, double smooth, int32_t ignore) {
            auto [field, target] = fields_from_arrays(std::move(logits), std::move(labels), ignore);
            return loss_to_python(partial_dice(field, target, smooth), field.num_classes,
                                  field.num_voxels);
        },
        py::arg("logits"), py::arg("labels"), py::arg("smooth") = 1e-5, py::arg("ignore") = -1,
        "-> (value, gradient); soft Dice over labeled voxels only");
    m.def(
        "partial_loss",
        [](py::array logits, py::array labels, double w_ce, double w_dice, double smooth,
           int32_t ignore) {
            auto [field, target] = fields_from_arrays(std::move(logits), std::move(labels), ignore);
            return loss_to_python(partial_loss(field, target, w_ce, w_dice, smooth),
                                  field.num_classes, field.num_voxels);
        },
        py::arg("logits"), py::arg("labels"), py::arg("w_ce") = 1.0, py::arg("w_dice") = 1.0,
        py::arg("smooth") = 1e-5, py::arg("ignore") = -1,
        "-> (value, gradient); w_ce * pCE + w_dice * pDice");
    m.def(
        "finite_diff_check",
        [](const std::string& loss, py::array logits, py::array labels, double eps,
           int min_coords, uint64_t seed, double w_ce, double w_dice, double smooth,
           int32_t ignore) {
            auto [field, target] = fields_from_arrays(std::move(logits), std::move(labels), ignore);
            return finite_diff_check(loss_by_name(loss, w_ce, w_dice, smooth), field, target, eps,
                                     min_coords, seed);
        },
        py::arg("loss"), py::arg("logits"), py::arg("labels"), py::arg("eps") = 3e-4,
        py::arg("min_coords") = 200, py::arg("seed") = 0, py::arg("w_ce") = 1.0,
        py::arg("w_dice") = 1.0, py::arg("smooth") = 1e-5, py::arg("ignore") = -1,
        "max relative gradient error of the named loss against central differences");

    m.def(
        "dice_per_class",
        [](const LabelVolume& pred, const LabelVolume& ref, std::vector<uint32_t> classes,
           bool include_background) {
            const CaseScores s = dice_per_class(pred, ref, std::move(classes), include_background);
            py::dict per_class;
            for (const auto& [cls, dice] : s.per_class)
                per_class[py::int_(cls)] = dice ? py::object(py::float_(*dice)) : py::none();
            return py::make_tuple(per_class,
                                  s.mean ? py::object(py::float_(*s.mean)) : py::none());
        },
        py::arg("pred"), py::arg("ref"), py::arg("classes") = std::vector<uint32_t>{},
        py::arg("include_background") = false,
        "-> ({class: dice or None}, case mean)");
    m.def(
        "scribble_stats",
        [](const LabelVolume& scribbles, const LabelVolume& dense) {
            const ScribbleStats s = scribble_stats(scribbles, dense);
            py::dict per_class;
            for (const auto& pc : s.classes)
                per_class[py::int_(pc.cls)] =
                    py::make_tuple(pc.annotated, pc.class_voxels, pc.fraction);
            return py::make_tuple(per_class, s.total_annotated);
        },
        py::arg("scribbles"), py::arg("dense"),
        "-> ({class: (annotated, class_voxels, fraction)}, total_annotated)");
    m.def(
        "aggregate",
        [](const std::vector<std::pair<std::string, double>>& case_means) {
            std::vector<CaseScores> cases;
            std::vector<std::string> datasets;
            for (const auto& [ds, mean] : case_means) {
                CaseScores c;
                c.mean = mean;
                cases.push_back(std::move(c));
                datasets.push_back(ds);
            }
            const AggregateReport r = aggregate(cases, datasets);
            py::dict ds_means;
            for (const auto& [ds, mean] : r.dataset_means) ds_means[py::str(ds)] = mean;
            return py::make_tuple(ds_means, r.grand_mean);
        },
        py::arg("case_means"),
        "case_means: [(dataset, case_mean)] -> ({dataset: mean}, grand_mean)");

    m.def(
        "evaluate_nurbs",
        [](py::array ctrl_arr, std::vector<double> weights, int degree,
           std::vector<double> params) {
            auto ctrl =
                py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(ctrl_arr);
            if (!ctrl || ctrl.ndim() != 2 || ctrl.shape(1) != 2)
                throw std::invalid_argument("control points must be a (k, 2) array");
            std::vector<Vec2> pts;
            for (py::ssize_t i = 0; i < ctrl.shape(0); ++i)
                pts.push_back({ctrl.at(i, 0), ctrl.at(i, 1)});
            const NurbsCurve c = make_clamped(std::move(pts), std::move(weights), degree);
            py::array_t<double> out({static_cast<py::ssize_t>(params.size()), py::ssize_t(2)});
            auto r = out.mutable_unchecked<2>();
            for (size_t i = 0; i < params.size(); ++i) {
                const Vec2 p = evaluate(c, params[i]);
                r(static_cast<py::ssize_t>(i), 0) = p.x;
                r(static_cast<py::ssize_t>(i), 1) = p.y;
            }
            return out;
        },
        py::arg("control_points"), py::arg("weights"), py::arg("degree"), py::arg("params"),
        "evaluate a clamped rational B-spline at the given parameters");

    m.def(
        "synthesize_phantom",
        [](const std::string& spec_json) {
            return synthesize_phantom(spec_json.empty()
                                          ? PhantomSpec::builtin_default()
                                          : parse_phantom_spec(spec_json));
        },
        py::arg("spec_json") = "",
        "voxelize a phantom spec (JSON text; builtin default when empty)");

    py::register_exception<NiftiError>(m, "NiftiError", PyExc_RuntimeError);

#ifdef SCRIBKIT_VERSION
#define STR_(x) #x
#define STR(x) STR_(x)
    m.attr("__version__") = STR(SCRIBKIT_VERSION);
#else
    m.attr("__version__") = "dev";
#endif
}
