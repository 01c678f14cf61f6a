#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmsgeo/cheeger.hpp"
#include "mmsgeo/config.hpp"
#include "mmsgeo/hausdorff.hpp"
#include "mmsgeo/minkowski.hpp"
#include "mmsgeo/perimeter.hpp"
#include "mmsgeo/tasks.hpp"

namespace py = pybind11;
using namespace mmsgeo;

namespace {

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

py::array_t<double> as_array(std::span<const double> v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ContentKind content_kind(const std::string& name) {
    if (name == "lower") return ContentKind::Lower;
    if (name == "upper") return ContentKind::Upper;
    if (name == "relaxed") return ContentKind::Relaxed;
    throw Error(ErrorCode::InvalidArgument, "unknown content kind '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sampled metric measure spaces: Minkowski content, perimeter, coarea, gauge measure, Cheeger constants";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::class_<SampledSpace>(m, "SampledSpace")
        .def_property_readonly("size", &SampledSpace::size)
        .def_property_readonly("resolution", &SampledSpace::resolution)
        .def_property_readonly("total_mass", &SampledSpace::total_mass)
        .def_property_readonly("diameter", &SampledSpace::diameter)
        .def_property_readonly("kind", [](const SampledSpace& s) { return std::string(to_string(s.kind())); })
        .def_property_readonly("description", &SampledSpace::description)
        .def_property_readonly("is_length_space", &SampledSpace::is_length_space)
        .def_property_readonly("weights", [](const SampledSpace& s) { return as_array(s.weights()); })
        .def_property_readonly("coordinates",
                               [](const SampledSpace& s) {
                                   const auto d = static_cast<py::ssize_t>(std::max(1, s.coordinate_dims()));
                                   py::array_t<double> out({static_cast<py::ssize_t>(s.size()), d});
                                   auto r = out.mutable_unchecked<2>();
                                   for (std::size_t i = 0; i < s.size(); ++i)
                                       for (py::ssize_t k = 0; k < d; ++k)
                                           r(static_cast<py::ssize_t>(i), k) = s.has_coordinates() ? s.coordinate(i)[static_cast<std::size_t>(k)] : 0.0;
                                   return out;
                               })
        .def("distance", &SampledSpace::distance)
        .def("__len__", &SampledSpace::size)
        .def("__repr__", [](const SampledSpace& s) { return "<SampledSpace " + s.description() + ">"; });

    py::class_<SetIndicator>(m, "SetIndicator")
        .def_property_readonly("count", &SetIndicator::count)
        .def_property_readonly("marks",
                               [](const SetIndicator& s) {
                                   py::array_t<bool> out(static_cast<py::ssize_t>(s.size()));
                                   for (std::size_t i = 0; i < s.size(); ++i) out.mutable_data()[i] = s.marks[i] != 0;
                                   return out;
                               })
        .def("complement", &SetIndicator::complement)
        .def("__len__", &SetIndicator::size);

    py::class_<ScalarField>(m, "ScalarField")
        .def_property_readonly("values", [](const ScalarField& f) { return as_array(f.values); })
        .def("__len__", &ScalarField::size);

    m.def("grid_box",
          [](int dims, int n, std::vector<std::pair<double, double>> box, const std::string& density) {
              if (box.size() == 1 && dims > 1) box.assign(static_cast<std::size_t>(dims), box[0]);
              return build_grid_box(dims, n, box, Density::parse(density));
          },
          py::arg("dims"), py::arg("n"), py::arg("box"), py::arg("density") = "unit");
    m.def("fat_cantor_interval", &build_fat_cantor_interval, py::arg("n"), py::arg("depth"), py::arg("k_mass"));
    m.def("circle", &build_circle, py::arg("n"), py::arg("circumference"));
    m.def("explicit_space",
          [](const std::vector<std::vector<double>>& matrix, std::vector<double> weights) {
              std::vector<double> flat;
              for (const auto& r : matrix) flat.insert(flat.end(), r.begin(), r.end());
              if (weights.empty()) weights.assign(matrix.size(), 1.0);
              return build_explicit(flat, weights);
          },
          py::arg("matrix"), py::arg("weights") = std::vector<double>{});
    m.def("space_from_spec", [](const std::string& spec) { return app::build_space(app::parse_space_argument(spec)); },
          py::arg("spec"), "Preset name, YAML file or kind:key=value,... string.");

    m.def("set_from_mask",
          [](const SampledSpace& s, py::array_t<bool, py::array::c_style | py::array::forcecast> mask) {
              if (static_cast<std::size_t>(mask.size()) != s.size())
                  throw Error(ErrorCode::BindingMismatch, "mask length differs from the space size");
              SetIndicator out = SetIndicator::empty(s);
              for (std::size_t i = 0; i < s.size(); ++i) out.marks[i] = mask.data()[i] ? 1 : 0;
              return out;
          },
          py::arg("space"), py::arg("mask"));
    m.def("set_from_indices", [](const SampledSpace& s, const std::vector<std::size_t>& idx) {
        return SetIndicator::from_indices(s, idx);
    });
    m.def("field_from_values",
          [](const SampledSpace& s, py::array_t<double, py::array::c_style | py::array::forcecast> v) {
              if (static_cast<std::size_t>(v.size()) != s.size())
                  throw Error(ErrorCode::BindingMismatch, "field length differs from the space size");
              return ScalarField{s.id(), std::vector<double>(v.data(), v.data() + v.size())};
          },
          py::arg("space"), py::arg("values"));
    m.def("measure", &measure);
    m.def("distance_to_set", &distance_to_set);
    m.def("sup_semigroup", [](const SampledSpace& s, const ScalarField& f, double t) {
        return as_array(sup_semigroup(s, f, t).values);
    });

    m.def("content",
          [](const SampledSpace& s, const SetIndicator& a, const std::string& kind) {
              const ContentKind k = content_kind(kind);
              if (k == ContentKind::Relaxed) return to_python(relaxed_content(s, a, RelaxedParams{}).summary());
              return to_python(content(s, a, default_window(s), k).summary());
          },
          py::arg("space"), py::arg("set"), py::arg("kind") = "lower");
    m.def("perimeter", [](const SampledSpace& s, const SetIndicator& a) { return to_python(perimeter(s, a).summary()); });
    m.def("coarea", [](const SampledSpace& s, const ScalarField& f) {
        return to_python(coarea_check(s, f).report.to_json());
    });
    m.def("hausdorff", [](const SampledSpace& s, const SetIndicator& a) {
        const HausdorffEstimate e = hausdorff(s, a);
        return py::dict(py::arg("value") = e.extrapolated, py::arg("band") = e.band, py::arg("exact") = e.exact_flag,
                        py::arg("delta") = e.delta_grid, py::arg("costs") = e.costs);
    });
    m.def("cheeger",
          [](const SampledSpace& s, const std::string& family) {
              FamilySpec f;
              f.kind = parse_family_kind(family);
              return to_python(compare_definitions(s, f).report.to_json());
          },
          py::arg("space"), py::arg("family") = "ball_sweep");

    m.def("run_config",
          [](const std::string& text) { return to_python(app::run_task(app::parse_config(text)).to_json()); },
          py::arg("yaml"), "Run a YAML experiment config given as text; returns the report.");
    m.def("run_suite", [](const std::string& name, std::uint64_t seed) { return to_python(app::run_suite(name, seed).to_json()); },
          py::arg("name"), py::arg("seed") = 1);
    m.def("suites", [] {
        std::vector<std::string> out;
        for (const auto& s : app::suites()) out.push_back(s.name);
        return out;
    });
    m.def("verify",
          [](const std::string& space, const std::string& level, std::uint64_t seed) {
              return to_python(app::run_verify(app::build_space(app::parse_space_argument(space)), level, seed).to_json());
          },
          py::arg("space"), py::arg("level") = "quick", py::arg("seed") = 1);
    m.def("set_workers", &set_workers);
    m.def("workers", &workers);
}
