#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmsgeo/cheeger.hpp"
#include "mmsgeo/hausdorff.hpp"
#include "mmsgeo/minkowski.hpp"
#include "mmsgeo/perimeter.hpp"
#include "mmsgeo/space.hpp"

namespace mmsgeo::app {

struct SpaceSpec {
    std::string kind = "grid";  // grid, fat_cantor, circle, explicit, graph, point_cloud, table, three_point
    // grid
    int dims = 2;
    int n = 128;
    std::vector<std::pair<double, double>> box;  // empty: [0,1] per axis
    std::string density = "unit";
    // fat_cantor
    int depth = 6;
    double k_mass = 0.5;
    // circle
    double circumference = 6.283185307179586;
    // explicit: row-major matrix, or points on a line (distance |x_i - x_j|)
    std::vector<double> matrix;
    std::vector<double> line;
    std::vector<double> weights;
    // graph
    std::size_t nodes = 0;
    std::vector<GraphEdge> edges;
    // point_cloud
    std::vector<Point> points;
    int point_dims = 0;
    double resolution = 0.0;
    // table
    std::string path;

    std::string describe() const;
};

struct SetSpec {
    // all, empty, ball, box, segment, point, points, indices, metric_ball,
    // cantor, inverse_sequence, halfspace
    std::string shape = "all";
    std::vector<double> center;
    double radius = 1.0;
    bool open = false;
    std::vector<double> lo, hi;
    std::vector<double> from, to;
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> indices;
    std::size_t center_index = 0;
    int terms = 1000;
    std::vector<double> normal;
    double offset = 0.0;
    bool complement = false;
};

struct FieldSpec {
    std::string kind = "cone";  // cone, linear, distance, indicator, constant, coordinate
    std::vector<double> center;
    double radius = 1.0;
    double height = 1.0;
    std::vector<double> coeffs;
    double offset = 0.0;
    double value = 0.0;
    int axis = 0;
    std::shared_ptr<SetSpec> set;
};

struct Expect {
    bool enabled = false;
    double value = 0.0;
    double tolerance = 0.03;  // relative
};

struct MinkowskiTask {
    Window window;
    ContentParams content;
    std::vector<ContentKind> kinds{ContentKind::Lower, ContentKind::Upper};
    double l1_budget = -1.0;
    bool mean_value = true;
    int subdivisions = 4;
    double inclusion_s = -1.0;  // < 0: 2h
    double inclusion_t = -1.0;  // < 0: 3h
    Expect expect;
};

struct PerimeterTask {
    PerimeterParams params;
    Expect expect;
};

struct CoareaTask {
    CoareaParams params;
    Expect expect;  // on Var(f)
};

struct DistanceLevelsTask {
    std::vector<double> t{0.5, 1.0, 1.5};
    DistanceLevelParams params;
    double expected_per_t = 0.0;  // > 0: each quantity must be within tolerance of expected_per_t * t
};

struct HausdorffTask {
    HausdorffParams params;
    double delta = -1.0;  // > 0: a single cover at this delta instead of the sweep
    Expect expect;
    bool inequalities = false;
    std::optional<SetSpec> inequality_set;  // B; default: the whole space
    std::vector<double> inequality_t;
    double inequality_delta = -1.0;  // < 0: 16h
    GaugeInequalityParams inequality;
    bool corollary = false;
    std::vector<double> corollary_t;
    CorollaryParams corollary_params;
};

struct CheegerTask {
    FamilySpec family;
    std::vector<FieldSpec> fields;
    std::vector<SetSpec> sets;
    std::string definition = "all";  // per, minl, minu, all
    CompareParams params;
    Expect expect;
};

struct Eq13Task {
    Eq13Params params;
};

struct VerifyTask {
    std::string level = "quick";
};

struct ReproTask {
    std::vector<std::string> suites{"all"};
};

struct Config {
    std::string task;
    std::string source;  // file name or "<inline>"
    std::string text;    // raw YAML, echoed into the run record
    std::uint64_t seed = 1;
    std::string output;
    std::optional<SpaceSpec> space;
    std::optional<SetSpec> set;
    std::optional<FieldSpec> field;
    MinkowskiTask minkowski;
    PerimeterTask perimeter;
    CoareaTask coarea;
    DistanceLevelsTask distance_levels;
    HausdorffTask hausdorff;
    CheegerTask cheeger;
    Eq13Task eq13;
    VerifyTask verify;
    ReproTask repro;
};

const std::vector<std::string>& task_names();

// Throws Error(Config) with "source:line:column: message" on any problem,
// including unknown keys and nonpositive tolerances.
Config parse_config(const std::string& text, const std::string& source = "<inline>");
Config load_config(const std::string& path);

// Space spec from a preset name, a YAML file, or "kind:key=value,key=value".
SpaceSpec parse_space_argument(const std::string& arg);
std::vector<std::string> space_presets();

SampledSpace build_space(const SpaceSpec& spec);
SetIndicator build_set(const SampledSpace& space, const SetSpec& spec);
ScalarField build_field(const SampledSpace& space, const FieldSpec& spec);

}  // namespace mmsgeo::app
