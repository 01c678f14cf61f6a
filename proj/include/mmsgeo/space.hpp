#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmsgeo/common.hpp"

namespace mmsgeo {

using Point = std::array<double, 3>;

// Uniform cell-centred grid. Distances are computed from index differences so
// every consumer (oracle, stencils, distance transforms) agrees bitwise.
struct GridMetric {
    int dims = 1;
    std::array<std::int64_t, 3> n{1, 1, 1};
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    bool isotropic = true;

    std::array<std::int64_t, 3> unravel(std::size_t i) const;
    std::size_t ravel(const std::array<std::int64_t, 3>& k) const;
    // Distance for an index offset; isotropic grids use spacing * sqrt(integer norm).
    double offset_distance(const std::array<std::int64_t, 3>& dk) const;
};

// n equally spaced samples on a circle with arc-length distance.
struct CircleMetric {
    std::int64_t n = 3;
    double circumference = 1.0;
    double step = 1.0 / 3.0;

    std::int64_t ring_offset(std::size_t i, std::size_t j) const;
};

struct MatrixMetric {
    std::size_t n = 0;
    std::vector<double> d;  // row-major n x n
};

struct GraphEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double length = 0.0;
};

// Shortest-path metric of a weighted graph; the all-pairs table is filled at
// construction.
struct GraphMetric {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;
    std::vector<double> d;
};

// Euclidean distance on stored coordinates (imported point sets).
struct PointCloudMetric {
    int dims = 1;
};

using Metric = std::variant<GridMetric, CircleMetric, MatrixMetric, GraphMetric, PointCloudMetric>;

enum class SpaceKind { Grid, FatCantor, Circle, Explicit, Graph, PointCloud };

const char* to_string(SpaceKind kind);

class SampledSpace {
public:
    SampledSpace(SpaceKind kind, Metric metric, std::vector<double> weights, double resolution_h,
                 bool length_space, std::vector<Point> coordinates, int coordinate_dims,
                 std::string description);

    std::uint64_t id() const noexcept { return id_; }
    std::size_t size() const noexcept { return weights_.size(); }
    SpaceKind kind() const noexcept { return kind_; }
    const Metric& metric() const noexcept { return metric_; }
    const GridMetric* grid() const noexcept { return std::get_if<GridMetric>(&metric_); }
    const CircleMetric* circle() const noexcept { return std::get_if<CircleMetric>(&metric_); }
    double resolution() const noexcept { return resolution_h_; }
    bool is_length_space() const noexcept { return length_space_; }
    const std::string& description() const noexcept { return description_; }

    std::span<const double> weights() const noexcept { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }
    double total_mass() const noexcept { return total_mass_; }
    double max_weight() const noexcept { return max_weight_; }

    bool has_coordinates() const noexcept { return coordinate_dims_ > 0; }
    int coordinate_dims() const noexcept { return coordinate_dims_; }
    const Point& coordinate(std::size_t i) const { return coordinates_[i]; }
    std::span<const Point> coordinates() const noexcept { return coordinates_; }

    double distance(std::size_t i, std::size_t j) const;
    // Largest pairwise distance (exact for grids and circles, scanned otherwise).
    double diameter() const;

    // Samples of the fat Cantor set for spaces built by build_fat_cantor_interval.
    const std::optional<std::vector<std::uint8_t>>& cantor_marks() const noexcept { return cantor_marks_; }
    void set_cantor_marks(std::vector<std::uint8_t> marks);

private:
    std::uint64_t id_;
    SpaceKind kind_;
    Metric metric_;
    std::vector<double> weights_;
    double resolution_h_;
    bool length_space_;
    std::vector<Point> coordinates_;
    int coordinate_dims_;
    std::string description_;
    double total_mass_ = 0.0;
    double max_weight_ = 0.0;
    std::optional<std::vector<std::uint8_t>> cantor_marks_;
};

// Borel-set proxy: one mark per sample.
struct SetIndicator {
    std::uint64_t space_id = 0;
    std::vector<std::uint8_t> marks;

    static SetIndicator empty(const SampledSpace& space);
    static SetIndicator full(const SampledSpace& space);
    static SetIndicator from_predicate(const SampledSpace& space, const std::function<bool(const Point&)>& pred);
    static SetIndicator from_indices(const SampledSpace& space, std::span<const std::size_t> indices);

    std::size_t size() const noexcept { return marks.size(); }
    bool contains(std::size_t i) const { return marks[i] != 0; }
    std::size_t count() const;
    bool is_empty() const { return count() == 0; }
    SetIndicator complement() const;
};

SetIndicator set_union(const SetIndicator& a, const SetIndicator& b);
SetIndicator set_intersection(const SetIndicator& a, const SetIndicator& b);
bool is_subset(const SetIndicator& a, const SetIndicator& b);

struct ScalarField {
    std::uint64_t space_id = 0;
    std::vector<double> values;

    static ScalarField constant(const SampledSpace& space, double value);
    static ScalarField from_function(const SampledSpace& space, const std::function<double(const Point&)>& fn);
    static ScalarField indicator(const SetIndicator& set);

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

void check_binding(const SampledSpace& space, const SetIndicator& set);
void check_binding(const SampledSpace& space, const ScalarField& field);

// Weight density for grid boxes.
struct Density {
    enum class Kind { Unit, Constant, Linear, FatCantor };
    Kind kind = Kind::Unit;
    double param = 1.0;  // constant value, linear slope, or fat Cantor mass |K|

    static Density unit() { return {}; }
    static Density constant(double c) { return {Kind::Constant, c}; }
    static Density fat_cantor(double k_mass) { return {Kind::FatCantor, k_mass}; }
    static Density parse(const std::string& spec);
};

// Midpoint-gap fat Cantor set in [0,1]: stage k removes a centred open gap of
// length 2(1-|K|)4^{-k} from each of the 2^{k-1} surviving intervals.
class FatCantor {
public:
    explicit FatCantor(double k_mass);

    double k_mass() const noexcept { return k_mass_; }
    double gap_length(int stage) const;
    // Lebesgue mass of the stage-`depth` approximation.
    double truncated_mass(int depth) const;
    // Surviving interval length after `stage` removals (stage 0 gives 1).
    double interval_length(int stage) const;
    bool contains(double x, int depth) const;
    // Lebesgue measure of K (full depth) intersected with [a, b].
    double measure_in(double a, double b) const;
    // Removed gaps up to `depth`, sorted by left endpoint.
    std::vector<std::pair<double, double>> gaps(int depth) const;

private:
    double k_mass_;
};

SampledSpace build_grid_box(int dims, int n_per_side, std::span<const std::pair<double, double>> box,
                            Density density = Density::unit());
SampledSpace build_fat_cantor_interval(int n, int depth, double target_k_mass);
SampledSpace build_circle(int n, double circumference);
SampledSpace build_explicit(std::span<const double> matrix, std::span<const double> weights);
SampledSpace build_graph(std::size_t n, std::span<const GraphEdge> edges, std::span<const double> weights);
SampledSpace build_point_cloud(std::vector<Point> coordinates, int dims, std::vector<double> weights,
                               double resolution_h);

double measure(const SampledSpace& space, const SetIndicator& set);

struct MetricAudit {
    std::size_t triples_checked = 0;
    std::size_t violations = 0;
    std::array<std::size_t, 3> witness{0, 0, 0};
};

// Exhaustive for spaces up to `exhaustive_limit` points, otherwise `random_triples`
// seeded triples.
MetricAudit audit_metric(const SampledSpace& space, std::size_t random_triples = 10000,
                         std::uint64_t seed = 1, std::size_t exhaustive_limit = 60);

// Ball enumeration, built once per (space, radius). Grids and circles use
// precomputed offset stencils; point clouds use buckets; matrix spaces scan.
class BallQuery {
public:
    BallQuery(const SampledSpace& space, double radius, bool closed);

    double radius() const noexcept { return radius_; }
    bool closed() const noexcept { return closed_; }
    const SampledSpace& space() const noexcept { return *space_; }

    // Calls fn(j, d(i, j)) for every j in the ball around i, including i.
    template <class Fn>
    void for_each(std::size_t i, Fn&& fn) const;
    std::vector<std::size_t> members(std::size_t i) const;

private:
    struct GridOffset {
        std::array<std::int64_t, 3> dk;
        double distance;
    };

    bool inside(double d) const { return closed_ ? d <= radius_ : d < radius_; }

    const SampledSpace* space_;
    double radius_;
    bool closed_;
    std::vector<GridOffset> grid_offsets_;
    std::vector<std::pair<std::int64_t, double>> ring_offsets_;
    std::vector<std::vector<std::size_t>> buckets_;
    std::array<std::int64_t, 3> bucket_dims_{1, 1, 1};
    Point bucket_lo_{0.0, 0.0, 0.0};
    double bucket_size_ = 0.0;

    std::size_t bucket_of(const Point& p, std::array<std::int64_t, 3>& cell) const;
};

template <class Fn>
void BallQuery::for_each(std::size_t i, Fn&& fn) const {
    const SampledSpace& sp = *space_;
    if (const GridMetric* g = sp.grid()) {
        const auto k = g->unravel(i);
        for (const GridOffset& off : grid_offsets_) {
            std::array<std::int64_t, 3> q{k[0] + off.dk[0], k[1] + off.dk[1], k[2] + off.dk[2]};
            if (q[0] < 0 || q[0] >= g->n[0] || q[1] < 0 || q[1] >= g->n[1] || q[2] < 0 || q[2] >= g->n[2]) {
                continue;
            }
            fn(g->ravel(q), off.distance);
        }
        return;
    }
    if (const CircleMetric* c = sp.circle()) {
        const auto n = c->n;
        for (const auto& [dk, d] : ring_offsets_) {
            std::int64_t j = (static_cast<std::int64_t>(i) + dk) % n;
            if (j < 0) j += n;
            fn(static_cast<std::size_t>(j), d);
        }
        return;
    }
    if (!buckets_.empty()) {
        std::array<std::int64_t, 3> cell{};
        bucket_of(sp.coordinate(i), cell);
        const int dims = sp.coordinate_dims();
        for (std::int64_t a = -1; a <= 1; ++a) {
            for (std::int64_t b = (dims > 1 ? -1 : 0); b <= (dims > 1 ? 1 : 0); ++b) {
                for (std::int64_t c3 = (dims > 2 ? -1 : 0); c3 <= (dims > 2 ? 1 : 0); ++c3) {
                    std::array<std::int64_t, 3> q{cell[0] + a, cell[1] + b, cell[2] + c3};
                    if (q[0] < 0 || q[0] >= bucket_dims_[0] || q[1] < 0 || q[1] >= bucket_dims_[1] || q[2] < 0 ||
                        q[2] >= bucket_dims_[2]) {
                        continue;
                    }
                    const auto& bucket =
                        buckets_[static_cast<std::size_t>(q[0] + bucket_dims_[0] * (q[1] + bucket_dims_[1] * q[2]))];
                    for (std::size_t j : bucket) {
                        const double d = sp.distance(i, j);
                        if (inside(d)) fn(j, d);
                    }
                }
            }
        }
        return;
    }
    for (std::size_t j = 0; j < sp.size(); ++j) {
        const double d = sp.distance(i, j);
        if (inside(d)) fn(j, d);
    }
}

// Flat text table: a metadata comment line, a CSV header, then one row per
// point (coordinates, weight, extra set/field columns).
struct TableColumn {
    std::string name;
    std::vector<double> values;
};

void write_table(std::ostream& out, const SampledSpace& space, std::span<const TableColumn> columns);
std::string table_string(const SampledSpace& space, std::span<const TableColumn> columns);

struct ImportedTable {
    SampledSpace space;
    std::vector<TableColumn> columns;
};

ImportedTable read_table(std::istream& in);

}  // namespace mmsgeo
