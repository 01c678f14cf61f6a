#include "mmsgeo/space.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "mmsgeo/csv.hpp"

namespace mmsgeo {

namespace {

std::atomic<std::uint64_t> g_next_space_id{1};

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

// Correctly rounded sum of finite doubles via nonoverlapping partials
// (Shewchuk), so measures are exactly monotone under inclusion.
class ExactSum {
public:
    void add(double x) {
        std::size_t k = 0;
        for (double y : partials_) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials_[k++] = lo;
            x = hi;
        }
        partials_.resize(k);
        partials_.push_back(x);
    }

    double value() const {
        if (partials_.empty()) return 0.0;
        std::size_t n = partials_.size();
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            lo = y - (hi - x);
            if (lo != 0.0) break;
        }
        // Round-half-even correction when the remaining partials share lo's sign.
        if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            if (y == x - hi) hi = x;
        }
        return hi;
    }

private:
    std::vector<double> partials_;
};

}  // namespace

const char* to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::Grid: return "grid";
        case SpaceKind::FatCantor: return "fat_cantor";
        case SpaceKind::Circle: return "circle";
        case SpaceKind::Explicit: return "explicit";
        case SpaceKind::Graph: return "graph";
        case SpaceKind::PointCloud: return "point_cloud";
    }
    return "unknown";
}

std::array<std::int64_t, 3> GridMetric::unravel(std::size_t i) const {
    const auto idx = static_cast<std::int64_t>(i);
    return {idx % n[0], (idx / n[0]) % n[1], idx / (n[0] * n[1])};
}

std::size_t GridMetric::ravel(const std::array<std::int64_t, 3>& k) const {
    return static_cast<std::size_t>(k[0] + n[0] * (k[1] + n[1] * k[2]));
}

double GridMetric::offset_distance(const std::array<std::int64_t, 3>& dk) const {
    if (isotropic) {
        const std::int64_t norm = dk[0] * dk[0] + dk[1] * dk[1] + dk[2] * dk[2];
        return spacing[0] * std::sqrt(static_cast<double>(norm));
    }
    double acc = 0.0;
    for (int a = 0; a < dims; ++a) {
        acc += static_cast<double>(dk[a] * dk[a]) * (spacing[a] * spacing[a]);
    }
    return std::sqrt(acc);
}

std::int64_t CircleMetric::ring_offset(std::size_t i, std::size_t j) const {
    const std::int64_t diff = std::abs(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));
    return std::min(diff, n - diff);
}

SampledSpace::SampledSpace(SpaceKind kind, Metric metric, std::vector<double> weights, double resolution_h,
                           bool length_space, std::vector<Point> coordinates, int coordinate_dims,
                           std::string description)
    : id_(g_next_space_id.fetch_add(1)),
      kind_(kind),
      metric_(std::move(metric)),
      weights_(std::move(weights)),
      resolution_h_(resolution_h),
      length_space_(length_space),
      coordinates_(std::move(coordinates)),
      coordinate_dims_(coordinate_dims),
      description_(std::move(description)) {
    if (!(resolution_h_ > 0.0) || !std::isfinite(resolution_h_)) {
        fail(ErrorCode::InvalidArgument, "resolution_h must be positive and finite");
    }
    ExactSum mass;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
        mass.add(w);
        max_weight_ = std::max(max_weight_, w);
    }
    total_mass_ = mass.value();
    if (coordinate_dims_ > 0 && coordinates_.size() != weights_.size()) {
        fail(ErrorCode::InvalidArgument, "coordinate count does not match point count");
    }
}

double SampledSpace::distance(std::size_t i, std::size_t j) const {
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, GridMetric>) {
                const auto a = m.unravel(i);
                const auto b = m.unravel(j);
                return m.offset_distance({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
            } else if constexpr (std::is_same_v<M, CircleMetric>) {
                return m.step * static_cast<double>(m.ring_offset(i, j));
            } else if constexpr (std::is_same_v<M, PointCloudMetric>) {
                const Point& p = coordinates_[i];
                const Point& q = coordinates_[j];
                double acc = 0.0;
                for (int a = 0; a < m.dims; ++a) acc += (p[a] - q[a]) * (p[a] - q[a]);
                return std::sqrt(acc);
            } else {
                return m.d[i * m.n + j];
            }
        },
        metric_);
}

double SampledSpace::diameter() const {
    if (const GridMetric* g = grid()) return g->offset_distance({g->n[0] - 1, g->n[1] - 1, g->n[2] - 1});
    if (const CircleMetric* c = circle()) return c->step * static_cast<double>(c->n / 2);
    if (const auto* m = std::get_if<MatrixMetric>(&metric_)) return *std::max_element(m->d.begin(), m->d.end());
    if (const auto* m = std::get_if<GraphMetric>(&metric_)) return *std::max_element(m->d.begin(), m->d.end());
    double best = 0.0;
    if (size() <= 5000) {
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = i + 1; j < size(); ++j) best = std::max(best, distance(i, j));
        return best;
    }
    Point lo{}, hi{};
    lo.fill(std::numeric_limits<double>::max());
    hi.fill(std::numeric_limits<double>::lowest());
    for (const Point& p : coordinates_) {
        for (int a = 0; a < coordinate_dims_; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    for (int a = 0; a < coordinate_dims_; ++a) best += (hi[a] - lo[a]) * (hi[a] - lo[a]);
    return std::sqrt(best);
}

void SampledSpace::set_cantor_marks(std::vector<std::uint8_t> marks) {
    if (marks.size() != size()) fail(ErrorCode::InvalidArgument, "cantor marks length mismatch");
    cantor_marks_ = std::move(marks);
}

// ---------------------------------------------------------------- indicators

SetIndicator SetIndicator::empty(const SampledSpace& space) { return {space.id(), std::vector<std::uint8_t>(space.size(), 0)}; }

SetIndicator SetIndicator::full(const SampledSpace& space) { return {space.id(), std::vector<std::uint8_t>(space.size(), 1)}; }

SetIndicator SetIndicator::from_predicate(const SampledSpace& space, const std::function<bool(const Point&)>& pred) {
    if (!space.has_coordinates()) fail(ErrorCode::InvalidArgument, "space has no coordinates");
    SetIndicator s = empty(space);
    for (std::size_t i = 0; i < space.size(); ++i) s.marks[i] = pred(space.coordinate(i)) ? 1 : 0;
    return s;
}

SetIndicator SetIndicator::from_indices(const SampledSpace& space, std::span<const std::size_t> indices) {
    SetIndicator s = empty(space);
    for (std::size_t i : indices) {
        if (i >= space.size()) fail(ErrorCode::InvalidArgument, "point index out of range");
        s.marks[i] = 1;
    }
    return s;
}

std::size_t SetIndicator::count() const {
    return static_cast<std::size_t>(std::count_if(marks.begin(), marks.end(), [](std::uint8_t m) { return m != 0; }));
}

SetIndicator SetIndicator::complement() const {
    SetIndicator c{space_id, marks};
    for (auto& m : c.marks) m = m ? 0 : 1;
    return c;
}

SetIndicator set_union(const SetIndicator& a, const SetIndicator& b) {
    if (a.space_id != b.space_id || a.size() != b.size()) fail(ErrorCode::BindingMismatch, "indicators bound to different spaces");
    SetIndicator u = a;
    for (std::size_t i = 0; i < u.size(); ++i) u.marks[i] = (a.marks[i] || b.marks[i]) ? 1 : 0;
    return u;
}

SetIndicator set_intersection(const SetIndicator& a, const SetIndicator& b) {
    if (a.space_id != b.space_id || a.size() != b.size()) fail(ErrorCode::BindingMismatch, "indicators bound to different spaces");
    SetIndicator u = a;
    for (std::size_t i = 0; i < u.size(); ++i) u.marks[i] = (a.marks[i] && b.marks[i]) ? 1 : 0;
    return u;
}

bool is_subset(const SetIndicator& a, const SetIndicator& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.marks[i] && !b.marks[i]) return false;
    return true;
}

ScalarField ScalarField::constant(const SampledSpace& space, double value) {
    return {space.id(), std::vector<double>(space.size(), value)};
}

ScalarField ScalarField::from_function(const SampledSpace& space, const std::function<double(const Point&)>& fn) {
    if (!space.has_coordinates()) fail(ErrorCode::InvalidArgument, "space has no coordinates");
    ScalarField f{space.id(), std::vector<double>(space.size())};
    for (std::size_t i = 0; i < space.size(); ++i) {
        f.values[i] = fn(space.coordinate(i));
        if (!std::isfinite(f.values[i])) fail(ErrorCode::InvalidArgument, "scalar field values must be finite");
    }
    return f;
}

ScalarField ScalarField::indicator(const SetIndicator& set) {
    ScalarField f{set.space_id, std::vector<double>(set.size())};
    for (std::size_t i = 0; i < set.size(); ++i) f.values[i] = set.marks[i] ? 1.0 : 0.0;
    return f;
}

void check_binding(const SampledSpace& space, const SetIndicator& set) {
    if (set.space_id != space.id() || set.size() != space.size()) {
        fail(ErrorCode::BindingMismatch, "set indicator is bound to a different space");
    }
}

void check_binding(const SampledSpace& space, const ScalarField& field) {
    if (field.space_id != space.id() || field.size() != space.size()) {
        fail(ErrorCode::BindingMismatch, "scalar field is bound to a different space");
    }
}

double measure(const SampledSpace& space, const SetIndicator& set) {
    check_binding(space, set);
    ExactSum m;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set.marks[i]) m.add(space.weight(i));
    return m.value();
}

// ---------------------------------------------------------------- fat Cantor

FatCantor::FatCantor(double k_mass) : k_mass_(k_mass) {
    if (!(k_mass > 0.0 && k_mass < 1.0)) fail(ErrorCode::InvalidArgument, "fat Cantor mass must lie in (0, 1)");
    double len = 1.0;
    for (int k = 1; k <= 60; ++k) {
        if (!(gap_length(k) < len)) fail(ErrorCode::InvalidArgument, "fat Cantor gap exceeds surviving interval");
        len = 0.5 * (len - gap_length(k));
    }
}

double FatCantor::gap_length(int stage) const { return 2.0 * (1.0 - k_mass_) * std::pow(0.25, stage); }

double FatCantor::truncated_mass(int depth) const { return 1.0 - (1.0 - k_mass_) * (1.0 - std::pow(0.5, depth)); }

double FatCantor::interval_length(int stage) const {
    double len = 1.0;
    for (int k = 1; k <= stage; ++k) len = 0.5 * (len - gap_length(k));
    return len;
}

bool FatCantor::contains(double x, int depth) const {
    if (x < 0.0 || x > 1.0) return false;
    double u = 0.0;
    double len = 1.0;
    for (int k = 1; k <= depth; ++k) {
        const double g = gap_length(k);
        const double mid = u + 0.5 * len;
        if (x > mid - 0.5 * g && x < mid + 0.5 * g) return false;
        const double child = 0.5 * (len - g);
        if (x >= mid + 0.5 * g) u = u + len - child;
        len = child;
    }
    return true;
}

double FatCantor::measure_in(double a, double b) const {
    if (b <= a) return 0.0;
    constexpr int kMaxStage = 48;
    std::function<double(double, double, int)> rec = [&](double u, double len, int stage) -> double {
        const double lo = std::max(a, u);
        const double hi = std::min(b, u + len);
        if (hi <= lo) return 0.0;
        const double share = k_mass_ * std::pow(0.5, stage);
        if (lo <= u && hi >= u + len) return share;
        if (stage >= kMaxStage) return share * (hi - lo) / len;
        const double g = gap_length(stage + 1);
        const double child = 0.5 * (len - g);
        return rec(u, child, stage + 1) + rec(u + len - child, child, stage + 1);
    };
    return rec(0.0, 1.0, 0);
}

std::vector<std::pair<double, double>> FatCantor::gaps(int depth) const {
    std::vector<std::pair<double, double>> out;
    std::function<void(double, double, int)> rec = [&](double u, double len, int stage) {
        if (stage >= depth) return;
        const double g = gap_length(stage + 1);
        const double mid = u + 0.5 * len;
        out.emplace_back(mid - 0.5 * g, mid + 0.5 * g);
        const double child = 0.5 * (len - g);
        rec(u, child, stage + 1);
        rec(u + len - child, child, stage + 1);
    };
    rec(0.0, 1.0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

Density Density::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    double param = 1.0;
    if (colon != std::string::npos) {
        const std::string rest = spec.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), param);
        if (ec != std::errc() || ptr != rest.data() + rest.size()) {
            fail(ErrorCode::InvalidArgument, "bad density parameter in '" + spec + "'");
        }
    }
    if (name == "unit") return unit();
    if (name == "constant") return constant(param);
    if (name == "linear") return {Kind::Linear, param};
    if (name == "fat_cantor") return fat_cantor(colon == std::string::npos ? 0.5 : param);
    fail(ErrorCode::InvalidArgument, "unknown density '" + name + "'");
}

// ---------------------------------------------------------------- generators

SampledSpace build_grid_box(int dims, int n_per_side, std::span<const std::pair<double, double>> box, Density density) {
    if (dims < 1 || dims > 3) fail(ErrorCode::InvalidArgument, "unsupported dimension " + std::to_string(dims));
    if (n_per_side < 2) fail(ErrorCode::InvalidArgument, "n_per_side must be at least 2");
    if (box.size() != static_cast<std::size_t>(dims)) fail(ErrorCode::InvalidArgument, "box needs one extent per axis");
    GridMetric g;
    g.dims = dims;
    double diag2 = 0.0;
    double cell_volume = 1.0;
    for (int a = 0; a < dims; ++a) {
        const auto [lo, hi] = box[a];
        if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) fail(ErrorCode::InvalidArgument, "degenerate box extent");
        g.n[a] = n_per_side;
        g.lo[a] = lo;
        g.spacing[a] = (hi - lo) / n_per_side;
        diag2 += g.spacing[a] * g.spacing[a];
        cell_volume *= g.spacing[a];
    }
    for (int a = 1; a < dims; ++a) g.isotropic = g.isotropic && g.spacing[a] == g.spacing[0];
    if (density.kind == Density::Kind::Constant && !(density.param > 0.0)) {
        fail(ErrorCode::InvalidArgument, "nonpositive density");
    }
    if (density.kind == Density::Kind::FatCantor && dims != 1) {
        fail(ErrorCode::InvalidArgument, "fat Cantor density is one-dimensional");
    }
    std::optional<FatCantor> cantor;
    if (density.kind == Density::Kind::FatCantor) cantor.emplace(density.param);

    const std::size_t n = static_cast<std::size_t>(g.n[0] * g.n[1] * g.n[2]);
    std::vector<Point> coords(n);
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = g.unravel(i);
        Point p{0.0, 0.0, 0.0};
        for (int a = 0; a < dims; ++a) p[a] = g.lo[a] + (static_cast<double>(k[a]) + 0.5) * g.spacing[a];
        coords[i] = p;
        double w = cell_volume;
        switch (density.kind) {
            case Density::Kind::Unit: break;
            case Density::Kind::Constant: w *= density.param; break;
            case Density::Kind::Linear: {
                const double rho = 1.0 + density.param * p[0];
                if (!(rho > 0.0)) fail(ErrorCode::InvalidArgument, "nonpositive density");
                w *= rho;
                break;
            }
            case Density::Kind::FatCantor: {
                // Cell-averaged density (1 on K, 1/2 off K) over the cell in [0,1] coordinates.
                const double extent = box[0].second - box[0].first;
                const double a0 = static_cast<double>(k[0]) / n_per_side;
                const double a1 = static_cast<double>(k[0] + 1) / n_per_side;
                const double k_part = cantor->measure_in(a0, a1);
                w = extent * (0.5 * (a1 - a0) + 0.5 * k_part);
                break;
            }
        }
        weights[i] = w;
    }
    std::string desc = "grid " + std::to_string(dims) + "d n=" + std::to_string(n_per_side);
    return SampledSpace(SpaceKind::Grid, g, std::move(weights), 0.5 * std::sqrt(diag2), true, std::move(coords), dims,
                        desc);
}

SampledSpace build_fat_cantor_interval(int n, int depth, double target_k_mass) {
    if (depth < 1) fail(ErrorCode::InvalidArgument, "depth must be at least 1");
    if (n < 2) fail(ErrorCode::InvalidArgument, "n must be at least 2");
    const FatCantor cantor(target_k_mass);
    const double spacing = 1.0 / n;
    const double h = 0.5 * spacing;
    if (!(h < cantor.gap_length(depth))) {
        fail(ErrorCode::ResolutionTooCoarse, "resolution too coarse: h=" + std::to_string(h) +
                                                 " is not below the smallest retained gap " +
                                                 std::to_string(cantor.gap_length(depth)));
    }
    GridMetric g;
    g.dims = 1;
    g.n = {n, 1, 1};
    g.spacing = {spacing, 1.0, 1.0};
    std::vector<Point> coords(static_cast<std::size_t>(n));
    std::vector<double> weights(coords.size());
    std::vector<std::uint8_t> marks(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double x = (static_cast<double>(i) + 0.5) * spacing;
        coords[i] = {x, 0.0, 0.0};
        const bool in_k = cantor.contains(x, depth);
        marks[i] = in_k ? 1 : 0;
        weights[i] = spacing * (in_k ? 1.0 : 0.5);
    }
    SampledSpace space(SpaceKind::FatCantor, g, std::move(weights), h, true, std::move(coords), 1,
                       "fat_cantor n=" + std::to_string(n) + " depth=" + std::to_string(depth));
    space.set_cantor_marks(std::move(marks));
    return space;
}

SampledSpace build_circle(int n, double circumference) {
    if (n < 3) fail(ErrorCode::InvalidArgument, "circle needs at least 3 points");
    if (!(circumference > 0.0)) fail(ErrorCode::InvalidArgument, "circumference must be positive");
    CircleMetric c;
    c.n = n;
    c.circumference = circumference;
    c.step = circumference / n;
    const double radius = circumference / (2.0 * M_PI);
    std::vector<Point> coords(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double angle = 2.0 * M_PI * i / n;
        coords[static_cast<std::size_t>(i)] = {radius * std::cos(angle), radius * std::sin(angle), 0.0};
    }
    std::vector<double> weights(static_cast<std::size_t>(n), c.step);
    return SampledSpace(SpaceKind::Circle, c, std::move(weights), 0.5 * c.step, true, std::move(coords), 2,
                        "circle n=" + std::to_string(n));
}

namespace {

// Symmetry, zero diagonal, positivity and triangle inequality; throws with a witness.
void validate_matrix(std::size_t n, const std::vector<double>& d) {
    auto at = [&](std::size_t i, std::size_t j) { return d[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = at(i, j);
            if (!std::isfinite(v)) fail(ErrorCode::MetricViolation, "non-finite distance");
            if (i == j && v != 0.0) {
                fail(ErrorCode::MetricViolation, "nonzero diagonal at " + std::to_string(i));
            }
            if (i != j && !(v > 0.0)) {
                fail(ErrorCode::MetricViolation,
                     "nonpositive off-diagonal distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (std::abs(v - at(j, i)) > 1e-12 * std::max(1.0, std::abs(v))) {
                fail(ErrorCode::MetricViolation,
                     "symmetry violated at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                const double via = at(a, b) + at(b, c);
                if (at(a, c) > via + 1e-12 * std::max(1.0, via)) {
                    fail(ErrorCode::MetricViolation, "triangle inequality violated: d(a,c) > d(a,b) + d(b,c) for (a,b,c) = (" +
                                                         std::to_string(a) + "," + std::to_string(b) + "," +
                                                         std::to_string(c) + ")");
                }
            }
}

double smallest_positive(const std::vector<double>& d) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : d)
        if (v > 0.0) best = std::min(best, v);
    return std::isfinite(best) ? best : 1.0;
}

}  // namespace

SampledSpace build_explicit(std::span<const double> matrix, std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) fail(ErrorCode::InvalidArgument, "explicit space needs at least one point");
    if (matrix.size() != n * n) fail(ErrorCode::InvalidArgument, "distance matrix shape does not match weights");
    MatrixMetric m;
    m.n = n;
    m.d.assign(matrix.begin(), matrix.end());
    validate_matrix(n, m.d);
    const double h = smallest_positive(m.d);
    return SampledSpace(SpaceKind::Explicit, std::move(m), std::vector<double>(weights.begin(), weights.end()), h, false,
                        {}, 0, "explicit n=" + std::to_string(n));
}

SampledSpace build_graph(std::size_t n, std::span<const GraphEdge> edges, std::span<const double> weights) {
    if (n == 0 || weights.size() != n) fail(ErrorCode::InvalidArgument, "graph needs one weight per vertex");
    GraphMetric g;
    g.n = n;
    g.adjacency.resize(n);
    for (const GraphEdge& e : edges) {
        if (e.a >= n || e.b >= n || e.a == e.b) fail(ErrorCode::InvalidArgument, "bad graph edge");
        if (!(e.length > 0.0) || !std::isfinite(e.length)) fail(ErrorCode::InvalidArgument, "edge lengths must be positive");
        g.adjacency[e.a].emplace_back(e.b, e.length);
        g.adjacency[e.b].emplace_back(e.a, e.length);
    }
    g.d.assign(n * n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    for (std::size_t s = 0; s < n; ++s) {
        double* row = &g.d[s * n];
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        row[s] = 0.0;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > row[u]) continue;
            for (auto [v, len] : g.adjacency[u]) {
                if (du + len < row[v]) {
                    row[v] = du + len;
                    pq.emplace(row[v], v);
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!std::isfinite(g.d[i * n + j])) fail(ErrorCode::MetricViolation, "graph is disconnected");
            // Path sums can differ by rounding between directions; keep the smaller.
            const double v = std::min(g.d[i * n + j], g.d[j * n + i]);
            g.d[i * n + j] = g.d[j * n + i] = v;
        }
    const double h = smallest_positive(g.d);
    return SampledSpace(SpaceKind::Graph, std::move(g), std::vector<double>(weights.begin(), weights.end()), h, false, {},
                        0, "graph n=" + std::to_string(n));
}

SampledSpace build_point_cloud(std::vector<Point> coordinates, int dims, std::vector<double> weights,
                               double resolution_h) {
    if (dims < 1 || dims > 3) fail(ErrorCode::InvalidArgument, "unsupported dimension " + std::to_string(dims));
    if (coordinates.size() != weights.size()) fail(ErrorCode::InvalidArgument, "coordinate/weight count mismatch");
    for (const Point& p : coordinates)
        for (int a = 0; a < dims; ++a)
            if (!std::isfinite(p[a])) fail(ErrorCode::InvalidArgument, "non-finite coordinate");
    const std::size_t n = coordinates.size();
    return SampledSpace(SpaceKind::PointCloud, PointCloudMetric{dims}, std::move(weights), resolution_h, false,
                        std::move(coordinates), dims, "point_cloud n=" + std::to_string(n));
}

MetricAudit audit_metric(const SampledSpace& space, std::size_t random_triples, std::uint64_t seed,
                         std::size_t exhaustive_limit) {
    MetricAudit audit;
    const std::size_t n = space.size();
    auto check = [&](std::size_t a, std::size_t b, std::size_t c) {
        ++audit.triples_checked;
        const double ab = space.distance(a, b);
        const double bc = space.distance(b, c);
        const double ac = space.distance(a, c);
        const double via = ab + bc;
        bool bad = ac > via + 1e-12 * std::max(1.0, via);
        bad = bad || ab != space.distance(b, a) || space.distance(a, a) != 0.0;
        bad = bad || (a != b && !(ab > 0.0));
        if (bad) {
            if (audit.violations == 0) audit.witness = {a, b, c};
            ++audit.violations;
        }
    };
    if (n <= exhaustive_limit) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) check(a, b, c);
        return audit;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < random_triples; ++t) {
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        const std::size_t c = pick(rng);
        check(a, b, c);
    }
    return audit;
}

// ---------------------------------------------------------------- ball query

BallQuery::BallQuery(const SampledSpace& space, double radius, bool closed)
    : space_(&space), radius_(radius), closed_(closed) {
    if (!(radius >= 0.0) || !std::isfinite(radius)) fail(ErrorCode::InvalidArgument, "ball radius must be finite and >= 0");
    if (const GridMetric* g = space.grid()) {
        std::array<std::int64_t, 3> reach{0, 0, 0};
        for (int a = 0; a < g->dims; ++a) {
            reach[a] = std::min<std::int64_t>(g->n[a] - 1, static_cast<std::int64_t>(std::floor(radius / g->spacing[a])) + 1);
        }
        for (std::int64_t z = -reach[2]; z <= reach[2]; ++z)
            for (std::int64_t y = -reach[1]; y <= reach[1]; ++y)
                for (std::int64_t x = -reach[0]; x <= reach[0]; ++x) {
                    const std::array<std::int64_t, 3> dk{x, y, z};
                    const double d = g->offset_distance(dk);
                    if (inside(d)) grid_offsets_.push_back({dk, d});
                }
        std::stable_sort(grid_offsets_.begin(), grid_offsets_.end(),
                         [](const GridOffset& a, const GridOffset& b) { return a.distance < b.distance; });
        return;
    }
    if (const CircleMetric* c = space.circle()) {
        const std::int64_t lo = -(c->n - 1) / 2;
        const std::int64_t hi = c->n / 2;
        for (std::int64_t k = lo; k <= hi; ++k) {
            const double d = c->step * static_cast<double>(std::min(std::abs(k), c->n - std::abs(k)));
            if (inside(d)) ring_offsets_.emplace_back(k, d);
        }
        return;
    }
    if (std::holds_alternative<PointCloudMetric>(space.metric()) && space.size() > 64) {
        const int dims = space.coordinate_dims();
        bucket_lo_.fill(std::numeric_limits<double>::max());
        Point hi;
        hi.fill(std::numeric_limits<double>::lowest());
        for (const Point& p : space.coordinates())
            for (int a = 0; a < dims; ++a) {
                bucket_lo_[a] = std::min(bucket_lo_[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
        double extent = 0.0;
        for (int a = 0; a < dims; ++a) extent = std::max(extent, hi[a] - bucket_lo_[a]);
        bucket_size_ = std::max(radius * (1.0 + 1e-12), extent / 256.0 + 1e-300);
        for (int a = 0; a < dims; ++a) {
            bucket_dims_[a] = static_cast<std::int64_t>(std::floor((hi[a] - bucket_lo_[a]) / bucket_size_)) + 1;
        }
        buckets_.resize(static_cast<std::size_t>(bucket_dims_[0] * bucket_dims_[1] * bucket_dims_[2]));
        for (std::size_t i = 0; i < space.size(); ++i) {
            std::array<std::int64_t, 3> cell{};
            buckets_[bucket_of(space.coordinate(i), cell)].push_back(i);
        }
    }
}

std::size_t BallQuery::bucket_of(const Point& p, std::array<std::int64_t, 3>& cell) const {
    cell = {0, 0, 0};
    for (int a = 0; a < space_->coordinate_dims(); ++a) {
        cell[a] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((p[a] - bucket_lo_[a]) / bucket_size_)), 0,
                                           bucket_dims_[a] - 1);
    }
    return static_cast<std::size_t>(cell[0] + bucket_dims_[0] * (cell[1] + bucket_dims_[1] * cell[2]));
}

std::vector<std::size_t> BallQuery::members(std::size_t i) const {
    std::vector<std::size_t> out;
    for_each(i, [&](std::size_t j, double) { out.push_back(j); });
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- tables

void write_table(std::ostream& out, const SampledSpace& space, std::span<const TableColumn> columns) {
    for (const TableColumn& c : columns) {
        if (c.values.size() != space.size()) fail(ErrorCode::InvalidArgument, "column '" + c.name + "' has wrong length");
    }
    out << "# mmsgeo-table kind=" << to_string(space.kind()) << " dims=" << space.coordinate_dims()
        << " h=" << csv::format_number(space.resolution()) << " length_space=" << (space.is_length_space() ? 1 : 0)
        << '\n';
    std::vector<std::string> header{"index"};
    for (int a = 0; a < space.coordinate_dims(); ++a) header.push_back("x" + std::to_string(a));
    header.emplace_back("weight");
    for (const TableColumn& c : columns) header.push_back(c.name);
    csv::write_row(out, header);
    std::vector<std::string> row;
    for (std::size_t i = 0; i < space.size(); ++i) {
        row.clear();
        row.push_back(std::to_string(i));
        for (int a = 0; a < space.coordinate_dims(); ++a) row.push_back(csv::format_number(space.coordinate(i)[a]));
        row.push_back(csv::format_number(space.weight(i)));
        for (const TableColumn& c : columns) row.push_back(csv::format_number(c.values[i]));
        csv::write_row(out, row);
    }
}

std::string table_string(const SampledSpace& space, std::span<const TableColumn> columns) {
    std::ostringstream os;
    write_table(os, space, columns);
    return os.str();
}

ImportedTable read_table(std::istream& in) {
    std::string line;
    std::map<std::string, std::string> meta;
    std::vector<std::string> header;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tok;
            while (ls >> tok) {
                const auto eq = tok.find('=');
                if (eq != std::string::npos) meta[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            continue;
        }
        header = csv::split_row(line);
        break;
    }
    if (header.empty()) fail(ErrorCode::InvalidArgument, "table has no header line");
    std::vector<int> coord_cols;
    int weight_col = -1;
    std::vector<std::pair<int, std::string>> extra;
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
        const std::string& name = header[static_cast<std::size_t>(c)];
        if (name == "index") continue;
        if (name.size() == 2 && name[0] == 'x' && name[1] >= '0' && name[1] <= '2') {
            coord_cols.push_back(c);
        } else if (name == "weight") {
            weight_col = c;
        } else {
            extra.emplace_back(c, name);
        }
    }
    if (coord_cols.empty()) fail(ErrorCode::InvalidArgument, "table import needs coordinate columns x0..");
    if (weight_col < 0) fail(ErrorCode::InvalidArgument, "table import needs a weight column");
    std::vector<Point> coords;
    std::vector<double> weights;
    std::vector<TableColumn> columns;
    for (const auto& [c, name] : extra) columns.push_back({name, {}});
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = csv::split_row(line);
        if (cells.size() != header.size()) {
            fail(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": wrong number of columns");
        }
        auto num = [&](int c) {
            const std::string& s = cells[static_cast<std::size_t>(c)];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                fail(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
            }
            return v;
        };
        Point p{0.0, 0.0, 0.0};
        for (std::size_t a = 0; a < coord_cols.size(); ++a) p[a] = num(coord_cols[a]);
        coords.push_back(p);
        weights.push_back(num(weight_col));
        for (std::size_t e = 0; e < extra.size(); ++e) columns[e].values.push_back(num(extra[e].first));
    }
    double h = 0.0;
    if (auto it = meta.find("h"); it != meta.end()) h = std::stod(it->second);
    const int dims = static_cast<int>(coord_cols.size());
    if (!(h > 0.0)) {
        // Half the largest nearest-neighbour distance.
        SampledSpace probe = build_point_cloud(coords, dims, weights, 1.0);
        for (std::size_t i = 0; i < probe.size(); ++i) {
            double nn = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < probe.size(); ++j)
                if (j != i) nn = std::min(nn, probe.distance(i, j));
            if (std::isfinite(nn)) h = std::max(h, 0.5 * nn);
        }
        if (!(h > 0.0)) h = 1.0;
    }
    ImportedTable t{build_point_cloud(std::move(coords), dims, std::move(weights), h), std::move(columns)};
    return t;
}

}  // namespace mmsgeo
