#include "mmsgeo/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace mmsgeo::app {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

[[noreturn]] void config_error(const std::string& source, const YAML::Mark& mark, const std::string& msg) {
    std::ostringstream os;
    os << source;
    if (mark.line >= 0) os << ":" << mark.line + 1 << ":" << mark.column + 1;
    os << ": " << msg;
    throw Error(ErrorCode::Config, os.str());
}

// A YAML mapping whose keys are checked against an allow-list.
class Map {
public:
    Map(YAML::Node node, std::string path, const std::string& source) : node_(std::move(node)), path_(std::move(path)), source_(&source) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) error(node_, "'" + path_ + "' must be a mapping");
    }

    void allow(std::initializer_list<const char*> keys) const {
        if (!node_ || !node_.IsMap()) return;
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& kv : node_) {
            const std::string k = kv.first.as<std::string>();
            if (!ok.count(k)) error(kv.first, "unknown key '" + k + "' in '" + path_ + "'");
        }
    }

    bool has(const char* key) const { return node_ && node_.IsMap() && node_[key]; }
    YAML::Node at(const char* key) const { return node_[key]; }
    std::string path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
    const std::string& source() const { return *source_; }
    const YAML::Node& node() const { return node_; }

    [[noreturn]] void error(const YAML::Node& n, const std::string& msg) const { config_error(*source_, n.Mark(), msg); }

    template <class T>
    T get(const char* key, T fallback) const {
        if (!has(key)) return fallback;
        return convert<T>(node_[key], path(key));
    }

    template <class T>
    T convert(const YAML::Node& n, const std::string& what) const {
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            error(n, "bad value for '" + what + "'");
        }
    }

    double positive(const char* key, double fallback) const {
        const double v = get<double>(key, fallback);
        if (has(key) && !(v > 0.0 && std::isfinite(v))) error(at(key), "'" + path(key) + "' must be positive");
        return v;
    }

    double nonnegative(const char* key, double fallback) const {
        const double v = get<double>(key, fallback);
        if (has(key) && !(v >= 0.0 && std::isfinite(v))) error(at(key), "'" + path(key) + "' must be >= 0");
        return v;
    }

    int positive_int(const char* key, int fallback) const {
        const int v = get<int>(key, fallback);
        if (has(key) && v <= 0) error(at(key), "'" + path(key) + "' must be a positive integer");
        return v;
    }

    // Fraction in [0, 1].
    double fraction(const char* key, double fallback) const {
        const double v = get<double>(key, fallback);
        if (has(key) && !(v >= 0.0 && v <= 1.0)) error(at(key), "'" + path(key) + "' must lie in [0, 1]");
        return v;
    }

    std::vector<double> doubles(const char* key, std::vector<double> fallback, bool nonempty = false) const {
        if (!has(key)) return fallback;
        const YAML::Node n = node_[key];
        if (!n.IsSequence()) error(n, "'" + path(key) + "' must be a list");
        std::vector<double> out;
        for (const auto& e : n) out.push_back(convert<double>(e, path(key)));
        if (nonempty && out.empty()) error(n, "'" + path(key) + "' must not be empty");
        return out;
    }

    std::vector<std::vector<double>> rows(const char* key) const {
        std::vector<std::vector<double>> out;
        if (!has(key)) return out;
        const YAML::Node n = node_[key];
        if (!n.IsSequence()) error(n, "'" + path(key) + "' must be a list of lists");
        for (const auto& row : n) {
            if (!row.IsSequence()) error(row, "'" + path(key) + "' must be a list of lists");
            std::vector<double> r;
            for (const auto& e : row) r.push_back(convert<double>(e, path(key)));
            out.push_back(std::move(r));
        }
        return out;
    }

    Map sub(const char* key) const { return Map(has(key) ? node_[key] : YAML::Node(), path(key), *source_); }

private:
    YAML::Node node_;
    std::string path_;
    const std::string* source_;
};

std::map<std::uint64_t, std::vector<TableColumn>>& table_columns() {
    static std::map<std::uint64_t, std::vector<TableColumn>> m;
    return m;
}
std::mutex& table_mutex() {
    static std::mutex m;
    return m;
}

SpaceSpec parse_space(const Map& m) {
    SpaceSpec s;
    s.kind = m.get<std::string>("kind", "grid");
    if (s.kind == "grid") {
        m.allow({"kind", "dims", "n", "box", "density"});
        s.dims = m.get<int>("dims", 2);
        if (s.dims < 1 || s.dims > 3) m.error(m.at("dims"), "'" + m.path("dims") + "' must be 1, 2 or 3");
        s.n = m.positive_int("n", 128);
        if (m.has("box")) {
            const YAML::Node b = m.at("box");
            if (!b.IsSequence() || b.size() == 0) m.error(b, "'" + m.path("box") + "' must be [lo, hi] or a list of them");
            if (b[0].IsScalar()) {
                if (b.size() != 2) m.error(b, "'" + m.path("box") + "' must be [lo, hi]");
                const double lo = m.convert<double>(b[0], m.path("box")), hi = m.convert<double>(b[1], m.path("box"));
                s.box.assign(static_cast<std::size_t>(s.dims), {lo, hi});
            } else {
                for (const auto& r : m.rows("box")) {
                    if (r.size() != 2) m.error(b, "'" + m.path("box") + "' entries must be [lo, hi]");
                    s.box.emplace_back(r[0], r[1]);
                }
                if (s.box.size() != static_cast<std::size_t>(s.dims)) m.error(b, "'" + m.path("box") + "' needs one extent per axis");
            }
            for (const auto& [lo, hi] : s.box)
                if (!(hi > lo)) m.error(b, "'" + m.path("box") + "' is degenerate");
        }
        s.density = m.get<std::string>("density", "unit");
        try {
            (void)Density::parse(s.density);
        } catch (const Error& e) {
            m.error(m.at("density"), e.what());
        }
    } else if (s.kind == "fat_cantor") {
        m.allow({"kind", "n", "depth", "k_mass"});
        s.n = m.positive_int("n", 4001);
        s.depth = m.positive_int("depth", 6);
        s.k_mass = m.get<double>("k_mass", 0.5);
        if (!(s.k_mass > 0.0 && s.k_mass < 1.0)) m.error(m.at("k_mass"), "'" + m.path("k_mass") + "' must lie in (0, 1)");
    } else if (s.kind == "circle") {
        m.allow({"kind", "n", "circumference"});
        s.n = m.positive_int("n", 1000);
        s.circumference = m.positive("circumference", s.circumference);
    } else if (s.kind == "explicit") {
        m.allow({"kind", "matrix", "line", "weights"});
        if (m.has("matrix") == m.has("line")) m.error(m.node(), "'" + m.path("kind") + "' explicit needs exactly one of matrix or line");
        for (const auto& r : m.rows("matrix")) s.matrix.insert(s.matrix.end(), r.begin(), r.end());
        s.line = m.doubles("line", {});
        s.weights = m.doubles("weights", {});
    } else if (s.kind == "graph") {
        m.allow({"kind", "nodes", "edges", "weights"});
        s.nodes = static_cast<std::size_t>(m.positive_int("nodes", 1));
        for (const auto& r : m.rows("edges")) {
            if (r.size() != 3) m.error(m.at("edges"), "'" + m.path("edges") + "' entries must be [a, b, length]");
            s.edges.push_back({static_cast<std::size_t>(r[0]), static_cast<std::size_t>(r[1]), r[2]});
        }
        s.weights = m.doubles("weights", {});
    } else if (s.kind == "point_cloud") {
        m.allow({"kind", "points", "weights", "resolution"});
        for (const auto& r : m.rows("points")) {
            if (r.empty() || r.size() > 3) m.error(m.at("points"), "'" + m.path("points") + "' entries need 1 to 3 coordinates");
            if (s.point_dims == 0) s.point_dims = static_cast<int>(r.size());
            if (static_cast<int>(r.size()) != s.point_dims) m.error(m.at("points"), "'" + m.path("points") + "' mixes dimensions");
            Point p{0, 0, 0};
            std::copy(r.begin(), r.end(), p.begin());
            s.points.push_back(p);
        }
        if (s.points.empty()) m.error(m.node(), "'" + m.path("points") + "' is required");
        s.weights = m.doubles("weights", {});
        s.resolution = m.positive("resolution", 0.0);
        if (!m.has("resolution")) m.error(m.node(), "'" + m.path("resolution") + "' is required");
    } else if (s.kind == "table") {
        m.allow({"kind", "path"});
        s.path = m.get<std::string>("path", "");
        if (s.path.empty()) m.error(m.node(), "'" + m.path("path") + "' is required");
    } else if (s.kind == "three_point") {
        m.allow({"kind"});
    } else {
        m.error(m.has("kind") ? m.at("kind") : m.node(), "unknown space kind '" + s.kind + "'");
    }
    return s;
}

SetSpec parse_set(const Map& m) {
    SetSpec s;
    s.shape = m.get<std::string>("shape", "all");
    s.complement = m.get<bool>("complement", false);
    if (s.shape == "all" || s.shape == "empty" || s.shape == "cantor") {
        m.allow({"shape", "complement"});
    } else if (s.shape == "ball") {
        m.allow({"shape", "complement", "center", "radius", "open"});
        s.center = m.doubles("center", {}, true);
        s.radius = m.positive("radius", 1.0);
        s.open = m.get<bool>("open", false);
    } else if (s.shape == "metric_ball") {
        m.allow({"shape", "complement", "center_index", "radius", "open"});
        s.center_index = m.get<std::size_t>("center_index", 0);
        s.radius = m.nonnegative("radius", 1.0);
        s.open = m.get<bool>("open", false);
    } else if (s.shape == "box") {
        m.allow({"shape", "complement", "lo", "hi"});
        s.lo = m.doubles("lo", {}, true);
        s.hi = m.doubles("hi", {}, true);
        if (s.lo.size() != s.hi.size()) m.error(m.node(), "'" + m.path("lo") + "' and 'hi' differ in length");
    } else if (s.shape == "segment") {
        m.allow({"shape", "complement", "from", "to"});
        s.from = m.doubles("from", {}, true);
        s.to = m.doubles("to", {}, true);
        if (s.from.size() != s.to.size()) m.error(m.node(), "'" + m.path("from") + "' and 'to' differ in length");
    } else if (s.shape == "point") {
        m.allow({"shape", "complement", "center"});
        s.center = m.doubles("center", {}, true);
    } else if (s.shape == "points") {
        m.allow({"shape", "complement", "points"});
        s.points = m.rows("points");
        if (s.points.empty()) m.error(m.node(), "'" + m.path("points") + "' is required");
    } else if (s.shape == "indices") {
        m.allow({"shape", "complement", "indices"});
        if (!m.has("indices") || !m.at("indices").IsSequence()) m.error(m.node(), "'" + m.path("indices") + "' must be a list");
        for (const auto& e : m.at("indices")) s.indices.push_back(m.convert<std::size_t>(e, m.path("indices")));
    } else if (s.shape == "inverse_sequence") {
        m.allow({"shape", "complement", "terms"});
        s.terms = m.positive_int("terms", 1000);
    } else if (s.shape == "halfspace") {
        m.allow({"shape", "complement", "normal", "offset"});
        s.normal = m.doubles("normal", {}, true);
        s.offset = m.get<double>("offset", 0.0);
    } else if (s.shape == "column") {
        m.allow({"shape", "complement", "index"});
        s.center_index = m.get<std::size_t>("index", 0);
    } else {
        m.error(m.has("shape") ? m.at("shape") : m.node(), "unknown set shape '" + s.shape + "'");
    }
    return s;
}

FieldSpec parse_field(const Map& m) {
    FieldSpec f;
    f.kind = m.get<std::string>("kind", "cone");
    if (f.kind == "cone") {
        m.allow({"kind", "center", "radius", "height"});
        f.center = m.doubles("center", {}, false);
        f.radius = m.positive("radius", 1.0);
        f.height = m.get<double>("height", 1.0);
    } else if (f.kind == "linear") {
        m.allow({"kind", "coeffs", "offset"});
        f.coeffs = m.doubles("coeffs", {}, true);
        f.offset = m.get<double>("offset", 0.0);
    } else if (f.kind == "coordinate") {
        m.allow({"kind", "axis"});
        f.axis = m.get<int>("axis", 0);
        if (f.axis < 0 || f.axis > 2) m.error(m.at("axis"), "'" + m.path("axis") + "' must be 0, 1 or 2");
    } else if (f.kind == "distance" || f.kind == "indicator") {
        m.allow({"kind", "set"});
        if (!m.has("set")) m.error(m.node(), "'" + m.path("set") + "' is required");
        f.set = std::make_shared<SetSpec>(parse_set(m.sub("set")));
    } else if (f.kind == "constant") {
        m.allow({"kind", "value"});
        f.value = m.get<double>("value", 0.0);
    } else if (f.kind == "column") {
        m.allow({"kind", "index"});
        f.axis = m.get<int>("index", 0);
    } else {
        m.error(m.has("kind") ? m.at("kind") : m.node(), "unknown field kind '" + f.kind + "'");
    }
    return f;
}

Expect parse_expect(const Map& parent) {
    Expect e;
    if (!parent.has("expect")) return e;
    const Map m = parent.sub("expect");
    m.allow({"value", "tolerance"});
    if (!m.has("value")) m.error(m.node(), "'" + m.path("value") + "' is required");
    e.enabled = true;
    e.value = m.get<double>("value", 0.0);
    e.tolerance = m.positive("tolerance", e.tolerance);
    return e;
}

SlopeOptions parse_slope(const Map& parent, SlopeOptions s = {}) {
    if (!parent.has("slope")) return s;
    const Map m = parent.sub("slope");
    m.allow({"estimator", "scale"});
    if (m.has("estimator")) {
        try {
            s.estimator = parse_slope_estimator(m.get<std::string>("estimator", "auto"));
        } catch (const Error& e) {
            m.error(m.at("estimator"), e.what());
        }
    }
    s.scale = m.positive("scale", s.scale);
    return s;
}

void parse_window(const Map& m, Window& w) {
    w.r_min = m.positive("r_min", w.r_min);
    w.r_max = m.positive("r_max", w.r_max);
    if ((w.r_min > 0.0) != (w.r_max > 0.0)) m.error(m.node(), "'" + m.path("r_min") + "' and 'r_max' go together");
    if (w.r_min > 0.0 && !(w.r_max > w.r_min)) m.error(m.at("r_max"), "'" + m.path("r_max") + "' must exceed r_min");
}

void parse_content(const Map& m, ContentParams& c) {
    c.floor_factor = m.positive("floor_factor", c.floor_factor);
    c.ratio = m.get<double>("ratio", c.ratio);
    if (m.has("ratio") && !(c.ratio > 1.0)) m.error(m.at("ratio"), "'" + m.path("ratio") + "' must exceed 1");
    c.min_points = m.positive_int("min_points", c.min_points);
    c.divergence_exponent = m.get<double>("divergence_exponent", c.divergence_exponent);
}

void parse_perimeter_params(const Map& m, PerimeterParams& p) {
    p.slope = parse_slope(m, p.slope);
    p.l1_budget = m.positive("l1_budget", p.l1_budget);
    p.l1_budget_h = m.positive("l1_budget_h", p.l1_budget_h);
    p.r_max = m.positive("r_max", p.r_max);
    p.cross_check = m.get<bool>("cross_check", p.cross_check);
}

void parse_gauge(const Map& m, GaugeParams& g) {
    g.exact_limit = static_cast<std::size_t>(m.get<int>("exact_limit", static_cast<int>(g.exact_limit)));
    g.min_radius_h = m.positive("min_radius_h", g.min_radius_h);
    g.radius_ratio = m.get<double>("radius_ratio", g.radius_ratio);
    if (m.has("radius_ratio") && !(g.radius_ratio > 1.0)) m.error(m.at("radius_ratio"), "'" + m.path("radius_ratio") + "' must exceed 1");
    g.snap_to_grid = m.get<bool>("snap_to_grid", g.snap_to_grid);
}

void parse_tasks(const Map& root, Config& c) {
    if (root.has("minkowski")) {
        const Map m = root.sub("minkowski");
        m.allow({"r_min", "r_max", "ratio", "min_points", "floor_factor", "divergence_exponent", "kinds", "l1_budget",
                 "mean_value", "subdivisions", "inclusion_s", "inclusion_t", "expect"});
        auto& t = c.minkowski;
        parse_window(m, t.window);
        parse_content(m, t.content);
        if (m.has("kinds")) {
            t.kinds.clear();
            const YAML::Node k = m.at("kinds");
            if (!k.IsSequence() || k.size() == 0) m.error(k, "'" + m.path("kinds") + "' must be a nonempty list");
            for (const auto& e : k) {
                const std::string s = m.convert<std::string>(e, m.path("kinds"));
                if (s == "lower") t.kinds.push_back(ContentKind::Lower);
                else if (s == "upper") t.kinds.push_back(ContentKind::Upper);
                else if (s == "relaxed") t.kinds.push_back(ContentKind::Relaxed);
                else m.error(e, "unknown content kind '" + s + "'");
            }
        }
        t.l1_budget = m.positive("l1_budget", t.l1_budget);
        t.mean_value = m.get<bool>("mean_value", t.mean_value);
        t.subdivisions = m.positive_int("subdivisions", t.subdivisions);
        t.inclusion_s = m.positive("inclusion_s", t.inclusion_s);
        t.inclusion_t = m.positive("inclusion_t", t.inclusion_t);
        t.expect = parse_expect(m);
    }
    if (root.has("perimeter")) {
        const Map m = root.sub("perimeter");
        m.allow({"slope", "l1_budget", "l1_budget_h", "r_max", "cross_check", "expect"});
        parse_perimeter_params(m, c.perimeter.params);
        c.perimeter.expect = parse_expect(m);
    }
    if (root.has("coarea")) {
        const Map m = root.sub("coarea");
        m.allow({"t_points", "atom_threshold", "slope", "with_perimeter", "perimeter", "tolerance", "slope_tolerance",
                 "unit_fraction", "fail_fraction", "r_min", "r_max", "expect"});
        auto& p = c.coarea.params;
        p.levels.t_points = m.positive_int("t_points", p.levels.t_points);
        p.levels.atom_threshold = m.nonnegative("atom_threshold", p.levels.atom_threshold);
        parse_window(m, p.levels.window);
        p.slope = parse_slope(m, p.slope);
        p.with_perimeter = m.get<bool>("with_perimeter", p.with_perimeter);
        if (m.has("perimeter")) {
            const Map pm = m.sub("perimeter");
            pm.allow({"slope", "l1_budget", "l1_budget_h", "r_max", "cross_check"});
            parse_perimeter_params(pm, p.perimeter);
        }
        p.tolerance = m.positive("tolerance", p.tolerance);
        p.slope_tolerance = m.positive("slope_tolerance", p.slope_tolerance);
        p.unit_fraction = m.fraction("unit_fraction", p.unit_fraction);
        p.fail_fraction = m.fraction("fail_fraction", p.fail_fraction);
        c.coarea.expect = parse_expect(m);
    }
    if (root.has("distance-levels")) {
        const Map m = root.sub("distance-levels");
        m.allow({"t", "tolerance", "fail_fraction", "atom_threshold", "r_min", "r_max", "expected_per_t", "perimeter"});
        auto& t = c.distance_levels;
        t.t = m.doubles("t", t.t, true);
        t.params.tolerance = m.positive("tolerance", t.params.tolerance);
        t.params.fail_fraction = m.fraction("fail_fraction", t.params.fail_fraction);
        t.params.atom_threshold = m.nonnegative("atom_threshold", t.params.atom_threshold);
        parse_window(m, t.params.window);
        t.expected_per_t = m.positive("expected_per_t", t.expected_per_t);
        if (m.has("perimeter")) {
            const Map pm = m.sub("perimeter");
            pm.allow({"slope", "l1_budget", "l1_budget_h", "r_max", "cross_check"});
            parse_perimeter_params(pm, t.params.perimeter);
        }
    }
    if (root.has("hausdorff")) {
        const Map m = root.sub("hausdorff");
        m.allow({"delta", "delta_max", "delta_ratio", "resolved_h", "exact_limit", "min_radius_h", "radius_ratio",
                 "snap_to_grid", "expect", "inequalities", "corollary"});
        auto& t = c.hausdorff;
        t.delta = m.positive("delta", t.delta);
        t.params.delta_max = m.positive("delta_max", t.params.delta_max);
        t.params.delta_ratio = m.get<double>("delta_ratio", t.params.delta_ratio);
        if (m.has("delta_ratio") && !(t.params.delta_ratio > 1.0)) m.error(m.at("delta_ratio"), "'" + m.path("delta_ratio") + "' must exceed 1");
        t.params.resolved_h = m.positive("resolved_h", t.params.resolved_h);
        parse_gauge(m, t.params.gauge);
        t.expect = parse_expect(m);
        if (m.has("inequalities")) {
            const Map q = m.sub("inequalities");
            q.allow({"t", "delta", "tolerance", "slope_scale", "t_points", "set"});
            t.inequalities = true;
            if (q.has("set")) t.inequality_set = parse_set(q.sub("set"));
            t.inequality_t = q.doubles("t", {}, false);
            t.inequality_delta = q.positive("delta", t.inequality_delta);
            t.inequality.gauge = t.params.gauge;
            t.inequality.tolerance = q.positive("tolerance", t.inequality.tolerance);
            t.inequality.slope_scale = q.positive("slope_scale", t.inequality.slope_scale);
            t.inequality.t_points = q.positive_int("t_points", t.inequality.t_points);
        }
        if (m.has("corollary")) {
            const Map q = m.sub("corollary");
            q.allow({"t", "delta", "proxy_h", "tolerance", "fail_fraction"});
            t.corollary = true;
            t.corollary_t = q.doubles("t", {}, true);
            auto& p = t.corollary_params;
            p.gauge = t.params.gauge;
            p.delta = q.positive("delta", p.delta);
            p.proxy_h = q.positive("proxy_h", p.proxy_h);
            p.tolerance = q.positive("tolerance", p.tolerance);
            p.fail_fraction = q.fraction("fail_fraction", p.fail_fraction);
        }
    }
    if (root.has("cheeger")) {
        const Map m = root.sub("cheeger");
        m.allow({"family", "radii", "max_centers", "levels", "seeds", "exhaustive_limit", "fields", "sets",
                 "definition", "tolerance", "min_points", "expect"});
        auto& t = c.cheeger;
        if (m.has("family")) {
            try {
                t.family.kind = parse_family_kind(m.get<std::string>("family", "ball_sweep"));
            } catch (const Error& e) {
                m.error(m.at("family"), e.what());
            }
        }
        t.family.radii = m.positive_int("radii", t.family.radii);
        t.family.max_centers = static_cast<std::size_t>(m.positive_int("max_centers", static_cast<int>(t.family.max_centers)));
        t.family.levels = m.positive_int("levels", t.family.levels);
        t.family.seeds = m.positive_int("seeds", t.family.seeds);
        t.family.exhaustive_limit = static_cast<std::size_t>(m.positive_int("exhaustive_limit", static_cast<int>(t.family.exhaustive_limit)));
        for (const char* key : {"fields", "sets"}) {
            if (!m.has(key)) continue;
            const YAML::Node list = m.at(key);
            if (!list.IsSequence()) m.error(list, "'" + m.path(key) + "' must be a list");
            for (std::size_t i = 0; i < list.size(); ++i) {
                const Map e(list[i], m.path(key) + "[" + std::to_string(i) + "]", m.source());
                if (std::string(key) == "fields") t.fields.push_back(parse_field(e));
                else t.sets.push_back(parse_set(e));
            }
        }
        t.definition = m.get<std::string>("definition", t.definition);
        if (t.definition != "all") {
            try {
                (void)parse_boundary_definition(t.definition);
            } catch (const Error& e) {
                m.error(m.at("definition"), e.what());
            }
        }
        t.params.tolerance = m.positive("tolerance", t.params.tolerance);
        t.params.cheeger.content.min_points = m.positive_int("min_points", t.params.cheeger.content.min_points);
        t.expect = parse_expect(m);
    }
    if (root.has("eq13-gap")) {
        const Map m = root.sub("eq13-gap");
        m.allow({"slope", "scale", "achieved_tol", "reference_tol", "l1_limit"});
        auto& p = c.eq13.params;
        p.slope = parse_slope(m, p.slope);
        p.scale = m.positive("scale", p.scale);
        p.achieved_tol = m.positive("achieved_tol", p.achieved_tol);
        p.reference_tol = m.positive("reference_tol", p.reference_tol);
        p.l1_limit = m.positive("l1_limit", p.l1_limit);
    }
    if (root.has("verify")) {
        const Map m = root.sub("verify");
        m.allow({"level"});
        c.verify.level = m.get<std::string>("level", "quick");
        if (c.verify.level != "quick" && c.verify.level != "full") m.error(m.at("level"), "'" + m.path("level") + "' must be quick or full");
    }
    if (root.has("repro")) {
        const Map m = root.sub("repro");
        m.allow({"suite", "suites"});
        if (m.has("suite")) c.repro.suites = {m.get<std::string>("suite", "all")};
        if (m.has("suites")) {
            c.repro.suites.clear();
            for (const auto& e : m.at("suites")) c.repro.suites.push_back(m.convert<std::string>(e, m.path("suites")));
            if (c.repro.suites.empty()) m.error(m.at("suites"), "'" + m.path("suites") + "' must not be empty");
        }
    }
}

std::size_t containing_cell(const GridMetric& g, std::span<const double> x) {
    std::array<std::int64_t, 3> k{0, 0, 0};
    for (int a = 0; a < g.dims; ++a) {
        const double v = a < static_cast<int>(x.size()) ? x[static_cast<std::size_t>(a)] : 0.0;
        const auto c = static_cast<std::int64_t>(std::floor((v - g.lo[a]) / g.spacing[a]));
        k[a] = std::clamp<std::int64_t>(c, 0, g.n[a] - 1);
    }
    return g.ravel(k);
}

std::size_t nearest_sample(const SampledSpace& space, std::span<const double> x) {
    if (const GridMetric* g = space.grid()) return containing_cell(*g, x);
    if (!space.has_coordinates()) fail(ErrorCode::WrongSpaceKind, "space has no coordinates; use indices or metric_ball");
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < space.size(); ++i) {
        double d = 0.0;
        for (int a = 0; a < space.coordinate_dims(); ++a) {
            const double v = a < static_cast<int>(x.size()) ? x[static_cast<std::size_t>(a)] : 0.0;
            d += (space.coordinate(i)[a] - v) * (space.coordinate(i)[a] - v);
        }
        if (d < bd) bd = d, best = i;
    }
    return best;
}

double euclid(const Point& p, std::span<const double> c, int dims) {
    double s = 0.0;
    for (int a = 0; a < dims; ++a) {
        const double v = a < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(a)] : 0.0;
        s += (p[a] - v) * (p[a] - v);
    }
    return std::sqrt(s);
}

const std::vector<TableColumn>& columns_of(const SampledSpace& space) {
    std::lock_guard<std::mutex> lock(table_mutex());
    auto it = table_columns().find(space.id());
    if (it == table_columns().end()) fail(ErrorCode::WrongSpaceKind, "column sets and fields need a table space");
    return it->second;
}

}  // namespace

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"minkowski", "perimeter", "coarea", "distance-levels", "hausdorff",
                                                "cheeger",   "eq13-gap",  "verify", "repro"};
    return names;
}

std::string SpaceSpec::describe() const {
    std::ostringstream os;
    os << kind;
    if (kind == "grid") os << " dims=" << dims << " n=" << n << " density=" << density;
    if (kind == "fat_cantor") os << " n=" << n << " depth=" << depth << " k_mass=" << k_mass;
    if (kind == "circle") os << " n=" << n << " circumference=" << circumference;
    if (kind == "table") os << " path=" << path;
    return os.str();
}

Config parse_config(const std::string& text, const std::string& source) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        config_error(source, e.mark, e.msg);
    }
    Config c;
    c.source = source;
    c.text = text;
    if (!doc || doc.IsNull()) config_error(source, doc.Mark(), "empty config");
    const Map root(doc, "", source);
    root.allow({"task", "seed", "output", "space", "set", "field", "minkowski", "perimeter", "coarea",
                "distance-levels", "hausdorff", "cheeger", "eq13-gap", "verify", "repro"});
    c.task = root.get<std::string>("task", "");
    if (!c.task.empty() && std::find(task_names().begin(), task_names().end(), c.task) == task_names().end()) {
        root.error(root.at("task"), "unknown task '" + c.task + "'");
    }
    c.seed = root.get<std::uint64_t>("seed", 1);
    c.output = root.get<std::string>("output", "");
    if (root.has("space")) c.space = parse_space(root.sub("space"));
    if (root.has("set")) c.set = parse_set(root.sub("set"));
    if (root.has("field")) c.field = parse_field(root.sub("field"));
    parse_tasks(root, c);
    c.cheeger.family.seed = c.seed;
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, path + ": cannot open config file");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), path);
}

std::vector<std::string> space_presets() {
    return {"three_point", "interval", "square", "disk512", "plane256", "circle", "fat_cantor", "cube", "cycle_graph"};
}

SpaceSpec parse_space_argument(const std::string& arg) {
    const std::string source = "--space";
    std::string yaml;
    if (arg == "three_point") yaml = "{kind: three_point}";
    else if (arg == "interval") yaml = "{kind: grid, dims: 1, n: 1001, box: [0, 1]}";
    else if (arg == "square") yaml = "{kind: grid, dims: 2, n: 128, box: [0, 1]}";
    else if (arg == "disk512") yaml = "{kind: grid, dims: 2, n: 512, box: [-2, 2]}";
    else if (arg == "plane256") yaml = "{kind: grid, dims: 2, n: 256, box: [-2, 2]}";
    else if (arg == "circle") yaml = "{kind: circle, n: 1000}";
    else if (arg == "fat_cantor") yaml = "{kind: fat_cantor, n: 4001, depth: 6, k_mass: 0.5}";
    else if (arg == "cube") yaml = "{kind: grid, dims: 3, n: 32, box: [0, 1]}";
    else if (arg == "cycle_graph")
        yaml = "{kind: graph, nodes: 6, edges: [[0,1,1],[1,2,1],[2,3,1],[3,4,1],[4,5,1],[5,0,1]]}";
    else if (std::filesystem::is_regular_file(arg)) {
        std::ifstream in(arg);
        std::ostringstream os;
        os << in.rdbuf();
        YAML::Node doc;
        try {
            doc = YAML::Load(os.str());
        } catch (const YAML::ParserException& e) {
            config_error(arg, e.mark, e.msg);
        }
        if (doc.IsMap() && doc["space"]) {
            const Config c = parse_config(os.str(), arg);
            return *c.space;
        }
        return parse_space(Map(doc, "space", arg));
    } else if (!arg.empty() && arg.front() == '{') {
        yaml = arg;
    } else {
        // kind:key=value,key=value; box=lo:hi or lo:hi;lo:hi
        const auto colon = arg.find(':');
        std::ostringstream os;
        os << "{kind: " << arg.substr(0, colon);
        if (colon != std::string::npos) {
            std::stringstream rest(arg.substr(colon + 1));
            std::string item;
            while (std::getline(rest, item, ',')) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) throw Error(ErrorCode::Config, source + ": expected key=value, got '" + item + "'");
                const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
                if (key == "box") {
                    os << ", box: [";
                    std::stringstream axes(value);
                    std::string ax;
                    bool first = true;
                    std::vector<std::string> parts;
                    while (std::getline(axes, ax, ';')) parts.push_back(ax);
                    for (const auto& p : parts) {
                        const auto c2 = p.find(':');
                        if (c2 == std::string::npos) throw Error(ErrorCode::Config, source + ": box wants lo:hi");
                        if (parts.size() == 1) os << p.substr(0, c2) << ", " << p.substr(c2 + 1);
                        else os << (first ? "" : ", ") << "[" << p.substr(0, c2) << ", " << p.substr(c2 + 1) << "]";
                        first = false;
                    }
                    os << "]";
                } else {
                    os << ", " << key << ": " << value;
                }
            }
        }
        os << "}";
        yaml = os.str();
    }
    YAML::Node doc;
    try {
        doc = YAML::Load(yaml);
    } catch (const YAML::ParserException& e) {
        config_error(source, e.mark, e.msg);
    }
    return parse_space(Map(doc, "space", source));
}

SampledSpace build_space(const SpaceSpec& s) {
    if (s.kind == "grid") {
        std::vector<std::pair<double, double>> box = s.box;
        if (box.empty()) box.assign(static_cast<std::size_t>(s.dims), {0.0, 1.0});
        return build_grid_box(s.dims, s.n, box, Density::parse(s.density));
    }
    if (s.kind == "fat_cantor") return build_fat_cantor_interval(s.n, s.depth, s.k_mass);
    if (s.kind == "circle") return build_circle(s.n, s.circumference);
    if (s.kind == "explicit" || s.kind == "three_point") {
        std::vector<double> line = s.kind == "three_point" ? std::vector<double>{0.0, 2.0, 3.0} : s.line;
        std::vector<double> matrix = s.matrix;
        if (!line.empty()) {
            matrix.clear();
            for (double a : line)
                for (double b : line) matrix.push_back(std::abs(a - b));
        }
        const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(matrix.size()))));
        if (n * n != matrix.size()) fail(ErrorCode::InvalidArgument, "explicit matrix is not square");
        std::vector<double> w = s.weights.empty() ? std::vector<double>(n, 1.0) : s.weights;
        return build_explicit(matrix, w);
    }
    if (s.kind == "graph") {
        std::vector<double> w = s.weights.empty() ? std::vector<double>(s.nodes, 1.0) : s.weights;
        return build_graph(s.nodes, s.edges, w);
    }
    if (s.kind == "point_cloud") {
        std::vector<double> w = s.weights.empty() ? std::vector<double>(s.points.size(), 1.0) : s.weights;
        return build_point_cloud(s.points, s.point_dims, std::move(w), s.resolution);
    }
    if (s.kind == "table") {
        std::ifstream in(s.path);
        if (!in) fail(ErrorCode::InvalidArgument, "cannot open table '" + s.path + "'");
        ImportedTable t = read_table(in);
        std::lock_guard<std::mutex> lock(table_mutex());
        table_columns()[t.space.id()] = t.columns;
        return std::move(t.space);
    }
    fail(ErrorCode::InvalidArgument, "unknown space kind '" + s.kind + "'");
}

SetIndicator build_set(const SampledSpace& space, const SetSpec& s) {
    SetIndicator out = SetIndicator::empty(space);
    const int dims = space.coordinate_dims();
    auto need_coords = [&] {
        if (!space.has_coordinates()) fail(ErrorCode::WrongSpaceKind, "set shape '" + s.shape + "' needs coordinates");
    };
    if (s.shape == "all") {
        out = SetIndicator::full(space);
    } else if (s.shape == "empty") {
    } else if (s.shape == "ball") {
        need_coords();
        for (std::size_t i = 0; i < space.size(); ++i) {
            const double d = euclid(space.coordinate(i), s.center, dims);
            out.marks[i] = s.open ? d < s.radius : d <= s.radius;
        }
    } else if (s.shape == "metric_ball") {
        if (s.center_index >= space.size()) fail(ErrorCode::InvalidArgument, "center_index out of range");
        for (std::size_t i = 0; i < space.size(); ++i) {
            const double d = space.distance(s.center_index, i);
            out.marks[i] = s.open ? d < s.radius : d <= s.radius;
        }
    } else if (s.shape == "box") {
        need_coords();
        for (std::size_t i = 0; i < space.size(); ++i) {
            bool in = true;
            for (std::size_t a = 0; a < s.lo.size() && a < 3; ++a) {
                const double v = space.coordinate(i)[a];
                in = in && v >= s.lo[a] && v <= s.hi[a];
            }
            out.marks[i] = in;
        }
    } else if (s.shape == "segment") {
        const GridMetric* g = space.grid();
        if (!g) fail(ErrorCode::WrongSpaceKind, "segment sets need a grid space");
        double len = 0.0;
        for (std::size_t a = 0; a < s.from.size(); ++a) len += (s.to[a] - s.from[a]) * (s.to[a] - s.from[a]);
        len = std::sqrt(len);
        double step = g->spacing[0];
        for (int a = 1; a < g->dims; ++a) step = std::min(step, g->spacing[a]);
        const auto steps = static_cast<std::size_t>(std::ceil(8.0 * len / step)) + 1;
        std::vector<double> x(s.from.size());
        for (std::size_t k = 0; k <= steps; ++k) {
            const double u = static_cast<double>(k) / static_cast<double>(steps);
            for (std::size_t a = 0; a < x.size(); ++a) x[a] = s.from[a] + u * (s.to[a] - s.from[a]);
            out.marks[containing_cell(*g, x)] = 1;
        }
    } else if (s.shape == "point") {
        out.marks[nearest_sample(space, s.center)] = 1;
    } else if (s.shape == "points") {
        for (const auto& p : s.points) out.marks[nearest_sample(space, p)] = 1;
    } else if (s.shape == "indices") {
        for (std::size_t i : s.indices) {
            if (i >= space.size()) fail(ErrorCode::InvalidArgument, "set index out of range");
            out.marks[i] = 1;
        }
    } else if (s.shape == "cantor") {
        if (!space.cantor_marks()) fail(ErrorCode::WrongSpaceKind, "cantor set needs a fat Cantor space");
        out.marks = *space.cantor_marks();
    } else if (s.shape == "inverse_sequence") {
        const GridMetric* g = space.grid();
        if (!g || g->dims != 1) fail(ErrorCode::WrongSpaceKind, "inverse_sequence needs a 1D grid");
        double zero = 0.0;
        out.marks[containing_cell(*g, std::span<const double>(&zero, 1))] = 1;
        for (int k = 1; k <= s.terms; ++k) {
            const double x = 1.0 / k;
            out.marks[containing_cell(*g, std::span<const double>(&x, 1))] = 1;
        }
    } else if (s.shape == "halfspace") {
        need_coords();
        for (std::size_t i = 0; i < space.size(); ++i) {
            double v = 0.0;
            for (std::size_t a = 0; a < s.normal.size() && a < 3; ++a) v += s.normal[a] * space.coordinate(i)[a];
            out.marks[i] = v <= s.offset;
        }
    } else if (s.shape == "column") {
        const auto& cols = columns_of(space);
        if (s.center_index >= cols.size()) fail(ErrorCode::InvalidArgument, "column index out of range");
        for (std::size_t i = 0; i < space.size(); ++i) out.marks[i] = cols[s.center_index].values[i] != 0.0;
    } else {
        fail(ErrorCode::InvalidArgument, "unknown set shape '" + s.shape + "'");
    }
    return s.complement ? out.complement() : out;
}

ScalarField build_field(const SampledSpace& space, const FieldSpec& f) {
    const int dims = space.coordinate_dims();
    if (f.kind == "cone") {
        if (!space.has_coordinates()) fail(ErrorCode::WrongSpaceKind, "cone field needs coordinates");
        return ScalarField::from_function(space, [&](const Point& p) {
            return f.height * std::max(0.0, 1.0 - euclid(p, f.center, dims) / f.radius);
        });
    }
    if (f.kind == "linear") {
        if (!space.has_coordinates()) fail(ErrorCode::WrongSpaceKind, "linear field needs coordinates");
        return ScalarField::from_function(space, [&](const Point& p) {
            double v = f.offset;
            for (std::size_t a = 0; a < f.coeffs.size() && a < 3; ++a) v += f.coeffs[a] * p[a];
            return v;
        });
    }
    if (f.kind == "coordinate") {
        if (!space.has_coordinates()) fail(ErrorCode::WrongSpaceKind, "coordinate field needs coordinates");
        return ScalarField::from_function(space, [&](const Point& p) { return p[static_cast<std::size_t>(f.axis)]; });
    }
    if (f.kind == "distance") return distance_to_set(space, build_set(space, *f.set));
    if (f.kind == "indicator") return ScalarField::indicator(build_set(space, *f.set));
    if (f.kind == "constant") return ScalarField::constant(space, f.value);
    if (f.kind == "column") {
        const auto& cols = columns_of(space);
        if (f.axis < 0 || static_cast<std::size_t>(f.axis) >= cols.size()) fail(ErrorCode::InvalidArgument, "column index out of range");
        return ScalarField{space.id(), cols[static_cast<std::size_t>(f.axis)].values};
    }
    fail(ErrorCode::InvalidArgument, "unknown field kind '" + f.kind + "'");
}

}  // namespace mmsgeo::app
