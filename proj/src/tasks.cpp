#include "mmsgeo/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "mmsgeo/csv.hpp"

namespace mmsgeo::app {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

constexpr double kPi = std::numbers::pi;

Window resolve(const SampledSpace& sp, const Window& w, const ContentParams& c) {
    return w.r_min > 0.0 ? w : default_window(sp, c);
}

Table named(Table t, std::string name) {
    t.name = std::move(name);
    return t;
}

std::string num(double v) { return csv::format_number(v); }

void expect_close(Report& rep, const std::string& name, double measured, const Expect& e) {
    if (!e.enabled) return;
    rep.check_close(name, "measured value matches the configured expectation", measured, e.value,
                    e.tolerance * std::abs(e.value));
}

// Relative closeness: |measured - target| <= rel * |target|.
Verdict& close_rel(Report& rep, const std::string& name, const std::string& anchor, double measured, double target,
                   double rel) {
    return rep.check_close(name, anchor, measured, target, rel * std::abs(target));
}

const SampledSpace& need_space(const std::optional<SampledSpace>& sp) {
    if (!sp) fail(ErrorCode::Config, "this task needs a 'space' section");
    return *sp;
}

SetIndicator need_set(const SampledSpace& sp, const Config& cfg) {
    if (!cfg.set) fail(ErrorCode::Config, "task '" + cfg.task + "' needs a 'set' section");
    return build_set(sp, *cfg.set);
}

ScalarField field_or_default(const SampledSpace& sp, const Config& cfg, FieldSpec fallback) {
    return build_field(sp, cfg.field ? *cfg.field : fallback);
}

std::vector<std::pair<double, double>> square_box(int dims, double lo, double hi) {
    return std::vector<std::pair<double, double>>(static_cast<std::size_t>(dims), {lo, hi});
}

// ------------------------------------------------------------------ tasks

Report task_minkowski(const SampledSpace& sp, const SetIndicator& a, const MinkowskiTask& t) {
    Report rep;
    rep.title = "minkowski";
    const Window w = resolve(sp, t.window, t.content);
    const ScalarField d = distance_to_set(sp, a);
    const auto grid = geometric_grid(w, t.content.ratio);
    const Profile prof = profile(sp, a, grid, t.content.floor_factor);
    bool monotone = true;
    for (std::size_t i = 1; i < prof.masses.size(); ++i) monotone = monotone && prof.masses[i] >= prof.masses[i - 1];
    rep.check_true("profile_monotone", "r <= r' => m(A^r) <= m(A^r')", monotone);
    rep.tables.push_back(prof.table());
    rep.set_value("mass", measure(sp, a));
    rep.set_value("r_min", w.r_min);
    rep.set_value("r_max", w.r_max);

    std::map<ContentKind, ContentEstimate> est;
    for (ContentKind kind : t.kinds) {
        ContentEstimate e;
        if (kind == ContentKind::Relaxed) {
            RelaxedParams rp;
            rp.window = w;
            rp.content = t.content;
            rp.l1_budget = t.l1_budget;
            e = relaxed_content(sp, a, rp);
        } else {
            e = content_from_distance(sp, a, d, w, kind, t.content);
        }
        const std::string k = to_string(kind);
        rep.set_value(k + "_content", e.extrapolated);
        rep.set_value(k + "_band", e.band);
        rep.set_value(k + "_inf_quotient", e.inf_quotient);
        rep.set_value(k + "_sup_quotient", e.sup_quotient);
        rep.set_value(k + "_diverging", e.diverging ? 1.0 : 0.0);
        rep.set_value(k + "_growth_exponent", e.growth_exponent);
        if (e.diverging) rep.notes.push_back(k + " quotients diverge, growth exponent " + num(e.growth_exponent));
        expect_close(rep, k + "_expected", e.extrapolated, t.expect);
        rep.tables.push_back(e.table());
        est.emplace(kind, std::move(e));
    }
    auto has = [&](ContentKind k) { return est.count(k) > 0; };
    if (has(ContentKind::Lower) && has(ContentKind::Upper)) {
        const auto& lo = est.at(ContentKind::Lower);
        const auto& up = est.at(ContentKind::Upper);
        rep.check_le("lower_le_upper", "M_-(A) <= M^+(A)", lo.extrapolated, up.extrapolated, lo.band + up.band);
    }
    if (has(ContentKind::Lower) && has(ContentKind::Relaxed)) {
        const double lo = est.at(ContentKind::Lower).extrapolated;
        rep.check_le("relaxed_le_lower", "relaxed M_-(A) <= M_-(A)", est.at(ContentKind::Relaxed).extrapolated, lo,
                     1e-9 * std::max(1.0, std::abs(lo)));
    }
    const double h = sp.resolution();
    rep.merge(check_semigroup_inclusion(sp, a, t.inclusion_s > 0 ? t.inclusion_s : 2.0 * h,
                                        t.inclusion_t > 0 ? t.inclusion_t : 3.0 * h),
              "inclusion.");
    if (t.mean_value) rep.merge(check_mean_value_inequality(sp, a, w, t.subdivisions, t.content), "mean_value.");
    return rep;
}

Report task_perimeter(const SampledSpace& sp, const SetIndicator& a, const PerimeterTask& t) {
    Report rep;
    rep.title = "perimeter";
    const PerimeterEstimate est = perimeter(sp, a, t.params);
    const ContentEstimate lower = content(sp, a, default_window(sp), ContentKind::Lower);
    rep.set_value("upper", est.upper);
    rep.set_value("extrapolated", est.extrapolated);
    rep.set_value("value", est.value());
    rep.set_value("band", est.band);
    rep.set_value("s", est.s);
    rep.set_value("r_prime", est.r_prime);
    rep.set_value("l1_error", est.l1_error);
    rep.set_value("l1_budget", est.l1_budget);
    rep.set_value("lower_content", lower.extrapolated);
    rep.set_value("lower_band", lower.band);
    rep.tables.push_back(est.table);
    rep.tables.push_back(lower.table());
    const double eps = 1e-9 * std::max(1.0, lower.extrapolated);
    if (est.relaxed) {
        rep.set_value("relaxed", est.cross_check);
        rep.set_value("relaxed_band", est.cross_band);
        rep.tables.push_back(est.relaxed->table());
        rep.check_le("perimeter_le_relaxed", "Per(A) <= relaxed M_-(A)", est.value(), est.cross_check,
                     est.band + est.cross_band);
        rep.check_le("relaxed_le_lower", "relaxed M_-(A) <= M_-(A)", est.cross_check, lower.extrapolated, eps);
        rep.check_true("recovery_matches_relaxed", "Per(A) = relaxed M_-(A)", est.agrees(),
                       std::abs(est.upper - est.cross_check));
        expect_close(rep, "relaxed_expected", est.cross_check, t.expect);
    }
    rep.check_le("perimeter_le_lower", "Per(A) <= M_-(A)", est.value(), lower.extrapolated, est.band + lower.band);
    auto& agree = rep.check_close("upper_matches_lower", "Per(A) = M_-(A) for regular A", est.upper,
                                  lower.extrapolated, est.band + lower.band);
    agree.informational = true;
    agree.note = "holds for sets with regular boundary only";
    expect_close(rep, "upper_expected", est.upper, t.expect);
    expect_close(rep, "lower_expected", lower.extrapolated, t.expect);
    return rep;
}

Report task_coarea(const SampledSpace& sp, const ScalarField& f, const CoareaTask& t) {
    CoareaReport cr = coarea_check(sp, f, t.params);
    Report rep = std::move(cr.report);
    rep.title = "coarea";
    if (!rep.table(cr.per_level.name)) rep.tables.push_back(std::move(cr.per_level));
    expect_close(rep, "var_expected", cr.lhs, t.expect);
    return rep;
}

Report task_distance_levels(const SampledSpace& sp, const SetIndicator& a, const DistanceLevelsTask& t) {
    Report rep = distance_levels(sp, a, t.t, t.params);
    rep.title = "distance levels";
    if (t.expected_per_t > 0.0) {
        const Table* tab = rep.table("distance_levels");
        const std::vector<std::string> cols(tab->columns.begin() + 1, tab->columns.begin() + 7);
        const auto rows = tab->rows;
        for (const auto& row : rows) {
            const double target = t.expected_per_t * row[0];
            for (std::size_t c = 0; c < cols.size(); ++c) {
                close_rel(rep, "t=" + num(row[0]) + "." + cols[c], "level quantity = expected_per_t * t", row[c + 1],
                          target, t.params.tolerance);
            }
        }
    }
    return rep;
}

Report task_hausdorff(const SampledSpace& sp, const Config& cfg) {
    const auto& t = cfg.hausdorff;
    Report rep;
    rep.title = "hausdorff";
    const SetIndicator a = need_set(sp, cfg);
    if (t.delta > 0.0) {
        const GaugeCover cover = hausdorff_delta(sp, a, t.delta, t.params.gauge);
        rep.set_value("delta", cover.delta);
        rep.set_value("cost", cover.cost);
        rep.set_value("greedy_cost", cover.greedy_cost);
        rep.set_value("exact", cover.exact ? 1.0 : 0.0);
        rep.set_value("balls", static_cast<double>(cover.balls.size()));
        rep.check_le("cover_le_greedy", "optimized cover cost <= greedy cost", cover.cost, cover.greedy_cost,
                     1e-12 * std::max(1.0, cover.greedy_cost));
        rep.tables.push_back(cover.table(sp));
        expect_close(rep, "gauge_expected", cover.cost, t.expect);
    } else {
        const HausdorffEstimate est = hausdorff(sp, a, t.params);
        rep.set_value("extrapolated", est.extrapolated);
        rep.set_value("band", est.band);
        rep.set_value("exact", est.exact_flag ? 1.0 : 0.0);
        bool monotone = true;
        for (std::size_t i = 1; i < est.costs.size(); ++i)
            if (est.resolved[i] == est.resolved[i - 1]) monotone = monotone && est.costs[i] >= est.costs[i - 1];
        rep.check_true("delta_monotone", "delta' <= delta => H_delta' >= H_delta", monotone);
        rep.tables.push_back(est.table);
        expect_close(rep, "gauge_expected", est.extrapolated, t.expect);
    }
    if (t.inequalities || t.corollary) {
        FieldSpec x1;
        x1.kind = "coordinate";
        const ScalarField f = field_or_default(sp, cfg, x1);
        if (t.inequalities) {
            const double delta = t.inequality_delta > 0 ? t.inequality_delta : 16.0 * sp.resolution();
            const SetIndicator b = t.inequality_set ? build_set(sp, *t.inequality_set) : SetIndicator::full(sp);
            rep.merge(coarea_inequalities(sp, f, b, t.inequality_t, delta, t.inequality), "inequalities.");
        }
        if (t.corollary) rep.merge(corollary_check(sp, f, t.corollary_t, t.corollary_params), "corollary.");
    }
    return rep;
}

Table witness_table(const SampledSpace& sp, const std::vector<std::pair<std::string, const SetIndicator*>>& marks) {
    Table t{"cheeger_witness", {"index"}, {}};
    const int dims = sp.has_coordinates() ? sp.coordinate_dims() : 0;
    static const char* axes[3] = {"x", "y", "z"};
    for (int k = 0; k < dims; ++k) t.columns.push_back(axes[k]);
    for (const auto& [name, set] : marks) t.columns.push_back(name);
    for (std::size_t i = 0; i < sp.size(); ++i) {
        std::vector<double> row{static_cast<double>(i)};
        for (int k = 0; k < dims; ++k) row.push_back(sp.coordinate(i)[k]);
        for (const auto& [name, set] : marks) row.push_back(set->contains(i) ? 1.0 : 0.0);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Report task_cheeger(const SampledSpace& sp, const CheegerTask& t) {
    FamilySpec family = t.family;
    for (const auto& f : t.fields) family.fields.push_back(build_field(sp, f));
    for (const auto& s : t.sets) family.sets.push_back(build_set(sp, s));
    Report rep;
    rep.title = "cheeger";
    rep.notes.push_back("family: " + family.describe());
    if (t.definition == "all") {
        CheegerComparison cmp = compare_definitions(sp, family, t.params);
        rep.merge(cmp.report);
        for (const CheegerResult* r : {&cmp.per, &cmp.minl, &cmp.minu}) {
            const std::string k = to_string(r->definition);
            rep.set_value("gamma_" + k, r->gamma);
            rep.set_value("band_" + k, r->band);
            rep.set_value("witness_mass_" + k, r->witness_mass);
            expect_close(rep, "gamma_" + k + "_expected", r->gamma, t.expect);
        }
        rep.tables.push_back(std::move(cmp.candidates));
        rep.tables.push_back(witness_table(sp, {{"per", &cmp.per.witness}, {"minl", &cmp.minl.witness},
                                                {"minu", &cmp.minu.witness}}));
    } else {
        CheegerResult r = cheeger_constant(sp, family, parse_boundary_definition(t.definition), t.params.cheeger);
        rep.set_value("gamma", r.gamma);
        rep.set_value("band", r.band);
        rep.set_value("witness_mass", r.witness_mass);
        rep.set_value("candidates", static_cast<double>(r.candidates));
        rep.check_le("witness_half_mass", "0 < m(A) <= m(X)/2", r.witness_mass,
                     0.5 * sp.total_mass() + sp.max_weight());
        expect_close(rep, "gamma_expected", r.gamma, t.expect);
        rep.tables.push_back(std::move(r.table));
        rep.tables.push_back(witness_table(sp, {{t.definition, &r.witness}}));
    }
    return rep;
}

// ------------------------------------------------------------------ verify

// Closed metric ball around a seeded random sample; radius diam/4.
SetIndicator test_set(const SampledSpace& sp, std::uint64_t seed, std::size_t& center) {
    std::mt19937_64 rng(seed);
    center = static_cast<std::size_t>(rng() % sp.size());
    const double r = 0.25 * sp.diameter();
    SetIndicator a = SetIndicator::empty(sp);
    for (std::size_t i = 0; i < sp.size(); ++i) a.marks[i] = sp.distance(center, i) <= r;
    return a;
}

// Search small spaces for T_{s+t} chi_{x} > T_s T_t chi_{x}.
void strictness_scan(const SampledSpace& sp, Report& rep) {
    std::set<double> dist;
    for (std::size_t i = 0; i < sp.size(); ++i)
        for (std::size_t j = i + 1; j < sp.size(); ++j) dist.insert(sp.distance(i, j));
    std::vector<double> radii;
    for (double d : dist) {
        radii.push_back(d);
        radii.push_back(d + 0.5 * sp.resolution());
    }
    std::size_t found = 0;
    std::string first;
    for (std::size_t x = 0; x < sp.size(); ++x) {
        const ScalarField chi = ScalarField::indicator(SetIndicator::from_indices(sp, std::vector<std::size_t>{x}));
        for (double s : radii) {
            const ScalarField ts = sup_semigroup(sp, chi, s);
            for (double t : radii) {
                const ScalarField big = sup_semigroup(sp, chi, s + t);
                const ScalarField two = sup_semigroup(sp, ts, t);
                for (std::size_t y = 0; y < sp.size(); ++y) {
                    if (big[y] > two[y]) {
                        if (found++ == 0) {
                            first = "T_" + num(s + t) + " chi_{" + std::to_string(x) + "}(" + std::to_string(y) +
                                    ") = " + num(big[y]) + " > " + num(two[y]) + " = T_" + num(t) + " T_" + num(s);
                        }
                    }
                }
            }
        }
    }
    rep.set_value("strict_semigroup_cases", static_cast<double>(found));
    auto& v = rep.check_true("strict_semigroup_witness", "T_{s+t} f >= T_s T_t f, strict somewhere off length spaces",
                             found > 0, static_cast<double>(found));
    v.informational = true;
    v.note = found > 0 ? first : "no strict case (expected on length spaces)";
}

void verify_quick(const SampledSpace& sp, std::uint64_t seed, Report& rep) {
    const MetricAudit audit = audit_metric(sp, 10000, seed);
    rep.set_value("metric_triples", static_cast<double>(audit.triples_checked));
    rep.check_true("metric_audit", "d is a metric", audit.violations == 0, static_cast<double>(audit.violations));
    bool weights_ok = std::isfinite(sp.total_mass());
    for (double w : sp.weights()) weights_ok = weights_ok && w >= 0.0 && std::isfinite(w);
    rep.check_true("weights_nonnegative", "m >= 0, m(X) < inf", weights_ok, sp.total_mass());

    std::size_t center = 0;
    const SetIndicator a = test_set(sp, seed, center);
    rep.set_value("test_center", static_cast<double>(center));
    const double ma = measure(sp, a), mc = measure(sp, a.complement());
    rep.check_close("measure_additive", "m(A) + m(X \\ A) = m(X)", ma + mc, sp.total_mass(),
                    4.0 * std::numeric_limits<double>::epsilon() * sp.total_mass());

    const ScalarField d = distance_to_set(sp, a);
    const double h = sp.resolution();
    bool monotone = true;
    double prev = -1.0;
    for (double r = h; r <= 2.0 * sp.diameter() + h; r *= 2.0) {
        double m = 0.0;
        for (std::size_t i = 0; i < sp.size(); ++i)
            if (d[i] < r) m += sp.weight(i);
        monotone = monotone && m >= prev;
        prev = m;
    }
    rep.check_true("profile_monotone", "r <= r' => m(A^r) <= m(A^r')", monotone);
    rep.merge(check_semigroup_inclusion(sp, a, 2.0 * h, 3.0 * h), "inclusion.");
    rep.merge(check_semigroup_ops(sp, d, 2.0 * h, 3.0 * h), "semigroup.");
    if (sp.size() <= 64) strictness_scan(sp, rep);
}

// Numeric checks gate only when the test set spans at least this many cells.
constexpr double kResolvedCells = 48.0;

// A set with a regular boundary and a cone peaked at its centre; returns the
// set radius in cells, or 0 when the space has no such set.
double regular_test_set(const SampledSpace& sp, SetIndicator& a, ScalarField& cone) {
    if (const GridMetric* g = sp.grid()) {
        double extent = std::numeric_limits<double>::infinity();
        double cell = 0.0;
        Point c{0, 0, 0};
        for (int k = 0; k < g->dims; ++k) {
            extent = std::min(extent, g->spacing[k] * static_cast<double>(g->n[k]));
            cell = std::max(cell, g->spacing[k]);
            c[k] = g->lo[k] + 0.5 * g->spacing[k] * static_cast<double>(g->n[k]);
        }
        const double r = 0.25 * extent;
        const int dims = g->dims;
        auto dist = [c, dims](const Point& p) {
            double s = 0.0;
            for (int k = 0; k < dims; ++k) s += (p[k] - c[k]) * (p[k] - c[k]);
            return std::sqrt(s);
        };
        a = SetIndicator::from_predicate(sp, [&](const Point& p) { return dist(p) <= r; });
        cone = ScalarField::from_function(sp, [&](const Point& p) { return std::max(0.0, 1.0 - dist(p) / r); });
        return r / cell;
    }
    if (const CircleMetric* c = sp.circle()) {
        const double r = c->circumference / 6.0;
        a = SetIndicator::empty(sp);
        cone = ScalarField::constant(sp, 0.0);
        for (std::size_t i = 0; i < sp.size(); ++i) {
            const double d = sp.distance(0, i);
            a.marks[i] = d <= r;
            cone.values[i] = std::max(0.0, 1.0 - d / r);
        }
        return r / c->step;
    }
    return 0.0;
}

void verify_full(const SampledSpace& sp, std::uint64_t seed, Report& rep) {
    SetIndicator a;
    ScalarField cone;
    const double cells = regular_test_set(sp, a, cone);
    if (cells <= 0.0) {
        std::size_t center = 0;
        a = test_set(sp, seed, center);
        const double r = 0.25 * sp.diameter();
        cone = ScalarField::constant(sp, 0.0);
        for (std::size_t i = 0; i < sp.size(); ++i) cone.values[i] = std::max(0.0, 1.0 - sp.distance(center, i) / r);
    }
    std::string demote;
    if (cells <= 0.0) {
        demote = "no grid or circle structure; limits r -> 0 are not resolved below h";
    } else if (cells < kResolvedCells) {
        demote = "test set spans " + num(std::floor(cells)) + " cells, below " + num(kResolvedCells);
    }
    if (!demote.empty()) rep.notes.push_back("numeric checks are informational: " + demote);
    auto add = [&](Report r, const std::string& prefix) {
        r.tables.clear();
        if (!demote.empty()) {
            for (auto& v : r.verdicts) {
                v.informational = true;
                v.note = v.note.empty() ? demote : v.note + "; " + demote;
            }
        }
        rep.merge(r, prefix);
    };
    auto guarded = [&](const std::string& what, const std::function<void()>& body) {
        try {
            body();
        } catch (const Error& e) {
            rep.notes.push_back(what + " skipped: " + e.what());
        }
    };
    guarded("sandwich", [&] { add(task_perimeter(sp, a, PerimeterTask{}), "sandwich."); });
    guarded("mean value", [&] {
        // Exact inequality between measured quantities; gates at every resolution.
        rep.merge(check_mean_value_inequality(sp, a, default_window(sp), 4), "mean_value.");
    });
    guarded("coarea", [&] { add(coarea_check(sp, cone).report, "coarea."); });
    if (sp.size() <= 20000) {
        guarded("cheeger", [&] {
            FamilySpec fam;
            fam.radii = 32;
            fam.max_centers = 16;
            add(compare_definitions(sp, fam).report, "cheeger.");
        });
    } else {
        rep.notes.push_back("cheeger ordering skipped: more than 20000 samples");
    }
    if (sp.cantor_marks()) {
        guarded("eq13", [&] { add(eq13_gap_demo(sp), "eq13."); });
    }
}

// ------------------------------------------------------------------ suites

SampledSpace disk_space() {
    const auto box = square_box(2, -2.0, 2.0);
    return build_grid_box(2, 512, box);
}

SetIndicator unit_disk(const SampledSpace& sp) {
    return SetIndicator::from_predicate(sp, [](const Point& p) { return p[0] * p[0] + p[1] * p[1] <= 1.0; });
}

Report suite_sandwich() {
    Report rep;
    const SampledSpace sp = disk_space();
    const SetIndicator a = unit_disk(sp);
    const PerimeterEstimate est = perimeter(sp, a);
    const ContentEstimate lower = content(sp, a, default_window(sp), ContentKind::Lower);
    const double target = 2.0 * kPi;
    const double relaxed = est.relaxed ? est.cross_check : std::numeric_limits<double>::quiet_NaN();
    rep.set_value("perimeter_upper", est.upper);
    rep.set_value("perimeter_value", est.value());
    rep.set_value("perimeter_band", est.band);
    rep.set_value("relaxed", relaxed);
    rep.set_value("relaxed_band", est.cross_band);
    rep.set_value("lower", lower.extrapolated);
    rep.set_value("lower_band", lower.band);
    close_rel(rep, "perimeter_upper_2pi", "Per(disk) = 2 pi", est.upper, target, 0.03);
    close_rel(rep, "relaxed_2pi", "relaxed M_-(disk) = 2 pi", relaxed, target, 0.03);
    close_rel(rep, "lower_2pi", "M_-(disk) = 2 pi", lower.extrapolated, target, 0.03);
    rep.check_close("upper_vs_relaxed", "Per(A) = relaxed M_-(A)", est.upper, relaxed, est.band + est.cross_band);
    rep.check_close("upper_vs_lower", "Per(A) <= M_-(A), equal for the disk", est.upper, lower.extrapolated,
                    est.band + lower.band);
    rep.check_close("relaxed_vs_lower", "relaxed M_-(A) <= M_-(A), equal for the disk", relaxed, lower.extrapolated,
                    est.cross_band + lower.band);
    rep.check_le("relaxed_le_lower", "relaxed M_-(A) <= M_-(A)", relaxed, lower.extrapolated,
                 1e-9 * lower.extrapolated);
    rep.tables.push_back(est.table);
    rep.tables.push_back(lower.table());
    if (est.relaxed) rep.tables.push_back(est.relaxed->table());
    return rep;
}

Report suite_mean_value() {
    Report rep;
    {
        const SampledSpace sp = disk_space();
        rep.merge(check_mean_value_inequality(sp, unit_disk(sp), default_window(sp), 4), "disk.");
    }
    {
        const auto box = square_box(1, 0.0, 1.0);
        const SampledSpace sp = build_grid_box(1, 4001, box);
        const SetIndicator a = SetIndicator::from_predicate(sp, [](const Point& p) { return p[0] >= 0.3 && p[0] <= 0.7; });
        rep.merge(check_mean_value_inequality(sp, a, default_window(sp), 4), "interval.");
    }
    {
        const SampledSpace sp = build_circle(4000, 2.0 * kPi);
        SetIndicator a = SetIndicator::empty(sp);
        for (std::size_t i = 0; i < sp.size(); ++i) a.marks[i] = sp.distance(0, i) <= 1.0;
        rep.merge(check_mean_value_inequality(sp, a, default_window(sp), 4), "arc.");
    }
    return rep;
}

Report suite_invariants(std::uint64_t seed) {
    Report rep;
    for (const auto& name : invariant_spaces()) {
        const SampledSpace sp = build_invariant_space(name);
        rep.merge(run_verify(sp, "quick", seed), name + ".");
    }
    return rep;
}

Report suite_strict_semigroup() {
    Report rep;
    SpaceSpec spec;
    spec.kind = "three_point";
    const SampledSpace sp = build_space(spec);
    const ScalarField chi = ScalarField::indicator(SetIndicator::from_indices(sp, std::vector<std::size_t>{0}));
    const ScalarField t4 = sup_semigroup(sp, chi, 4.0);
    const ScalarField t2t2 = sup_semigroup(sp, sup_semigroup(sp, chi, 2.0), 2.0);
    rep.check_true("t4_at_3", "T_4 chi_{0}(3) = 1", t4[2] == 1.0, t4[2]);
    rep.check_true("t2t2_at_3", "T_2 T_2 chi_{0}(3) = 0", t2t2[2] == 0.0, t2t2[2]);
    rep.check_true("strict", "T_{s+t} f > T_s T_t f at x = 3", t4[2] > t2t2[2], t4[2] - t2t2[2]);
    rep.merge(check_semigroup_ops(sp, chi, 2.0, 2.0), "ops.");
    Table tab{"strict_semigroup", {"x", "chi", "t4", "t2t2"}, {}};
    const double xs[3] = {0.0, 2.0, 3.0};
    for (std::size_t i = 0; i < 3; ++i) tab.rows.push_back({xs[i], chi[i], t4[i], t2t2[i]});
    rep.tables.push_back(std::move(tab));
    return rep;
}

Report suite_coarea() {
    const SampledSpace sp = disk_space();
    const ScalarField cone = ScalarField::from_function(
        sp, [](const Point& p) { return std::max(0.0, 1.0 - std::hypot(p[0], p[1])); });
    CoareaReport cr = coarea_check(sp, cone);
    Report rep = std::move(cr.report);
    close_rel(rep, "var_upper_pi", "Var(cone) = pi", cr.lhs, kPi, 0.03);
    close_rel(rep, "int_perimeter_pi", "int Per{f >= t} dt = pi", cr.rhs_per, kPi, 0.03);
    close_rel(rep, "int_lower_pi", "int M_-{f >= t} dt = pi", cr.rhs_mink, kPi, 0.03);
    if (!rep.table(cr.per_level.name)) rep.tables.push_back(std::move(cr.per_level));
    return rep;
}

Report suite_distance_levels() {
    const SampledSpace sp = disk_space();
    const double h = sp.resolution();
    const SetIndicator src = SetIndicator::from_predicate(
        sp, [h](const Point& p) { return std::abs(p[0]) < h && std::abs(p[1]) < h; });
    DistanceLevelsTask t;
    t.expected_per_t = 2.0 * kPi;
    Report rep = task_distance_levels(sp, src, t);
    rep.set_value("source_points", static_cast<double>(src.count()));
    return rep;
}

Report suite_eq13() {
    const SampledSpace sp = build_fat_cantor_interval(4001, 6, 0.5);
    return eq13_gap_demo(sp);
}

Report suite_dust() {
    const auto box = square_box(1, 0.0, 1.1);
    const SampledSpace sp = build_grid_box(1, 1100001, box);
    SetSpec spec;
    spec.shape = "inverse_sequence";
    spec.terms = 1000;
    const SetIndicator a = build_set(sp, spec);
    const ContentEstimate e = content(sp, a, Window{1e-4, 1e-2}, ContentKind::Lower);
    Report rep;
    // r_values ascend; quotients must not decrease as r decreases.
    bool monotone = true;
    for (std::size_t i = 1; i < e.quotients.size(); ++i) monotone = monotone && e.quotients[i - 1] >= e.quotients[i];
    const double growth = e.quotients.front() / e.quotients.back();
    rep.set_value("points", static_cast<double>(a.count()));
    rep.set_value("quotient_growth", growth);
    rep.set_value("growth_exponent", e.growth_exponent);
    rep.check_true("quotients_monotone", "(m(A^r) - m(A))/r nonincreasing in r", monotone);
    rep.check_ge("quotient_growth", "M(A) = inf for {1/k} u {0}", growth, 4.0);
    rep.check_true("divergence_flag", "M(A) = inf for {1/k} u {0}", e.diverging, e.growth_exponent);
    rep.tables.push_back(e.table());
    return rep;
}

Report suite_gauge() {
    Report rep;
    {
        const auto box = square_box(2, 0.0, 1.0);
        const SampledSpace sp = build_grid_box(2, 256, box);
        const double s = 1.0 / 256.0;
        SetSpec seg;
        seg.shape = "segment";
        seg.from = {0.0, 0.5 - 0.5 * s};
        seg.to = {1.0, 0.5 - 0.5 * s};
        const SetIndicator a = build_set(sp, seg);
        const HausdorffEstimate est = hausdorff(sp, a);
        rep.set_value("segment_h", est.extrapolated);
        rep.set_value("segment_band", est.band);
        close_rel(rep, "segment_pi_over_4", "H^h(unit segment) = omega_2 / (2 omega_1) = pi/4", est.extrapolated,
                  kPi / 4.0, 0.05);
        rep.tables.push_back(named(est.table, "hausdorff_segment"));
        const ScalarField x1 = ScalarField::from_function(sp, [](const Point& p) { return p[0]; });
        rep.merge(coarea_inequalities(sp, x1, SetIndicator::full(sp), {}, 0.05), "inequalities.");
    }
    {
        const auto box = square_box(1, 0.0, 1.0);
        const SampledSpace sp = build_grid_box(1, 1001, box);
        const SetIndicator pt = SetIndicator::from_indices(sp, std::vector<std::size_t>{500});
        const HausdorffEstimate est = hausdorff(sp, pt);
        rep.set_value("point_h", est.extrapolated);
        close_rel(rep, "point_one", "H^h(interior point of R) = 1", est.extrapolated, 1.0, 0.05);
        rep.tables.push_back(named(est.table, "hausdorff_point"));
    }
    return rep;
}

Report suite_cheeger() {
    Report rep;
    auto run = [&](const std::string& name, const SampledSpace& sp, double target) {
        CheegerComparison cmp = compare_definitions(sp, FamilySpec{});
        for (const CheegerResult* r : {&cmp.per, &cmp.minl, &cmp.minu}) {
            const std::string k = to_string(r->definition);
            rep.set_value(name + ".gamma_" + k, r->gamma);
            close_rel(rep, name + ".gamma_" + k + "_target", "Cheeger constant of the " + name, r->gamma, target, 0.03);
        }
        rep.merge(cmp.report, name + ".");
        rep.tables.push_back(named(std::move(cmp.candidates), name + "_candidates"));
    };
    {
        const auto box = square_box(1, 0.0, 1.0);
        run("interval", build_grid_box(1, 1001, box), 2.0);
    }
    run("circle", build_circle(1000, 2.0 * kPi), 2.0 / kPi);
    return rep;
}

}  // namespace

// ------------------------------------------------------------------ public

std::vector<std::string> invariant_spaces() {
    return {"interval", "square", "disk512", "cube", "fat_cantor", "circle", "three_point", "cycle_graph",
            "point_cloud", "weighted_grid"};
}

SampledSpace build_invariant_space(const std::string& name) {
    if (name == "point_cloud") {
        std::mt19937_64 rng(7);
        auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        std::vector<Point> pts(400);
        for (auto& p : pts) p = {unit(), unit(), 0.0};
        return build_point_cloud(std::move(pts), 2, std::vector<double>(400, 1.0 / 400.0), 0.05);
    }
    if (name == "weighted_grid") {
        const auto box = square_box(2, 0.0, 1.0);
        return build_grid_box(2, 96, box, Density::parse("linear:1"));
    }
    return build_space(parse_space_argument(name));
}

const std::vector<SuiteInfo>& suites() {
    static const std::vector<SuiteInfo> list{
        {"sandwich", "disk R=1 at 512^2: perimeter upper, relaxed and lower content against 2 pi"},
        {"mean-value", "mean-value inequality on a disk, an interval and a circle arc"},
        {"invariants", "exact invariants on every generated space"},
        {"strict-semigroup", "T_4 chi_{0}(3) = 1 > 0 = T_2 T_2 chi_{0}(3) on {0, 2, 3}"},
        {"coarea", "cone (1 - |x|)^+ at 512^2: Var, int Per and int M_- against pi"},
        {"distance-levels", "point-source distance levels t = 0.5, 1, 1.5 against 2 pi t"},
        {"eq13", "fat Cantor staircase: lower semicontinuity gap"},
        {"dust", "{1/k} u {0}: diverging content quotients"},
        {"gauge", "gauge measure of a unit segment and a point; gauge coarea inequalities"},
        {"cheeger", "Cheeger constants of the unit interval and the circle of length 2 pi"},
        {"disk", "sandwich, mean-value and coarea"},
        {"all", "every suite above"},
    };
    return list;
}

std::vector<std::string> expand_suites(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    auto add = [&](const std::string& n) {
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    };
    for (const auto& n : names) {
        if (n == "all") {
            for (const auto& s : suites())
                if (s.name != "all" && s.name != "disk") add(s.name);
        } else if (n == "disk") {
            add("sandwich");
            add("mean-value");
            add("coarea");
        } else {
            const bool known = std::any_of(suites().begin(), suites().end(), [&](const SuiteInfo& s) { return s.name == n; });
            if (!known) fail(ErrorCode::Config, "unknown repro suite '" + n + "' (see --list-suites)");
            add(n);
        }
    }
    return out;
}

Report run_suite(const std::string& name, std::uint64_t seed) {
    Report rep;
    if (name == "sandwich") rep = suite_sandwich();
    else if (name == "mean-value") rep = suite_mean_value();
    else if (name == "invariants") rep = suite_invariants(seed);
    else if (name == "strict-semigroup") rep = suite_strict_semigroup();
    else if (name == "coarea") rep = suite_coarea();
    else if (name == "distance-levels") rep = suite_distance_levels();
    else if (name == "eq13") rep = suite_eq13();
    else if (name == "dust") rep = suite_dust();
    else if (name == "gauge") rep = suite_gauge();
    else if (name == "cheeger") rep = suite_cheeger();
    else {
        Report all;
        for (const auto& n : expand_suites({name})) all.merge(run_suite(n, seed), n + ".");
        all.title = "repro " + name;
        return all;
    }
    rep.title = name;
    return rep;
}

Report run_verify(const SampledSpace& space, const std::string& level, std::uint64_t seed) {
    if (level != "quick" && level != "full") fail(ErrorCode::Config, "verify level must be quick or full");
    Report rep;
    rep.title = "verify " + level + ": " + space.description();
    verify_quick(space, seed, rep);
    if (level == "full") verify_full(space, seed, rep);
    return rep;
}

Report run_task(const Config& cfg) {
    std::optional<SampledSpace> sp;
    if (cfg.space) sp.emplace(build_space(*cfg.space));
    const std::string& task = cfg.task;
    Report rep;
    if (task == "minkowski") {
        rep = task_minkowski(need_space(sp), need_set(*sp, cfg), cfg.minkowski);
    } else if (task == "perimeter") {
        rep = task_perimeter(need_space(sp), need_set(*sp, cfg), cfg.perimeter);
    } else if (task == "coarea") {
        const auto& s = need_space(sp);
        if (!cfg.field) fail(ErrorCode::Config, "task 'coarea' needs a 'field' section");
        rep = task_coarea(s, build_field(s, *cfg.field), cfg.coarea);
    } else if (task == "distance-levels") {
        rep = task_distance_levels(need_space(sp), need_set(*sp, cfg), cfg.distance_levels);
    } else if (task == "hausdorff") {
        rep = task_hausdorff(need_space(sp), cfg);
    } else if (task == "cheeger") {
        rep = task_cheeger(need_space(sp), cfg.cheeger);
    } else if (task == "eq13-gap") {
        if (!sp) sp.emplace(build_fat_cantor_interval(4001, 6, 0.5));
        rep = eq13_gap_demo(*sp, cfg.eq13.params);
    } else if (task == "verify") {
        rep = run_verify(need_space(sp), cfg.verify.level, cfg.seed);
    } else if (task == "repro") {
        for (const auto& n : expand_suites(cfg.repro.suites)) rep.merge(run_suite(n, cfg.seed), n + ".");
    } else {
        fail(ErrorCode::Config, task.empty() ? "no task given" : "unknown task '" + task + "'");
    }
    if (rep.title.empty() || task == "repro") rep.title = task;
    return rep;
}

std::vector<std::string> write_artifacts(const std::filesystem::path& dir, const Report& report, nlohmann::json record) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> files;
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + (dir / name).string());
        out << body;
        files.push_back(name);
    };
    write("verdicts.csv", report.verdicts_csv());
    std::set<std::string> used{"verdicts", "summary"};
    for (const Table& t : report.tables) {
        std::string base;
        for (char c : t.name) base += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') ? c : '_';
        if (base.empty()) base = "table";
        std::string name = base;
        for (int k = 2; used.count(name); ++k) name = base + "_" + std::to_string(k);
        used.insert(name);
        write(name + ".csv", t.csv());
    }
    files.push_back("summary.json");
    record["report"] = report.to_json();
    record["passed"] = report.passed();
    record["failures"] = report.failures();
    record["artifacts"] = files;
    std::ofstream out(dir / "summary.json", std::ios::binary);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + (dir / "summary.json").string());
    out << record.dump(2) << "\n";
    return files;
}

nlohmann::json run_record(const std::string& task, const std::string& config_source, const std::string& config_text,
                          std::uint64_t seed, unsigned workers, double wall_seconds) {
    return nlohmann::json{
        {"task", task},
        {"config", {{"source", config_source}, {"text", config_text}}},
        {"seed", seed},
        {"workers", workers},
        {"wall_seconds", wall_seconds},
        {"versions",
         {{"mmsgeo", "0.1.0"},
          {"compiler", __VERSION__},
          {"cplusplus", static_cast<long>(__cplusplus)}}},
    };
}

}  // namespace mmsgeo::app
