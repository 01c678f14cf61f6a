#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mmsgeo/minkowski.hpp"

using namespace mmsgeo;

namespace {

const std::vector<std::pair<double, double>> kUnit1{{0.0, 1.0}};

std::vector<double> brute_distance(const SampledSpace& sp, const SetIndicator& a) {
    std::vector<double> d(sp.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < sp.size(); ++i)
        for (std::size_t j = 0; j < sp.size(); ++j)
            if (a.contains(j)) d[i] = std::min(d[i], sp.distance(i, j));
    return d;
}

SetIndicator interval(const SampledSpace& sp, double a, double b) {
    return SetIndicator::from_predicate(sp, [=](const Point& p) { return p[0] >= a && p[0] <= b; });
}

}  // namespace

TEST_CASE("distance_to_set matches brute force") {
    auto line = build_grid_box(1, 101, kUnit1);
    auto mid = SetIndicator::from_indices(line, std::vector<std::size_t>{50});
    auto d = distance_to_set(line, mid);
    for (std::size_t i = 0; i < line.size(); ++i)
        CHECK(d[i] == doctest::Approx(std::abs(line.coordinate(i)[0] - line.coordinate(50)[0])).epsilon(1e-12));

    auto full = distance_to_set(line, SetIndicator::full(line));
    CHECK(*std::max_element(full.values.begin(), full.values.end()) == 0.0);

    auto sq = build_grid_box(2, 23, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 2.0}});
    auto blob = SetIndicator::from_predicate(sq, [](const Point& p) {
        return std::hypot(p[0] - 0.3, p[1] - 1.2) < 0.2 || (p[0] > 0.8 && p[1] < 0.3);
    });
    auto ds = distance_to_set(sq, blob);
    auto ref = brute_distance(sq, blob);
    for (std::size_t i = 0; i < sq.size(); ++i) CHECK(ds[i] == doctest::Approx(ref[i]).epsilon(1e-12));

    auto c = build_circle(1000, 2.0 * std::numbers::pi);
    auto pt = SetIndicator::from_indices(c, std::vector<std::size_t>{0});
    auto dc = distance_to_set(c, pt);
    CHECK(std::abs(*std::max_element(dc.values.begin(), dc.values.end()) - std::numbers::pi) <= c.resolution());

    const std::vector<GraphEdge> edges{{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {4, 0, 3.0}};
    auto g = build_graph(5, edges, std::vector<double>(5, 0.2));
    auto sa = SetIndicator::from_indices(g, std::vector<std::size_t>{0, 3});
    auto dg = distance_to_set(g, sa);
    auto rg = brute_distance(g, sa);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(dg[i] == rg[i]);
}

TEST_CASE("enlargement and profile") {
    auto line = build_grid_box(1, 1001, kUnit1);
    const double h = line.resolution();
    auto a = interval(line, 0.4, 0.6);
    CHECK(std::abs(measure(line, enlarge(line, a, 0.1)) - 0.4) <= 2 * h);
    CHECK(enlarge(line, a, 2.0).count() == line.size());

    const std::vector<double> rs{0.05, 0.10, 0.15};
    auto prof = profile(line, a, rs);
    const double expect[] = {0.3, 0.4, 0.5};
    for (int k = 0; k < 3; ++k) CHECK(std::abs(prof.masses[k] - expect[k]) <= 2 * h);

    auto all = profile(line, SetIndicator::full(line), rs);
    for (double m : all.masses) CHECK(m == line.total_mass());

    const std::vector<double> tiny{h};
    CHECK_THROWS_AS(profile(line, a, tiny), Error);
}

TEST_CASE("disk enlargement area") {
    const std::vector<std::pair<double, double>> box{{-1.0, 1.0}, {-1.0, 1.0}};
    auto sq = build_grid_box(2, 512, box);
    auto disk = SetIndicator::from_predicate(sq, [](const Point& p) { return std::hypot(p[0], p[1]) <= 0.5; });
    const double m = measure(sq, enlarge(sq, disk, 0.1));
    CHECK(std::abs(m / (std::numbers::pi * 0.36) - 1.0) <= 0.02);
}

TEST_CASE("profile is monotone and closure-invariant") {
    auto line = build_grid_box(1, 2001, kUnit1);
    auto a = SetIndicator::from_predicate(line, [](const Point& p) { return std::fmod(p[0] * 37.0, 1.0) < 0.3; });
    std::vector<double> rs;
    for (int k = 0; k < 30; ++k) rs.push_back(0.003 * std::pow(1.1, k));
    auto prof = profile(line, a, rs);
    for (std::size_t k = 1; k < prof.masses.size(); ++k) CHECK(prof.masses[k] >= prof.masses[k - 1]);
    // Points at distance 0 are already in A on a sampled space, so A^r is unchanged.
    auto d = distance_to_set(line, a);
    auto closure = enlarge_from_distance(d, std::numeric_limits<double>::min());
    CHECK(closure.marks == a.marks);
}

TEST_CASE("content of an interval") {
    auto line = build_grid_box(1, 1001, kUnit1);
    const double h = line.resolution();
    auto a = interval(line, 0.4, 0.6);
    const Window w = default_window(line);
    auto lo = content(line, a, w, ContentKind::Lower);
    auto up = content(line, a, w, ContentKind::Upper);
    const double tol = 5 * h / w.r_min * 2.0;
    CHECK(std::abs(lo.value() - 2.0) <= tol);
    CHECK(std::abs(up.value() - 2.0) <= tol);
    CHECK(lo.inf_quotient <= up.sup_quotient);
    CHECK_FALSE(lo.diverging);

    RelaxedParams rp;
    rp.window = w;
    auto rel = relaxed_content(line, a, rp);
    CHECK(rel.value() <= lo.value() + lo.band + rel.band);

    auto full = relaxed_content(line, SetIndicator::full(line), rp);
    CHECK(full.value() == 0.0);
}

TEST_CASE("scattered marks diverge") {
    auto line = build_grid_box(1, 4001, kUnit1);
    std::vector<std::size_t> idx;
    for (std::size_t i = 1600; i <= 2400; i += 8) idx.push_back(i);
    auto scattered = SetIndicator::from_indices(line, idx);
    const Window w = default_window(line);
    auto lo = content(line, scattered, w, ContentKind::Lower);
    CHECK(lo.diverging);
    // Marks 0.002 apart: A^r covers [0.4, 0.6] once r > 0.001, so every
    // quotient is at least (0.2 - m(A)) / r_max.
    CHECK(lo.inf_quotient >= (0.2 - measure(line, scattered)) / w.r_max);
}

TEST_CASE("disk content") {
    const std::vector<std::pair<double, double>> box{{-1.0, 1.0}, {-1.0, 1.0}};
    auto sq = build_grid_box(2, 512, box);
    auto disk = SetIndicator::from_predicate(sq, [](const Point& p) { return std::hypot(p[0], p[1]) <= 0.5; });
    const Window w = default_window(sq);
    auto lo = content(sq, disk, w, ContentKind::Lower);
    auto up = content(sq, disk, w, ContentKind::Upper);
    CHECK(std::abs(lo.value() / std::numbers::pi - 1.0) <= 0.03);
    CHECK(std::abs(up.value() / std::numbers::pi - 1.0) <= 0.03);
    CHECK(lo.inf_quotient <= up.sup_quotient);
}

TEST_CASE("semigroup inclusion and mean value") {
    auto sq = build_grid_box(2, 96, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 1.0}});
    auto blob = SetIndicator::from_predicate(sq, [](const Point& p) { return p[0] + 0.3 * p[1] < 0.4; });
    auto inc = check_semigroup_inclusion(sq, blob, 0.05, 0.05);
    CHECK(inc.passed());

    auto c = build_circle(1000, 1.0);
    auto arc = SetIndicator::from_predicate(c, [](const Point&) { return false; });
    for (std::size_t i = 0; i < 200; ++i) arc.marks[i] = 1;
    CHECK(check_semigroup_inclusion(c, arc, 0.01, 0.2).passed());

    auto line = build_grid_box(1, 4001, kUnit1);
    auto a = interval(line, 0.4, 0.6);
    auto mv = check_mean_value_inequality(line, a, default_window(line));
    CHECK(mv.passed());
}
