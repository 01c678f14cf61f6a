#include <doctest.h>

#include <limits>
#include <cmath>
#include <numbers>
#include <vector>

#include "mmsgeo/cheeger.hpp"

using namespace mmsgeo;

namespace {

SetIndicator interval(const SampledSpace& sp, double a, double b) {
    return SetIndicator::from_predicate(sp, [=](const Point& p) { return p[0] >= a && p[0] <= b; });
}

FamilySpec initial_segments(const SampledSpace& sp, double scale) {
    FamilySpec fam;
    fam.kind = FamilySpec::Kind::Explicit;
    // [0, a] has one boundary point; the middle interval has two.
    for (double a : {0.1, 0.2, 0.3, 0.5}) fam.sets.push_back(interval(sp, 0.0, a * scale));
    fam.sets.push_back(interval(sp, 0.3 * scale, 0.7 * scale));
    return fam;
}

}  // namespace

TEST_CASE("explicit family on the interval") {
    auto line = build_grid_box(1, 1001, std::vector<std::pair<double, double>>{{0.0, 1.0}});
    auto fam = initial_segments(line, 1.0);
    auto res = cheeger_constant(line, fam, BoundaryDefinition::Perimeter);
    CHECK(std::abs(res.gamma - 2.0) <= 0.06);
    CHECK(res.witness.marks == fam.sets[3].marks);
    CHECK(res.witness_mass <= line.total_mass() / 2 + line.max_weight());

    // Doubling every length halves the constant.
    auto wide = build_grid_box(1, 2001, std::vector<std::pair<double, double>>{{0.0, 2.0}});
    auto res2 = cheeger_constant(wide, initial_segments(wide, 2.0), BoundaryDefinition::Perimeter);
    CHECK(std::abs(res2.gamma * 2.0 / res.gamma - 1.0) <= 0.03);
}

TEST_CASE("definitions are ordered") {
    auto line = build_grid_box(1, 1001, std::vector<std::pair<double, double>>{{0.0, 1.0}});
    CompareParams params;
    auto cmp = compare_definitions(line, initial_segments(line, 1.0), params);
    CHECK(cmp.report.passed());
    CHECK(cmp.per.gamma <= cmp.minl.gamma + cmp.per.band + cmp.minl.band);
    CHECK(cmp.minl.gamma <= cmp.minu.gamma + cmp.minl.band + cmp.minu.band);
}

TEST_CASE("circle half arc") {
    auto c = build_circle(1000, 2.0 * std::numbers::pi);
    FamilySpec fam;
    fam.radii = 32;
    fam.max_centers = 4;
    auto res = cheeger_constant(c, fam, BoundaryDefinition::Perimeter);
    CHECK(std::abs(res.gamma / (2.0 / std::numbers::pi) - 1.0) <= 0.02);
    CHECK(std::abs(res.witness_mass - std::numbers::pi) <= c.max_weight() + 1e-9);
}

TEST_CASE("exhaustive family matches brute-force enumeration") {
    auto line = build_grid_box(1, 12, std::vector<std::pair<double, double>>{{0.0, 1.0}});
    FamilySpec fam;
    fam.kind = FamilySpec::Kind::Exhaustive;
    fam.exhaustive_limit = 12;
    const CheegerParams params;
    auto res = cheeger_constant(line, fam, BoundaryDefinition::MinkowskiLower, params);

    const Window w = default_window(line, params.content);
    const double cap = line.total_mass() / 2 + line.max_weight();
    double best = std::numeric_limits<double>::infinity();
    std::size_t feasible = 0;
    for (unsigned mask = 1; mask < (1u << 12); ++mask) {
        SetIndicator a = SetIndicator::empty(line);
        for (unsigned i = 0; i < 12; ++i) a.marks[i] = (mask >> i) & 1u;
        const double m = measure(line, a);
        if (m > cap * (1 + 1e-12)) continue;
        ++feasible;
        const double v = content(line, a, w, ContentKind::Lower, params.content).value();
        if (std::isfinite(v)) best = std::min(best, v / m);
    }
    CHECK(res.candidates <= feasible);
    CHECK(res.gamma == doctest::Approx(best).epsilon(1e-12));
    CHECK(res.witness_mass > 0.0);
    CHECK(res.witness_mass <= cap * (1 + 1e-12));

    fam.exhaustive_limit = 8;
    CHECK_THROWS_AS(cheeger_constant(line, fam, BoundaryDefinition::MinkowskiLower, params), Error);
}
