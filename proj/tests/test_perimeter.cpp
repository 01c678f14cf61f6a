#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mmsgeo/perimeter.hpp"

using namespace mmsgeo;

namespace {

const std::vector<std::pair<double, double>> kUnit1{{0.0, 1.0}};
const std::vector<std::pair<double, double>> kUnit2{{0.0, 1.0}, {0.0, 1.0}};

SetIndicator interval(const SampledSpace& sp, double a, double b) {
    return SetIndicator::from_predicate(sp, [=](const Point& p) { return p[0] >= a && p[0] <= b; });
}

}  // namespace

TEST_CASE("recovery function and L1 distance") {
    auto line = build_grid_box(1, 1001, kUnit1);
    auto a = interval(line, 0.4, 0.6);
    auto f = recovery_function(line, a, 0.0, 0.1);
    for (std::size_t i = 0; i < line.size(); ++i) {
        CHECK(f[i] >= 0.0);
        CHECK(f[i] <= 1.0);
        if (a.contains(i)) CHECK(f[i] == 1.0);
    }
    // Two linear ramps of length 0.1 each outside A.
    CHECK(l1_to_indicator(line, f, a) == doctest::Approx(0.1).epsilon(0.02));
    CHECK(l1_to_indicator(line, ScalarField::indicator(a), a) == 0.0);
}

TEST_CASE("interval perimeter") {
    auto line = build_grid_box(1, 1001, kUnit1);
    auto est = perimeter(line, interval(line, 0.4, 0.6));
    CHECK(std::abs(est.value() - 2.0) <= 0.1);
    CHECK(est.value() <= est.upper);
    CHECK(est.l1_error <= est.l1_budget);
}

TEST_CASE("total variation") {
    auto sq = build_grid_box(2, 128, kUnit2);
    auto x = ScalarField::from_function(sq, [](const Point& p) { return p[0]; });
    auto tv = total_variation(sq, x);
    CHECK(std::abs(tv.upper - 1.0) <= 0.02);
    CHECK(std::abs(tv.lower - 1.0) <= 0.02);

    auto cst = total_variation(sq, ScalarField::constant(sq, 0.7));
    CHECK(cst.upper == 0.0);
    CHECK(cst.lower == 0.0);
}

TEST_CASE("coarea on a linear field") {
    auto sq = build_grid_box(2, 128, kUnit2);
    auto x = ScalarField::from_function(sq, [](const Point& p) { return p[0]; });
    CoareaParams params;
    params.levels.t_points = 16;
    auto rep = coarea_check(sq, x, params);
    CHECK(std::abs(rep.lhs - 1.0) <= 0.02);
    CHECK(std::abs(rep.rhs_mink - 1.0) <= 0.02);
    CHECK(std::abs(rep.rhs_per - 1.0) <= 0.03);
    CHECK(rep.unit_slope);
    CHECK(rep.report.passed());
}

TEST_CASE("level set selection") {
    auto line = build_grid_box(1, 1001, kUnit1);
    auto a = interval(line, 0.3, 0.7);
    auto sharp = level_set_select(line, ScalarField::indicator(a), 0.1);
    CHECK(sharp.t == doctest::Approx(0.5));
    CHECK(sharp.set.marks == a.marks);
    CHECK(sharp.guarantee);

    auto flat = level_set_select(line, ScalarField::constant(line, 0.5), 0.1);
    CHECK(flat.t == doctest::Approx(0.5));
    CHECK(flat.guarantee);

    auto f = recovery_function(line, a, 0.0, 0.05);
    auto sel = level_set_select(line, f, 0.1);
    CHECK(sel.content <= sel.bound + sel.band);
}

TEST_CASE("variational descent never increases the objective") {
    auto sq = build_grid_box(2, 48, kUnit2);
    auto a = SetIndicator::from_predicate(sq, [](const Point& p) { return std::hypot(p[0] - 0.5, p[1] - 0.5) < 0.25; });
    DescentParams params;
    params.max_sweeps = 6;
    auto res = variational_descent(sq, a, params);
    REQUIRE(res.trace.size() >= 2);
    for (std::size_t k = 1; k < res.trace.size(); ++k) CHECK(res.trace[k] <= res.trace[k - 1]);
}

TEST_CASE("gap staircase on the fat Cantor interval") {
    auto fat = build_fat_cantor_interval(4001, 6, 0.5);
    auto rep = eq13_gap_demo(fat);
    CHECK(rep.passed());
    CHECK(rep.value("staircase_cost") <= 0.52);
    CHECK(rep.value("staircase_l1") <= 0.02);
    CHECK(std::abs(rep.value("integral_sl_identity") - 0.75) <= 0.01);
}
