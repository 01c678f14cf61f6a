#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mmsgeo/hausdorff.hpp"

using namespace mmsgeo;

namespace {

const std::vector<std::pair<double, double>> kUnit1{{0.0, 1.0}};

bool covers(const SampledSpace& sp, const GaugeCover& cover, const SetIndicator& s) {
    for (std::size_t i = 0; i < sp.size(); ++i) {
        if (!s.contains(i)) continue;
        bool hit = false;
        for (const auto& b : cover.balls) hit = hit || sp.distance(i, b.center) <= b.radius;
        if (!hit) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("ball gauge") {
    auto line = build_grid_box(1, 1001, kUnit1);
    const double h = line.resolution();
    CHECK(std::abs(ball_gauge(line, 500, 0.1) - 1.0) <= h / 0.1);
    CHECK(std::abs(ball_gauge(line, 0, 0.1) - 0.5) <= h / 0.1);

    // First gap of the fat Cantor set is (0.375, 0.625); weight there is 1/2.
    auto fat = build_fat_cantor_interval(4001, 6, 0.5);
    CHECK(std::abs(ball_gauge(fat, 2000, 0.05) - 0.5) <= fat.resolution() / 0.05);

    CHECK_THROWS_AS(ball_gauge(line, 500, 0.0), Error);
}

TEST_CASE("gauge covers") {
    auto line = build_grid_box(1, 1001, kUnit1);
    const double h = line.resolution();
    auto empty = hausdorff_delta(line, SetIndicator::empty(line), 0.05);
    CHECK(empty.cost == 0.0);
    CHECK(empty.balls.empty());

    auto pt = SetIndicator::from_indices(line, std::vector<std::size_t>{500});
    auto one = hausdorff_delta(line, pt, 0.05);
    CHECK(covers(line, one, pt));
    CHECK(std::abs(one.cost - 1.0) <= 0.05);

    auto few = SetIndicator::from_indices(line, std::vector<std::size_t>{100, 130, 400, 410, 420, 800});
    auto cover = hausdorff_delta(line, few, 0.08);
    CHECK(covers(line, cover, few));
    CHECK(cover.exact);
    CHECK(cover.greedy_cost >= cover.cost);
    CHECK(cover.greedy_cost <= 1.3 * cover.cost);

    CHECK_THROWS_AS(hausdorff_delta(line, pt, h), Error);
}

TEST_CASE("hausdorff of points") {
    auto line = build_grid_box(1, 1001, kUnit1);
    auto one = hausdorff(line, SetIndicator::from_indices(line, std::vector<std::size_t>{500}));
    CHECK(std::abs(one.extrapolated - 1.0) <= 0.05);
    auto two = hausdorff(line, SetIndicator::from_indices(line, std::vector<std::size_t>{200, 800}));
    CHECK(std::abs(two.extrapolated - 2.0) <= 0.1);
    for (std::size_t k = 1; k < one.costs.size(); ++k)
        if (one.resolved[k] && one.resolved[k - 1]) CHECK(one.costs[k] >= one.costs[k - 1]);
}

TEST_CASE("gauge coarea inequalities") {
    auto sq = build_grid_box(2, 128, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 1.0}});
    auto x = ScalarField::from_function(sq, [](const Point& p) { return p[0]; });
    const std::vector<double> ts{0.25, 0.5, 0.75};
    auto rep = coarea_inequalities(sq, x, SetIndicator::full(sq), ts, 16 * sq.resolution());
    CHECK(rep.passed());
    CHECK(rep.value("lhs") <= rep.value("rhs_lip_a") * 1.05);

    auto none = coarea_inequalities(sq, x, SetIndicator::empty(sq), ts, 16 * sq.resolution());
    CHECK(none.value("lhs") == 0.0);
    CHECK(none.value("rhs_lip_a") == 0.0);
    CHECK(none.value("rhs_two_sl") == 0.0);
    CHECK(none.value("rhs_lip_mass") == 0.0);

    auto flat = coarea_inequalities(sq, ScalarField::constant(sq, 0.3), SetIndicator::full(sq), ts,
                                    16 * sq.resolution());
    CHECK(flat.value("lhs") == 0.0);
}
