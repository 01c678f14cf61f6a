#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mmsgeo/minkowski.hpp"
#include "mmsgeo/semigroup.hpp"

using namespace mmsgeo;

namespace {

const std::vector<std::pair<double, double>> kUnit1{{0.0, 1.0}};

std::vector<double> brute_sup(const SampledSpace& sp, const ScalarField& f, double t) {
    std::vector<double> out(sp.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < sp.size(); ++i)
        for (std::size_t j = 0; j < sp.size(); ++j)
            if (sp.distance(i, j) < t) out[i] = std::max(out[i], f[j]);
    return out;
}

}  // namespace

TEST_CASE("sup semigroup matches brute force") {
    auto line = build_grid_box(1, 101, kUnit1);
    auto id = ScalarField::from_function(line, [](const Point& p) { return p[0]; });
    auto t = sup_semigroup(line, id, 0.1);
    auto ref = brute_sup(line, id, 0.1);
    for (std::size_t i = 0; i < line.size(); ++i) CHECK(t[i] == ref[i]);

    auto cst = ScalarField::constant(line, 2.5);
    for (double v : sup_semigroup(line, cst, 0.3).values) CHECK(v == 2.5);

    auto sq = build_grid_box(2, 17, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 1.0}});
    auto wave = ScalarField::from_function(sq, [](const Point& p) { return std::sin(7 * p[0]) * std::cos(5 * p[1]); });
    auto ts = sup_semigroup(sq, wave, 0.21);
    auto rs = brute_sup(sq, wave, 0.21);
    for (std::size_t i = 0; i < sq.size(); ++i) CHECK(ts[i] == rs[i]);
}

TEST_CASE("sup semigroup of an indicator is the enlargement") {
    auto sq = build_grid_box(2, 40, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 1.0}});
    auto a = SetIndicator::from_predicate(sq, [](const Point& p) { return std::hypot(p[0] - 0.4, p[1] - 0.5) < 0.15; });
    auto t = sup_semigroup(sq, ScalarField::indicator(a), 0.1);
    auto e = enlarge(sq, a, 0.1);
    for (std::size_t i = 0; i < sq.size(); ++i) CHECK(t[i] == (e.contains(i) ? 1.0 : 0.0));
}

TEST_CASE("slopes") {
    auto line = build_grid_box(1, 1001, kUnit1);
    const double h = line.resolution();
    auto id = ScalarField::from_function(line, [](const Point& p) { return p[0]; });
    auto sl = slope_at_scale(line, id, 3 * h);
    for (std::size_t i = 5; i + 5 < line.size(); ++i) CHECK(std::abs(sl[i] - 1.0) <= 1e-9);
    auto lip = asymptotic_lip(line, id, 3 * h);
    for (std::size_t i = 5; i + 5 < line.size(); ++i) CHECK(std::abs(lip[i] - 1.0) <= 1e-9);

    auto cst = ScalarField::constant(line, 1.0);
    for (double v : slope_at_scale(line, cst, 3 * h).values) CHECK(v == 0.0);
    for (double v : asymptotic_lip(line, cst, 3 * h).values) CHECK(v == 0.0);

    auto kink = ScalarField::from_function(line, [](const Point& p) { return std::abs(p[0] - 0.5); });
    auto lk = asymptotic_lip(line, kink, 4 * h);
    CHECK(lk[500] == doctest::Approx(1.0).epsilon(1e-9));

    auto fat = build_fat_cantor_interval(4001, 6, 0.5);
    auto fid = ScalarField::from_function(fat, [](const Point& p) { return p[0]; });
    const double integral_sl = integral(fat, slope_at_scale(fat, fid, 3 * fat.resolution()).values);
    CHECK(std::abs(integral_sl - fat.total_mass()) <= 1e-9);
    CHECK(std::abs(integral_sl - 0.75) <= 0.01);
}

TEST_CASE("slope at scale is monotone in the scale") {
    auto sq = build_grid_box(2, 48, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 1.0}});
    auto f = ScalarField::from_function(sq, [](const Point& p) { return std::sin(9 * p[0] * p[1]); });
    const double h = sq.resolution();
    auto prev = slope_at_scale(sq, f, 2 * h);
    for (double c : {4.0, 8.0, 16.0}) {
        auto cur = slope_at_scale(sq, f, c * h);
        for (std::size_t i = 0; i < sq.size(); ++i) CHECK(cur[i] >= prev[i]);
        prev = cur;
    }
}

TEST_CASE("semigroup operator checks") {
    auto c = build_circle(600, 1.0);
    auto f = ScalarField::from_function(c, [](const Point& p) { return std::sin(3 * p[0]) + 0.5 * p[1]; });
    CHECK(check_semigroup_ops(c, f, 0.1, 0.1).passed());

    auto sq = build_grid_box(2, 64, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 1.0}});
    auto g = ScalarField::from_function(sq, [](const Point& p) { return std::abs(p[0] - 0.3) + p[1] * p[1]; });
    CHECK(check_semigroup_ops(sq, g, 0.05, 0.08).passed());
    CHECK(check_semigroup_ops(sq, ScalarField::constant(sq, 1.0), 0.05, 0.05).passed());

    // T_t is monotone: f <= g pointwise implies T_t f <= T_t g.
    auto lower = ScalarField::from_function(sq, [](const Point& p) { return std::abs(p[0] - 0.3); });
    auto tl = sup_semigroup(sq, lower, 0.1);
    auto tg = sup_semigroup(sq, g, 0.1);
    for (std::size_t i = 0; i < sq.size(); ++i) CHECK(tl[i] <= tg[i]);
}

TEST_CASE("strict semigroup on the three point space") {
    // Points 0, 2, 3 on the line: the open 2-ball around 2 misses 0.
    const std::vector<double> d{0, 2, 3, 2, 0, 1, 3, 1, 0};
    auto sp = build_explicit(d, std::vector<double>{1.0, 1.0, 1.0});
    auto chi = ScalarField::indicator(SetIndicator::from_indices(sp, std::vector<std::size_t>{0}));
    auto t4 = sup_semigroup(sp, chi, 4.0);
    auto t2t2 = sup_semigroup(sp, sup_semigroup(sp, chi, 2.0), 2.0);
    CHECK(t4[2] == 1.0);
    CHECK(t2t2[2] == 0.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(t4[i] >= t2t2[i]);
}
