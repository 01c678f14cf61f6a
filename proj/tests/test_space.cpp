#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "mmsgeo/space.hpp"

using namespace mmsgeo;

namespace {

const std::vector<std::pair<double, double>> kUnit1{{0.0, 1.0}};
const std::vector<std::pair<double, double>> kUnit2{{0.0, 1.0}, {0.0, 1.0}};

template <class F>
ErrorCode error_code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected mmsgeo::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("grid box masses") {
    auto line = build_grid_box(1, 101, kUnit1);
    CHECK(line.size() == 101);
    CHECK(std::abs(line.total_mass() - 1.0) <= 1e-12);
    CHECK(line.is_length_space());

    auto sq = build_grid_box(2, 4, kUnit2);
    REQUIRE(sq.size() == 16);
    for (double w : sq.weights()) CHECK(w == doctest::Approx(1.0 / 16.0).epsilon(1e-14));

    auto fat = build_grid_box(1, 2001, kUnit1, Density::fat_cantor(0.5));
    CHECK(std::abs(fat.total_mass() - 0.75) <= 2e-3);
}

TEST_CASE("grid box rejects bad input") {
    CHECK(error_code_of([] { build_grid_box(4, 8, std::vector<std::pair<double, double>>(4, {0.0, 1.0})); }) ==
          ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { build_grid_box(1, 1, kUnit1); }) == ErrorCode::InvalidArgument);
    CHECK(error_code_of([] { build_grid_box(1, 8, kUnit1, Density::constant(-1.0)); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("grid distances are Euclidean") {
    auto sq = build_grid_box(2, 11, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 1.0}});
    const auto& g = *sq.grid();
    for (std::size_t i = 0; i < sq.size(); i += 7) {
        for (std::size_t j = 0; j < sq.size(); j += 5) {
            const auto& a = sq.coordinate(i);
            const auto& b = sq.coordinate(j);
            CHECK(sq.distance(i, j) == doctest::Approx(std::hypot(a[0] - b[0], a[1] - b[1])).epsilon(1e-12));
        }
    }
    CHECK(g.dims == 2);
}

TEST_CASE("fat Cantor interval") {
    auto space = build_fat_cantor_interval(4001, 6, 0.5);
    FatCantor k(0.5);
    // Removed-gap total at depth 6: sum over stages of 2^{k-1} gaps of length 2(1-|K|)4^{-k}.
    double removed = 0.0;
    for (int s = 1; s <= 6; ++s) removed += std::pow(2.0, s - 1) * 2.0 * 0.5 * std::pow(4.0, -s);
    CHECK(std::abs(k.truncated_mass(6) - (1.0 - removed)) <= 1e-12);

    REQUIRE(space.cantor_marks().has_value());
    const auto& marks = *space.cantor_marks();
    double lebesgue_k = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (marks[i]) lebesgue_k += space.weight(i);  // weight 1 per unit length on K
    }
    CHECK(std::abs(lebesgue_k - k.truncated_mass(6)) <= 1e-3);

    auto one = build_fat_cantor_interval(4001, 1, 0.5);
    double k1 = 0.0;
    for (std::size_t i = 0; i < one.size(); ++i)
        if ((*one.cantor_marks())[i]) k1 += one.weight(i);
    CHECK(std::abs(k1 - (1.0 - k.gap_length(1))) <= 1e-3);

    CHECK(error_code_of([] { build_fat_cantor_interval(41, 6, 0.5); }) == ErrorCode::ResolutionTooCoarse);
}

TEST_CASE("circle") {
    auto c = build_circle(1000, 2.0 * std::numbers::pi);
    CHECK(std::abs(c.total_mass() - 2.0 * std::numbers::pi) <= 1e-9);
    CHECK(c.distance(0, 500) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    CHECK(c.distance(17, 517) == doctest::Approx(c.circle()->circumference / 2.0).epsilon(1e-12));

    auto tri = build_circle(3, 3.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(tri.distance(i, j) == doctest::Approx(i == j ? 0.0 : 1.0));
}

TEST_CASE("explicit metric validation") {
    const std::vector<double> w{1.0, 1.0, 1.0};
    const std::vector<double> bad_triangle{0, 1, 5, 1, 0, 1, 5, 1, 0};
    try {
        build_explicit(bad_triangle, w);
        FAIL("triangle violation accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MetricViolation);
        CHECK(std::string(e.what()).find("triangle") != std::string::npos);
    }
    const std::vector<double> asym{0, 1, 1, 2, 0, 1, 1, 1, 0};
    try {
        build_explicit(asym, w);
        FAIL("asymmetric matrix accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MetricViolation);
        CHECK(std::string(e.what()).find("symmetr") != std::string::npos);
    }
    const std::vector<double> good{0, 1, 2, 1, 0, 1, 2, 1, 0};
    auto sp = build_explicit(good, w);
    CHECK(sp.size() == 3);
    CHECK(audit_metric(sp).violations == 0);
}

TEST_CASE("measure is exact, monotone and additive") {
    auto line = build_grid_box(1, 1001, kUnit1);
    CHECK(std::abs(measure(line, SetIndicator::full(line)) - 1.0) <= 1e-12);
    CHECK(measure(line, SetIndicator::empty(line)) == 0.0);

    auto a = SetIndicator::from_predicate(line, [](const Point& p) { return p[0] < 0.3; });
    auto b = SetIndicator::from_predicate(line, [](const Point& p) { return p[0] > 0.6; });
    auto ab = set_union(a, b);
    // Each measure is the correctly rounded exact sum, so only the final addition can differ.
    const double eps = std::numeric_limits<double>::epsilon();
    CHECK(std::abs(measure(line, ab) - (measure(line, a) + measure(line, b))) <= 2 * eps * measure(line, ab));
    CHECK(measure(line, a) + measure(line, a.complement()) == doctest::Approx(line.total_mass()).epsilon(2 * eps));
    CHECK(measure(line, a) <= measure(line, ab));

    auto other = build_grid_box(1, 11, kUnit1);
    CHECK(error_code_of([&] { measure(other, a); }) == ErrorCode::BindingMismatch);
}

TEST_CASE("metric audit on generated spaces") {
    auto sq = build_grid_box(2, 64, kUnit2);
    auto audit = audit_metric(sq, 10000, 3);
    CHECK(audit.triples_checked >= 10000);
    CHECK(audit.violations == 0);
    auto c = build_circle(257, 1.0);
    CHECK(audit_metric(c, 10000, 5).violations == 0);
    const std::vector<GraphEdge> edges{{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 1.0}, {3, 0, 1.5}};
    const std::vector<double> gw(4, 0.25);
    auto g = build_graph(4, edges, gw);
    CHECK(g.distance(0, 2) == doctest::Approx(2.5));
    CHECK(audit_metric(g).violations == 0);
}

TEST_CASE("generators are deterministic") {
    auto a = build_fat_cantor_interval(4001, 6, 0.5);
    auto b = build_fat_cantor_interval(4001, 6, 0.5);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a.weight(i) == b.weight(i);
    CHECK(same);
    CHECK(*a.cantor_marks() == *b.cantor_marks());
}

TEST_CASE("ball query matches a brute-force scan") {
    auto sq = build_grid_box(2, 20, kUnit2);
    BallQuery q(sq, 0.17, true);
    for (std::size_t i : {0u, 45u, 210u, 399u}) {
        std::vector<std::size_t> expect;
        for (std::size_t j = 0; j < sq.size(); ++j)
            if (sq.distance(i, j) <= 0.17) expect.push_back(j);
        auto got = q.members(i);
        std::sort(got.begin(), got.end());
        CHECK(got == expect);
    }
}

TEST_CASE("table round trip") {
    auto sq = build_grid_box(2, 5, kUnit2);
    std::vector<TableColumn> cols{{"f", std::vector<double>(sq.size(), 0.25)}};
    std::istringstream in(table_string(sq, cols));
    auto imported = read_table(in);
    REQUIRE(imported.space.size() == sq.size());
    CHECK(imported.space.total_mass() == doctest::Approx(sq.total_mass()));
    REQUIRE(imported.columns.size() == 1);
    CHECK(imported.columns[0].name == "f");
    CHECK(imported.space.distance(0, 24) == doctest::Approx(sq.distance(0, 24)));
}
