#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "mmsgeo/hausdorff.hpp"
#include "mmsgeo/minkowski.hpp"
#include "mmsgeo/semigroup.hpp"

using namespace mmsgeo;

// Seeded random spaces, sets and fields; each invariant is checked exactly
// against a direct evaluation.
namespace {

constexpr int kTrials = 12;

SampledSpace random_space(std::mt19937_64& rng, int trial) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (trial % 4) {
        case 0: {  // Euclidean points in the plane as an explicit metric
            const std::size_t n = 8 + rng() % 20;
            std::vector<std::array<double, 2>> p(n);
            for (auto& q : p) q = {u(rng), u(rng)};
            std::vector<double> d(n * n), w(n);
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = 0.1 + u(rng);
                for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
            }
            return build_explicit(d, w);
        }
        case 1: {  // connected random graph
            const std::size_t n = 6 + rng() % 20;
            std::vector<GraphEdge> edges;
            for (std::size_t i = 1; i < n; ++i) edges.push_back({rng() % i, i, 0.2 + u(rng)});
            for (int k = 0; k < 10; ++k) edges.push_back({rng() % n, rng() % n, 0.2 + u(rng)});
            edges.erase(std::remove_if(edges.begin(), edges.end(), [](const GraphEdge& e) { return e.a == e.b; }),
                        edges.end());
            return build_graph(n, edges, std::vector<double>(n, 1.0 / static_cast<double>(n)));
        }
        case 2: {
            const int n = 8 + static_cast<int>(rng() % 12);
            const std::vector<std::pair<double, double>> box{{0.0, 1.0 + u(rng)}, {0.0, 1.0}};
            return build_grid_box(2, n, box);
        }
        default:
            return build_circle(10 + static_cast<int>(rng() % 60), 0.5 + u(rng));
    }
}

SetIndicator random_set(std::mt19937_64& rng, const SampledSpace& sp, double density) {
    std::bernoulli_distribution coin(density);
    SetIndicator s = SetIndicator::empty(sp);
    for (auto& m : s.marks) m = coin(rng) ? 1 : 0;
    if (s.is_empty()) s.marks[rng() % sp.size()] = 1;
    return s;
}

ScalarField random_field(std::mt19937_64& rng, const SampledSpace& sp) {
    std::normal_distribution<double> g(0.0, 1.0);
    ScalarField f{sp.id(), std::vector<double>(sp.size())};
    for (double& v : f.values) v = g(rng);
    return f;
}

double brute_sup(const SampledSpace& sp, const ScalarField& f, std::size_t i, double t) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sp.size(); ++j)
        if (sp.distance(i, j) < t) best = std::max(best, f[j]);
    return best;
}

std::vector<double> scales(const SampledSpace& sp) {
    const double diam = sp.diameter();
    return {0.07 * diam, 0.2 * diam, 0.45 * diam};
}

}  // namespace

TEST_CASE("property: metric, distance field and measure") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < kTrials; ++trial) {
        CAPTURE(trial);
        const auto sp = random_space(rng, trial);
        CHECK(audit_metric(sp, 2000, static_cast<std::uint64_t>(trial)).violations == 0);
        const auto a = random_set(rng, sp, 0.3);
        const auto b = random_set(rng, sp, 0.3);
        const auto d = distance_to_set(sp, a);
        for (std::size_t i = 0; i < sp.size(); ++i) {
            double ref = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < sp.size(); ++j)
                if (a.contains(j)) ref = std::min(ref, sp.distance(i, j));
            CHECK(d[i] == doctest::Approx(ref).epsilon(1e-12));
        }
        // Monotone under inclusion, exactly.
        CHECK(measure(sp, set_intersection(a, b)) <= measure(sp, a));
        CHECK(measure(sp, a) <= measure(sp, set_union(a, b)));
    }
}

TEST_CASE("property: enlargements") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < kTrials; ++trial) {
        CAPTURE(trial);
        const auto sp = random_space(rng, trial);
        const auto a = random_set(rng, sp, 0.2);
        const auto sc = scales(sp);
        double prev = -1.0;
        for (double r : sc) {
            const auto e = enlarge(sp, a, r);
            const double m = measure(sp, e);
            CHECK(m >= prev);
            prev = m;
            CHECK(is_subset(a, e));
            for (double t : sc) {
                const auto twice = enlarge(sp, e, t);
                CHECK(is_subset(twice, enlarge(sp, a, r + t)));
            }
        }
    }
}

TEST_CASE("property: sup semigroup") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < kTrials; ++trial) {
        CAPTURE(trial);
        const auto sp = random_space(rng, trial);
        const auto f = random_field(rng, sp);
        ScalarField g = f;
        for (double& v : g.values) v += std::abs(std::normal_distribution<double>(0.0, 1.0)(rng));
        const auto sc = scales(sp);
        for (double t : sc) {
            const auto tf = sup_semigroup(sp, f, t);
            const auto tg = sup_semigroup(sp, g, t);
            for (std::size_t i = 0; i < sp.size(); ++i) {
                CHECK(tf[i] == brute_sup(sp, f, i, t));
                CHECK(tf[i] >= f[i]);
                CHECK(tf[i] <= tg[i]);
            }
            for (double s : sc) {
                const auto composed = sup_semigroup(sp, tf, s);
                const auto direct = sup_semigroup(sp, f, s + t);
                for (std::size_t i = 0; i < sp.size(); ++i) CHECK(direct[i] >= composed[i]);
            }
        }
    }
}

TEST_CASE("property: slopes") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < kTrials; ++trial) {
        CAPTURE(trial);
        const auto sp = random_space(rng, trial);
        const auto f = random_field(rng, sp);
        const auto sc = scales(sp);
        for (double raw : sc) {
            const double delta = std::max(raw, 2.0 * sp.resolution());  // Lip_a needs delta >= 2h
            const auto sl = slope_at_scale(sp, f, delta);
            const auto lip = asymptotic_lip(sp, f, delta);
            for (std::size_t i = 0; i < sp.size(); ++i) {
                CHECK(sl[i] >= 0.0);
                CHECK(sl[i] <= lip[i] * (1 + 1e-12));
                double ref = 0.0;
                for (std::size_t j = 0; j < sp.size(); ++j) {
                    const double dij = sp.distance(i, j);
                    if (dij > 0.0 && dij <= delta) ref = std::max(ref, std::abs(f[j] - f[i]) / dij);
                }
                CHECK(sl[i] == doctest::Approx(ref).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("property: gauge covers cover their target") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 6; ++trial) {
        CAPTURE(trial);
        const auto sp = build_grid_box(2, 48, std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.0, 1.0}});
        SetIndicator s = SetIndicator::empty(sp);
        const std::size_t k = 1 + rng() % 9;
        for (std::size_t j = 0; j < k; ++j) s.marks[rng() % sp.size()] = 1;
        GaugeParams params;
        params.min_radius_h = 2.0;
        const auto cover = hausdorff_delta(sp, s, 0.2, params);
        for (std::size_t i = 0; i < sp.size(); ++i) {
            if (!s.contains(i)) continue;
            bool hit = false;
            for (const auto& ball : cover.balls) {
                hit = hit || sp.distance(i, ball.center) <= ball.radius;
                CHECK(ball.radius <= 0.2 * (1 + 1e-12));
            }
            CHECK(hit);
        }
        CHECK(cover.cost <= cover.greedy_cost * (1 + 1e-12));
        if (cover.exact) CHECK(cover.greedy_cost <= 1.3 * cover.cost);
    }
}
