#pragma once

#include <vector>

#include "mmsgeo/perimeter.hpp"
#include "mmsgeo/report.hpp"
#include "mmsgeo/space.hpp"

namespace mmsgeo {

// m(closed ball B(x, r)) / (2r).
double ball_gauge(const SampledSpace& space, std::size_t x, double r);

struct GaugeBall {
    std::size_t center = 0;
    double radius = 0.0;
    double cost = 0.0;
};

struct GaugeCover {
    std::vector<GaugeBall> balls;
    double cost = 0.0;
    double delta = 0.0;
    double greedy_cost = 0.0;  // before the exact search
    bool exact = false;        // branch-and-bound certified optimality over the pool
    std::size_t target_points = 0;
    std::size_t candidates = 0;

    // center coordinates, radius, gauge cost
    Table table(const SampledSpace& space, const std::string& name = "gauge_cover") const;
};

struct GaugeParams {
    std::size_t exact_limit = 12;
    double radius_ratio = 1.4142135623730951;
    // Smallest candidate radius in units of h (delta itself when delta is
    // smaller). Below a few cells the lattice ball count swings by +-25% around
    // the continuum volume and a minimizing cover would exploit it.
    double min_radius_h = 8.0;
    // Isotropic grids: radii become (k + 1/2) spacing, so a ball meets an axis
    // row of samples in a chord of length exactly 2r.
    bool snap_to_grid = true;
    std::size_t max_nodes = 2000000;  // branch-and-bound node cap
};

// Greedy weighted set cover by closed balls of radius <= delta (centres at
// samples, radii on a geometric grid from min_radius_h h), a pruning pass, and exhaustive
// search when |S| <= exact_limit. Requires delta >= 2h.
GaugeCover hausdorff_delta(const SampledSpace& space, const SetIndicator& set, double delta,
                           const GaugeParams& params = {});

struct HausdorffParams {
    GaugeParams gauge;
    double delta_max = -1.0;  // < 0: 32 h
    double delta_ratio = 1.4142135623730951;
    // Deltas below resolved_h * h see the sampling (covers degenerate to point
    // counts) and are reported but left out of the limit estimate.
    double resolved_h = 16.0;
};

struct HausdorffEstimate {
    std::vector<double> delta_grid;  // decreasing
    std::vector<double> costs;       // nondecreasing as delta decreases within each resolved/unresolved run
    std::vector<double> raw_costs;   // per-delta search result before the monotone envelope
    std::vector<bool> resolved;
    double extrapolated = 0.0;
    double band = 0.0;
    bool exact_flag = false;  // every resolved delta certified
    Table table;
};

HausdorffEstimate hausdorff(const SampledSpace& space, const SetIndicator& set, const HausdorffParams& params = {});

struct GaugeInequalityParams {
    GaugeParams gauge;
    double tolerance = 0.05;  // relative band on each right-hand side
    double slope_scale = 3.0;  // sl(., slope_scale h)
    int t_points = 33;         // default t grid when none is given
};

// Integral over t of the gauge measure of B cap {|f - t| <= h Lip} against
// int_B Lip_a, 2 int_B sl and Lip(f) m(B).
Report coarea_inequalities(const SampledSpace& space, const ScalarField& f, const SetIndicator& b,
                           std::span<const double> t_grid, double delta, const GaugeInequalityParams& params = {});

struct CorollaryParams {
    GaugeParams gauge;
    PerimeterParams perimeter;
    double delta = -1.0;     // < 0: 16 h
    double proxy_h = 3.0;    // boundary proxy radius in units of h
    double tolerance = 0.03;
    double fail_fraction = 0.1;
};

// Per(E_t) >= H^h(boundary proxy of E_t) / 2 for E_t = {f >= t}. The proxy is
// the set of points with an opposite-membership sample within proxy_h * h; the
// gauge side is a greedy upper bound, which keeps the verdict conservative.
Report corollary_check(const SampledSpace& space, const ScalarField& f, std::span<const double> t_grid,
                       const CorollaryParams& params = {});

}  // namespace mmsgeo
