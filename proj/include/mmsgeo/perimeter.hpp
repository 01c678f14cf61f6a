#pragma once

#include <optional>
#include <vector>

#include "mmsgeo/minkowski.hpp"
#include "mmsgeo/report.hpp"
#include "mmsgeo/semigroup.hpp"
#include "mmsgeo/space.hpp"

namespace mmsgeo {

// f = 1 - min(1, d_{A^s} / r') from a precomputed d_{A^s}.
ScalarField recovery_function(const ScalarField& distance_to_grown, double r_prime);
ScalarField recovery_function(const SampledSpace& space, const SetIndicator& set, double s, double r_prime);

// L1(m) distance between f and the indicator of `set`.
double l1_to_indicator(const SampledSpace& space, const ScalarField& f, const SetIndicator& set);

struct PerimeterParams {
    SlopeOptions slope;
    double l1_budget = -1.0;  // < 0: l1_budget_h * h * (slope integral of the (h, 4h) member)
    double l1_budget_h = 4.0;
    double r_max = -1.0;      // bound on s + r'; < 0: 64 h
    bool cross_check = true;  // also run relaxed_content
    RelaxedParams relaxed;
};

struct PerimeterEstimate {
    double upper = 0.0;
    double s = 0.0;
    double r_prime = 0.0;
    double l1_error = 0.0;
    double l1_budget = 0.0;
    // Linear extrapolation of the family costs to s = r' = 0.
    double extrapolated = 0.0;
    // Sensitivity to the neighbouring grid points plus the extrapolation gap.
    double band = 0.0;
    std::optional<ContentEstimate> relaxed;
    double cross_check = 0.0;
    double cross_band = 0.0;
    std::size_t candidates = 0;
    std::size_t feasible = 0;
    ScalarField witness;
    Table table;  // s, r_prime, cost, l1, feasible

    // Point estimate of Per(A): the extrapolation, clamped to [0, upper].
    double value() const;
    bool agrees() const;
    nlohmann::json summary() const;
};

// Minimum of the slope integral over the recovery family; requires m(A) > 0.
PerimeterEstimate perimeter(const SampledSpace& space, const SetIndicator& set, const PerimeterParams& params = {});

// Uniform midpoint grid on [0, max f] plus end caps; atoms get a closed/open node pair.
struct LevelParams {
    int t_points = 64;
    double atom_threshold = -1.0;  // < 0: 0.01 m(X)
    ContentParams content;
    Window window;  // r_min <= 0: default window
};

struct VarEstimate {
    double upper = 0.0;  // integral of the slope
    double lower = 0.0;  // trapezoid integral over t of lower contents of {f >= t}
    double band = 0.0;
    Table levels;
};

VarEstimate total_variation(const SampledSpace& space, const ScalarField& f, const SlopeOptions& slope = {},
                            const LevelParams& levels = {});

struct DescentParams {
    double lambda = 10.0;
    int max_sweeps = 40;
    // Longest axis run tried by block moves at interfaces; 0 disables them.
    int run_length = 32;
    SlopeOptions slope;
    PerimeterParams perimeter;
    // Start from this field instead of the best recovery function.
    std::optional<ScalarField> initial;
};

struct DescentResult {
    ScalarField f;
    std::vector<double> trace;  // objective after each sweep, starting with the initial value
    double slope_integral = 0.0;
    double penalty = 0.0;
    std::size_t accepted_moves = 0;
};

DescentResult variational_descent(const SampledSpace& space, const SetIndicator& set, const DescentParams& params = {});

struct LevelSelection {
    double t = 0.0;
    SetIndicator set;
    double content = 0.0;   // lower content of {f >= t}
    double bound = 0.0;     // (1/(1 - 2 eps)) * integral of the slope
    double band = 0.0;
    bool guarantee = false; // content <= bound + band
    Table table;
};

struct SelectParams {
    int t_points = 15;  // odd, so 0.5 is on the grid
    SlopeOptions slope;
    ContentParams content;
    Window window;
};

// t in an open grid inside (eps, 1 - eps) minimizing the lower content of {f >= t};
// ties go to the t closest to 0.5, then the smaller t.
LevelSelection level_set_select(const SampledSpace& space, const ScalarField& f, double eps,
                                const SelectParams& params = {});

struct CoareaParams {
    LevelParams levels;
    SlopeOptions slope;
    bool with_perimeter = true;
    PerimeterParams perimeter;
    double tolerance = 0.03;      // relative
    double slope_tolerance = 0.05; // |slope - 1| for the unit-slope hypothesis
    double unit_fraction = 0.9;    // mass fraction that must satisfy it
    double fail_fraction = 0.1;
};

struct CoareaReport {
    std::vector<double> t_grid;
    Table per_level;  // t, open, mass, lower, upper, perimeter, perimeter_upper, lower_band
    double lhs = 0.0;
    double rhs_per = 0.0;        // from PerimeterEstimate::value()
    double rhs_per_upper = 0.0;  // from PerimeterEstimate::upper
    double rhs_mink = 0.0;
    double rhs_upper = 0.0;
    std::vector<double> atoms;
    double unit_slope_fraction = 0.0;
    bool unit_slope = false;
    Report report;
};

CoareaReport coarea_check(const SampledSpace& space, const ScalarField& f, const CoareaParams& params = {});

struct DistanceLevelParams {
    Window window;
    ContentParams content;
    PerimeterParams perimeter;
    double tolerance = 0.04;
    double fail_fraction = 0.0;
    double atom_threshold = -1.0;  // < 0: 0.01 m(X)
};

// Level sets of d_A: one-sided contents of {d_A <= t} and {d_A >= t}, the
// perimeter of {d_A <= t}, and the two-sided quotient m(L^r \ L)/(2r) for the
// slab L = {|d_A - t| <= h}.
Report distance_levels(const SampledSpace& space, const SetIndicator& set, std::span<const double> t_grid,
                       const DistanceLevelParams& params = {});

struct Eq13Params {
    SlopeOptions slope;
    double scale = 3.0;        // sl(., scale h) for the identity reference
    double achieved_tol = 0.02;
    double reference_tol = 0.01;
    double l1_limit = 0.02;
};

// Gap-staircase sequence on a fat Cantor interval: constant on the pieces of
// K, rising only across removed gaps, compared with the slope integral of the
// identity.
Report eq13_gap_demo(const SampledSpace& space, const Eq13Params& params = {});

}  // namespace mmsgeo
