#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mmsgeo/report.hpp"
#include "mmsgeo/space.hpp"

namespace mmsgeo {

// Exact d_A(x) = min over marked y of d(x, y). Grids use an exact separable
// distance transform, circles a ring sweep, graphs multi-source Dijkstra.
ScalarField distance_to_set(const SampledSpace& space, const SetIndicator& set);

// A^r = {d_A < r}.
SetIndicator enlarge(const SampledSpace& space, const SetIndicator& set, double r);
SetIndicator enlarge_from_distance(const ScalarField& distance, double r);

struct Profile {
    std::vector<double> r_values;
    std::vector<double> masses;
    double base_mass = 0.0;

    Table table() const;
};

// Windows below floor_factor * h are rejected.
Profile profile(const SampledSpace& space, const SetIndicator& set, std::span<const double> r_grid,
                double floor_factor = 5.0);

struct Window {
    double r_min = 0.0;
    double r_max = 0.0;
};

struct ContentParams {
    double floor_factor = 5.0;
    double ratio = 1.189207115002721;  // 2^{1/4}
    int min_points = 16;
    // Dense fit grid: this many sub-steps per ratio step.
    int fit_density = 8;
    // Treat each grid/circle sample as a cell of one spacing across when fitting,
    // which removes the lattice staircase from the quotient trace.
    bool subcell = true;
    // Log-log slope of quotient vs r at or below which a set is flagged diverging.
    double divergence_exponent = -0.25;
};

// [c h, c h ratio^{min_points-1}]
Window default_window(const SampledSpace& space, const ContentParams& params = {});
std::vector<double> geometric_grid(const Window& window, double ratio);

enum class ContentKind { Lower, Upper, Relaxed };
const char* to_string(ContentKind kind);

struct RelaxedWitness {
    double s = 0.0;
    double r_prime = 0.0;
    double t = 1.0;
    double l1_error = 0.0;
    SetIndicator set;
    std::size_t candidates = 0;
    std::size_t feasible = 0;
};

struct ContentEstimate {
    ContentKind kind = ContentKind::Lower;
    Window window;
    std::vector<double> r_values;
    std::vector<double> masses;
    std::vector<double> quotients;
    double base_mass = 0.0;
    double inf_quotient = 0.0;
    double sup_quotient = 0.0;
    // Boundary rate at r -> 0 from the fit (m(A^r) - m(A))/r ~ a/r + rate + b r,
    // shifted to the lower/upper residual envelope for the lower/upper kinds.
    // Quotients above are exact; the fit runs on a denser, cell-smoothed trace.
    double extrapolated = 0.0;
    double fit_rate = 0.0;
    double band = 0.0;
    bool diverging = false;
    double growth_exponent = 0.0;
    // r at which A^r fills X when that happens inside the window (fit and
    // divergence test stop there); 0 otherwise. `saturated`: fewer than three
    // fit radii survive and the estimate is the quotient at that radius.
    double saturation_radius = 0.0;
    bool saturated = false;
    std::optional<RelaxedWitness> witness;

    double value() const { return extrapolated; }
    Table table() const;
    nlohmann::json summary() const;
};

// Content estimate from a precomputed distance field and the base set.
ContentEstimate content_from_distance(const SampledSpace& space, const SetIndicator& set, const ScalarField& distance,
                                      const Window& window, ContentKind kind, const ContentParams& params = {});
ContentEstimate content(const SampledSpace& space, const SetIndicator& set, const Window& window, ContentKind kind,
                        const ContentParams& params = {});

struct RelaxedParams {
    Window window;  // r-window for each candidate's content
    ContentParams content;
    double l1_budget = -1.0;  // < 0: min(0.1 m(A), l1_budget_h * h * lower content of A)
    double l1_budget_h = 4.0;
    double r_max = -1.0;      // bound on s + r'; < 0: 32 h + 32 h
    std::vector<double> t_grid{0.1, 0.3, 0.5, 0.7, 0.9};
};

// Minimum lower content over superlevel sets {f >= t} of
// f = 1 - min(1, d_{A^s}/r'), which are {d_{A^s} <= (1 - t) r'}. A itself is
// part of the family, so the result never exceeds content(A, lower).
ContentEstimate relaxed_content(const SampledSpace& space, const SetIndicator& set, const RelaxedParams& params);

// (A^s)^t subset of A^{s+t}; counts violations and strict-inclusion points.
Report check_semigroup_inclusion(const SampledSpace& space, const SetIndicator& set, double s, double t);

// For each r in the window: (m(A^r) - m(A))/r >= mean_j (m((A^{s_j})^d) - m(A^{s_j}))/d
// with d = r/n and s_j = j d, j = 0..n-1.
Report check_mean_value_inequality(const SampledSpace& space, const SetIndicator& set, const Window& window,
                                   int subdivisions = 4, const ContentParams& params = {});

}  // namespace mmsgeo
