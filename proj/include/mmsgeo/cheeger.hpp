#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmsgeo/minkowski.hpp"
#include "mmsgeo/perimeter.hpp"
#include "mmsgeo/report.hpp"
#include "mmsgeo/space.hpp"

namespace mmsgeo {

enum class BoundaryDefinition { MinkowskiLower, MinkowskiUpper, Perimeter };
const char* to_string(BoundaryDefinition d);  // minl, minu, per
BoundaryDefinition parse_boundary_definition(const std::string& name);

// Candidate sets for the Cheeger infimum.
struct FamilySpec {
    enum class Kind { BallSweep, SublevelSweep, Explicit, Exhaustive };
    Kind kind = Kind::BallSweep;
    // ball_sweep: closed balls B(x_i, k diam / radii), k = 1..radii, over at
    // most max_centers evenly strided centres.
    int radii = 64;
    std::size_t max_centers = 64;
    // sublevel_sweep: {g <= t_k} for each field g, t_k = k max(g) / levels.
    // Without fields, distance fields from `seeds` samples drawn with `seed`.
    int levels = 64;
    int seeds = 8;
    std::uint64_t seed = 1;
    std::vector<ScalarField> fields;
    // explicit
    std::vector<SetIndicator> sets;
    // exhaustive: all subsets, spaces of at most this many points
    std::size_t exhaustive_limit = 20;

    std::string describe() const;
};

FamilySpec::Kind parse_family_kind(const std::string& name);
const char* to_string(FamilySpec::Kind kind);

struct CheegerParams {
    // Shorter r-window than the content default: candidates often touch the
    // box, and enlargements that saturate against it spoil long-window fits.
    ContentParams content = [] {
        ContentParams c;
        c.min_points = 10;
        return c;
    }();
    Window window;  // r_min <= 0: default window
    PerimeterParams perimeter;
    // A candidate is resolved when its contents are finite, not diverging,
    // and their bands stay within this fraction of the value.
    double max_relative_band = 0.25;
};

struct CheegerResult {
    double gamma = 0.0;
    double band = 0.0;  // boundary band of the witness divided by its mass
    BoundaryDefinition definition = BoundaryDefinition::Perimeter;
    SetIndicator witness;
    double witness_mass = 0.0;
    std::string family;
    std::size_t candidates = 0;  // feasible candidates evaluated
    Table table;                 // candidate, mass, boundary, band, ratio, resolved

    nlohmann::json summary() const;
};

// inf of boundary(A) / m(A) over the family, 0 < m(A) <= m(X)/2 + max weight.
// Ties go to the smaller mass, then the lexicographically smaller indicator.
CheegerResult cheeger_constant(const SampledSpace& space, const FamilySpec& family, BoundaryDefinition definition,
                               const CheegerParams& params = {});

struct CheegerComparison {
    CheegerResult per;
    CheegerResult minl;
    CheegerResult minu;
    Table candidates;  // per-candidate values under all three definitions
    Report report;
};

struct CompareParams {
    CheegerParams cheeger;
    double tolerance = 0.03;  // relative, for the equality verdict
};

// The three Cheeger constants on one family, taken over the resolved
// candidates when there are any: per-candidate ordering Per <= M_- <= M_+
// within bands, gamma ordering, and gamma equality.
CheegerComparison compare_definitions(const SampledSpace& space, const FamilySpec& family,
                                      const CompareParams& params = {});

}  // namespace mmsgeo
