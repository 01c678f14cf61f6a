#include "mmsgeo/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace mmsgeo {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<SetIndicator> generate(const SampledSpace& space, const FamilySpec& fam) {
    std::vector<SetIndicator> out;
    const std::size_t n = space.size();
    switch (fam.kind) {
        case FamilySpec::Kind::BallSweep: {
            if (fam.radii < 1 || fam.max_centers < 1) fail(ErrorCode::InvalidArgument, "ball_sweep needs radii, centres");
            const double diam = space.diameter();
            const std::size_t stride = std::max<std::size_t>(1, (n + fam.max_centers - 1) / fam.max_centers);
            for (std::size_t c = 0; c < n; c += stride) {
                std::vector<double> d(n);
                for (std::size_t j = 0; j < n; ++j) d[j] = space.distance(c, j);
                for (int k = 1; k <= fam.radii; ++k) {
                    const double r = diam * k / fam.radii;
                    SetIndicator s{space.id(), std::vector<std::uint8_t>(n, 0)};
                    for (std::size_t j = 0; j < n; ++j) s.marks[j] = d[j] <= r;
                    out.push_back(std::move(s));
                }
            }
            break;
        }
        case FamilySpec::Kind::SublevelSweep: {
            if (fam.levels < 1) fail(ErrorCode::InvalidArgument, "sublevel_sweep needs levels >= 1");
            std::vector<ScalarField> fields = fam.fields;
            if (fields.empty()) {
                if (fam.seeds < 1) fail(ErrorCode::InvalidArgument, "sublevel_sweep needs seeds >= 1");
                std::mt19937_64 rng(fam.seed);
                std::uniform_int_distribution<std::size_t> pick(0, n - 1);
                for (int s = 0; s < fam.seeds; ++s) {
                    const std::size_t x = pick(rng);
                    ScalarField g{space.id(), std::vector<double>(n)};
                    for (std::size_t j = 0; j < n; ++j) g.values[j] = space.distance(x, j);
                    fields.push_back(std::move(g));
                }
            }
            for (const ScalarField& g : fields) {
                check_binding(space, g);
                double lo = kInf, hi = -kInf;
                for (double v : g.values) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                for (int k = 1; k <= fam.levels; ++k) {
                    const double t = lo + (hi - lo) * k / fam.levels;
                    SetIndicator s{space.id(), std::vector<std::uint8_t>(n, 0)};
                    for (std::size_t j = 0; j < n; ++j) s.marks[j] = g.values[j] <= t;
                    out.push_back(std::move(s));
                }
            }
            break;
        }
        case FamilySpec::Kind::Explicit:
            for (const SetIndicator& s : fam.sets) {
                check_binding(space, s);
                out.push_back(s);
            }
            break;
        case FamilySpec::Kind::Exhaustive: {
            if (n > std::min<std::size_t>(fam.exhaustive_limit, 24)) {
                fail(ErrorCode::InvalidArgument, "exhaustive family needs at most " +
                                                     std::to_string(fam.exhaustive_limit) + " points");
            }
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
                SetIndicator s{space.id(), std::vector<std::uint8_t>(n, 0)};
                for (std::size_t j = 0; j < n; ++j) s.marks[j] = mask >> j & 1U;
                out.push_back(std::move(s));
            }
            break;
        }
    }
    return out;
}

struct Candidate {
    SetIndicator set;
    double mass = 0.0;
    // per definition: boundary, band; NaN when the estimate failed
    double value[3] = {kInf, kInf, kInf};
    double band[3] = {0.0, 0.0, 0.0};
    bool resolved = true;
    std::string error;
};

std::size_t index_of(BoundaryDefinition d) { return static_cast<std::size_t>(d); }

// Feasible, deduplicated candidates in generation order.
std::vector<Candidate> feasible(const SampledSpace& space, const FamilySpec& fam) {
    const double cap = 0.5 * space.total_mass() + space.max_weight();
    std::set<std::vector<std::uint8_t>> seen;
    std::vector<Candidate> out;
    for (SetIndicator& s : generate(space, fam)) {
        const double m = measure(space, s);
        if (!(m > 0.0) || m > cap * (1.0 + 1e-12)) continue;
        if (!seen.insert(s.marks).second) continue;
        Candidate c;
        c.mass = m;
        c.set = std::move(s);
        out.push_back(std::move(c));
    }
    return out;
}

void evaluate(const SampledSpace& space, std::vector<Candidate>& cands, const bool want[3], const CheegerParams& p) {
    Window w = p.window;
    for (Candidate& c : cands) {
        try {
            if (want[0] || want[1]) {
                if (!(w.r_min > 0.0)) w = default_window(space, p.content);
                const ScalarField d = distance_to_set(space, c.set);
                const ContentEstimate lo = content_from_distance(space, c.set, d, w, ContentKind::Lower, p.content);
                c.value[0] = lo.extrapolated;
                c.band[0] = lo.band;
                auto tight = [&](const ContentEstimate& e) {
                    return !e.diverging && std::isfinite(e.extrapolated) &&
                           e.band <= p.max_relative_band * std::abs(e.extrapolated);
                };
                c.resolved = tight(lo);
                if (want[1]) {
                    const ContentEstimate up = content_from_distance(space, c.set, d, w, ContentKind::Upper, p.content);
                    c.value[1] = up.extrapolated;
                    c.band[1] = up.band;
                    c.resolved = c.resolved && tight(up);
                }
            }
            if (want[2]) {
                PerimeterParams pp = p.perimeter;
                pp.cross_check = false;
                const PerimeterEstimate pe = perimeter(space, c.set, pp);
                c.value[2] = pe.upper;
                c.band[2] = pe.band;
            }
        } catch (const Error& e) {
            c.error = e.what();
            c.resolved = false;
            for (int k = 0; k < 3; ++k) c.value[k] = kInf;
        }
    }
}

bool better(const Candidate& a, double ra, const Candidate& b, double rb) {
    if (ra != rb) return ra < rb;
    if (a.mass != b.mass) return a.mass < b.mass;
    return a.set.marks < b.set.marks;
}

CheegerResult pick(const std::vector<Candidate>& cands, BoundaryDefinition def, const FamilySpec& fam,
                   bool resolved_only) {
    const std::size_t k = index_of(def);
    CheegerResult res;
    res.definition = def;
    res.family = fam.describe();
    res.table = Table{std::string("cheeger_") + to_string(def), {"candidate", "mass", "boundary", "band", "ratio",
                                                                  "resolved"}, {}};
    const Candidate* best = nullptr;
    double best_ratio = kInf;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const Candidate& c = cands[i];
        const double ratio = c.value[k] / c.mass;
        res.table.rows.push_back({static_cast<double>(i), c.mass, c.value[k], c.band[k], ratio, c.resolved ? 1.0 : 0.0});
        if (!std::isfinite(ratio)) continue;
        if (resolved_only && !c.resolved) continue;
        ++res.candidates;
        if (!best || better(c, ratio, *best, best_ratio)) {
            best = &c;
            best_ratio = ratio;
        }
    }
    if (!best) fail(ErrorCode::EmptyFamily, "no feasible candidate with a finite boundary estimate");
    res.gamma = best_ratio;
    res.band = best->band[k] / best->mass;
    res.witness = best->set;
    res.witness_mass = best->mass;
    return res;
}

}  // namespace

const char* to_string(BoundaryDefinition d) {
    switch (d) {
        case BoundaryDefinition::MinkowskiLower: return "minl";
        case BoundaryDefinition::MinkowskiUpper: return "minu";
        case BoundaryDefinition::Perimeter: return "per";
    }
    return "unknown";
}

BoundaryDefinition parse_boundary_definition(const std::string& name) {
    if (name == "minl") return BoundaryDefinition::MinkowskiLower;
    if (name == "minu") return BoundaryDefinition::MinkowskiUpper;
    if (name == "per") return BoundaryDefinition::Perimeter;
    fail(ErrorCode::InvalidArgument, "unknown boundary definition '" + name + "' (minl, minu, per)");
}

const char* to_string(FamilySpec::Kind kind) {
    switch (kind) {
        case FamilySpec::Kind::BallSweep: return "ball_sweep";
        case FamilySpec::Kind::SublevelSweep: return "sublevel_sweep";
        case FamilySpec::Kind::Explicit: return "explicit";
        case FamilySpec::Kind::Exhaustive: return "exhaustive";
    }
    return "unknown";
}

FamilySpec::Kind parse_family_kind(const std::string& name) {
    if (name == "ball_sweep") return FamilySpec::Kind::BallSweep;
    if (name == "sublevel_sweep") return FamilySpec::Kind::SublevelSweep;
    if (name == "explicit") return FamilySpec::Kind::Explicit;
    if (name == "exhaustive") return FamilySpec::Kind::Exhaustive;
    fail(ErrorCode::InvalidArgument, "unknown family '" + name + "'");
}

std::string FamilySpec::describe() const {
    switch (kind) {
        case Kind::BallSweep:
            return "ball_sweep(radii=" + std::to_string(radii) + ", max_centers=" + std::to_string(max_centers) + ")";
        case Kind::SublevelSweep:
            if (!fields.empty()) {
                return "sublevel_sweep(fields=" + std::to_string(fields.size()) + ", levels=" + std::to_string(levels) + ")";
            }
            return "sublevel_sweep(distance seeds=" + std::to_string(seeds) + ", seed=" + std::to_string(seed) +
                   ", levels=" + std::to_string(levels) + ")";
        case Kind::Explicit: return "explicit(" + std::to_string(sets.size()) + " sets)";
        case Kind::Exhaustive: return "exhaustive";
    }
    return "unknown";
}

nlohmann::json CheegerResult::summary() const {
    return {{"gamma", gamma},
            {"band", band},
            {"definition", to_string(definition)},
            {"witness_mass", witness_mass},
            {"witness_points", witness.count()},
            {"family", family},
            {"candidates", candidates}};
}

CheegerResult cheeger_constant(const SampledSpace& space, const FamilySpec& family, BoundaryDefinition definition,
                               const CheegerParams& params) {
    if (!std::isfinite(space.total_mass())) fail(ErrorCode::InvalidArgument, "Cheeger constant needs m(X) finite");
    std::vector<Candidate> cands = feasible(space, family);
    if (cands.empty()) fail(ErrorCode::EmptyFamily, "no candidate meets 0 < m(A) <= m(X)/2");
    bool want[3] = {false, false, false};
    want[index_of(definition)] = true;
    if (definition == BoundaryDefinition::MinkowskiUpper) want[0] = true;
    evaluate(space, cands, want, params);
    return pick(cands, definition, family, false);
}

CheegerComparison compare_definitions(const SampledSpace& space, const FamilySpec& family,
                                      const CompareParams& params) {
    if (!std::isfinite(space.total_mass())) fail(ErrorCode::InvalidArgument, "Cheeger constant needs m(X) finite");
    if (!(params.tolerance > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
    std::vector<Candidate> cands = feasible(space, family);
    if (cands.empty()) fail(ErrorCode::EmptyFamily, "no candidate meets 0 < m(A) <= m(X)/2");
    const bool want[3] = {true, true, true};
    evaluate(space, cands, want, params.cheeger);

    CheegerComparison out;
    bool any_resolved = false;
    for (const Candidate& c : cands) any_resolved = any_resolved || c.resolved;
    out.per = pick(cands, BoundaryDefinition::Perimeter, family, any_resolved);
    out.minl = pick(cands, BoundaryDefinition::MinkowskiLower, family, any_resolved);
    out.minu = pick(cands, BoundaryDefinition::MinkowskiUpper, family, any_resolved);

    Report& rep = out.report;
    rep.title = "Cheeger constant under three boundary notions";
    out.candidates = Table{"cheeger_candidates",
                           {"candidate", "mass", "per", "per_band", "minl", "minl_band", "minu", "minu_band", "resolved"},
                           {}};
    std::size_t order_violations = 0, unresolved = 0, failed = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const Candidate& c = cands[i];
        out.candidates.rows.push_back({static_cast<double>(i), c.mass, c.value[2], c.band[2], c.value[0], c.band[0],
                                       c.value[1], c.band[1], c.resolved ? 1.0 : 0.0});
        if (!c.error.empty()) ++failed;
        if (!c.resolved) {
            ++unresolved;
            continue;
        }
        if (c.value[2] > c.value[0] + c.band[2] + c.band[0]) ++order_violations;
        if (c.value[0] > c.value[1] + c.band[0] + c.band[1]) ++order_violations;
    }
    rep.set_value("candidates", static_cast<double>(cands.size()));
    rep.set_value("unresolved_candidates", static_cast<double>(unresolved));
    rep.set_value("failed_candidates", static_cast<double>(failed));
    rep.set_value("gamma_per_all", pick(cands, BoundaryDefinition::Perimeter, family, false).gamma);
    rep.set_value("gamma_minl_all", pick(cands, BoundaryDefinition::MinkowskiLower, family, false).gamma);
    rep.set_value("gamma_minu_all", pick(cands, BoundaryDefinition::MinkowskiUpper, family, false).gamma);
    rep.set_value("gamma_per", out.per.gamma);
    rep.set_value("gamma_minl", out.minl.gamma);
    rep.set_value("gamma_minu", out.minu.gamma);
    rep.check_le("candidate_ordering", "Per(A) <= M_-(A) <= M_+(A) per candidate", static_cast<double>(order_violations),
                 0.0);
    rep.check_le("gamma_per_le_minl", "gamma_Per <= gamma_M-", out.per.gamma, out.minl.gamma,
                 out.per.band + out.minl.band);
    rep.check_le("gamma_minl_le_minu", "gamma_M- <= gamma_M+", out.minl.gamma, out.minu.gamma,
                 out.minl.band + out.minu.band);

    if (any_resolved) {
        rep.check_close("gamma_equality", "gamma under M_+, M_- and Per coincide", out.minu.gamma, out.per.gamma,
                        params.tolerance * std::max(out.per.gamma, 1e-12));
    } else {
        rep.notes.push_back("no resolved candidate; equality verdict skipped");
    }
    rep.notes.push_back("family: " + family.describe());
    rep.tables.push_back(out.candidates);
    return out;
}

}  // namespace mmsgeo
