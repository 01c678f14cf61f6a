#include "mmsgeo/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>

#include "mmsgeo/minkowski.hpp"
#include "mmsgeo/semigroup.hpp"

namespace mmsgeo {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> candidate_radii(const SampledSpace& space, double delta, const GaugeParams& params) {
    const double h = space.resolution();
    std::vector<double> raw;
    for (double r = std::min(params.min_radius_h * h, delta); r <= delta * (1.0 + 1e-12); r *= params.radius_ratio) {
        raw.push_back(std::min(r, delta));
    }
    if (raw.empty() || raw.back() < delta * (1.0 - 1e-12)) raw.push_back(delta);
    const GridMetric* g = space.grid();
    const bool snap = params.snap_to_grid && g && g->isotropic;
    std::vector<double> out;
    for (double r : raw) {
        if (snap) {
            const double s = g->spacing[0];
            const double k = std::floor(r / s - 0.5 + 1e-9);
            r = (std::max(0.0, k) + 0.5) * s;
        }
        if (out.empty() || r > out.back() * (1.0 + 1e-12)) out.push_back(r);
    }
    return out;
}

// Candidate pool: for every centre within delta of S, the S-points it can
// reach sorted by distance, and per radius the prefix length and gauge cost.
struct Pool {
    std::vector<double> radii;
    std::vector<std::size_t> centers;                 // sample ids, ascending
    std::vector<std::size_t> offset;                  // CSR into reach
    std::vector<std::pair<double, std::size_t>> reach;  // (distance, target index)
    std::vector<std::size_t> prefix;                  // centers x radii
    std::vector<double> cost;                         // centers x radii
};

Pool build_pool(const SampledSpace& space, const std::vector<std::size_t>& targets, double delta,
                const GaugeParams& params) {
    Pool pool;
    pool.radii = candidate_radii(space, delta, params);
    const std::size_t nr = pool.radii.size();
    const double r_top = pool.radii.back();
    const BallQuery ball(space, r_top, true);

    std::vector<std::vector<std::pair<double, std::size_t>>> lists(space.size());
    std::vector<std::uint8_t> seen(space.size(), 0);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        ball.for_each(targets[t], [&](std::size_t c, double d) {
            lists[c].push_back({d, t});
            seen[c] = 1;
        });
    }
    for (std::size_t c = 0; c < space.size(); ++c)
        if (seen[c]) pool.centers.push_back(c);

    pool.offset.push_back(0);
    for (std::size_t c : pool.centers) {
        auto& l = lists[c];
        std::sort(l.begin(), l.end());
        pool.reach.insert(pool.reach.end(), l.begin(), l.end());
        pool.offset.push_back(pool.reach.size());
        l.clear();
        l.shrink_to_fit();
    }

    pool.prefix.assign(pool.centers.size() * nr, 0);
    pool.cost.assign(pool.centers.size() * nr, 0.0);
    parallel_blocks(pool.centers.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<double> mass(nr);
        for (std::size_t ci = begin; ci < end; ++ci) {
            const std::size_t c = pool.centers[ci];
            std::fill(mass.begin(), mass.end(), 0.0);
            ball.for_each(c, [&](std::size_t j, double d) {
                const auto it = std::lower_bound(pool.radii.begin(), pool.radii.end(), d);
                if (it != pool.radii.end()) mass[static_cast<std::size_t>(it - pool.radii.begin())] += space.weight(j);
            });
            double acc = 0.0;
            const auto b = pool.reach.begin() + static_cast<std::ptrdiff_t>(pool.offset[ci]);
            const auto e = pool.reach.begin() + static_cast<std::ptrdiff_t>(pool.offset[ci + 1]);
            for (std::size_t k = 0; k < nr; ++k) {
                acc += mass[k];
                const double r = pool.radii[k];
                pool.cost[ci * nr + k] = acc / (2.0 * r);
                const auto p = std::upper_bound(b, e, std::make_pair(r, std::numeric_limits<std::size_t>::max()));
                pool.prefix[ci * nr + k] = static_cast<std::size_t>(p - b);
            }
        }
    });
    return pool;
}

struct Pick {
    std::size_t ci;
    std::size_t k;
};

std::vector<Pick> greedy(const Pool& pool, std::size_t n_targets) {
    const std::size_t nr = pool.radii.size();
    struct Entry {
        double ratio;
        std::size_t center;
        std::size_t ci;
        std::size_t k;
    };
    // Highest ratio first; ties to the smaller centre id, then the smaller radius.
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        if (a.center != b.center) return a.center > b.center;
        return a.k > b.k;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    for (std::size_t ci = 0; ci < pool.centers.size(); ++ci) {
        for (std::size_t k = 0; k < nr; ++k) {
            const std::size_t n = pool.prefix[ci * nr + k];
            if (n == 0) continue;
            if (k > 0 && pool.prefix[ci * nr + k - 1] == n && pool.cost[ci * nr + k] >= pool.cost[ci * nr + k - 1]) {
                continue;  // same points, no cheaper
            }
            heap.push({static_cast<double>(n) / pool.cost[ci * nr + k], pool.centers[ci], ci, k});
        }
    }
    std::vector<std::uint8_t> covered(n_targets, 0);
    std::size_t remaining = n_targets;
    std::vector<Pick> picks;
    while (remaining > 0 && !heap.empty()) {
        Entry top = heap.top();
        heap.pop();
        std::size_t gain = 0;
        const std::size_t base = pool.offset[top.ci];
        for (std::size_t q = 0; q < pool.prefix[top.ci * nr + top.k]; ++q)
            if (!covered[pool.reach[base + q].second]) ++gain;
        if (gain == 0) continue;
        const double ratio = static_cast<double>(gain) / pool.cost[top.ci * nr + top.k];
        if (ratio < top.ratio && !heap.empty()) {
            top.ratio = ratio;
            if (worse(top, heap.top())) {
                heap.push(top);
                continue;
            }
        }
        for (std::size_t q = 0; q < pool.prefix[top.ci * nr + top.k]; ++q) {
            auto& cv = covered[pool.reach[base + q].second];
            if (!cv) {
                cv = 1;
                --remaining;
            }
        }
        picks.push_back({top.ci, top.k});
    }
    if (remaining > 0) fail(ErrorCode::EmptyFamily, "candidate pool does not cover the target set");
    return picks;
}

void prune(const Pool& pool, std::size_t n_targets, std::vector<Pick>& picks) {
    const std::size_t nr = pool.radii.size();
    auto members = [&](const Pick& p, auto&& fn) {
        const std::size_t base = pool.offset[p.ci];
        for (std::size_t q = 0; q < pool.prefix[p.ci * nr + p.k]; ++q) fn(pool.reach[base + q].second);
    };
    std::vector<std::size_t> count(n_targets, 0);
    for (const Pick& p : picks) members(p, [&](std::size_t t) { ++count[t]; });

    // Drop redundant balls, most expensive first.
    std::vector<std::size_t> order(picks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pool.cost[picks[a].ci * nr + picks[a].k] > pool.cost[picks[b].ci * nr + picks[b].k];
    });
    std::vector<std::uint8_t> keep(picks.size(), 1);
    for (std::size_t idx : order) {
        bool redundant = true;
        members(picks[idx], [&](std::size_t t) { redundant = redundant && count[t] >= 2; });
        if (redundant) {
            keep[idx] = 0;
            members(picks[idx], [&](std::size_t t) { --count[t]; });
        }
    }
    std::vector<Pick> kept;
    for (std::size_t i = 0; i < picks.size(); ++i)
        if (keep[i]) kept.push_back(picks[i]);

    // Cheapest radius at the same centre that still covers the points only this ball covers.
    for (Pick& p : kept) {
        const std::size_t base = pool.offset[p.ci];
        std::size_t need = 0;
        for (std::size_t q = 0; q < pool.prefix[p.ci * nr + p.k]; ++q)
            if (count[pool.reach[base + q].second] == 1) need = q + 1;
        std::size_t best_k = p.k;
        for (std::size_t k = 0; k < nr; ++k) {
            if (pool.prefix[p.ci * nr + k] < need) continue;
            if (pool.cost[p.ci * nr + k] < pool.cost[p.ci * nr + best_k]) best_k = k;
        }
        if (best_k != p.k) {
            members(p, [&](std::size_t t) { --count[t]; });
            p.k = best_k;
            members(p, [&](std::size_t t) { ++count[t]; });
        }
    }
    picks = std::move(kept);
}

struct ExactResult {
    bool certified = false;
    double cost = kInf;
    std::vector<Pick> picks;
};

ExactResult exact_cover(const Pool& pool, std::size_t n_targets, double upper, std::size_t max_nodes) {
    const std::size_t nr = pool.radii.size();
    struct Cand {
        std::uint64_t mask;
        double cost;
        Pick pick;
    };
    std::vector<Cand> cands;
    for (std::size_t ci = 0; ci < pool.centers.size(); ++ci) {
        std::uint64_t mask = 0;
        std::size_t q = 0;
        const std::size_t base = pool.offset[ci];
        for (std::size_t k = 0; k < nr; ++k) {
            for (; q < pool.prefix[ci * nr + k]; ++q) mask |= std::uint64_t{1} << pool.reach[base + q].second;
            if (mask) cands.push_back({mask, pool.cost[ci * nr + k], {ci, k}});
        }
    }
    // Keep the cheapest per mask, then drop candidates dominated by a superset that costs no more.
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.mask != b.mask) return a.mask < b.mask;
        return a.cost < b.cost;
    });
    std::vector<Cand> uniq;
    for (const Cand& c : cands)
        if (uniq.empty() || uniq.back().mask != c.mask) uniq.push_back(c);
    std::vector<Cand> useful;
    for (std::size_t a = 0; a < uniq.size(); ++a) {
        bool dominated = false;
        for (std::size_t b = 0; b < uniq.size() && !dominated; ++b) {
            if (a == b) continue;
            dominated = (uniq[a].mask & ~uniq[b].mask) == 0 && uniq[b].cost <= uniq[a].cost;
        }
        if (!dominated) useful.push_back(uniq[a]);
    }
    std::vector<std::vector<std::size_t>> by_point(n_targets);
    for (std::size_t i = 0; i < useful.size(); ++i)
        for (std::size_t t = 0; t < n_targets; ++t)
            if (useful[i].mask >> t & 1U) by_point[t].push_back(i);
    for (auto& v : by_point)
        std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) { return useful[a].cost < useful[b].cost; });

    const std::uint64_t all = n_targets == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_targets) - 1;
    ExactResult res;
    res.cost = upper * (1.0 + 1e-12);
    std::vector<std::size_t> stack, best_stack;
    std::size_t nodes = 0;
    bool aborted = false;
    std::function<void(std::uint64_t, double)> dfs = [&](std::uint64_t mask, double cost) {
        if (aborted) return;
        if (++nodes > max_nodes) {
            aborted = true;
            return;
        }
        if (mask == all) {
            if (cost < res.cost) {
                res.cost = cost;
                best_stack = stack;
            }
            return;
        }
        std::size_t t = 0;
        while (mask >> t & 1U) ++t;
        for (std::size_t i : by_point[t]) {
            const double c = cost + useful[i].cost;
            if (c >= res.cost) break;  // sorted by cost
            stack.push_back(i);
            dfs(mask | useful[i].mask, c);
            stack.pop_back();
        }
    };
    dfs(0, 0.0);
    res.certified = !aborted;
    for (std::size_t i : best_stack) res.picks.push_back(useful[i].pick);
    return res;
}

void verify_cover(const SampledSpace& space, const std::vector<std::size_t>& targets, const GaugeCover& cover) {
    for (std::size_t t : targets) {
        bool hit = false;
        for (const GaugeBall& b : cover.balls) {
            if (space.distance(b.center, t) <= b.radius) {
                hit = true;
                break;
            }
        }
        if (!hit) fail(ErrorCode::EmptyFamily, "internal: gauge cover misses point " + std::to_string(t));
    }
}

}  // namespace

double ball_gauge(const SampledSpace& space, std::size_t x, double r) {
    if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "ball_gauge needs r > 0");
    if (x >= space.size()) fail(ErrorCode::InvalidArgument, "ball_gauge: point out of range");
    const BallQuery ball(space, r, true);
    double mass = 0.0;
    ball.for_each(x, [&](std::size_t j, double) { mass += space.weight(j); });
    return mass / (2.0 * r);
}

Table GaugeCover::table(const SampledSpace& space, const std::string& name) const {
    Table t{name, {"center", "x", "y", "z", "radius", "cost"}, {}};
    for (const GaugeBall& b : balls) {
        const Point p = space.has_coordinates() ? space.coordinate(b.center) : Point{0.0, 0.0, 0.0};
        t.rows.push_back({static_cast<double>(b.center), p[0], p[1], p[2], b.radius, b.cost});
    }
    return t;
}

GaugeCover hausdorff_delta(const SampledSpace& space, const SetIndicator& set, double delta, const GaugeParams& params) {
    check_binding(space, set);
    const double h = space.resolution();
    if (!(delta > 0.0) || delta < 2.0 * h * (1.0 - 1e-12)) {
        fail(ErrorCode::ResolutionTooCoarse, "hausdorff_delta needs delta >= 2h (delta=" + std::to_string(delta) +
                                                 ", h=" + std::to_string(h) + ")");
    }
    if (!(params.radius_ratio > 1.0)) fail(ErrorCode::InvalidArgument, "radius_ratio must exceed 1");
    if (!(params.min_radius_h > 0.0)) fail(ErrorCode::InvalidArgument, "min_radius_h must be positive");
    GaugeCover cover;
    cover.delta = delta;
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < space.size(); ++i)
        if (set.marks[i]) targets.push_back(i);
    cover.target_points = targets.size();
    if (targets.empty()) return cover;

    const Pool pool = build_pool(space, targets, delta, params);
    const std::size_t nr = pool.radii.size();
    cover.candidates = pool.centers.size() * nr;
    std::vector<Pick> picks = greedy(pool, targets.size());
    prune(pool, targets.size(), picks);
    double cost = 0.0;
    for (const Pick& p : picks) cost += pool.cost[p.ci * nr + p.k];
    cover.greedy_cost = cost;

    if (targets.size() <= std::min<std::size_t>(params.exact_limit, 64)) {
        ExactResult ex = exact_cover(pool, targets.size(), cost, params.max_nodes);
        cover.exact = ex.certified;
        if (!ex.picks.empty() && ex.cost < cost) {
            picks = std::move(ex.picks);
            cost = ex.cost;
        }
    }
    std::sort(picks.begin(), picks.end(), [&](const Pick& a, const Pick& b) {
        if (pool.centers[a.ci] != pool.centers[b.ci]) return pool.centers[a.ci] < pool.centers[b.ci];
        return a.k < b.k;
    });
    cover.cost = 0.0;
    for (const Pick& p : picks) {
        const double c = pool.cost[p.ci * nr + p.k];
        cover.balls.push_back({pool.centers[p.ci], pool.radii[p.k], c});
        cover.cost += c;
    }
    verify_cover(space, targets, cover);
    return cover;
}

HausdorffEstimate hausdorff(const SampledSpace& space, const SetIndicator& set, const HausdorffParams& params) {
    check_binding(space, set);
    const double h = space.resolution();
    const double dmax = params.delta_max > 0.0 ? params.delta_max : 32.0 * h;
    if (dmax < 2.0 * h * (1.0 - 1e-12)) fail(ErrorCode::ResolutionTooCoarse, "delta_max below 2h");
    if (!(params.delta_ratio > 1.0)) fail(ErrorCode::InvalidArgument, "delta_ratio must exceed 1");
    HausdorffEstimate est;
    for (double d = dmax; d >= 2.0 * h * (1.0 - 1e-12); d /= params.delta_ratio) est.delta_grid.push_back(d);

    std::vector<GaugeCover> covers;
    for (double d : est.delta_grid) covers.push_back(hausdorff_delta(space, set, d, params.gauge));
    for (const GaugeCover& c : covers) est.raw_costs.push_back(c.cost);

    bool any_resolved = false;
    for (double d : est.delta_grid) {
        est.resolved.push_back(d >= params.resolved_h * h * (1.0 - 1e-12));
        any_resolved = any_resolved || est.resolved.back();
    }
    if (!any_resolved) est.resolved.assign(est.delta_grid.size(), true);

    // A cover admissible at delta is admissible at every larger delta. The
    // envelope stays inside the resolved range so sub-resolution radii do not
    // leak into it.
    est.costs = est.raw_costs;
    for (std::size_t k = est.costs.size(); k-- > 1;) {
        if (est.resolved[k] == est.resolved[k - 1]) est.costs[k - 1] = std::min(est.costs[k - 1], est.costs[k]);
    }

    double lo = kInf, hi = -kInf;
    std::size_t last = 0;
    est.exact_flag = true;
    for (std::size_t k = 0; k < est.delta_grid.size(); ++k) {
        if (!est.resolved[k]) continue;
        lo = std::min(lo, est.costs[k]);
        hi = std::max(hi, est.costs[k]);
        last = k;
        est.exact_flag = est.exact_flag && covers[k].exact;
    }
    // Costs grow as delta shrinks; the finest resolved delta is the limit estimate.
    est.extrapolated = est.costs[last];
    est.band = hi - lo;

    est.table = Table{"hausdorff", {"delta", "raw_cost", "cost", "greedy_cost", "balls", "exact", "resolved"}, {}};
    for (std::size_t k = 0; k < est.delta_grid.size(); ++k) {
        est.table.rows.push_back({est.delta_grid[k], est.raw_costs[k], est.costs[k], covers[k].greedy_cost,
                                  static_cast<double>(covers[k].balls.size()), covers[k].exact ? 1.0 : 0.0,
                                  est.resolved[k] ? 1.0 : 0.0});
    }
    return est;
}

Report coarea_inequalities(const SampledSpace& space, const ScalarField& f, const SetIndicator& b,
                           std::span<const double> t_grid, double delta, const GaugeInequalityParams& params) {
    check_binding(space, f);
    check_binding(space, b);
    Report rep;
    rep.title = "gauge coarea inequalities";
    const double h = space.resolution();
    const double lip = lipschitz_estimate(space, f, params.slope_scale);

    std::vector<double> ts(t_grid.begin(), t_grid.end());
    if (ts.empty() && !b.is_empty()) {
        double lo = kInf, hi = -kInf;
        for (std::size_t i = 0; i < space.size(); ++i) {
            if (!b.marks[i]) continue;
            lo = std::min(lo, f.values[i]);
            hi = std::max(hi, f.values[i]);
        }
        const int n = std::max(2, params.t_points);
        if (hi > lo) {
            for (int k = 0; k < n; ++k) ts.push_back(lo + (hi - lo) * k / (n - 1));
        }
    }
    std::sort(ts.begin(), ts.end());

    Table tab{"gauge_levels", {"t", "points", "gauge", "balls"}, {}};
    std::vector<double> gauge(ts.size(), 0.0);
    const double slab = h * lip;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        SetIndicator level{space.id(), std::vector<std::uint8_t>(space.size(), 0)};
        for (std::size_t i = 0; i < space.size(); ++i)
            level.marks[i] = b.marks[i] && std::abs(f.values[i] - ts[k]) <= slab;
        const GaugeCover c = hausdorff_delta(space, level, delta, params.gauge);
        gauge[k] = c.cost;
        tab.rows.push_back({ts[k], static_cast<double>(c.target_points), c.cost, static_cast<double>(c.balls.size())});
    }
    double lhs = 0.0;
    for (std::size_t k = 1; k < ts.size(); ++k) lhs += 0.5 * (gauge[k] + gauge[k - 1]) * (ts[k] - ts[k - 1]);

    double lip_a = 0.0, sl = 0.0;
    if (!b.is_empty()) {
        const SlopeField la = asymptotic_lip(space, f, 2.0 * h);
        const SlopeField s = slope_at_scale(space, f, params.slope_scale * h);
        for (std::size_t i = 0; i < space.size(); ++i) {
            if (!b.marks[i]) continue;
            lip_a += la.values[i] * space.weight(i);
            sl += s.values[i] * space.weight(i);
        }
    }
    const double rhs_lipa = lip_a, rhs_sl = 2.0 * sl, rhs_lip = lip * measure(space, b);
    rep.set_value("lhs", lhs);
    rep.set_value("rhs_lip_a", rhs_lipa);
    rep.set_value("rhs_two_sl", rhs_sl);
    rep.set_value("rhs_lip_mass", rhs_lip);
    rep.set_value("lipschitz_estimate", lip);
    rep.set_value("delta", delta);
    rep.check_le("gauge_vs_lip_a", "int H^h(B cap f^-1(t)) dt <= int_B Lip_a f dm", lhs, rhs_lipa,
                 params.tolerance * rhs_lipa);
    rep.check_le("gauge_vs_slope", "int H^h(B cap f^-1(t)) dt <= 2 int_B |grad f| dm", lhs, rhs_sl,
                 params.tolerance * rhs_sl);
    rep.check_le("gauge_vs_lipschitz", "int H^h(B cap f^-1(t)) dt <= Lip(f) m(B)", lhs, rhs_lip,
                 params.tolerance * rhs_lip);
    rep.notes.push_back("level sets discretized as {|f - t| <= h * Lip}");
    rep.tables.push_back(std::move(tab));
    return rep;
}

Report corollary_check(const SampledSpace& space, const ScalarField& f, std::span<const double> t_grid,
                       const CorollaryParams& params) {
    check_binding(space, f);
    Report rep;
    rep.title = "perimeter vs gauge measure of the boundary";
    const double h = space.resolution();
    const double delta = params.delta > 0.0 ? params.delta : 16.0 * h;
    const double reach = params.proxy_h * h;
    Table tab{"corollary_levels", {"t", "perimeter", "gauge", "half_gauge", "proxy_points", "holds"}, {}};
    std::size_t ok = 0;
    for (double t : t_grid) {
        SetIndicator e{space.id(), std::vector<std::uint8_t>(space.size(), 0)};
        for (std::size_t i = 0; i < space.size(); ++i) e.marks[i] = f.values[i] >= t;
        const std::size_t n_in = e.count();
        double per = 0.0, gauge = 0.0;
        std::size_t proxy_points = 0;
        if (n_in > 0 && n_in < space.size()) {
            PerimeterParams pp = params.perimeter;
            pp.cross_check = false;
            per = perimeter(space, e, pp).upper;
            const ScalarField d_in = distance_to_set(space, e);
            const ScalarField d_out = distance_to_set(space, e.complement());
            SetIndicator proxy{space.id(), std::vector<std::uint8_t>(space.size(), 0)};
            for (std::size_t i = 0; i < space.size(); ++i)
                proxy.marks[i] = e.marks[i] ? d_out.values[i] <= reach : d_in.values[i] <= reach;
            proxy_points = proxy.count();
            gauge = hausdorff_delta(space, proxy, delta, params.gauge).cost;
        }
        const bool holds = per >= 0.5 * gauge - params.tolerance * std::max(per, 1e-12);
        if (holds) ++ok;
        tab.rows.push_back({t, per, gauge, 0.5 * gauge, static_cast<double>(proxy_points), holds ? 1.0 : 0.0});
    }
    const double frac = t_grid.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(t_grid.size());
    rep.set_value("holds_fraction", frac);
    rep.set_value("delta", delta);
    rep.check_ge("perimeter_dominates_gauge", "Per(E_t) >= H^h(boundary of E_t)/2 for a.e. t", frac,
                 1.0 - params.fail_fraction);
    rep.notes.push_back("boundary proxy: points with an opposite-membership sample within " +
                        std::to_string(params.proxy_h) + " h; essential boundary not computed");
    rep.notes.push_back("gauge side is a greedy cover cost (upper bound on H^h_delta)");
    rep.tables.push_back(std::move(tab));
    return rep;
}

}  // namespace mmsgeo
