#include "mmsgeo/minkowski.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <Eigen/Dense>

namespace mmsgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

// Lower envelope of parabolas w (q - v)^2 + f(v) (Felzenszwalb-Huttenlocher).
void transform_line(const double* f, double* out, std::size_t n, double w, std::vector<std::int64_t>& v,
                    std::vector<double>& z) {
    v.resize(n);
    z.resize(n + 1);
    std::int64_t k = -1;
    for (std::size_t qi = 0; qi < n; ++qi) {
        if (!std::isfinite(f[qi])) continue;
        const auto q = static_cast<std::int64_t>(qi);
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s = 0.0;
        while (true) {
            const std::int64_t p = v[static_cast<std::size_t>(k)];
            s = ((f[qi] + w * static_cast<double>(q * q)) - (f[p] + w * static_cast<double>(p * p))) /
                (2.0 * w * static_cast<double>(q - p));
            if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
                --k;
                continue;
            }
            if (s <= z[static_cast<std::size_t>(k)]) {
                // k == 0 and the new parabola dominates everywhere.
                v[0] = q;
                z[0] = -kInf;
                z[1] = kInf;
                k = -2;
            }
            break;
        }
        if (k == -2) {
            k = 0;
            continue;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = kInf;
    }
    if (k < 0) {
        for (std::size_t qi = 0; qi < n; ++qi) out[qi] = kInf;
        return;
    }
    std::size_t j = 0;
    for (std::size_t qi = 0; qi < n; ++qi) {
        const double q = static_cast<double>(qi);
        while (z[j + 1] < q) ++j;
        const std::int64_t p = v[j];
        const std::int64_t dq = static_cast<std::int64_t>(qi) - p;
        out[qi] = f[p] + static_cast<double>(dq * dq) * w;
    }
}

ScalarField grid_distance(const SampledSpace& space, const GridMetric& g, const SetIndicator& set) {
    const std::size_t total = space.size();
    std::vector<double> sq(total);
    for (std::size_t i = 0; i < total; ++i) sq[i] = set.marks[i] ? 0.0 : kInf;
    for (int axis = 0; axis < g.dims; ++axis) {
        const auto len = static_cast<std::size_t>(g.n[axis]);
        const std::size_t lines = total / len;
        const double w = g.isotropic ? 1.0 : g.spacing[axis] * g.spacing[axis];
        std::size_t stride = 1;
        for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(g.n[a]);
        parallel_blocks(lines, [&](std::size_t, std::size_t begin, std::size_t end) {
            std::vector<double> in(len), out(len), z;
            std::vector<std::int64_t> v;
            for (std::size_t line = begin; line < end; ++line) {
                // line enumerates (low index below axis, high index above axis)
                const std::size_t low = line % stride;
                const std::size_t high = line / stride;
                const std::size_t base = low + high * stride * len;
                for (std::size_t q = 0; q < len; ++q) in[q] = sq[base + q * stride];
                transform_line(in.data(), out.data(), len, w, v, z);
                for (std::size_t q = 0; q < len; ++q) sq[base + q * stride] = out[q];
            }
        });
    }
    ScalarField d{space.id(), std::vector<double>(total)};
    for (std::size_t i = 0; i < total; ++i) {
        d.values[i] = g.isotropic ? g.spacing[0] * std::sqrt(sq[i]) : std::sqrt(sq[i]);
    }
    return d;
}

ScalarField circle_distance(const SampledSpace& space, const CircleMetric& c, const SetIndicator& set) {
    const auto n = static_cast<std::size_t>(c.n);
    std::vector<std::int64_t> k(n, c.n);
    for (std::size_t i = 0; i < n; ++i)
        if (set.marks[i]) k[i] = 0;
    for (std::size_t pass = 0; pass < 2 * n; ++pass) {
        const std::size_t i = pass % n;
        const std::size_t prev = (i + n - 1) % n;
        k[i] = std::min(k[i], k[prev] + 1);
    }
    for (std::size_t pass = 0; pass < 2 * n; ++pass) {
        const std::size_t i = n - 1 - (pass % n);
        const std::size_t next = (i + 1) % n;
        k[i] = std::min(k[i], k[next] + 1);
    }
    ScalarField d{space.id(), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) d.values[i] = c.step * static_cast<double>(k[i]);
    return d;
}

ScalarField graph_distance(const SampledSpace& space, const GraphMetric& g, const SetIndicator& set) {
    std::vector<double> dist(g.n, kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t i = 0; i < g.n; ++i)
        if (set.marks[i]) {
            dist[i] = 0.0;
            pq.emplace(0.0, i);
        }
    while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du > dist[u]) continue;
        for (auto [v, len] : g.adjacency[u]) {
            if (du + len < dist[v]) {
                dist[v] = du + len;
                pq.emplace(dist[v], v);
            }
        }
    }
    return {space.id(), std::move(dist)};
}

ScalarField brute_distance(const SampledSpace& space, const SetIndicator& set) {
    std::vector<std::size_t> sources;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set.marks[i]) sources.push_back(i);
    ScalarField d{space.id(), std::vector<double>(space.size(), kInf)};
    parallel_blocks(space.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (set.marks[i]) {
                d.values[i] = 0.0;
                continue;
            }
            double best = kInf;
            for (std::size_t s : sources) best = std::min(best, space.distance(i, s));
            d.values[i] = best;
        }
    });
    return d;
}

struct RateFit {
    double rate = 0.0;
    std::vector<double> residuals;
};

// Least squares q(r) ~ a/r + rate + b r (a/r + rate with fewer than five points).
RateFit fit_quotients(const std::vector<double>& r, const std::vector<double>& q) {
    const auto n = static_cast<Eigen::Index>(r.size());
    const int cols = n >= 5 ? 3 : 2;
    const double scale = r.front();
    Eigen::MatrixXd a(n, cols);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = r[static_cast<std::size_t>(i)] / scale;
        a(i, 0) = 1.0 / rho;
        a(i, 1) = 1.0;
        if (cols == 3) a(i, 2) = rho;
        b(i) = q[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
    RateFit fit;
    fit.rate = coef(1);
    const Eigen::VectorXd res = b - a * coef;
    fit.residuals.assign(res.data(), res.data() + n);
    return fit;
}

double loglog_slope(const std::vector<double>& r, const std::vector<double>& q) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!(q[i] > 0.0)) return 0.0;
        const double x = std::log(r[i]);
        const double y = std::log(q[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2 || den == 0.0) return 0.0;
    return (n * sxy - sx * sy) / den;
}

// Width of one sample cell for sub-cell smoothing; 0 where samples are not cells.
double cell_width(const SampledSpace& space) {
    if (const GridMetric* g = space.grid()) {
        double w = g->spacing[0];
        for (int a = 1; a < g->dims; ++a) w = std::min(w, g->spacing[a]);
        return w;
    }
    if (const CircleMetric* c = space.circle()) return c->step;
    return 0.0;
}

void check_window(const SampledSpace& space, const Window& w, const ContentParams& params) {
    if (!(w.r_min > 0.0) || !(w.r_max >= w.r_min)) fail(ErrorCode::InvalidArgument, "window must satisfy 0 < r_min <= r_max");
    if (w.r_min < params.floor_factor * space.resolution() * (1.0 - 1e-12)) {
        fail(ErrorCode::ResolutionTooCoarse, "r below resolution floor: r_min=" + std::to_string(w.r_min) +
                                                 " < " + std::to_string(params.floor_factor) + " h");
    }
}

}  // namespace

ScalarField distance_to_set(const SampledSpace& space, const SetIndicator& set) {
    check_binding(space, set);
    if (set.is_empty()) fail(ErrorCode::EmptySet, "distance to an empty set is undefined");
    if (const GridMetric* g = space.grid()) return grid_distance(space, *g, set);
    if (const CircleMetric* c = space.circle()) return circle_distance(space, *c, set);
    if (const auto* g = std::get_if<GraphMetric>(&space.metric())) return graph_distance(space, *g, set);
    return brute_distance(space, set);
}

SetIndicator enlarge_from_distance(const ScalarField& distance, double r) {
    SetIndicator s{distance.space_id, std::vector<std::uint8_t>(distance.size(), 0)};
    for (std::size_t i = 0; i < distance.size(); ++i) s.marks[i] = distance.values[i] < r ? 1 : 0;
    return s;
}

SetIndicator enlarge(const SampledSpace& space, const SetIndicator& set, double r) {
    if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "enlargement radius must be positive");
    return enlarge_from_distance(distance_to_set(space, set), r);
}

Table Profile::table() const {
    Table t{"profile", {"r", "mass", "quotient"}, {}};
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        t.rows.push_back({r_values[i], masses[i], (masses[i] - base_mass) / r_values[i]});
    }
    return t;
}

Profile profile(const SampledSpace& space, const SetIndicator& set, std::span<const double> r_grid,
                double floor_factor) {
    check_binding(space, set);
    if (r_grid.empty()) fail(ErrorCode::InvalidArgument, "empty r grid");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 0.0)) fail(ErrorCode::InvalidArgument, "r grid must be positive");
        if (i && !(r_grid[i] > r_grid[i - 1])) fail(ErrorCode::InvalidArgument, "r grid must be increasing");
    }
    if (r_grid.front() < floor_factor * space.resolution() * (1.0 - 1e-12)) {
        fail(ErrorCode::ResolutionTooCoarse, "r below resolution floor");
    }
    Profile p;
    p.base_mass = measure(space, set);
    p.r_values.assign(r_grid.begin(), r_grid.end());
    if (set.is_empty()) {
        p.masses.assign(r_grid.size(), 0.0);
        return p;
    }
    const ScalarField d = distance_to_set(space, set);
    std::vector<double> bucket(r_grid.size(), 0.0);
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (set.marks[i]) continue;
        const auto it = std::upper_bound(r_grid.begin(), r_grid.end(), d.values[i]);
        if (it != r_grid.end()) bucket[static_cast<std::size_t>(it - r_grid.begin())] += space.weight(i);
    }
    double acc = p.base_mass;
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        acc += bucket[k];
        p.masses.push_back(acc);
    }
    return p;
}

Window default_window(const SampledSpace& space, const ContentParams& params) {
    const double r_min = params.floor_factor * space.resolution();
    return {r_min, r_min * std::pow(params.ratio, params.min_points - 1) * (1.0 + 1e-12)};
}

std::vector<double> geometric_grid(const Window& window, double ratio) {
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double r = window.r_min * std::pow(ratio, k);
        if (r > window.r_max * (1.0 + 1e-12)) break;
        grid.push_back(r);
        if (k > 10000) break;
    }
    return grid;
}

const char* to_string(ContentKind kind) {
    switch (kind) {
        case ContentKind::Lower: return "lower";
        case ContentKind::Upper: return "upper";
        case ContentKind::Relaxed: return "relaxed";
    }
    return "unknown";
}

Table ContentEstimate::table() const {
    Table t{std::string("content_") + to_string(kind), {"r", "mass", "quotient"}, {}};
    for (std::size_t i = 0; i < r_values.size(); ++i) t.rows.push_back({r_values[i], masses[i], quotients[i]});
    return t;
}

nlohmann::json ContentEstimate::summary() const {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return v > 0 ? "inf" : "nan";
    };
    nlohmann::json j{{"kind", to_string(kind)},
                     {"r_min", window.r_min},
                     {"r_max", window.r_max},
                     {"base_mass", base_mass},
                     {"inf_quotient", num(inf_quotient)},
                     {"sup_quotient", num(sup_quotient)},
                     {"extrapolated", num(extrapolated)},
                     {"fit_rate", num(fit_rate)},
                     {"band", num(band)},
                     {"diverging", diverging},
                     {"growth_exponent", growth_exponent},
                     {"saturation_radius", saturation_radius},
                     {"saturated", saturated}};
    if (witness) {
        j["witness"] = {{"s", witness->s},
                        {"r_prime", witness->r_prime},
                        {"t", witness->t},
                        {"l1_error", witness->l1_error},
                        {"candidates", witness->candidates},
                        {"feasible", witness->feasible}};
    }
    return j;
}

ContentEstimate content_from_distance(const SampledSpace& space, const SetIndicator& set, const ScalarField& distance,
                                      const Window& window, ContentKind kind, const ContentParams& params) {
    check_window(space, window, params);
    ContentEstimate est;
    est.kind = kind;
    est.window = window;
    est.r_values = geometric_grid(window, params.ratio);
    if (est.r_values.size() < 3) {
        fail(ErrorCode::WindowTooNarrow, "window holds " + std::to_string(est.r_values.size()) + " grid points, need 3");
    }
    est.base_mass = measure(space, set);
    const auto& r = est.r_values;
    std::vector<double> bucket(r.size(), 0.0);
    if (!set.is_empty()) {
        for (std::size_t i = 0; i < space.size(); ++i) {
            if (set.marks[i]) continue;
            const auto it = std::upper_bound(r.begin(), r.end(), distance.values[i]);
            if (it != r.end()) bucket[static_cast<std::size_t>(it - r.begin())] += space.weight(i);
        }
    }
    double acc = est.base_mass;
    for (std::size_t k = 0; k < r.size(); ++k) {
        acc += bucket[k];
        est.masses.push_back(acc);
        est.quotients.push_back((acc - est.base_mass) / r[k]);
    }
    est.inf_quotient = *std::min_element(est.quotients.begin(), est.quotients.end());
    est.sup_quotient = *std::max_element(est.quotients.begin(), est.quotients.end());
    // Dense, cell-smoothed trace for the fit.
    const double width = params.subcell ? cell_width(space) : 0.0;
    std::vector<double> dense =
        geometric_grid(window, std::pow(params.ratio, 1.0 / std::max(1, params.fit_density)));
    // Past r_sat the smoothed enlargement is all of X and the quotient only
    // decays like 1/r; those radii carry no boundary information.
    double farthest = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (!set.marks[i] && std::isfinite(distance.values[i])) farthest = std::max(farthest, distance.values[i]);
    }
    const double r_sat = farthest + 0.5 * width;
    if (!set.is_empty() && r_sat < dense.back()) {
        est.saturation_radius = r_sat;
        while (!dense.empty() && dense.back() > r_sat) dense.pop_back();
        if (dense.size() < 3) {
            est.saturated = true;
            dense = {r_sat};
        }
    }
    std::vector<double> dense_q(dense.size(), 0.0);
    if (!set.is_empty()) {
        const double reach = dense.back() + 0.5 * width;
        std::vector<std::pair<double, double>> shell;
        for (std::size_t i = 0; i < space.size(); ++i) {
            if (!set.marks[i] && distance.values[i] < reach) shell.emplace_back(distance.values[i], space.weight(i));
        }
        for (std::size_t k = 0; k < dense.size(); ++k) {
            double m = 0.0;
            for (const auto& [di, wi] : shell) {
                if (width > 0.0) m += wi * std::clamp((dense[k] - di) / width + 0.5, 0.0, 1.0);
                else if (di < dense[k]) m += wi;
            }
            dense_q[k] = m / dense[k];
        }
    }
    if (est.saturated) {
        // Too little of the window survives: report the quotient at r_sat.
        est.fit_rate = dense_q.front();
        est.extrapolated = dense_q.front();
        est.band = dense_q.front() * space.resolution() / r_sat;
        return est;
    }
    const RateFit fit = fit_quotients(dense, dense_q);
    est.fit_rate = fit.rate;
    double res_min = 0.0, res_max = 0.0, res_abs = 0.0;
    for (double e : fit.residuals) {
        res_min = std::min(res_min, e);
        res_max = std::max(res_max, e);
        res_abs = std::max(res_abs, std::abs(e));
    }
    // Stability term: the rate refitted on the lower three quarters of the window.
    const std::size_t sub = std::max<std::size_t>(6, dense.size() * 3 / 4);
    double drift = 0.0;
    if (sub < dense.size()) {
        const std::vector<double> rs(dense.begin(), dense.begin() + static_cast<std::ptrdiff_t>(sub));
        const std::vector<double> qs(dense_q.begin(), dense_q.begin() + static_cast<std::ptrdiff_t>(sub));
        drift = std::abs(fit_quotients(rs, qs).rate - fit.rate);
    }
    est.band = res_abs + drift + std::abs(fit.rate) * space.resolution() / dense.back();
    std::vector<double> r_fit, q_fit;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (est.saturation_radius > 0.0 && r[k] > est.saturation_radius) break;
        r_fit.push_back(r[k]);
        q_fit.push_back(est.quotients[k]);
    }
    if (r_fit.size() >= 3) {
        est.growth_exponent = loglog_slope(r_fit, q_fit);
        est.diverging = est.growth_exponent <= params.divergence_exponent && q_fit.front() > q_fit.back();
    }
    if (est.diverging) {
        est.extrapolated = kInf;
    } else {
        switch (kind) {
            case ContentKind::Lower: est.extrapolated = fit.rate + res_min; break;
            case ContentKind::Upper: est.extrapolated = fit.rate + res_max; break;
            case ContentKind::Relaxed: est.extrapolated = fit.rate + res_min; break;
        }
        est.extrapolated = std::max(0.0, est.extrapolated);
    }
    return est;
}

ContentEstimate content(const SampledSpace& space, const SetIndicator& set, const Window& window, ContentKind kind,
                        const ContentParams& params) {
    check_binding(space, set);
    if (set.is_empty()) {
        ScalarField none{space.id(), std::vector<double>(space.size(), kInf)};
        return content_from_distance(space, set, none, window, kind, params);
    }
    return content_from_distance(space, set, distance_to_set(space, set), window, kind, params);
}

ContentEstimate relaxed_content(const SampledSpace& space, const SetIndicator& set, const RelaxedParams& params) {
    check_binding(space, set);
    if (set.is_empty()) fail(ErrorCode::EmptySet, "relaxed content needs a nonempty set");
    const double base = measure(space, set);
    if (!(base > 0.0)) fail(ErrorCode::EmptySet, "relaxed content needs m(A) > 0");
    const double h = space.resolution();
    double budget = params.l1_budget;
    const double r_max = params.r_max > 0.0 ? params.r_max : 64.0 * h;
    Window window = params.window;
    if (!(window.r_min > 0.0)) window = default_window(space, params.content);

    const ScalarField d_a = distance_to_set(space, set);
    std::optional<ContentEstimate> best;
    RelaxedWitness best_w;
    std::size_t candidates = 0, feasible = 0;

    auto consider = [&](const SetIndicator& cand, const ScalarField& d_cand, double s, double rp, double t) {
        ++candidates;
        double l1 = 0.0;
        for (std::size_t i = 0; i < space.size(); ++i)
            if (cand.marks[i] != set.marks[i]) l1 += space.weight(i);
        if (l1 > budget) return;
        ++feasible;
        ContentEstimate est = content_from_distance(space, cand, d_cand, window, ContentKind::Lower, params.content);
        const double v = est.extrapolated;
        bool take = !best.has_value();
        if (best) {
            const double cur = best->extrapolated;
            const double tol = 1e-12 * std::max(1.0, std::abs(cur));
            if (v < cur - tol) take = true;
            else if (std::abs(v - cur) <= tol && s > best_w.s) take = true;
        }
        if (take) {
            best = std::move(est);
            best_w = RelaxedWitness{s, rp, t, l1, cand, 0, 0};
        }
    };

    if (budget < 0.0) {
        // Boundary moved by l1_budget_h * h on average, capped at a tenth of m(A).
        budget = 0.1 * base;
        const ContentEstimate own = content_from_distance(space, set, d_a, window, ContentKind::Lower, params.content);
        if (std::isfinite(own.extrapolated)) budget = std::min(budget, params.l1_budget_h * h * std::max(0.0, own.extrapolated));
    }
    consider(set, d_a, 0.0, 0.0, 1.0);
    for (double s = h; s + 4.0 * h <= r_max * (1.0 + 1e-12); s *= 2.0) {
        const SetIndicator grown = enlarge_from_distance(d_a, s);
        const ScalarField d_grown = distance_to_set(space, grown);
        for (double rp = 4.0 * h; s + rp <= r_max * (1.0 + 1e-12); rp *= 2.0) {
            for (double t : params.t_grid) {
                const double level = (1.0 - t) * rp;
                SetIndicator cand{space.id(), std::vector<std::uint8_t>(space.size(), 0)};
                for (std::size_t i = 0; i < space.size(); ++i) cand.marks[i] = d_grown.values[i] <= level ? 1 : 0;
                const ScalarField d_cand = distance_to_set(space, cand);
                consider(cand, d_cand, s, rp, t);
            }
        }
    }
    if (!best) fail(ErrorCode::EmptyFamily, "no relaxation candidate meets the L1 budget");
    ContentEstimate out = std::move(*best);
    out.kind = ContentKind::Relaxed;
    best_w.candidates = candidates;
    best_w.feasible = feasible;
    out.witness = std::move(best_w);
    return out;
}

Report check_semigroup_inclusion(const SampledSpace& space, const SetIndicator& set, double s, double t) {
    check_binding(space, set);
    if (!(s > 0.0) || !(t > 0.0)) fail(ErrorCode::InvalidArgument, "s and t must be positive");
    Report rep;
    rep.title = "semigroup inclusion";
    std::size_t violations = 0, strict = 0;
    if (!set.is_empty()) {
        const ScalarField d_a = distance_to_set(space, set);
        const SetIndicator a_s = enlarge_from_distance(d_a, s);
        const SetIndicator a_st = enlarge(space, a_s, t);
        const SetIndicator a_sum = enlarge_from_distance(d_a, s + t);
        for (std::size_t i = 0; i < space.size(); ++i) {
            if (a_st.marks[i] && !a_sum.marks[i]) ++violations;
            if (!a_st.marks[i] && a_sum.marks[i]) ++strict;
        }
        rep.set_value("mass_iterated", measure(space, a_st));
        rep.set_value("mass_direct", measure(space, a_sum));
    }
    rep.set_value("violations", static_cast<double>(violations));
    rep.set_value("strict_points", static_cast<double>(strict));
    rep.check_le("enlargement_semigroup_inclusion", "(A^s)^t subset A^(s+t)", static_cast<double>(violations), 0.0);
    return rep;
}

Report check_mean_value_inequality(const SampledSpace& space, const SetIndicator& set, const Window& window,
                                   int subdivisions, const ContentParams& params) {
    check_binding(space, set);
    check_window(space, window, params);
    if (subdivisions < 1) fail(ErrorCode::InvalidArgument, "subdivisions must be positive");
    Report rep;
    rep.title = "lower content dominates averaged upper quotients";
    const auto grid = geometric_grid(window, params.ratio);
    if (set.is_empty()) {
        rep.set_value("violations", 0.0);
        return rep;
    }
    const double base = measure(space, set);
    const ScalarField d_a = distance_to_set(space, set);
    const double tol = 1e-12 * std::max(1.0, space.total_mass());
    Table tab{"mean_value", {"r", "lhs", "rhs", "slack"}, {}};
    std::size_t violations = 0;
    double worst = kInf;
    for (double r : grid) {
        const double lhs = (measure(space, enlarge_from_distance(d_a, r)) - base) / r;
        const double step = r / subdivisions;
        double rhs = 0.0;
        for (int j = 0; j < subdivisions; ++j) {
            const SetIndicator grown = j == 0 ? set : enlarge_from_distance(d_a, step * j);
            const double m_grown = measure(space, grown);
            const double m_next = measure(space, enlarge(space, grown, step));
            rhs += (m_next - m_grown) / step;
        }
        rhs /= subdivisions;
        const double slack = lhs - rhs;
        worst = std::min(worst, slack);
        if (slack < -tol / r) ++violations;
        tab.rows.push_back({r, lhs, rhs, slack});
    }
    rep.tables.push_back(std::move(tab));
    rep.set_value("violations", static_cast<double>(violations));
    rep.set_value("min_slack", worst);
    rep.check_le("mean_value_violations", "lower content >= relaxed upper content (mean value)",
                 static_cast<double>(violations), 0.0);
    return rep;
}

}  // namespace mmsgeo
