#include "mmsgeo/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmsgeo {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

void require_scale(const SampledSpace& space, double delta, double factor, const char* what) {
    if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, std::string(what) + ": delta must be positive");
    if (delta < factor * space.resolution() * (1.0 - 1e-12)) {
        fail(ErrorCode::ResolutionTooCoarse, std::string(what) + ": delta below resolution (delta=" +
                                                 std::to_string(delta) + ", h=" +
                                                 std::to_string(space.resolution()) + ")");
    }
}

}  // namespace

const char* to_string(SlopeVariant v) {
    switch (v) {
        case SlopeVariant::LocalSlope: return "local_slope";
        case SlopeVariant::AsymptoticLip: return "asymptotic_lip";
        case SlopeVariant::GridGradient: return "grid_gradient";
    }
    return "unknown";
}

ScalarField sup_semigroup(const SampledSpace& space, const ScalarField& f, double t) {
    check_binding(space, f);
    if (t < 0.0 || std::isnan(t)) fail(ErrorCode::InvalidArgument, "semigroup time must be >= 0");
    if (t == 0.0) return f;
    const BallQuery ball(space, t, false);
    ScalarField out{space.id(), std::vector<double>(space.size())};
    parallel_blocks(space.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double best = f.values[i];
            ball.for_each(i, [&](std::size_t j, double) { best = std::max(best, f.values[j]); });
            out.values[i] = best;
        }
    });
    return out;
}

SlopeField slope_at_scale(const SampledSpace& space, const ScalarField& f, double delta) {
    check_binding(space, f);
    require_scale(space, delta, 1.0, "slope_at_scale");
    const BallQuery ball(space, delta, true);
    SlopeField out{space.id(), std::vector<double>(space.size(), 0.0), delta, SlopeVariant::LocalSlope};
    parallel_blocks(space.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double best = 0.0;
            const double fi = f.values[i];
            ball.for_each(i, [&](std::size_t j, double d) {
                if (d > 0.0) best = std::max(best, std::abs(f.values[j] - fi) / d);
            });
            out.values[i] = best;
        }
    });
    return out;
}

SlopeField asymptotic_lip(const SampledSpace& space, const ScalarField& f, double delta) {
    check_binding(space, f);
    require_scale(space, delta, 2.0, "asymptotic_lip");
    const BallQuery ball(space, delta, true);
    SlopeField out{space.id(), std::vector<double>(space.size(), 0.0), delta, SlopeVariant::AsymptoticLip};
    parallel_blocks(space.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<std::size_t> members;
        for (std::size_t i = begin; i < end; ++i) {
            members.clear();
            ball.for_each(i, [&](std::size_t j, double) { members.push_back(j); });
            double best = 0.0;
            for (std::size_t a = 0; a < members.size(); ++a) {
                const double fa = f.values[members[a]];
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    const double diff = std::abs(f.values[members[b]] - fa);
                    const double d = space.distance(members[a], members[b]);
                    if (d > 0.0) best = std::max(best, diff / d);
                }
            }
            out.values[i] = best;
        }
    });
    return out;
}

std::array<std::size_t, 3> grid_strides(const GridMetric& g) {
    std::array<std::size_t, 3> stride{1, 1, 1};
    for (int a = 1; a < g.dims; ++a) stride[a] = stride[a - 1] * static_cast<std::size_t>(g.n[a - 1]);
    return stride;
}

double grid_gradient_at(const GridMetric& g, const std::array<std::size_t, 3>& stride, std::span<const double> f,
                        std::size_t i) {
    const auto k = g.unravel(i);
    if (g.dims == 1) {
        if (k[0] + 1 >= g.n[0]) return 0.0;
        return std::abs(f[i + 1] - f[i]) / g.spacing[0];
    }
    bool interior = true;
    for (int b = 0; b < g.dims; ++b) interior = interior && k[b] >= 1 && k[b] + 1 < g.n[b];
    if (interior && g.dims == 2) {
        const auto sy = static_cast<std::ptrdiff_t>(stride[1]);
        const double* p = f.data() + i;
        const double gx = (p[1 - sy] - p[-1 - sy]) + 2.0 * (p[1] - p[-1]) + (p[1 + sy] - p[-1 + sy]);
        const double gy = (p[sy - 1] - p[-sy - 1]) + 2.0 * (p[sy] - p[-sy]) + (p[sy + 1] - p[-sy + 1]);
        const double dx = gx / (8.0 * g.spacing[0]), dy = gy / (8.0 * g.spacing[1]);
        return std::sqrt(dx * dx + dy * dy);
    }
    auto at = [&](std::array<std::int64_t, 3> q) {
        std::size_t idx = 0;
        for (int b = 0; b < g.dims; ++b) idx += static_cast<std::size_t>(std::clamp<std::int64_t>(q[b], 0, g.n[b] - 1)) * stride[b];
        return f[idx];
    };
    static constexpr double w3[3] = {1.0, 2.0, 1.0};
    double sq = 0.0;
    for (int a = 0; a < g.dims; ++a) {
        // Transverse axes of a.
        int t[2] = {-1, -1};
        int nt = 0;
        for (int b = 0; b < g.dims; ++b)
            if (b != a) t[nt++] = b;
        double acc = 0.0, wsum = 0.0;
        const int r1 = nt >= 1 ? 1 : 0, r2 = nt >= 2 ? 1 : 0;
        for (int o1 = -r1; o1 <= r1; ++o1) {
            for (int o2 = -r2; o2 <= r2; ++o2) {
                std::array<std::int64_t, 3> plus = k, minus = k;
                if (nt >= 1) plus[t[0]] += o1, minus[t[0]] += o1;
                if (nt >= 2) plus[t[1]] += o2, minus[t[1]] += o2;
                plus[a] += 1;
                minus[a] -= 1;
                const double w = w3[o1 + 1] * w3[o2 + 1];
                acc += w * (at(plus) - at(minus));
                wsum += w;
            }
        }
        const double da = acc / (wsum * 2.0 * g.spacing[a]);
        sq += da * da;
    }
    return std::sqrt(sq);
}

SlopeField grid_gradient(const SampledSpace& space, const ScalarField& f) {
    check_binding(space, f);
    SlopeField out{space.id(), std::vector<double>(space.size(), 0.0), 0.0, SlopeVariant::GridGradient};
    if (const GridMetric* g = space.grid()) {
        out.scale_delta = g->spacing[0];
        const auto stride = grid_strides(*g);
        parallel_blocks(space.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) out.values[i] = grid_gradient_at(*g, stride, f.values, i);
        });
        return out;
    }
    if (const CircleMetric* c = space.circle()) {
        out.scale_delta = c->step;
        const auto n = static_cast<std::size_t>(c->n);
        for (std::size_t i = 0; i < n; ++i) out.values[i] = std::abs(f.values[(i + 1) % n] - f.values[i]) / c->step;
        return out;
    }
    fail(ErrorCode::WrongSpaceKind, "grid gradient needs a grid or circle space");
}

SlopeEstimator parse_slope_estimator(const std::string& name) {
    if (name == "auto") return SlopeEstimator::Auto;
    if (name == "scale_sup" || name == "sl") return SlopeEstimator::ScaleSup;
    if (name == "grid_gradient" || name == "gradient") return SlopeEstimator::GridGradient;
    fail(ErrorCode::InvalidArgument, "unknown slope estimator '" + name + "'");
}

const char* to_string(SlopeEstimator e) {
    switch (e) {
        case SlopeEstimator::Auto: return "auto";
        case SlopeEstimator::ScaleSup: return "scale_sup";
        case SlopeEstimator::GridGradient: return "grid_gradient";
    }
    return "unknown";
}

SlopeField slope(const SampledSpace& space, const ScalarField& f, const SlopeOptions& options) {
    SlopeEstimator e = options.estimator;
    if (e == SlopeEstimator::Auto) {
        e = (space.grid() || space.circle()) ? SlopeEstimator::GridGradient : SlopeEstimator::ScaleSup;
    }
    if (e == SlopeEstimator::GridGradient) return grid_gradient(space, f);
    return slope_at_scale(space, f, options.scale * space.resolution());
}

double integral(const SampledSpace& space, std::span<const double> values) {
    return parallel_sum(space.size(), [&](std::size_t i) { return values[i] * space.weight(i); });
}

double slope_integral(const SampledSpace& space, const ScalarField& f, const SlopeOptions& options) {
    const SlopeField s = slope(space, f, options);
    return integral(space, s.values);
}

double lipschitz_estimate(const SampledSpace& space, const ScalarField& f, double scale) {
    const SlopeField s = slope_at_scale(space, f, scale * space.resolution());
    return parallel_max(space.size(), [&](std::size_t i) { return s.values[i]; });
}

Report check_semigroup_ops(const SampledSpace& space, const ScalarField& f, double s, double t,
                           const SemigroupCheckParams& params) {
    check_binding(space, f);
    if (!(s > 0.0) || !(t > 0.0)) fail(ErrorCode::InvalidArgument, "s and t must be positive");
    Report rep;
    rep.title = "semigroup operations";
    const ScalarField tt = sup_semigroup(space, f, t);
    const ScalarField ts_tt = sup_semigroup(space, tt, s);
    const ScalarField tst = sup_semigroup(space, f, s + t);

    std::size_t comp_violations = 0, mono_violations = 0, strict = 0;
    double defect = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (tst.values[i] < ts_tt.values[i]) ++comp_violations;
        if (tst.values[i] > ts_tt.values[i]) ++strict;
        if (tt.values[i] < f.values[i]) ++mono_violations;
        defect = std::max(defect, std::abs(tst.values[i] - ts_tt.values[i]));
    }
    rep.set_value("composition_violations", static_cast<double>(comp_violations));
    rep.set_value("strict_points", static_cast<double>(strict));
    rep.set_value("extensivity_violations", static_cast<double>(mono_violations));
    rep.set_value("max_defect", defect);
    rep.check_le("sub_semigroup", "T_{s+t} f >= T_s(T_t f)", static_cast<double>(comp_violations), 0.0);
    rep.check_le("extensive", "T_t f >= f", static_cast<double>(mono_violations), 0.0);

    const double h = space.resolution();
    if (space.is_length_space()) {
        const double lip = lipschitz_estimate(space, f);
        const double bound = lip * params.c * h;
        rep.set_value("lipschitz_estimate", lip);
        rep.check_le("length_space_equality", "T_{s+t} f = T_s(T_t f) on length spaces", defect, bound,
                     1e-12 * std::max(1.0, lip));
    }

    // (T_t f - f)/t against the slope at scale t + c h.
    const SlopeField sl = slope_at_scale(space, f, t + params.c_slope * h);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < space.size(); ++i) {
        worst = std::max(worst, (tt.values[i] - f.values[i]) / t - sl.values[i]);
    }
    rep.set_value("max_difference_quotient_excess", worst);
    rep.check_le("difference_quotient_vs_slope", "(T_t f - f)/t <= |grad f|", worst, 0.0, 1e-12);
    return rep;
}

}  // namespace mmsgeo
