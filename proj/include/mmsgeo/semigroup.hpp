#pragma once

#include "mmsgeo/report.hpp"
#include "mmsgeo/space.hpp"

namespace mmsgeo {

enum class SlopeVariant { LocalSlope, AsymptoticLip, GridGradient };
const char* to_string(SlopeVariant v);

struct SlopeField {
    std::uint64_t space_id = 0;
    std::vector<double> values;
    double scale_delta = 0.0;
    SlopeVariant variant = SlopeVariant::LocalSlope;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

// T_t f(x) = sup of f over the open ball d(x, .) < t; T_0 f = f.
ScalarField sup_semigroup(const SampledSpace& space, const ScalarField& f, double t);

// sl(x, delta) = sup over 0 < d(x, y) <= delta of |f(y) - f(x)| / d(x, y); 0 if no such y.
SlopeField slope_at_scale(const SampledSpace& space, const ScalarField& f, double delta);

// Lipschitz constant of f restricted to the closed ball B(x, delta), over all pairs.
SlopeField asymptotic_lip(const SampledSpace& space, const ScalarField& f, double delta);

// Gradient norm from finite differences. 1D grids and circles use forward
// differences (a missing forward neighbour contributes 0); 2D/3D grids use
// central differences smoothed 1-2-1 across the other axes, with indices
// clamped at the box faces. Other spaces throw.
SlopeField grid_gradient(const SampledSpace& space, const ScalarField& f);

// Single-point version of grid_gradient; `stride` from grid_strides.
std::array<std::size_t, 3> grid_strides(const GridMetric& g);
double grid_gradient_at(const GridMetric& g, const std::array<std::size_t, 3>& stride, std::span<const double> f,
                        std::size_t i);

// Which discrete |grad f| the integral functionals use.
enum class SlopeEstimator {
    Auto,          // grid gradient where available, else sl(., scale h)
    ScaleSup,      // sl(., scale h)
    GridGradient,
};

SlopeEstimator parse_slope_estimator(const std::string& name);
const char* to_string(SlopeEstimator e);

struct SlopeOptions {
    SlopeEstimator estimator = SlopeEstimator::Auto;
    double scale = 3.0;  // delta = scale * h for the scale-sup estimator
};

SlopeField slope(const SampledSpace& space, const ScalarField& f, const SlopeOptions& options = {});
// Integral of the slope against m.
double slope_integral(const SampledSpace& space, const ScalarField& f, const SlopeOptions& options = {});
double integral(const SampledSpace& space, std::span<const double> values);

// Max of sl(., scale h), used as the Lipschitz estimate of f.
double lipschitz_estimate(const SampledSpace& space, const ScalarField& f, double scale = 3.0);

struct SemigroupCheckParams {
    // Length-space tolerance Lip(f) * c * h for |T_{s+t} f - T_s T_t f|.
    double c = 2.0;
    // Slack scale: sl is taken at t + c_slope * h.
    double c_slope = 1.0;
};

// Pointwise T_{s+t} f >= T_s(T_t f) and T_t f >= f (exact); on length spaces the
// defect bound; (T_t f - f)/t <= sl(., t + c h).
Report check_semigroup_ops(const SampledSpace& space, const ScalarField& f, double s, double t,
                           const SemigroupCheckParams& params = {});

}  // namespace mmsgeo
