// Adaptive quadrature specialized to odd, exponentially decaying singular
// kernels: nested Gauss-Kronrod panels, singularity folding with geometric
// grading toward t = 0, and analytic truncation bounds for exponential tails.
#pragma once

#include <functional>
#include <span>
#include <stdexcept>

namespace sio::quad {

//! Quadrature control knobs. Defaults match the documented table in README.md.
struct PVConfig {
    double fold_radius = 0.5;       //!< half-width r0 of the folded near-singularity zone
    double truncation_radius = 40.0;//!< integration cut-off T beyond the evaluation point
    int base_panels = 8;            //!< initial uniform panels before adaptivity
    int max_refine_depth = 40;      //!< bisection depth cap per panel
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;

    void validate() const;          // throws std::invalid_argument on bad fields
    PVConfig refined() const;       // doubled base_panels (self-consistency checks)
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;    //!< nested-rule quadrature error, >= 0
    int panels_used = 0;
    double truncation_bound = 0.0;  //!< analytic bound on the discarded tail, >= 0

    double total_error() const { return error_estimate + truncation_bound; }
};

//! Thrown when the folded integrand fails the near-0 integrability check,
//! i.e. the input was not Lipschitz (nor Hoelder) at the singular point.
class NonLipschitzError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! Deterministic pairwise tree summation; reduction order is fixed by index.
double pairwise_sum(std::span<const double> xs);

//! Adaptive composite Gauss7/Kronrod15 on [a,b]. NaN from f is a hard error.
//! If the refinement depth is exhausted the result carries error_estimate
//! above tolerance; the caller decides.
QuadResult integrate_smooth(const std::function<double(double)>& f, double a, double b,
                            const PVConfig& cfg);

//! Same, with interior breakpoints that seed the initial panel set (kinks,
//! kernel transition scales).
QuadResult integrate_smooth(const std::function<double(double)>& f, double a, double b,
                            const PVConfig& cfg, std::span<const double> breakpoints);

//! Integrates the folded integrand g(y,t) over t in (0, t_upper].  The zone
//! (0, r0] is covered by open-endpoint dyadic panels graded toward 0 (t = 0 is
//! never sampled); [r0, t_upper] is handled adaptively.  tail_bound is the
//! caller-supplied analytic majorant of the discarded t > t_upper tail and is
//! recorded in the result.
QuadResult pv_integrate_folded(const std::function<double(double, double)>& g, double y,
                               const PVConfig& cfg, double t_upper, double tail_bound = 0.0,
                               std::span<const double> breakpoints = {});

//! Convenience overload with t_upper = cfg.truncation_radius.
QuadResult pv_integrate_folded(const std::function<double(double, double)>& g, double y,
                               const PVConfig& cfg);

//! Closed-form majorant of the tail integral  int_T^inf e^{-(1-kappa) t} (1+t)^m dt.
//! Exact for m >= 0; for m < 0 uses (1+t)^m <= (1+T)^m.  Requires kappa < 1,
//! T >= 0.  Non-increasing in T and -> 0 as T -> inf.
double truncation_bound_exp(int m, double kappa, double T);

} // namespace sio::quad
