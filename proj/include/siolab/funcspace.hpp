// Test functions with known growth classes, even weight functions, and
// empirical estimators for the weighted Schauder norms (sup part and Hoelder
// seminorm part).  Everything here is immutable after construction and pure.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sio::funcspace {

enum class WeightKind { Polynomial, Logarithmic };

//! Identifies a weighted space: weight (1+|x|)^m e^{kappa|x|} (polynomial
//! kind) or log(1+|x|) e^{kappa|x|} (logarithmic kind), Hoelder exponent
//! alpha, and derivative order k for the polynomial-growth C^k classes.
struct SchauderParams {
    WeightKind kind = WeightKind::Polynomial;
    int m = 0;
    double kappa = 0.0;
    double alpha = 0.5;
    int k = 0;

    void validate() const; // throws std::invalid_argument
};

//! Weight value at x.  Exact formula, no approximation; the logarithmic kind
//! vanishes at x = 0 (callers estimating sup norms exclude |x| < x_min_log).
double weight_eval(const SchauderParams& params, double x);

struct Interval {
    double lo = 0.0, hi = 0.0;
    double width() const { return hi - lo; }
};

//! A closed-form real function with optional exact derivative and exact
//! antiderivative A(y) = int_0^y phi, plus its claimed growth class.
struct TestFunction {
    std::string label;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;     // empty when no closed form is supplied
    std::function<double(double)> antideriv; // empty when not elementary
    SchauderParams claimed_class;            // (m, kappa); k = 1 when deriv is present
    double growth_constant = 1.0; // C with |phi(x)| <= C (1+|x|)^m e^{kappa|x|}
    double norm_c0 = 1.0;         // best constant of the sup condition (hand-derived)
    double norm_c1 = 1.0;         // best constant of the C^1 condition (hand-derived)

    bool has_deriv() const { return static_cast<bool>(deriv); }
    bool has_antideriv() const { return static_cast<bool>(antideriv); }
};

//! Pair generation for the Hoelder seminorm: each grid point is paired with
//! x + h across dyadic offsets, with the window endpoints, and with n_far
//! seeded-uniform far points; the pair set is mirror-symmetrized so the
//! estimator is exactly invariant under reflection.
struct PairScheme {
    std::vector<double> offsets{1e-3, 1e-2, 1e-1, 1.0};
    int n_far = 32;
    std::uint64_t seed = 0x5EED;
};

//! |x| below which samples are excluded for the logarithmic weight.
inline constexpr double kXMinLog = 1e-3;

//! max over nested samples of |f(x)| / w(x); lower bound of the true sup norm,
//! monotone non-decreasing under dyadic refinement of n_samples.
double estimate_sup_norm(const std::function<double(double)>& f, const SchauderParams& params,
                         Interval window, int n_samples);

//! max over pairs of |f(x)-f(x')| / (|x-x'|^alpha (w(x)+w(x'))).
double estimate_holder_seminorm(const std::function<double(double)>& f,
                                const SchauderParams& params, Interval window,
                                const PairScheme& scheme, int grid_n);

struct EstimatorConfig {
    double sup_density = 16.0;    // sup samples per unit length
    double holder_density = 4.0;  // pair-grid points per unit length
    PairScheme scheme{};

    int sup_samples(Interval w) const;
    int holder_grid(Interval w) const;
};

struct NormEstimate {
    double sup_part = 0.0;
    double holder_part = 0.0;
    double norm() const { return sup_part > holder_part ? sup_part : holder_part; }
};

NormEstimate estimate_norm(const std::function<double(double)>& f, const SchauderParams& params,
                           Interval window, const EstimatorConfig& ecfg = {});

//! Built-in catalog, addressable by label: const1, poly:1..3, sin, lorentzian,
//! xexp (x e^{-|x|}), tanh, sech, edecay (e^{-|x|}/(1+|x|)), sinh, sin_cosh.
const std::vector<TestFunction>& catalog();
const TestFunction& catalog_lookup(std::string_view label); // throws std::out_of_range
std::vector<std::string> catalog_labels();

//! phi(-x), with derivative/antiderivative transformed accordingly.
TestFunction reflect(const TestFunction& f);

} // namespace sio::funcspace
