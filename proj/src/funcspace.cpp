#include "siolab/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sio::funcspace {

namespace {

// Uniform double in [0,1) from raw engine output; avoids the
// implementation-defined std::uniform_real_distribution.
class UniformBits {
public:
    explicit UniformBits(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}
    double next() {
        // splitmix64 step
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

double sample_point(Interval w, int i, int n) {
    return w.lo + w.width() * static_cast<double>(i) / static_cast<double>(n - 1);
}

} // namespace

void SchauderParams::validate() const {
    if (k < 0) throw std::invalid_argument("derivative order k must be >= 0");
    if (kind == WeightKind::Logarithmic) {
        // The log space only appears at the kappa = -1 (H) and kappa = 0 (I)
        // endpoint cases.
        if (kappa != -1.0 && kappa != 0.0)
            throw std::invalid_argument("logarithmic weight requires kappa in {-1, 0}");
    }
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("alpha must lie in (0, 1)");
}

double weight_eval(const SchauderParams& params, double x) {
    const double ax = std::abs(x);
    if (params.kind == WeightKind::Logarithmic)
        return std::log1p(ax) * std::exp(params.kappa * ax);
    return std::pow(1.0 + ax, params.m) * std::exp(params.kappa * ax);
}

int EstimatorConfig::sup_samples(Interval w) const {
    return std::max(2, static_cast<int>(std::lround(w.width() * sup_density)) + 1);
}

int EstimatorConfig::holder_grid(Interval w) const {
    return std::max(2, static_cast<int>(std::lround(w.width() * holder_density)) + 1);
}

double estimate_sup_norm(const std::function<double(double)>& f, const SchauderParams& params,
                         Interval window, int n_samples) {
    params.validate();
    if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
    if (!(window.width() > 0.0)) throw std::invalid_argument("window must be non-degenerate");
    double best = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double x = sample_point(window, i, n_samples);
        if (params.kind == WeightKind::Logarithmic && std::abs(x) < kXMinLog) continue;
        const double w = weight_eval(params, x);
        if (w <= 0.0) continue;
        best = std::max(best, std::abs(f(x)) / w);
    }
    return best;
}

double estimate_holder_seminorm(const std::function<double(double)>& f,
                                const SchauderParams& params, Interval window,
                                const PairScheme& scheme, int grid_n) {
    params.validate();
    if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");

    std::vector<std::pair<double, double>> pairs;
    UniformBits rng(scheme.seed);
    for (int i = 0; i < grid_n; ++i) {
        const double x = sample_point(window, i, grid_n);
        for (double h : scheme.offsets) {
            const double x2 = x + h;
            if (x2 <= window.hi) pairs.emplace_back(x, x2);
        }
        pairs.emplace_back(x, window.lo);
        pairs.emplace_back(x, window.hi);
        for (int j = 0; j < scheme.n_far; ++j)
            pairs.emplace_back(x, window.lo + window.width() * rng.next());
    }
    // Mirror symmetrization: makes the estimator exactly invariant under
    // x -> -x reflection of f on symmetric windows.
    const double c = window.lo + window.hi;
    const std::size_t n_direct = pairs.size();
    pairs.reserve(2 * n_direct);
    for (std::size_t i = 0; i < n_direct; ++i)
        pairs.emplace_back(c - pairs[i].first, c - pairs[i].second);

    const bool log_kind = params.kind == WeightKind::Logarithmic;
    double best = 0.0;
    for (const auto& [x, x2] : pairs) {
        if (x == x2) continue;
        // the log weight vanishes at 0; as with the sup norm, pairs touching
        // that neighborhood are excluded (the space constrains growth at inf)
        if (log_kind && (std::abs(x) < kXMinLog || std::abs(x2) < kXMinLog)) continue;
        const double denom = std::pow(std::abs(x - x2), params.alpha) *
                             (weight_eval(params, x) + weight_eval(params, x2));
        if (denom <= 0.0) continue;
        best = std::max(best, std::abs(f(x) - f(x2)) / denom);
    }
    return best;
}

NormEstimate estimate_norm(const std::function<double(double)>& f, const SchauderParams& params,
                           Interval window, const EstimatorConfig& ecfg) {
    NormEstimate out;
    out.sup_part = estimate_sup_norm(f, params, window, ecfg.sup_samples(window));
    out.holder_part =
        estimate_holder_seminorm(f, params, window, ecfg.scheme, ecfg.holder_grid(window));
    return out;
}

namespace {

SchauderParams poly_class(int m, double kappa, int k) {
    SchauderParams p;
    p.m = m;
    p.kappa = kappa;
    p.k = k;
    return p;
}

std::vector<TestFunction> build_catalog() {
    std::vector<TestFunction> cat;

    cat.push_back({"const1", [](double) { return 1.0; }, [](double) { return 0.0; },
                   [](double y) { return y; }, poly_class(0, 0.0, 1), 1.0, 1.0, 1.0});

    for (int m = 1; m <= 3; ++m) {
        TestFunction tf;
        tf.label = "poly:" + std::to_string(m);
        tf.eval = [m](double x) { return std::pow(x, m); };
        tf.deriv = [m](double x) { return m * std::pow(x, m - 1); };
        tf.antideriv = [m](double y) { return std::pow(y, m + 1) / (m + 1); };
        tf.claimed_class = poly_class(m, 0.0, 1);
        cat.push_back(std::move(tf));
    }

    cat.push_back({"sin", [](double x) { return std::sin(x); },
                   [](double x) { return std::cos(x); },
                   [](double y) { return 1.0 - std::cos(y); }, poly_class(0, 0.0, 1), 1.0, 1.0,
                   1.0});

    cat.push_back({"lorentzian", [](double x) { return 1.0 / (1.0 + x * x); },
                   [](double x) {
                       const double d = 1.0 + x * x;
                       return -2.0 * x / (d * d);
                   },
                   [](double y) { return std::atan(y); }, poly_class(0, 0.0, 1), 1.0, 1.0, 1.0});

    // x e^{-|x|}: C^1 on all of R (both one-sided derivatives at 0 equal 1);
    // the kink sits in the second derivative.
    cat.push_back({"xexp", [](double x) { return x * std::exp(-std::abs(x)); },
                   [](double x) { return std::exp(-std::abs(x)) * (1.0 - std::abs(x)); },
                   [](double y) {
                       const double a = std::abs(y);
                       return 1.0 - (1.0 + a) * std::exp(-a);
                   },
                   poly_class(0, 0.0, 1), 1.0, std::exp(-1.0), 1.0});

    cat.push_back({"tanh", [](double x) { return std::tanh(x); },
                   [](double x) {
                       const double c = std::cosh(x);
                       return 1.0 / (c * c);
                   },
                   [](double y) {
                       // log cosh(y), overflow-free
                       const double a = std::abs(y);
                       return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
                   },
                   poly_class(0, 0.0, 1), 1.0, 1.0, 1.0});

    cat.push_back({"sech", [](double x) { return 1.0 / std::cosh(x); },
                   [](double x) { return -std::tanh(x) / std::cosh(x); },
                   [](double y) { return 2.0 * std::atan(std::tanh(0.5 * y)); },
                   poly_class(0, -1.0, 1), 2.0, 1.0, 1.0});

    // e^{-|x|}/(1+|x|): Lipschitz but not C^1 at 0 (one-sided derivatives
    // -/+2); the stored derivative is the a.e. one with value 0 at x = 0.
    // No elementary antiderivative (exponential integral).
    {
        TestFunction tf;
        tf.label = "edecay";
        tf.eval = [](double x) {
            const double a = std::abs(x);
            return std::exp(-a) / (1.0 + a);
        };
        tf.claimed_class = poly_class(-1, -1.0, 0);
        tf.growth_constant = 1.0;
        tf.norm_c0 = 1.0;
        tf.norm_c1 = 2.0;
        cat.push_back(std::move(tf));
    }

    cat.push_back({"sinh", [](double x) { return std::sinh(x); },
                   [](double x) { return std::cosh(x); },
                   [](double y) { return std::cosh(y) - 1.0; }, poly_class(0, 1.0, 1), 0.5, 0.5,
                   1.0});

    cat.push_back({"sin_cosh", [](double x) { return std::sin(x) * std::cosh(x); },
                   [](double x) {
                       return std::cos(x) * std::cosh(x) + std::sin(x) * std::sinh(x);
                   },
                   [](double y) {
                       return 0.5 * (std::sinh(y) * std::sin(y) - std::cosh(y) * std::cos(y) + 1.0);
                   },
                   poly_class(0, 1.0, 1), 1.0, 1.0, 2.0});

    return cat;
}

} // namespace

const std::vector<TestFunction>& catalog() {
    static const std::vector<TestFunction> cat = build_catalog();
    return cat;
}

const TestFunction& catalog_lookup(std::string_view label) {
    for (const TestFunction& tf : catalog())
        if (tf.label == label) return tf;
    throw std::out_of_range("unknown test function label: " + std::string(label));
}

std::vector<std::string> catalog_labels() {
    std::vector<std::string> out;
    for (const TestFunction& tf : catalog()) out.push_back(tf.label);
    return out;
}

TestFunction reflect(const TestFunction& f) {
    TestFunction out = f;
    out.label = "reflect(" + f.label + ")";
    auto eval = f.eval;
    out.eval = [eval](double x) { return eval(-x); };
    if (f.has_deriv()) {
        auto d = f.deriv;
        out.deriv = [d](double x) { return -d(-x); };
    }
    if (f.has_antideriv()) {
        auto a = f.antideriv;
        out.antideriv = [a](double y) { return -a(-y); };
    }
    return out;
}

} // namespace sio::funcspace
