#include "siolab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cfloat>
#include <limits>
#include <vector>

namespace sio::quad {

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1,1] (positive half; node 0 shared).
constexpr double kNodes[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993945,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126,
};
constexpr double kWeights[8] = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.06309209262997855,
    0.02293532201052922,
};
// Gauss-7 weights aligned with kNodes indices 0,2,4,6.
constexpr double kGaussWeights[4] = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697,
};

struct Panel {
    double a = 0, b = 0;
    double value = 0, error = 0;
    int depth = 0;
};

struct GK15 {
    double value;
    double error;
};

GK15 gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        double fsum;
        if (i == 0) {
            fsum = f(mid);
        } else {
            const double dx = half * kNodes[i];
            fsum = f(mid - dx) + f(mid + dx);
        }
        if (!std::isfinite(fsum))
            throw std::domain_error("integrand produced a non-finite value");
        kron += kWeights[i] * fsum;
        if (i % 2 == 0)
            gauss += kGaussWeights[i / 2] * fsum;
    }
    kron *= half;
    gauss *= half;
    return {kron, std::abs(kron - gauss)};
}

// Refines the worst panel until the summed error estimate meets
// max(abs_tol, rel_tol*|value|) or every offending panel is depth-capped.
// Panel selection is deterministic.
void heap_refine(const std::function<double(double)>& f, std::vector<Panel>& panels,
                 const PVConfig& cfg, double extra_error) {
    auto worse = [](const Panel& x, const Panel& y) {
        if (x.error != y.error) return x.error < y.error; // max-heap on error
        return x.a > y.a;
    };
    std::make_heap(panels.begin(), panels.end(), worse);

    const std::size_t panel_cap = 20000;
    while (true) {
        double total = 0.0, err = 0.0;
        for (const Panel& p : panels) {
            total += p.value;
            err += p.error;
        }
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
        if (err + extra_error <= tol) break;
        if (err <= 0.05 * tol) break; // refinement cannot reduce extra_error
        if (panels.size() >= panel_cap) break;

        std::pop_heap(panels.begin(), panels.end(), worse);
        Panel worst = panels.back();
        if (worst.depth >= cfg.max_refine_depth || worst.error == 0.0) {
            std::push_heap(panels.begin(), panels.end(), worse);
            break; // depth exhausted; error estimate stays above tolerance
        }
        panels.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        for (const double lo : {worst.a, mid}) {
            const double hi = (lo == worst.a) ? mid : worst.b;
            GK15 r = gk15(f, lo, hi);
            panels.push_back({lo, hi, r.value, r.error, worst.depth + 1});
            std::push_heap(panels.begin(), panels.end(), worse);
        }
    }
}

// Heap refinement with a verification sweep: a sharp feature sitting between
// the nodes of both rules can make |K15 - G7| vanish while the panel value is
// wrong, so after convergence every leaf is bisected once and the totals are
// compared; a mismatch beyond tolerance restarts refinement on the finer set.
QuadResult refine_to_tolerance(const std::function<double(double)>& f,
                               std::vector<Panel> panels, const PVConfig& cfg,
                               double extra_error) {
    double verify_delta = 0.0;
    for (int round = 0; round < 4; ++round) {
        heap_refine(f, panels, cfg, extra_error);

        double coarse = 0.0;
        for (const Panel& p : panels) coarse += p.value;
        std::vector<Panel> fine;
        fine.reserve(2 * panels.size());
        for (const Panel& p : panels) {
            if (p.depth >= cfg.max_refine_depth || p.b - p.a < 16 * DBL_EPSILON * std::abs(p.b)) {
                fine.push_back(p);
                continue;
            }
            const double mid = 0.5 * (p.a + p.b);
            GK15 l = gk15(f, p.a, mid);
            GK15 r = gk15(f, mid, p.b);
            fine.push_back({p.a, mid, l.value, l.error, p.depth + 1});
            fine.push_back({mid, p.b, r.value, r.error, p.depth + 1});
        }
        double refined = 0.0;
        for (const Panel& p : fine) refined += p.value;
        verify_delta = std::abs(refined - coarse);
        panels = std::move(fine);
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(refined));
        if (verify_delta <= 0.5 * tol) break;
    }

    std::sort(panels.begin(), panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    std::vector<double> vals, errs;
    vals.reserve(panels.size());
    errs.reserve(panels.size());
    for (const Panel& p : panels) {
        vals.push_back(p.value);
        errs.push_back(p.error);
    }
    QuadResult out;
    out.value = pairwise_sum(vals);
    out.error_estimate = pairwise_sum(errs) + extra_error + verify_delta;
    out.panels_used = static_cast<int>(panels.size());
    return out;
}

std::vector<Panel> seed_panels(const std::function<double(double)>& f, double a, double b,
                               int base_panels, std::span<const double> breakpoints) {
    std::vector<double> edges{a, b};
    for (double x : breakpoints)
        if (x > a && x < b) edges.push_back(x);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // Split the widest segments until at least base_panels panels exist.
    while (static_cast<int>(edges.size()) - 1 < base_panels) {
        std::size_t widest = 0;
        for (std::size_t i = 1; i + 1 < edges.size(); ++i)
            if (edges[i + 1] - edges[i] > edges[widest + 1] - edges[widest]) widest = i;
        edges.insert(edges.begin() + widest + 1, 0.5 * (edges[widest] + edges[widest + 1]));
    }

    std::vector<Panel> panels;
    panels.reserve(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        GK15 r = gk15(f, edges[i], edges[i + 1]);
        panels.push_back({edges[i], edges[i + 1], r.value, r.error, 0});
    }
    return panels;
}

} // namespace

void PVConfig::validate() const {
    if (!(fold_radius > 0.0)) throw std::invalid_argument("fold_radius must be > 0");
    if (!(truncation_radius > fold_radius))
        throw std::invalid_argument("truncation_radius must exceed fold_radius");
    if (base_panels < 4) throw std::invalid_argument("base_panels must be >= 4");
    if (max_refine_depth < 1) throw std::invalid_argument("max_refine_depth must be >= 1");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("tolerances must be > 0");
}

PVConfig PVConfig::refined() const {
    PVConfig c = *this;
    c.base_panels *= 2;
    return c;
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    if (xs.size() == 1) return xs[0];
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

QuadResult integrate_smooth(const std::function<double(double)>& f, double a, double b,
                            const PVConfig& cfg) {
    return integrate_smooth(f, a, b, cfg, {});
}

QuadResult integrate_smooth(const std::function<double(double)>& f, double a, double b,
                            const PVConfig& cfg, std::span<const double> breakpoints) {
    cfg.validate();
    if (a == b) return {};
    if (a > b) throw std::invalid_argument("integrate_smooth requires a <= b");
    return refine_to_tolerance(f, seed_panels(f, a, b, cfg.base_panels, breakpoints), cfg, 0.0);
}

QuadResult pv_integrate_folded(const std::function<double(double, double)>& g, double y,
                               const PVConfig& cfg) {
    return pv_integrate_folded(g, y, cfg, cfg.truncation_radius);
}

QuadResult pv_integrate_folded(const std::function<double(double, double)>& g, double y,
                               const PVConfig& cfg, double t_upper, double tail_bound,
                               std::span<const double> breakpoints) {
    cfg.validate();
    if (!(t_upper > 0.0)) throw std::invalid_argument("t_upper must be > 0");
    if (tail_bound < 0.0) throw std::invalid_argument("tail_bound must be >= 0");
    auto f = [&g, y](double t) { return g(y, t); };

    const double r0 = std::min(cfg.fold_radius, 0.5 * t_upper);

    // Geometric grading toward t = 0: panels [r0 2^-(j+1), r0 2^-j].  For a
    // Lipschitz fold the contributions halve per level; for a t^(alpha-1)
    // fold they decay by 2^-alpha, which still yields an honest geometric
    // remainder.  Ratios >= ~1 mean a non-integrable input.
    std::vector<Panel> panels;
    double near_acc = 0.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    double ratio = 0.5;
    double last_mag = 0.0;
    bool capped = true;
    for (int j = 0; j < cfg.max_refine_depth + 20; ++j) {
        const double hi = r0 * std::pow(0.5, j);
        const double lo = 0.5 * hi;
        GK15 r = gk15(f, lo, hi);
        panels.push_back({lo, hi, r.value, r.error, 0});
        near_acc += r.value;
        last_mag = std::abs(r.value);
        if (j > 0 && prev_mag > 0.0) ratio = last_mag / prev_mag;
        prev_mag = last_mag;
        const double eps_near =
            0.25 * std::max(cfg.abs_tol, cfg.rel_tol * std::abs(near_acc));
        if (j >= 4 && last_mag <= eps_near) {
            capped = false;
            break;
        }
    }
    if (capped && ratio >= 0.98)
        throw NonLipschitzError(
            "folded integrand is not integrable at t = 0 (non-Lipschitz input)");
    // Remainder of the un-descended (0, t_min) sliver, from the measured decay.
    const double safe_ratio = std::clamp(ratio, 0.0, 0.95);
    const double near_remainder = last_mag * safe_ratio / (1.0 - safe_ratio) + last_mag;

    if (r0 < t_upper) {
        std::vector<double> far_breaks(breakpoints.begin(), breakpoints.end());
        auto far = seed_panels(f, r0, t_upper, cfg.base_panels, far_breaks);
        panels.insert(panels.end(), far.begin(), far.end());
    }

    QuadResult out = refine_to_tolerance(f, std::move(panels), cfg, near_remainder);
    out.truncation_bound = tail_bound;
    return out;
}

double truncation_bound_exp(int m, double kappa, double T) {
    if (kappa >= 1.0) throw std::invalid_argument("truncation_bound_exp requires kappa < 1");
    if (T < 0.0) throw std::invalid_argument("truncation_bound_exp requires T >= 0");
    const double s = 1.0 - kappa;
    if (m < 0) return std::pow(1.0 + T, m) * std::exp(-s * T) / s;
    // Exact tail by repeated integration by parts:
    //   int_T^inf e^{-s t} (1+t)^m dt
    //     = e^{-sT} (1+T)^m sum_{j=0}^m m! / ((m-j)! s^{j+1} (1+T)^j).
    double sum = 0.0;
    double fact = 1.0; // m! / (m-j)!
    double spow = s;
    double tpow = 1.0;
    for (int j = 0; j <= m; ++j) {
        sum += fact / (spow * tpow);
        fact *= static_cast<double>(m - j);
        spow *= s;
        tpow *= 1.0 + T;
    }
    return std::pow(1.0 + T, m) * std::exp(-s * T) * sum;
}

} // namespace sio::quad
