#include "siolab/scaling_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace sio::lab {

using funcspace::Interval;
using funcspace::SchauderParams;
using funcspace::TestFunction;
using funcspace::WeightKind;
using quad::PVConfig;
using quad::QuadResult;

namespace {

// Shared-cache memoization for expensive operator evaluations fed to the
// norm estimators (the pair scheme revisits grid points heavily).
std::function<double(double)> memoize(std::function<double(double)> f) {
    auto cache = std::make_shared<std::unordered_map<std::uint64_t, double>>();
    return [f = std::move(f), cache](double x) {
        const std::uint64_t key = std::bit_cast<std::uint64_t>(x);
        if (auto it = cache->find(key); it != cache->end()) return it->second;
        const double v = f(x);
        cache->emplace(key, v);
        return v;
    };
}

void require_chi_domain(double lambda, double rho, double t, double y) {
    if (!(lambda > 0.0)) throw std::domain_error("chi requires lambda > 0");
    if (!(t > 0.0 && t < y)) throw std::domain_error("chi requires 0 < t < y");
    if (!(std::abs(rho) <= 1.0)) throw std::domain_error("chi requires |rho| <= 1");
}

// int chi(rho) h(y - rho t) d rho in the concentration variable
// s = lambda t (1 - rho):
//   (1 + e^{-2 lambda y}) / (1 - e^{-2 lambda t}) *
//   int_0^{2 lambda t} e^{-s} h(y - t + s/lambda) / (1 + q e^{-2s}) ds,
// q = e^{-2 lambda (y - t)}.
double chi_weighted_integral(double lambda, double t, double y,
                             const std::function<double(double)>& h, const PVConfig& cfg) {
    const double p = std::exp(-2.0 * lambda * y);
    const double q = std::exp(-2.0 * lambda * (y - t));
    const double one_minus_a = -std::expm1(-2.0 * lambda * t);
    const double s_max = std::min(2.0 * lambda * t, 60.0);
    auto f = [&](double s) {
        return std::exp(-s) * h(y - t + s / lambda) / (1.0 + q * std::exp(-2.0 * s));
    };
    const double breaks[] = {1.0, 4.0, 16.0};
    const double integral = quad::integrate_smooth(f, 0.0, s_max, cfg, breaks).value;
    return (1.0 + p) / one_minus_a * integral;
}

// Stability of a measured constant along a doubling ladder: the growth per
// step at the sweep tail (last three steps).  A constant converging to its
// plateau from below is stable; sustained tail growth (a missed log factor,
// say) is not.  Numerically-zero entries are skipped.
double max_step_growth_of(std::span<const double> constants) {
    double worst = 0.0;
    const std::size_t n = constants.size();
    const std::size_t first = n > 4 ? n - 4 : 0;
    for (std::size_t i = first; i + 1 < n; ++i) {
        if (constants[i] <= 1e-14) continue;
        worst = std::max(worst, constants[i + 1] / constants[i] - 1.0);
    }
    return worst;
}

std::string interval_str(Interval w) {
    std::ostringstream os;
    os << "[" << w.lo << "," << w.hi << "]";
    return os.str();
}

} // namespace

// ------------------------------------------------------------------ grids --

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (n < 1 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("bad log grid");
    std::vector<double> out;
    out.reserve(n);
    if (n == 1) return {lo};
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < n; ++i) out.push_back(std::exp(la + (lb - la) * i / (n - 1)));
    return out;
}

std::vector<double> default_y_grid() { return log_spaced(1e-2, 3.0, 24); }

std::vector<double> default_lambda_sweep() { return {16.0, 64.0, 256.0, 1024.0, 4096.0}; }

// -------------------------------------------------------------------- chi --

double chi_eval(double lambda, double rho, double t, double y) {
    require_chi_domain(lambda, rho, t, y);
    const double lt = lambda * t;
    const double front = lt / (-std::expm1(-2.0 * lt));
    const double conc = std::exp(-lt * (1.0 - rho));
    const double ratio = (1.0 + std::exp(-2.0 * lambda * y)) /
                         (1.0 + std::exp(-2.0 * lambda * (y - rho * t)));
    return front * conc * ratio;
}

double chi_lower_bracket(double lambda, double rho, double t) {
    const double lt = lambda * t;
    return 0.5 * lt / (-std::expm1(-2.0 * lt)) * std::exp(-lt * (1.0 - rho));
}

double chi_upper_bracket(double lambda, double rho, double t) {
    return 4.0 * chi_lower_bracket(lambda, rho, t);
}

double chi_bracket_ratio(double lambda, double rho, double t, double y) {
    require_chi_domain(lambda, rho, t, y);
    return (1.0 + std::exp(-2.0 * lambda * y)) /
           (1.0 + std::exp(-2.0 * lambda * (y - rho * t)));
}

double chi_moment(double lambda, double t, double y, const PVConfig& cfg) {
    require_chi_domain(lambda, 0.0, t, y);
    auto f = [&](double rho) { return chi_eval(lambda, rho, t, y); };
    // chi concentrates at rho = 1 on the scale 1/(lambda t)
    const double w = 1.0 / (lambda * t);
    const double breaks[] = {1.0 - w, 1.0 - 4.0 * w, 1.0 - 16.0 * w, 0.0};
    return quad::integrate_smooth(f, -1.0, 1.0, cfg, breaks).value;
}

double chi_moment_minus_one(double lambda, double t, double y, const PVConfig& cfg) {
    require_chi_domain(lambda, 0.0, t, y);
    const double p = std::exp(-2.0 * lambda * y);
    const double q = std::exp(-2.0 * lambda * (y - t));
    const double one_minus_a = -std::expm1(-2.0 * lambda * t);
    const double s_max = std::min(2.0 * lambda * t, 60.0);
    auto f = [&](double s) {
        const double qe = q * std::exp(-2.0 * s);
        return std::exp(-s) * (qe - p) / (1.0 + qe);
    };
    const double breaks[] = {1.0, 4.0, 16.0};
    return -quad::integrate_smooth(f, 0.0, s_max, cfg, breaks).value / one_minus_a;
}

// ---------------------------------------------------------- decomposition --

Decomposition decompose_A_B(const TestFunction& phi, double lambda, double y,
                            const PVConfig& cfg) {
    if (!phi.has_deriv())
        throw std::domain_error("decompose_A_B needs a derivative for " + phi.label);
    if (!(y > 0.0)) throw std::domain_error("decompose_A_B requires y > 0");
    if (!(lambda > 0.0)) throw std::domain_error("decompose_A_B requires lambda > 0");

    PVConfig inner = cfg;
    inner.rel_tol = std::min(cfg.rel_tol, 1e-11);
    inner.abs_tol = std::min(cfg.abs_tol, 1e-13);

    auto j1 = [&](double t) {
        return chi_weighted_integral(lambda, t, y, phi.deriv, inner);
    };
    auto j0 = [&](double t) {
        auto h = [&](double u) {
            return (1.0 - ops::one_minus_tanh(lambda * u)) * phi.eval(u);
        };
        return chi_weighted_integral(lambda, t, y, h, inner);
    };

    const double s = 2.0 / lambda;
    const double breaks[] = {std::min(s, 0.5 * y), 0.5 * y, y - s};
    QuadResult a1 = quad::integrate_smooth(j1, 0.0, y, cfg, breaks);
    QuadResult a0 = quad::integrate_smooth(j0, 0.0, y, cfg, breaks);

    const double T = y + std::max(cfg.truncation_radius, 40.0) / lambda;
    QuadResult b = b_region_integral(phi, lambda, y, y, T, cfg);

    Decomposition out;
    out.a1 = -a1.value / lambda;
    out.a0 = a0.value;
    out.b = b.value;
    out.error_estimate = a1.error_estimate / lambda + a0.error_estimate + b.total_error() +
                         2.0 * y * inner.abs_tol;
    return out;
}

QuadResult b_region_integral(const TestFunction& phi, double lambda, double y, double t_lo,
                             double t_hi, const PVConfig& cfg) {
    if (!(y >= 0.0) || !(t_lo >= y) || !(t_hi > t_lo))
        throw std::domain_error("b_region_integral requires y <= t_lo < t_hi");
    auto f = [&](double t) { return ops::folded_integrand_I_lambda(phi, lambda, y, t); };
    const double s = 2.0 / lambda;
    const double breaks[] = {y + s, 1.0, 2.0 * y};
    return quad::integrate_smooth(f, t_lo, t_hi, cfg, breaks);
}

// -------------------------------------------------------- lemma 1 (conv.) --

double lemma1_lhs(int m, double kappa, double x, const PVConfig& cfg) {
    if (kappa < -1.0 || kappa >= 1.0)
        throw std::domain_error("lemma1 requires -1 <= kappa < 1");
    if (kappa == -1.0 && m < -1) throw std::domain_error("lemma1 at kappa=-1 needs m >= -1");
    const double ax = std::abs(x);
    // normalized integrand: peak exponent kappa |x| factored out, both tails
    // decay at rate (1 - kappa)
    auto f = [&](double z) {
        const double expo = kappa * std::abs(x - z) - std::abs(z) - kappa * ax;
        return std::exp(expo) * std::pow(1.0 + std::abs(x - z), m);
    };
    const double reach = 80.0 / (1.0 - kappa);
    const double lo = std::min(0.0, x) - reach;
    const double hi = std::max(0.0, x) + reach;
    const double breaks[] = {0.0, x};
    const double n = quad::integrate_smooth(f, lo, hi, cfg, breaks).value;
    return std::exp(kappa * ax) * n;
}

namespace {
double lemma1_ratio(int m, double kappa, double x, const PVConfig& cfg) {
    const double ax = std::abs(x);
    const double normalized = lemma1_lhs(m, kappa, x, cfg) * std::exp(-kappa * ax);
    if (kappa == -1.0)
        return m >= 0 ? normalized / std::pow(1.0 + ax, m + 1) : normalized / std::log1p(ax);
    return normalized / std::pow(1.0 + ax, m);
}
} // namespace

BoundCertificate certify_lemma1(int m, double kappa, std::span<const double> x_grid,
                                const PVConfig& cfg) {
    BoundCertificate cert;
    cert.claim_id = kappa == -1.0 ? "Lemma1.13" : "Lemma1.12";
    if (kappa == -1.0)
        cert.rhs_form = m >= 0 ? "e^{-|x|}(1+|x|)^{m+1}" : "e^{-|x|} log(1+|x|)";
    else
        cert.rhs_form = "(1+|x|)^m e^{kappa|x|}";
    std::ostringstream gd;
    gd << "m=" << m << " kappa=" << kappa << " x-grid n=" << x_grid.size();
    cert.grid_desc = gd.str();

    double cbase = 0.0, crefined = 0.0;
    const PVConfig fine = cfg.refined();
    for (double x : x_grid) {
        if (std::abs(x) <= 3.0)
            throw std::domain_error("lemma1 grid must satisfy |x| > 3");
        const double r = lemma1_ratio(m, kappa, x, cfg);
        const double r2 = lemma1_ratio(m, kappa, x, fine);
        cbase = std::max(cbase, r);
        crefined = std::max(crefined, r2);
        cert.samples.push_back({{x}, lemma1_lhs(m, kappa, x, cfg), 0.0, r, ""});
    }
    cert.measured_constant = cbase;
    Sample refined_note;
    refined_note.ratio = crefined;
    refined_note.note = "measured constant under 2x quadrature refinement";
    cert.samples.push_back(refined_note);
    const double growth = cbase > 0 ? crefined / cbase - 1.0 : 0.0;
    cert.pass = std::isfinite(cbase) && std::isfinite(crefined) && growth < 0.05;
    return cert;
}

// ----------------------------------------------------- boundedness ratios --

SchauderParams h_target_space(const SchauderParams& source) {
    SchauderParams t = source;
    if (source.kappa == -1.0) {
        if (source.m >= 0) {
            t.m = source.m + 1;
        } else {
            t.kind = WeightKind::Logarithmic;
        }
    }
    return t;
}

SchauderParams i_target_space(const SchauderParams& source) {
    SchauderParams t = source;
    if (source.kappa == 0.0) {
        if (source.m >= 0) {
            t.m = source.m + 1;
        } else {
            t.kind = WeightKind::Logarithmic;
        }
    }
    return t;
}

namespace {

funcspace::EstimatorConfig cert_estimator() {
    funcspace::EstimatorConfig e;
    e.sup_density = 8.0;
    e.holder_density = 2.0;
    return e;
}

funcspace::EstimatorConfig refined_estimator() {
    funcspace::EstimatorConfig e = cert_estimator();
    e.sup_density *= 2.0;
    e.holder_density *= 2.0;
    return e;
}

template <typename Apply>
BoundCertificate certify_op_bound(const char* claim, Apply&& apply,
                                  const SchauderParams& source, const SchauderParams& target,
                                  std::span<const TestFunction> catalog, Interval window,
                                  const PVConfig& cfg) {
    if (catalog.empty()) throw std::invalid_argument("empty catalog");
    BoundCertificate cert;
    cert.claim_id = claim;
    cert.rhs_form = "||op f||_target / ||f||_source";
    cert.grid_desc = "window " + interval_str(window);
    cert.seed = funcspace::PairScheme{}.seed;

    const auto base = cert_estimator();
    const auto fine = refined_estimator();
    double cbase = 0.0, crefined = 0.0;
    for (const TestFunction& f : catalog) {
        auto op_f = memoize([&apply, &f, &cfg](double y) { return apply(f, y, cfg); });
        const double src = funcspace::estimate_norm(f.eval, source, window, base).norm();
        const double tgt = funcspace::estimate_norm(op_f, target, window, base).norm();
        const double src2 = funcspace::estimate_norm(f.eval, source, window, fine).norm();
        const double tgt2 = funcspace::estimate_norm(op_f, target, window, fine).norm();
        const double ratio = src > 0 ? tgt / src : 0.0;
        const double ratio2 = src2 > 0 ? tgt2 / src2 : 0.0;
        cbase = std::max(cbase, ratio);
        crefined = std::max(crefined, ratio2);
        Sample s;
        s.lhs = tgt;
        s.rhs = src;
        s.ratio = ratio;
        s.note = f.label;
        cert.samples.push_back(std::move(s));
    }
    cert.measured_constant = cbase;
    Sample refined_note;
    refined_note.ratio = crefined;
    refined_note.note = "measured constant under 2x sampling refinement";
    cert.samples.push_back(refined_note);
    const double growth = cbase > 0 ? crefined / cbase - 1.0 : 0.0;
    cert.pass = std::isfinite(cbase) && std::isfinite(crefined) && growth < 0.05;
    return cert;
}

} // namespace

BoundCertificate certify_H_bound(const SchauderParams& params,
                                 std::span<const TestFunction> catalog, Interval window,
                                 const PVConfig& cfg) {
    if (params.kappa < -1.0 || params.kappa >= 1.0)
        throw std::domain_error("H boundedness requires -1 <= kappa < 1");
    auto apply = [](const TestFunction& f, double y, const PVConfig& c) {
        return ops::apply_H(f, y, c).value;
    };
    const char* claim = params.kappa == -1.0 ? "Thm1.11" : "Thm1.10";
    return certify_op_bound(claim, apply, params, h_target_space(params), catalog, window, cfg);
}

BoundCertificate certify_I_bound(const SchauderParams& params,
                                 std::span<const TestFunction> catalog, Interval window,
                                 const PVConfig& cfg) {
    if (params.kappa < 0.0 || params.kappa >= 2.0)
        throw std::domain_error("I boundedness requires 0 <= kappa < 2");
    auto apply = [](const TestFunction& f, double y, const PVConfig& c) {
        return ops::apply_I(f, y, c).value;
    };
    const char* claim = params.kappa == 0.0 ? "Thm2.endpoint" : "Thm2.interior";
    return certify_op_bound(claim, apply, params, i_target_space(params), catalog, window, cfg);
}

BoundCertificate certify_H_bound_as(const SchauderParams& source, const SchauderParams& target,
                                    std::span<const TestFunction> catalog, Interval window,
                                    const PVConfig& cfg) {
    auto apply = [](const TestFunction& f, double y, const PVConfig& c) {
        return ops::apply_H(f, y, c).value;
    };
    return certify_op_bound("Thm1", apply, source, target, catalog, window, cfg);
}

BoundCertificate certify_I_bound_as(const SchauderParams& source, const SchauderParams& target,
                                    std::span<const TestFunction> catalog, Interval window,
                                    const PVConfig& cfg) {
    auto apply = [](const TestFunction& f, double y, const PVConfig& c) {
        return ops::apply_I(f, y, c).value;
    };
    return certify_op_bound("Thm2", apply, source, target, catalog, window, cfg);
}

namespace {

template <typename CertifyAs>
EndpointDemo endpoint_demo_impl(CertifyAs&& certify_as, const SchauderParams& source,
                                const SchauderParams& upgraded,
                                std::span<const TestFunction> catalog, Interval w1,
                                Interval w2, const PVConfig& cfg) {
    EndpointDemo d;
    d.upgraded_small = certify_as(source, upgraded, catalog, w1, cfg);
    d.upgraded_large = certify_as(source, upgraded, catalog, w2, cfg);
    d.naive_small = certify_as(source, source, catalog, w1, cfg);
    d.naive_large = certify_as(source, source, catalog, w2, cfg);
    d.upgraded_change =
        (d.upgraded_large.measured_constant - d.upgraded_small.measured_constant) /
        d.upgraded_small.measured_constant;
    d.naive_growth = d.naive_large.measured_constant / d.naive_small.measured_constant;
    d.pass = std::abs(d.upgraded_change) < 0.10 && d.naive_growth >= 1.25;
    return d;
}

} // namespace

EndpointDemo endpoint_demo_H(const SchauderParams& source,
                             std::span<const TestFunction> catalog, Interval w1, Interval w2,
                             const PVConfig& cfg) {
    return endpoint_demo_impl(
        [](const SchauderParams& s, const SchauderParams& t,
           std::span<const TestFunction> c, Interval w, const PVConfig& g) {
            return certify_H_bound_as(s, t, c, w, g);
        },
        source, h_target_space(source), catalog, w1, w2, cfg);
}

EndpointDemo endpoint_demo_I(const SchauderParams& source,
                             std::span<const TestFunction> catalog, Interval w1, Interval w2,
                             const PVConfig& cfg) {
    return endpoint_demo_impl(
        [](const SchauderParams& s, const SchauderParams& t,
           std::span<const TestFunction> c, Interval w, const PVConfig& g) {
            return certify_I_bound_as(s, t, c, w, g);
        },
        source, i_target_space(source), catalog, w1, w2, cfg);
}

WindowComparison compare_windows_H(const SchauderParams& params,
                                   std::span<const TestFunction> catalog, Interval w1,
                                   Interval w2, const PVConfig& cfg) {
    WindowComparison out;
    out.small = certify_H_bound(params, catalog, w1, cfg);
    out.large = certify_H_bound(params, catalog, w2, cfg);
    out.rel_change = (out.large.measured_constant - out.small.measured_constant) /
                     out.small.measured_constant;
    return out;
}

WindowComparison compare_windows_I(const SchauderParams& params,
                                   std::span<const TestFunction> catalog, Interval w1,
                                   Interval w2, const PVConfig& cfg) {
    WindowComparison out;
    out.small = certify_I_bound(params, catalog, w1, cfg);
    out.large = certify_I_bound(params, catalog, w2, cfg);
    out.rel_change = (out.large.measured_constant - out.small.measured_constant) /
                     out.small.measured_constant;
    return out;
}

// ------------------------------------------------------- chi certificates --

BoundCertificate certify_lemma3(int n_lambda, int n_y, int n_t, int n_rho,
                                const PVConfig& cfg) {
    BoundCertificate cert;
    cert.claim_id = "Lemma3";
    cert.rhs_form = "(a) bracket * (1/2, 2]; (b) moment in [1/2, 2]";
    std::ostringstream gd;
    gd << "lambda[1,1e3]x" << n_lambda << " y(0,5]x" << n_y << " t-frac x" << n_t << " rho x"
       << n_rho;
    cert.grid_desc = gd.str();

    PVConfig mom_cfg = cfg;
    mom_cfg.rel_tol = std::min(cfg.rel_tol, 1e-12);
    mom_cfg.abs_tol = std::min(cfg.abs_tol, 1e-13);

    const double slack = 1e-12;
    const auto lambdas = log_spaced(1.0, 1e3, n_lambda);
    const auto ys = log_spaced(0.05, 5.0, n_y);
    long violations = 0;
    double worst_right = 0.0, best_left = 1e300, moment_lo = 1e300, moment_hi = 0.0;
    for (double lambda : lambdas) {
        for (double y : ys) {
            for (int it = 0; it < n_t; ++it) {
                const double t = y * (0.05 + 0.90 * it / (n_t - 1));
                for (int ir = 0; ir < n_rho; ++ir) {
                    const double rho = -0.95 + 1.90 * ir / (n_rho - 1);
                    // the bracket claim in its underflow-free ratio form
                    const double ratio = chi_bracket_ratio(lambda, rho, t, y);
                    if (!(ratio > 0.5)) ++violations;                   // strict left
                    if (!(ratio <= 2.0 * (1.0 + slack))) ++violations;  // right with slack
                    best_left = std::min(best_left, 2.0 * ratio);
                    worst_right = std::max(worst_right, 0.5 * ratio);
                    // direct check whenever the magnitudes are representable
                    const double hi = chi_upper_bracket(lambda, rho, t);
                    if (hi > 0) {
                        const double chi = chi_eval(lambda, rho, t, y);
                        const double lo = chi_lower_bracket(lambda, rho, t);
                        if (lo > 0 && !(chi > lo)) ++violations;
                        if (!(chi <= hi * (1.0 + slack))) ++violations;
                    }
                }
                const double mom = chi_moment(lambda, t, y, mom_cfg);
                moment_lo = std::min(moment_lo, mom);
                moment_hi = std::max(moment_hi, mom);
                if (!(mom >= 0.5 - slack - 10 * mom_cfg.abs_tol)) ++violations;
                if (!(mom <= 2.0 + slack + 10 * mom_cfg.abs_tol)) ++violations;
            }
        }
    }
    cert.measured_constant = worst_right; // max chi / upper-bracket, must be <= 1
    Sample s;
    s.lhs = best_left;
    s.rhs = moment_lo;
    s.ratio = moment_hi;
    s.note = "min chi/lower, min moment, max moment";
    cert.samples.push_back(std::move(s));
    cert.pass = violations == 0;
    if (violations > 0) {
        Sample v;
        v.ratio = static_cast<double>(violations);
        v.note = "violations";
        cert.samples.push_back(std::move(v));
    }
    return cert;
}

BoundCertificate certify_lemma4(const TestFunction& phi, std::span<const double> lambdas,
                                double y, const PVConfig& cfg) {
    if (!phi.has_deriv()) throw std::domain_error("lemma4 needs a derivative");
    BoundCertificate cert;
    cert.claim_id = "Lemma4";
    cert.rhs_form = "(1/lambda) ||phi||_{C1,(m)} (1+y)^{m+1}";
    cert.grid_desc = "phi=" + phi.label + " y fixed";
    const int m = std::max(phi.claimed_class.m, 0);

    PVConfig inner = cfg;
    inner.rel_tol = std::min(cfg.rel_tol, 1e-11);
    inner.abs_tol = std::min(cfg.abs_tol, 1e-13);

    std::vector<double> constants;
    for (double lambda : lambdas) {
        auto j1 = [&](double t) {
            return chi_weighted_integral(lambda, t, y, phi.deriv, inner);
        };
        const double s = 2.0 / lambda;
        const double breaks[] = {std::min(s, 0.5 * y), 0.5 * y, y - s};
        const double a1 = -quad::integrate_smooth(j1, 0.0, y, cfg, breaks).value / lambda;
        const double c =
            std::abs(a1) * lambda / (std::pow(1.0 + y, m + 1) * phi.norm_c1);
        constants.push_back(c);
        cert.samples.push_back({{lambda, y}, std::abs(a1), 0.0, c, ""});
        cert.measured_constant = std::max(cert.measured_constant, c);
    }
    cert.pass = std::isfinite(cert.measured_constant) && max_step_growth_of(constants) <= 0.05;
    return cert;
}

double lemma5_default_delta(double lambda, double y) {
    double delta = 1.0 / (y * std::sqrt(lambda));
    delta = std::max(delta, 1.01 / lambda); // the optimization needs delta*lambda > 1
    return std::min(delta, 1.0);
}

Lemma5Ratios certify_lemma5(const TestFunction& phi, double lambda, double y, double t,
                            double delta, const PVConfig& cfg) {
    require_chi_domain(lambda, 0.0, t, y);
    if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("lemma5 needs 0 < delta <= 1");
    if (phi.claimed_class.kappa > 0.0)
        throw std::domain_error("lemma5 needs polynomial growth");
    const int m = std::max(phi.claimed_class.m, 0);
    const double wy = std::pow(1.0 + y, m);

    PVConfig inner = cfg;
    inner.rel_tol = std::min(cfg.rel_tol, 1e-11);
    inner.abs_tol = std::min(cfg.abs_tol, 1e-14);

    Lemma5Ratios r;
    // (a) |moment - 1| |phi(y-t)| <= ||phi||_0 (1+y)^m (e^{-lambda y} + e^{-2 lambda (y-t)})
    {
        const double lhs = std::abs(chi_moment_minus_one(lambda, t, y, inner)) *
                           std::abs(phi.eval(y - t));
        const double rhs = phi.norm_c0 * wy *
                           (std::exp(-lambda * y) + std::exp(-2.0 * lambda * (y - t)));
        r.a = rhs > 0 ? lhs / rhs : 0.0;
    }
    // (b) |int chi (phi(y - rho t) - phi(y - t))| <= ||phi||_1 (1+y)^m (delta t + e^{-lambda delta t})
    {
        const double base = phi.eval(y - t);
        auto h = [&](double u) { return phi.eval(u) - base; };
        const double lhs = std::abs(chi_weighted_integral(lambda, t, y, h, inner));
        const double rhs =
            phi.norm_c1 * wy * (delta * t + std::exp(-lambda * delta * t));
        r.b = rhs > 0 ? lhs / rhs : 0.0;
    }
    // (c) int chi (1 - tanh(lambda(y - rho t))) |phi(y - rho t)| <= C e^{-2 lambda (y-t)} ||phi||_0 (1+y)^m
    {
        auto h = [&](double u) {
            return ops::one_minus_tanh(lambda * u) * std::abs(phi.eval(u));
        };
        const double lhs = chi_weighted_integral(lambda, t, y, h, inner);
        const double rhs = std::exp(-2.0 * lambda * (y - t)) * phi.norm_c0 * wy;
        r.c = rhs > 0 ? lhs / rhs : 0.0;
    }
    return r;
}

BoundCertificate certify_lemma6(const TestFunction& phi, std::span<const double> lambdas,
                                double y, const PVConfig& cfg) {
    if (!phi.has_antideriv()) throw std::domain_error("lemma6 needs an antiderivative");
    BoundCertificate cert;
    cert.claim_id = "Lemma6";
    cert.rhs_form = "||phi||_{C1,(m)} (1+y)^m (y/(1+lambda y) + y lambda^{-1/2})";
    cert.grid_desc = "phi=" + phi.label + " y fixed";
    const int m = std::max(phi.claimed_class.m, 0);
    std::vector<double> constants;
    for (double lambda : lambdas) {
        const Decomposition d = decompose_A_B(phi, lambda, y, cfg);
        const double lhs = std::abs(d.a0 - phi.antideriv(y));
        const double rhs = phi.norm_c1 * std::pow(1.0 + y, m) *
                           (y / (1.0 + lambda * y) + y / std::sqrt(lambda));
        const double c = lhs / rhs;
        constants.push_back(c);
        cert.samples.push_back({{lambda, y}, lhs, rhs, c, ""});
        cert.measured_constant = std::max(cert.measured_constant, c);
    }
    cert.pass = std::isfinite(cert.measured_constant) && max_step_growth_of(constants) <= 0.05;
    return cert;
}

BoundCertificate certify_lemma7(const TestFunction& phi, std::span<const double> lambdas,
                                double y, const PVConfig& cfg) {
    BoundCertificate cert;
    cert.claim_id = "Lemma7";
    cert.rhs_form = "||phi||_0 (1/lambda)(1 + log(1 + 1/(lambda y)))";
    cert.grid_desc = "phi=" + phi.label + " y fixed, lambda y >= 1";
    std::vector<double> constants;
    for (double lambda : lambdas) {
        if (lambda * y < 1.0)
            throw std::domain_error("lemma7 certificate needs lambda y >= 1");
        const double T = y + std::max(cfg.truncation_radius, 40.0) / lambda;
        const QuadResult b = b_region_integral(phi, lambda, y, y, T, cfg);
        const double rhs =
            phi.norm_c0 / lambda * (1.0 + std::log1p(1.0 / (lambda * y)));
        const double c = std::abs(b.value) / rhs;
        constants.push_back(c);
        cert.samples.push_back({{lambda, y}, std::abs(b.value), rhs, c, ""});
        cert.measured_constant = std::max(cert.measured_constant, c);
    }
    cert.pass = std::isfinite(cert.measured_constant) && max_step_growth_of(constants) <= 0.05;
    return cert;
}

BoundCertificate certify_lemma8(const TestFunction& phi, std::span<const double> lambdas,
                                double lambda_y, const PVConfig& cfg) {
    BoundCertificate cert;
    cert.claim_id = "Lemma8";
    cert.rhs_form = "||phi||_{C0[0,2]} (y + 1/lambda) on y<|t|<1; ||phi||_0 / lambda on |t|>1";
    std::ostringstream gd;
    gd << "phi=" << phi.label << " lambda y = " << lambda_y << " held fixed";
    cert.grid_desc = gd.str();
    if (!(lambda_y > 0.0 && lambda_y < 1.0))
        throw std::domain_error("lemma8 needs 0 < lambda y < 1");

    double sup02 = 0.0;
    for (int i = 0; i <= 200; ++i)
        sup02 = std::max(sup02, std::abs(phi.eval(2.0 * i / 200.0)));

    std::vector<double> mids;
    for (double lambda : lambdas) {
        const double y = lambda_y / lambda;
        if (!(y < 1.0)) throw std::domain_error("lemma8 needs y < 1; raise lambda");
        const double T = y + std::max(cfg.truncation_radius, 40.0) / lambda;
        const double b_mid = b_region_integral(phi, lambda, y, y, 1.0, cfg).value;
        const double b_far =
            1.0 < T ? b_region_integral(phi, lambda, y, 1.0, T, cfg).value : 0.0;
        const double rhs_mid = sup02 * (y + 1.0 / lambda);
        const double rhs_far = phi.norm_c0 / lambda;
        const double c_mid = std::abs(b_mid) / rhs_mid;
        const double c_far = std::abs(b_far) / rhs_far;
        mids.push_back(c_mid);
        // the log-form bound is looser in this regime
        const double log_form = (1.0 + std::log1p(1.0 / lambda_y)) / lambda;
        Sample s;
        s.input = {lambda, y};
        s.lhs = std::abs(b_mid);
        s.rhs = rhs_mid;
        s.ratio = c_mid;
        s.note = (y + 1.0 / lambda < log_form) ? "tighter than log form" : "log form tighter";
        cert.samples.push_back(std::move(s));
        Sample sf;
        sf.input = {lambda, y};
        sf.lhs = std::abs(b_far);
        sf.rhs = rhs_far;
        sf.ratio = c_far;
        sf.note = "|t|>1 piece";
        cert.samples.push_back(std::move(sf));
        cert.measured_constant = std::max(cert.measured_constant, c_mid);
    }
    cert.pass = std::isfinite(cert.measured_constant) && max_step_growth_of(mids) <= 0.05;
    return cert;
}

BoundCertificate certify_tail_lemmas(const TestFunction& phi, std::span<const double> lambdas,
                                     double y, const PVConfig& cfg) {
    std::vector<double> l7, l8;
    for (double lambda : lambdas) (lambda * y >= 1.0 ? l7 : l8).push_back(lambda);
    BoundCertificate cert;
    cert.claim_id = "Lemma7+8";
    cert.grid_desc = "phi=" + phi.label;
    cert.pass = true;
    if (!l7.empty()) {
        BoundCertificate c7 = certify_lemma7(phi, l7, y, cfg);
        cert.pass = cert.pass && c7.pass;
        cert.measured_constant = std::max(cert.measured_constant, c7.measured_constant);
        cert.rhs_form += c7.rhs_form + "; ";
        for (auto& s : c7.samples) cert.samples.push_back(std::move(s));
    }
    // lambda y < 1 points: one certificate each at its own product (the
    // regime is scale-invariant along lambda y = const, so cross-lambda
    // stability at fixed y is certified by the aligned sweep instead)
    for (double lambda : l8) {
        const double one[] = {lambda};
        BoundCertificate c8 = certify_lemma8(phi, one, lambda * y, cfg);
        cert.pass = cert.pass && std::isfinite(c8.measured_constant);
        if (cert.rhs_form.find("C0[0,2]") == std::string::npos) cert.rhs_form += c8.rhs_form;
        for (auto& s : c8.samples) cert.samples.push_back(std::move(s));
    }
    return cert;
}

// ----------------------------------------------------------- rate fitting --

RateFit fit_loglog(std::span<const double> lambdas, std::span<const double> errors) {
    RateFit fit;
    if (lambdas.size() != errors.size()) throw std::invalid_argument("size mismatch");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(errors[i] > 0.0)) continue; // zero errors carry no log-log information
        fit.points.emplace_back(std::log(lambdas[i]), std::log(errors[i]));
    }
    const std::size_t n = fit.points.size();
    if (n < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, yv] : fit.points) {
        sx += x;
        sy += yv;
        sxx += x * x;
        sxy += x * yv;
        syy += yv * yv;
    }
    const double nn = static_cast<double>(n);
    const double ss_xx = sxx - sx * sx / nn;
    const double ss_xy = sxy - sx * sy / nn;
    const double ss_yy = syy - sy * sy / nn;
    fit.slope = ss_xx > 1e-12 ? ss_xy / ss_xx : 0.0;
    fit.intercept = sy / nn - fit.slope * sx / nn;
    fit.r_squared =
        (ss_xx * ss_yy) > 1e-24 ? (ss_xy * ss_xy) / (ss_xx * ss_yy) : 0.0;
    return fit;
}

RateFit measure_scaling_limit(const TestFunction& phi, std::span<const double> lambdas,
                              std::span<const double> y_grid, int m, const PVConfig& cfg) {
    if (!phi.has_antideriv())
        throw std::domain_error("scaling-limit measurement needs an exact antiderivative");
    if (lambdas.size() < 2) throw std::invalid_argument("need at least 2 lambda values");

    RateFit fit;
    for (double lambda : lambdas) {
        std::vector<double> ys(y_grid.begin(), y_grid.end());
        ys.push_back(0.1 / lambda);  // lambda-aligned diagnostic points (lambda y < 1)
        ys.push_back(0.01 / lambda);
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

        double e = 0.0, budget = 0.0, target = 0.0;
        for (double y : ys) {
            const QuadResult r = ops::apply_I_lambda(phi, lambda, y, cfg);
            const double w = std::pow(1.0 + std::abs(y), m + 1);
            e = std::max(e, std::abs(r.value - phi.antideriv(y)) / w);
            budget = std::max(budget, r.total_error() / w);
            target = std::max(target,
                              (cfg.abs_tol + cfg.rel_tol * std::abs(r.value)) / w);
        }
        fit.lambdas.push_back(lambda);
        fit.errors.push_back(e);
        fit.budgets.push_back(budget);
        fit.targets.push_back(target);
    }

    // exact-zero: indistinguishable from 0 at a noise floor the quadrature
    // actually delivered (budget within its configured per-point target).
    // An unresolved integral also has E ~ budget but far above target, and is
    // flagged as a numerical failure instead.
    bool all_noise = true, all_clean = true;
    for (std::size_t i = 0; i < fit.errors.size(); ++i) {
        const bool met_target = fit.budgets[i] <= 10.0 * fit.targets[i];
        if (fit.errors[i] > 10.0 * fit.budgets[i] || !met_target) all_noise = false;
        if (fit.budgets[i] > 0.1 * fit.errors[i]) all_clean = false;
    }
    fit.exact_zero = all_noise;
    fit.budget_ok = fit.exact_zero || all_clean;

    if (!fit.exact_zero) {
        const RateFit ls = fit_loglog(fit.lambdas, fit.errors);
        fit.slope = ls.slope;
        fit.intercept = ls.intercept;
        fit.r_squared = ls.r_squared;
        fit.points = ls.points;
        double lo = 1e300, hi = 0.0, step = 0.0;
        double prev = -1.0;
        for (std::size_t i = 0; i < fit.errors.size(); ++i) {
            const double u = fit.errors[i] * std::sqrt(fit.lambdas[i]);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
            if (prev > 0.0) step = std::max(step, u / prev);
            prev = u;
        }
        fit.uniform_ratio = lo > 0 ? hi / lo : 0.0;
        fit.max_step_growth = step;
    }
    return fit;
}

RateVerdict rate_verdict(const RateFit& fit) {
    if (fit.exact_zero)
        return {true, "exact-zero: error below the quadrature noise floor at every lambda"};
    std::ostringstream os;
    const bool slope_ok = fit.slope <= -0.35;
    const bool uniform_ok = fit.uniform_ratio < 5.0 || fit.max_step_growth <= 1.2;
    os << "slope=" << fit.slope << (slope_ok ? " ok" : " FAIL (> -0.35)")
       << "; E*sqrt(lambda) ratio=" << fit.uniform_ratio << " step-growth="
       << fit.max_step_growth << (uniform_ok ? " ok" : " FAIL")
       << "; budget " << (fit.budget_ok ? "ok" : "FAIL (> 10% of E)");
    return {slope_ok && uniform_ok && fit.budget_ok, os.str()};
}

} // namespace sio::lab
