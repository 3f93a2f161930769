#include "siolab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sio::ops {

using funcspace::TestFunction;
using quad::PVConfig;
using quad::QuadResult;

namespace {

double sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Tail majorant for the folded H integrand beyond T >= max(1, |y|):
//   |K(t)| <= e^{-t}/(1 - e^{-2}),
//   |psi(y -+ t)| <= C (1+|y|)^{m+} (1+t)^{m+} e^{|kappa||y|} e^{kappa t}.
double tail_bound_H(const TestFunction& psi, double y, double T) {
    const int mp = std::max(psi.claimed_class.m, 0);
    const double kappa = psi.claimed_class.kappa;
    const double pref = 2.0 / (1.0 - std::exp(-2.0)) * psi.growth_constant *
                        std::pow(1.0 + std::abs(y), mp) * std::exp(std::abs(kappa) * std::abs(y));
    return pref * quad::truncation_bound_exp(mp, kappa, T);
}

// Tail majorant for the folded I_lambda integrand beyond T > y >= 0:
// both fold terms are <= 2C e^{-2 lambda (t-y)} (1+2y)^{m+} (1+(t-y))^{m+}
//                         / (1 - e^{-2 lambda T});
// substituting u = 2 lambda (t-y) gives the closed form below.
double tail_bound_I_lambda(const TestFunction& phi, double lambda, double y, double T) {
    const int mp = std::max(phi.claimed_class.m, 0);
    const double scale = std::pow(std::max(1.0, 0.5 / lambda), mp);
    const double pref = phi.growth_constant * scale *
                        (1.0 + std::pow(1.0 + 2.0 * y, mp)) /
                        (lambda * (1.0 - std::exp(-2.0 * lambda * T)));
    return pref * quad::truncation_bound_exp(mp, 0.0, 2.0 * lambda * (T - y));
}

double i_lambda_upper_limit(double lambda, double y, const PVConfig& cfg) {
    return y + std::max(cfg.truncation_radius, 40.0) / lambda;
}

PVConfig scaled_fold_cfg(double lambda, const PVConfig& cfg) {
    PVConfig c = cfg;
    c.fold_radius = std::min(cfg.fold_radius, 0.5 / lambda);
    return c;
}

void require_polynomial_growth(const TestFunction& phi) {
    if (phi.claimed_class.kind != funcspace::WeightKind::Polynomial ||
        phi.claimed_class.kappa > 0.0)
        throw std::domain_error("I_lambda requires polynomially bounded input (kappa <= 0): " +
                                phi.label);
}

} // namespace

double kernel_K(double t) {
    if (t == 0.0) throw std::domain_error("kernel_K is singular at t = 0");
    const double a = std::abs(t);
    return sign(t) * std::exp(-a) / (-std::expm1(-2.0 * a));
}

double kernel_K_deriv(double t) {
    if (t == 0.0) throw std::domain_error("kernel_K_deriv is singular at t = 0");
    const double a = std::abs(t);
    const double d = -std::expm1(-2.0 * a);
    return -std::exp(-a) * (1.0 + std::exp(-2.0 * a)) / (d * d);
}

double kernel_K_lambda(double lambda, double y, double eta) {
    if (!(lambda > 0.0)) throw std::domain_error("kernel_K_lambda requires lambda > 0");
    if (eta == y) throw std::domain_error("kernel_K_lambda is singular at eta = y");
    const double ay = std::abs(y), ae = std::abs(eta), ad = std::abs(y - eta);
    const double expo = lambda * (ay - ae - ad); // <= 0 by the triangle inequality
    return sign(y - eta) * std::exp(expo) * (1.0 + std::exp(-2.0 * lambda * ay)) /
           ((1.0 + std::exp(-2.0 * lambda * ae)) * (-std::expm1(-2.0 * lambda * ad)));
}

double cosh_ratio(double a, double b) {
    const double aa = std::abs(a), ab = std::abs(b);
    return std::exp(aa - ab) * (1.0 + std::exp(-2.0 * aa)) / (1.0 + std::exp(-2.0 * ab));
}

double one_minus_tanh(double u) {
    const double e = std::exp(-2.0 * u);
    return 2.0 * e / (1.0 + e);
}

double sech_scaled(double lambda, double x) {
    const double a = lambda * std::abs(x);
    return std::exp(-a) / (1.0 + std::exp(-2.0 * a));
}

std::complex<double> kernel_line(std::complex<double> z, std::complex<double> xi, double a) {
    using namespace std::complex_literals;
    const std::complex<double> ipi = 1i * std::numbers::pi;
    const std::complex<double> num = std::exp(ipi * (z - a)) + std::exp(-ipi * (z - a));
    const std::complex<double> d1 = std::exp(ipi * (xi - a)) + std::exp(-ipi * (xi - a));
    const std::complex<double> d2 = std::exp(ipi * (xi - z)) - std::exp(-ipi * (xi - z));
    if (std::abs(d2) == 0.0) throw std::domain_error("kernel_line is singular at xi = z");
    return num / (d1 * d2);
}

double map_line_to_real(std::complex<double> z, double a) {
    const double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(z.imag())});
    if (std::abs(z.real() - a) > tol)
        throw std::invalid_argument("map_line_to_real requires Re z = a");
    return std::numbers::pi * z.imag();
}

std::complex<double> map_real_to_line(double y, double a) {
    return {a, y / std::numbers::pi};
}

double folded_integrand_I_lambda(const TestFunction& phi, double lambda, double y, double t) {
    const double ay = std::abs(y);
    const double inv_sinh = 1.0 / (-std::expm1(-2.0 * lambda * t)); // e^{lambda t} K(lambda t)
    const double num = 1.0 + std::exp(-2.0 * lambda * ay);

    const double am = std::abs(y - t);
    const double term_m = phi.eval(y - t) * std::exp(lambda * (ay - am - t)) /
                          (1.0 + std::exp(-2.0 * lambda * am));
    const double ap = std::abs(y + t);
    const double term_p = phi.eval(y + t) * std::exp(lambda * (ay - ap - t)) /
                          (1.0 + std::exp(-2.0 * lambda * ap));
    return num * inv_sinh * (term_m - term_p);
}

QuadResult apply_H(const TestFunction& psi, double y, const PVConfig& cfg) {
    if (psi.claimed_class.kappa >= 1.0)
        throw std::domain_error("apply_H requires growth kappa < 1, got label " + psi.label);
    const double T = std::abs(y) + cfg.truncation_radius;
    auto g = [&psi](double yy, double t) {
        return kernel_K(t) * (psi.eval(yy - t) - psi.eval(yy + t));
    };
    const double breaks[] = {1.0, std::abs(y), 2.0 * std::abs(y)};
    return quad::pv_integrate_folded(g, y, cfg, T, tail_bound_H(psi, y, T), breaks);
}

QuadResult apply_I(const TestFunction& phi, double y, const PVConfig& cfg) {
    const double kappa = phi.claimed_class.kappa;
    if (kappa < 0.0 || kappa >= 2.0)
        throw std::domain_error("apply_I requires 0 <= kappa < 2, got label " + phi.label);

    TestFunction mphi;
    mphi.label = "M(" + phi.label + ")";
    auto eval = phi.eval;
    mphi.eval = [eval](double x) { return eval(x) * sech_scaled(1.0, x); };
    mphi.claimed_class = phi.claimed_class;
    mphi.claimed_class.kappa = kappa - 1.0;
    mphi.growth_constant = phi.growth_constant;

    QuadResult h = apply_H(mphi, y, cfg);
    const double scale = std::exp(std::abs(y)) * (1.0 + std::exp(-2.0 * std::abs(y)));
    QuadResult out = h;
    out.value *= scale;
    out.error_estimate *= scale;
    out.truncation_bound *= scale;
    return out;
}

QuadResult apply_I_direct(const TestFunction& phi, double y, const PVConfig& cfg) {
    require_polynomial_growth(phi);
    return apply_I_lambda_unsplit(phi, 1.0, y, cfg);
}

QuadResult apply_I_lambda_unsplit(const TestFunction& phi, double lambda, double y,
                                  const PVConfig& cfg) {
    require_polynomial_growth(phi);
    if (!(lambda > 0.0)) throw std::domain_error("apply_I_lambda requires lambda > 0");
    if (y < 0.0) {
        QuadResult r = apply_I_lambda_unsplit(funcspace::reflect(phi), lambda, -y, cfg);
        r.value = -r.value;
        return r;
    }
    const double T = i_lambda_upper_limit(lambda, y, cfg);
    auto g = [&phi, lambda](double yy, double t) {
        return folded_integrand_I_lambda(phi, lambda, yy, t);
    };
    const double s = 2.0 / lambda;
    const double breaks[] = {y - s, y, y + s, 1.0, std::min(s, 0.5 * y)};
    return quad::pv_integrate_folded(g, y, scaled_fold_cfg(lambda, cfg), T,
                                     tail_bound_I_lambda(phi, lambda, y, T), breaks);
}

QuadResult apply_I_lambda(const TestFunction& phi, double lambda, double y,
                          const PVConfig& cfg) {
    require_polynomial_growth(phi);
    if (!(lambda > 0.0)) throw std::domain_error("apply_I_lambda requires lambda > 0");
    if (y < 0.0) {
        // the y < 0 case mirrors the split through int_y^0
        QuadResult r = apply_I_lambda(funcspace::reflect(phi), lambda, -y, cfg);
        r.value = -r.value;
        return r;
    }
    auto g = [&phi, lambda](double yy, double t) {
        return folded_integrand_I_lambda(phi, lambda, yy, t);
    };
    const double T = i_lambda_upper_limit(lambda, y, cfg);
    const double tail = tail_bound_I_lambda(phi, lambda, y, T);
    const double s = 2.0 / lambda;
    if (y == 0.0) {
        // region (A) is empty; only the |t| > y tail contributes
        const double breaks[] = {1.0, s};
        return quad::pv_integrate_folded(g, y, scaled_fold_cfg(lambda, cfg), T, tail, breaks);
    }
    const double breaks_a[] = {y - s, 0.5 * y, std::min(s, 0.5 * y)};
    QuadResult a = quad::pv_integrate_folded(g, y, scaled_fold_cfg(lambda, cfg), y, 0.0, breaks_a);
    auto gb = [&g, y](double t) { return g(y, t); };
    const double breaks_b[] = {y + s, 1.0, 2.0 * y};
    QuadResult b = quad::integrate_smooth(gb, y, T, cfg, breaks_b);

    QuadResult out;
    out.value = a.value + b.value;
    out.error_estimate = a.error_estimate + b.error_estimate;
    out.panels_used = a.panels_used + b.panels_used;
    out.truncation_bound = tail;
    return out;
}

} // namespace sio::ops
