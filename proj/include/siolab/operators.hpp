// Closed-form kernels of the exponentially decaying Hilbert-type transform H,
// the conjugated operator I, and the rescaled family I_lambda, plus the
// complex-line form of the kernel.  All exponential ratios are evaluated in
// exponent-normalized form: the combined exponent is always <= 0, so nothing
// here can overflow no matter how large lambda*y gets.
#pragma once

#include "siolab/funcspace.hpp"
#include "siolab/quadrature.hpp"

#include <complex>

namespace sio::ops {

//! K(t) = 1/(e^t - e^{-t}); odd, singular at t = 0 (throws there).
double kernel_K(double t);

//! K'(t) = -(e^t + e^{-t})/(e^t - e^{-t})^2; even, throws at t = 0.
double kernel_K_deriv(double t);

//! (e^{-lambda y} + e^{lambda y}) / ((e^{-lambda eta} + e^{lambda eta})
//!  (e^{lambda(y-eta)} - e^{-lambda(y-eta)})); throws at eta = y.
//! For fixed 0 < eta < y this tends to 1 as lambda -> inf, and to 0 for
//! eta < 0 or eta > y.
double kernel_K_lambda(double lambda, double y, double eta);

//! (e^a + e^{-a}) / (e^b + e^{-b}), stable for any magnitudes.
double cosh_ratio(double a, double b);

//! 1 - tanh(u) = 2 e^{-2u}/(1 + e^{-2u}) for u >= 0, cancellation-free.
double one_minus_tanh(double u);

//! 1/(e^{lambda x} + e^{-lambda x}).
double sech_scaled(double lambda, double x);

//! Kernel on the vertical line Re z = a.  The second denominator factor is the
//! difference e^{i pi (xi - z)} - e^{-i pi (xi - z)}, which vanishes at xi = z
//! and reduces on the line to the real kernel above at lambda = 1.
std::complex<double> kernel_line(std::complex<double> z, std::complex<double> xi, double a);

//! y = pi * Im(z); requires Re(z) = a to within 1e-12.
double map_line_to_real(std::complex<double> z, double a);
std::complex<double> map_real_to_line(double y, double a);

//! Folded integrand of I_lambda at height y:
//!   K(lambda t) [ cr(y, y-t) phi(y-t) - cr(y, y+t) phi(y+t) ],
//! cr(a,b) = (e^{lambda a}+e^{-lambda a})/(e^{lambda b}+e^{-lambda b}),
//! evaluated with a single combined exponent (always <= 0).
double folded_integrand_I_lambda(const funcspace::TestFunction& phi, double lambda, double y,
                                 double t);

//! H psi (y) = P.V. int K(y - eta) psi(eta) d eta, via the odd-kernel fold.
//! Requires the claimed growth kappa < 1.
quad::QuadResult apply_H(const funcspace::TestFunction& psi, double y,
                         const quad::PVConfig& cfg);

//! I phi (y) = (e^{-y} + e^y) H(M phi)(y) with M phi = phi/(e^x + e^{-x}).
//! Requires 0 <= kappa < 2.
quad::QuadResult apply_I(const funcspace::TestFunction& phi, double y,
                         const quad::PVConfig& cfg);

//! Direct kernel quadrature of I (no conjugation); mutual oracle for apply_I.
quad::QuadResult apply_I_direct(const funcspace::TestFunction& phi, double y,
                                const quad::PVConfig& cfg);

//! I_lambda phi (y) via the split at t = |y|: the folded integral over (0,|y|)
//! plus the |t| > |y| tail.  y < 0 is evaluated by reflection, y = 0 is the
//! first-class tail-only case.  Requires polynomial growth (kappa <= 0).
quad::QuadResult apply_I_lambda(const funcspace::TestFunction& phi, double lambda, double y,
                                const quad::PVConfig& cfg);

//! Same value through the unsplit fold over (0, T); mutual oracle.
quad::QuadResult apply_I_lambda_unsplit(const funcspace::TestFunction& phi, double lambda,
                                        double y, const quad::PVConfig& cfg);

} // namespace sio::ops
