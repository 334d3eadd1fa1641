#pragma once

#include <complex>
#include <span>

#include "sk/errors.hpp"

namespace sk::sf {

using Complex = std::complex<double>;

// Value of a truncated series together with how it was truncated.
// tail_bound is an absolute bound on the dropped remainder, certified by a
// geometric-ratio majorant once the term ratio falls below 0.9.
struct SeriesResult {
    double value = 0.0;
    int terms_used = 1;
    double tail_bound = 0.0;
};

struct ComplexSeriesResult {
    Complex value{0.0, 0.0};
    int terms_used = 1;
    double tail_bound = 0.0;
};

// Rising factorial (a)_n = a(a+1)...(a+n-1); (a)_0 = 1.
// Large n is evaluated in log-magnitude + sign form so Racah-scale norms
// (n up to 1e4) do not overflow.
double pochhammer(double a, int n);

// log|(a)_n| and its sign (0 if the product vanishes exactly).
double log_pochhammer(double a, int n, int& sign);

// Principal-branch log-gamma for complex argument (Lanczos, g=7, 9 coefficients).
Complex lgamma_complex(Complex z);

// Kummer's confluent hypergeometric 1F1(a;c;z).
// Terminating series are summed exactly; for Re(z) < 0 the Kummer
// transformation e^z 1F1(c-a;c;-z) is applied before summing.
SeriesResult hyp1f1(double a, double c, double z);
ComplexSeriesResult hyp1f1(Complex a, Complex c, Complex z);

// Gauss hypergeometric 2F1(a,b;c;z) for real parameters.
// Valid for |z| < 1 (with the 1-z connection formula for z in (0.5, 1) and the
// Pfaff transformation for z < 0), terminating series for nonpositive-integer
// a or b, and z = 1 when c-a-b > 0 (Gauss summation).
SeriesResult hyp2f1(double a, double b, double c, double z);

// Terminating generalized hypergeometric sum pFq(num; den; z) cut at the first
// nonpositive-integer numerator parameter. n_terms caps the terminating index.
double hyp_terminating(std::span<const double> num, std::span<const double> den,
                       double z, int n_terms);

// Modified Bessel function of the first kind I_alpha(x), alpha > -1, x >= 0.
// scaled=true returns e^{-x} I_alpha(x).
double bessel_i(double alpha, double x, bool scaled = false);

// Whittaker function M_{kappa,mu}(z) = z^{mu+1/2} e^{-z/2} 1F1(mu-kappa+1/2; 2mu+1; z),
// principal branch of z^{mu+1/2}, z >= 0.
Complex whittaker_m(double kappa, Complex mu, double z);

// e^{pi*theta/2} W_{kappa, i*theta}(w) for w > 0, theta >= 0: the
// exponent-balanced Whittaker W on the imaginary-order line, evaluated through
// the M-connection formula. Real-valued.
double whittaker_w_imag_scaled(double kappa, double theta, double w);

}  // namespace sk::sf
