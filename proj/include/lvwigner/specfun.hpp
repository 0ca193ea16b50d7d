#pragma once

#include <complex>

namespace lvw::specfun {

using Complex = std::complex<double>;

double log_gamma(double x);
double digamma(double x);
double trigamma(double x);

// erf(z) for |Im z| <= 10.  Absolute error is below 1e-12 in the strip
// |Im z| <= 2; outside |Im z| > 10 an AccuracyLoss is thrown.
Complex erf_complex(Complex z);

// Imaginary error function (2/sqrt(pi)) int_0^x exp(t^2) dt, |x| <= 10.
double erfi(double x);

// Physicists' Hermite polynomial, n <= 200.
double hermite(int n, double u);

} // namespace lvw::specfun
