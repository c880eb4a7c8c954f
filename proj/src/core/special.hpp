#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace covert {

// Regularized lower incomplete gamma P(a, x); Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Smallest x with Q(a, x) <= tail, found by bracketing + bisection.
double gamma_upper_quantile(double a, double tail);

// Adaptive Simpson on [a, b] with absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth = 60);

// In-place radix-2 complex FFT; size must be a power of two.
// inverse = true applies the conjugate transform without the 1/N factor.
void fft(std::vector<std::complex<double>>& data, bool inverse);

} // namespace covert
