#pragma once

#include "deltacouple/types.hpp"

namespace deltacouple {

/// Ai, Bi and their derivatives at a common real argument.
struct AiryPair {
  double ai = 0.0;
  double bi = 0.0;
  double ai_prime = 0.0;
  double bi_prime = 0.0;
};

/// Airy functions for |x| <= 100.
///
/// Piecewise: Maclaurin series on [-2, 2); Taylor continuation of the
/// Maclaurin values for (-9, -2); oscillatory asymptotic expansions for
/// x <= -9. For x >= 2, Ai and Ai' come from the K_{1/3}, K_{2/3} integral
/// representations (non-oscillatory, trapezoid rule) and Bi, Bi' from the
/// Maclaurin series up to 10 and the exponential asymptotic expansion beyond.
AiryPair airy(double x);

/// Gamma(z) for complex z (Lanczos, g = 7, with reflection for Re z < 1/2).
Complex gamma_complex(Complex z);

/// I_{i mu}(x) for real mu (|mu| <= 50) and 0 < x <= 60.
Complex bessel_i_imag_order(double mu, double x);

/// K_{i mu}(x), real for real mu; K_{-i mu} = K_{i mu}.
double bessel_k_imag_order(double mu, double x);

/// I_{i mu}, K_{i mu} and their x-derivatives computed together.
struct ImagOrderBessel {
  Complex i;
  Complex i_prime;
  double k = 0.0;
  double k_prime = 0.0;
};

ImagOrderBessel bessel_imag_order(double mu, double x);

/// I_nu, K_nu and their x-derivatives for real order 0 <= nu <= 50 and
/// 0 < x <= 60 (exponential channels below zero energy).
struct RealOrderBessel {
  double i = 0.0;
  double i_prime = 0.0;
  double k = 0.0;
  double k_prime = 0.0;
};

RealOrderBessel bessel_real_order(double nu, double x);

namespace detail {

/// Power series of I_{i mu}(x) truncated after exactly `terms` terms.
Complex bessel_i_series(double mu, double x, int terms);

/// Number of terms bessel_i_imag_order uses at (mu, x).
int bessel_i_default_terms(double mu, double x);

/// Maclaurin-only Airy evaluation (no range switching), for overlap tests.
AiryPair airy_maclaurin(double x);

/// Asymptotic-expansion-only Airy evaluation, |x| large.
AiryPair airy_asymptotic(double x);

/// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt, scaled by exp(z).
double bessel_k_real_order_scaled(double nu, double z);

}  // namespace detail

}  // namespace deltacouple
