#include "deltacouple/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace deltacouple {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-17;

// Ai(0) and -Ai'(0).
constexpr double kAiryC1 = 0.355028053887817239260;
constexpr double kAiryC2 = 0.258819403792806798405;
constexpr double kSqrt3 = 1.732050807568877293527;

// Region boundaries for airy().
constexpr double kAiryMaclaurinLow = -2.0;
constexpr double kAiryIntegralFrom = 2.0;
constexpr double kAiryOscillatoryAsymptotic = -9.0;
constexpr double kBiAsymptotic = 10.0;

void check_airy_range(double x) {
  if (!std::isfinite(x) || std::abs(x) > 100.0) {
    throw Error(ErrorCode::OutOfRange, "airy: out of validated range");
  }
}

// Asymptotic coefficients u_k, v_k shared by all Airy expansions.
struct AiryAsymptoticCoeffs {
  static constexpr int kMax = 60;
  std::array<double, kMax> u{};
  std::array<double, kMax> v{};

  AiryAsymptoticCoeffs() {
    u[0] = v[0] = 1.0;
    for (int k = 1; k < kMax; ++k) {
      const double kk = k;
      u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) /
             ((2 * kk - 1) * 216 * kk);
      v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
    }
  }
};

const AiryAsymptoticCoeffs& airy_coeffs() {
  static const AiryAsymptoticCoeffs coeffs;
  return coeffs;
}

// sum_k sign^k c_k / zeta^k over the stride-selected subsequence, truncated
// at the smallest term.
double asymptotic_sum(const std::array<double, AiryAsymptoticCoeffs::kMax>& c,
                      double zeta, int first, int stride, double sign) {
  double sum = 0.0;
  double prev = INFINITY;
  double s = 1.0;
  for (int k = first; k < AiryAsymptoticCoeffs::kMax; k += stride) {
    const double term = s * c[k] / std::pow(zeta, k);
    if (std::abs(term) > prev) break;
    sum += term;
    prev = std::abs(term);
    if (prev < kEps * std::abs(sum)) break;
    s *= sign;
  }
  return sum;
}

// Taylor continuation of (y, y') for y'' = x y from x0 to x1.
void airy_taylor_step(double x0, double x1, double& y, double& dy) {
  const double d = x1 - x0;
  std::array<double, 64> a{};
  a[0] = y;
  a[1] = dy;
  a[2] = x0 * a[0] / 2.0;
  for (int n = 1; n + 2 < static_cast<int>(a.size()); ++n) {
    a[n + 2] = (x0 * a[n] + a[n - 1]) / ((n + 2.0) * (n + 1.0));
  }
  double val = 0.0;
  double der = 0.0;
  for (int n = static_cast<int>(a.size()) - 1; n >= 1; --n) {
    val = val * d + a[n];
    der = der * d + n * a[n];
  }
  // Horner above accumulated sum_{n>=1} a_n d^(n-1); finish both.
  y = a[0] + val * d;
  dy = der;
}

// exp(z) K_nu(z) for real nu, z > 0.
double scaled_k_integral(double nu, double z) {
  const double h = std::min(0.1, 0.5 / std::sqrt(z));
  double sum = 0.5;  // t = 0 term: exp(0) * cosh(0)
  for (int j = 1; j < 100000; ++j) {
    const double t = j * h;
    const double term = std::exp(-z * (std::cosh(t) - 1.0)) * std::cosh(nu * t);
    sum += term;
    if (term < kEps * sum) break;
  }
  return sum * h;
}

struct KIntegral {
  double k = 0.0;
  double k_prime = 0.0;
  double cond = INFINITY;
};

// K_{i mu}(x) = (1/2) int exp(-x cosh t + i mu t) dt over the real line,
// evaluated on the shifted contour t = s + i theta with sin(theta) = mu/x
// (through the saddle) when mu < x. The integrand is entire and the
// trapezoid rule converges geometrically.
KIntegral k_imag_order_integral(double mu, double x) {
  const double theta = mu < x ? std::asin(mu / x) : 0.0;
  const double c = std::cos(theta);
  const double h =
      std::min({0.05, 0.25 / std::sqrt(x * c), 2.0 * kPi / (mu + 40.0)});
  const Complex shift{0.0, theta};
  // Factor exp(-x cos(theta) - mu theta) out of every term.
  auto integrand = [&](double s, Complex& ch) {
    ch = std::cosh(Complex(s) + shift);
    return std::exp(-x * (ch - c) + Complex(0.0, mu * s));
  };
  Complex ch;
  Complex f = integrand(0.0, ch);
  double sum = 0.5 * f.real();
  double dsum = 0.5 * (ch * f).real();
  double abs_sum = 0.5 * std::abs(ch * f);
  for (int j = 1; j < 1000000; ++j) {
    f = integrand(j * h, ch);
    sum += f.real();
    dsum += (ch * f).real();
    const double a = std::abs(ch * f);
    abs_sum += a;
    if (a < kEps * abs_sum) break;
  }
  const double scale = std::exp(-x * c - mu * theta) * h;
  KIntegral out;
  out.k = sum * scale;
  out.k_prime = -dsum * scale;
  out.cond = sum != 0.0 ? abs_sum / std::abs(sum) : INFINITY;
  return out;
}

struct ISeries {
  Complex value;
  Complex prime;
  double abs_sum = 0.0;
  int terms = 0;
};

ISeries i_series(double mu, double x, int fixed_terms) {
  const Complex order{0.0, mu};
  const double half = 0.5 * x;
  const double q = half * half;
  Complex term = std::exp(order * std::log(half)) / gamma_complex(1.0 + order);
  ISeries s;
  const int cap = fixed_terms > 0 ? fixed_terms : 2000;
  const double peak = std::sqrt(q);
  for (int j = 0; j < cap; ++j) {
    if (j > 0) term *= q / (double(j) * (Complex(j) + order));
    s.value += term;
    s.prime += (2.0 * j + order) / x * term;
    s.abs_sum += std::abs(term);
    s.terms = j + 1;
    if (fixed_terms <= 0 && j > peak &&
        std::abs(term) < kEps * 1e-2 * std::abs(s.value)) {
      break;
    }
  }
  return s;
}

void check_bessel_range(double mu, double x) {
  if (!(x > 0.0)) {
    throw Error(ErrorCode::BranchPoint, "bessel: branch point (x <= 0)");
  }
  if (!std::isfinite(mu) || std::abs(mu) > 50.0 || x > 60.0) {
    throw Error(ErrorCode::OutOfRange, "bessel: out of validated range");
  }
}

}  // namespace

namespace detail {

AiryPair airy_maclaurin(double x) {
  const double x3 = x * x * x;
  double f = 1.0, g = x;
  double fp = 0.0, gp = 1.0;
  double tf = 1.0, tg = x;
  for (int k = 1; k < 400; ++k) {
    tf *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
    tg *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
    f += tf;
    g += tg;
    if (x != 0.0) {
      fp += 3.0 * k * tf / x;
      gp += (3.0 * k + 1.0) * tg / x;
    }
    const double scale = std::abs(f) + std::abs(g) + std::abs(fp) + std::abs(gp);
    if (std::abs(tf) + std::abs(tg) < kEps * 1e-2 * scale && k > 2) break;
  }
  AiryPair r;
  r.ai = kAiryC1 * f - kAiryC2 * g;
  r.ai_prime = kAiryC1 * fp - kAiryC2 * gp;
  r.bi = kSqrt3 * (kAiryC1 * f + kAiryC2 * g);
  r.bi_prime = kSqrt3 * (kAiryC1 * fp + kAiryC2 * gp);
  return r;
}

AiryPair airy_asymptotic(double x) {
  const auto& c = airy_coeffs();
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
  AiryPair r;
  if (x > 0.0) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const double q = std::sqrt(std::sqrt(x));
    const double su_alt = asymptotic_sum(c.u, zeta, 0, 1, -1.0);
    const double sv_alt = asymptotic_sum(c.v, zeta, 0, 1, -1.0);
    const double su = asymptotic_sum(c.u, zeta, 0, 1, 1.0);
    const double sv = asymptotic_sum(c.v, zeta, 0, 1, 1.0);
    const double em = std::exp(-zeta);
    const double ep = std::exp(zeta);
    r.ai = 0.5 * inv_sqrt_pi / q * em * su_alt;
    r.ai_prime = -0.5 * inv_sqrt_pi * q * em * sv_alt;
    r.bi = inv_sqrt_pi / q * ep * su;
    r.bi_prime = inv_sqrt_pi * q * ep * sv;
  } else {
    const double t = -x;
    const double zeta = 2.0 / 3.0 * t * std::sqrt(t);
    const double q = std::sqrt(std::sqrt(t));
    // Even and odd subsequences with alternating signs.
    const double ue = asymptotic_sum(c.u, zeta, 0, 2, -1.0);
    const double uo = asymptotic_sum(c.u, zeta, 1, 2, -1.0);
    const double ve = asymptotic_sum(c.v, zeta, 0, 2, -1.0);
    const double vo = asymptotic_sum(c.v, zeta, 1, 2, -1.0);
    const double ph = zeta - 0.25 * kPi;
    const double cs = std::cos(ph);
    const double sn = std::sin(ph);
    r.ai = inv_sqrt_pi / q * (cs * ue + sn * uo);
    r.ai_prime = inv_sqrt_pi * q * (sn * ve - cs * vo);
    r.bi = inv_sqrt_pi / q * (-sn * ue + cs * uo);
    r.bi_prime = inv_sqrt_pi * q * (cs * ve + sn * vo);
  }
  return r;
}

double bessel_k_real_order_scaled(double nu, double z) {
  return scaled_k_integral(nu, z);
}

Complex bessel_i_series(double mu, double x, int terms) {
  return i_series(mu, x, terms).value;
}

int bessel_i_default_terms(double mu, double x) {
  return i_series(std::abs(mu), x, 0).terms;
}

}  // namespace detail

AiryPair airy(double x) {
  check_airy_range(x);
  if (x >= kAiryIntegralFrom) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const double em = std::exp(-zeta);
    AiryPair r;
    r.ai = std::sqrt(x / 3.0) / kPi * em *
           detail::bessel_k_real_order_scaled(1.0 / 3.0, zeta);
    r.ai_prime = -x / (kPi * kSqrt3) * em *
                 detail::bessel_k_real_order_scaled(2.0 / 3.0, zeta);
    const AiryPair b =
        x <= kBiAsymptotic ? detail::airy_maclaurin(x) : detail::airy_asymptotic(x);
    r.bi = b.bi;
    r.bi_prime = b.bi_prime;
    return r;
  }
  if (x >= kAiryMaclaurinLow) return detail::airy_maclaurin(x);
  if (x <= kAiryOscillatoryAsymptotic) return detail::airy_asymptotic(x);

  AiryPair r = detail::airy_maclaurin(kAiryMaclaurinLow);
  const int steps = static_cast<int>(std::ceil((kAiryMaclaurinLow - x) / 0.5));
  const double h = (x - kAiryMaclaurinLow) / steps;
  for (int s = 0; s < steps; ++s) {
    const double x0 = kAiryMaclaurinLow + s * h;
    const double x1 = s + 1 == steps ? x : x0 + h;
    airy_taylor_step(x0, x1, r.ai, r.ai_prime);
    airy_taylor_step(x0, x1, r.bi, r.bi_prime);
  }
  return r;
}

Complex gamma_complex(Complex z) {
  static constexpr std::array<double, 9> p = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;

  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw Error(ErrorCode::InvalidArgument, "gamma: non-finite argument");
  }
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw Error(ErrorCode::GammaPole, "gamma pole");
  }
  if (z.real() < 0.5) {
    return kPi / (std::sin(kPi * z) * gamma_complex(1.0 - z));
  }
  z -= 1.0;
  Complex acc = p[0];
  for (int i = 1; i < static_cast<int>(p.size()); ++i) acc += p[i] / (z + double(i));
  const Complex t = z + g + 0.5;
  return std::sqrt(2.0 * kPi) * std::exp((z + 0.5) * std::log(t) - t) * acc;
}

ImagOrderBessel bessel_imag_order(double mu, double x) {
  check_bessel_range(mu, x);
  const double m = std::abs(mu);

  const ISeries s = i_series(m, x, 0);
  ImagOrderBessel out;
  out.i = s.value;
  out.i_prime = s.prime;

  // K from -pi Im(I)/sinh(pi mu) when that is well conditioned, otherwise from
  // the integral representation (always used at mu = 0).
  const KIntegral integral = k_imag_order_integral(m, x);
  double series_cond = INFINITY;
  if (m > 0.0 && s.value.imag() != 0.0) {
    series_cond = s.abs_sum / std::abs(s.value.imag());
  }
  if (series_cond < integral.cond) {
    const double f = -kPi / std::sinh(kPi * m);
    out.k = f * s.value.imag();
    out.k_prime = f * s.prime.imag();
  } else {
    out.k = integral.k;
    out.k_prime = integral.k_prime;
  }

  if (mu < 0.0) {
    out.i = std::conj(out.i);
    out.i_prime = std::conj(out.i_prime);
  }
  return out;
}

RealOrderBessel bessel_real_order(double nu, double x) {
  check_bessel_range(nu, x);
  if (nu < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "bessel: real order must be >= 0");
  }
  const double half = 0.5 * x;
  const double q = half * half;
  double term = std::pow(half, nu) / std::tgamma(nu + 1.0);
  RealOrderBessel out;
  for (int j = 0; j < 2000; ++j) {
    if (j > 0) term *= q / (j * (j + nu));
    out.i += term;
    out.i_prime += (2.0 * j + nu) / x * term;
    if (j > half && term < kEps * 1e-2 * out.i) break;
  }
  const double e = std::exp(-x);
  out.k = e * scaled_k_integral(nu, x);
  out.k_prime = -0.5 * e *
                (scaled_k_integral(nu - 1.0, x) + scaled_k_integral(nu + 1.0, x));
  return out;
}

Complex bessel_i_imag_order(double mu, double x) {
  check_bessel_range(mu, x);
  const Complex v = i_series(std::abs(mu), x, 0).value;
  return mu < 0.0 ? std::conj(v) : v;
}

double bessel_k_imag_order(double mu, double x) {
  return bessel_imag_order(mu, x).k;
}

}  // namespace deltacouple
