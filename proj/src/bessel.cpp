#include "chronoface/bessel.hpp"

#include <cmath>

#include "chronoface/errors.hpp"
#include "chronoface/logspace.hpp"

namespace chronoface {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Ascending series sum_k (x/2)^{nu+2k} / (k! Gamma(nu+k+1)), accumulated
// in log space term by term. Converges for every x; the term count grows
// roughly like x/2, which is fine for the argument ranges reached here
// (the result is cached by callers, never in a per-face hot path).
double log_bessel_i_series(double nu, double x) {
  const double lh = std::log(x / 2.0);
  double log_term = nu * lh - std::lgamma(nu + 1.0);
  LogSumAccumulator acc;
  acc.add(log_term);
  const int max_iter = 200000;
  for (int k = 1; k <= max_iter; ++k) {
    log_term += 2.0 * lh - std::log(static_cast<double>(k)) - std::log(nu + k);
    acc.add(log_term);
    // Past the peak, stop once terms can no longer move the sum.
    if (log_term < acc.value() - 60.0 && 2.0 * lh < std::log(static_cast<double>(k) * (nu + k)))
      break;
  }
  return acc.value();
}

// Debye polynomials u_1..u_5 evaluated at t = 1/sqrt(1+z^2).
double debye_correction(double t, double nu) {
  const double t2 = t * t;
  const double u1 = t * (3.0 - 5.0 * t2) / 24.0;
  const double u2 = t2 * (81.0 + t2 * (-462.0 + t2 * 385.0)) / 1152.0;
  const double u3 =
      t * t2 * (30375.0 + t2 * (-369603.0 + t2 * (765765.0 - t2 * 425425.0))) /
      414720.0;
  const double u4 = t2 * t2 *
                    (4465125.0 +
                     t2 * (-94121676.0 +
                           t2 * (349922430.0 +
                                 t2 * (-446185740.0 + t2 * 185910725.0)))) /
                    39813120.0;
  const double u5 = t * t2 * t2 *
                    (1519035525.0 +
                     t2 * (-49286948607.0 +
                           t2 * (284499769554.0 +
                                 t2 * (-614135872350.0 +
                                       t2 * (566098157625.0 -
                                             t2 * 188699385875.0))))) /
                    6688604160.0;
  const double inv = 1.0 / nu;
  return 1.0 + inv * (u1 + inv * (u2 + inv * (u3 + inv * (u4 + inv * u5))));
}

// Uniform large-order asymptotic expansion: with z = x/nu,
//   I_nu(nu z) ~ exp(nu eta) / (sqrt(2 pi nu) (1+z^2)^{1/4}) * (1 + sum u_k/nu^k),
//   eta = sqrt(1+z^2) + log(z / (1 + sqrt(1+z^2))).
// Relative error ~1e-9 already at nu = 15 with five correction terms.
double log_bessel_i_uniform(double nu, double x) {
  const double z = x / nu;
  const double r = std::hypot(1.0, z);  // sqrt(1+z^2)
  const double eta = r + std::log(z) - std::log1p(r);
  const double t = 1.0 / r;
  return nu * eta - 0.5 * std::log(2.0 * M_PI * nu) - 0.5 * std::log(r) +
         std::log(debye_correction(t, nu));
}

}  // namespace

double log_bessel_i(double nu, double x) {
  if (!(nu >= 0.0) || !(x >= 0.0) || !std::isfinite(nu) || !std::isfinite(x))
    throw Error("log_bessel_i: requires finite nu >= 0, x >= 0");
  if (x == 0.0) return nu == 0.0 ? 0.0 : kNegInf;
  if (nu >= 15.0) return log_bessel_i_uniform(nu, x);
  return log_bessel_i_series(nu, x);
}

double log_unit_sphere_area(int dim) {
  if (dim < 2) throw Error("log_unit_sphere_area: dim >= 2 required");
  const double h = dim / 2.0;
  return std::log(2.0) + h * std::log(M_PI) - std::lgamma(h);
}

double log_vmf_norm_const(int dim, double kappa) {
  if (dim < 2) throw Error("log_vmf_norm_const: dim >= 2 required");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw Error("log_vmf_norm_const: kappa must be finite and >= 0");
  // kappa = 0 is the uniform density on the sphere; the generic formula is
  // 0/0 there but the limit is the inverse surface area.
  if (kappa < 1e-12) return -log_unit_sphere_area(dim);
  const double h = dim / 2.0;
  return (h - 1.0) * std::log(kappa) - h * kLog2Pi -
         log_bessel_i(h - 1.0, kappa);
}

double vmf_mean_resultant(int dim, double kappa) {
  if (kappa < 1e-12) return 0.0;
  const double h = dim / 2.0;
  return std::exp(log_bessel_i(h, kappa) - log_bessel_i(h - 1.0, kappa));
}

}  // namespace chronoface
