#pragma once

namespace chronoface {

// log I_nu(x) for nu >= 0, x >= 0, evaluated entirely in the log domain so
// that high orders (nu ~ 255 for 512-dim embeddings) and large arguments
// never overflow. Orders below 15 use the ascending power series with
// streaming log-sum-exp accumulation; higher orders use the uniform
// large-order asymptotic expansion, which is valid for all x/nu ratios.
double log_bessel_i(double nu, double x);

// log of the surface area of the unit sphere S^{D-1} embedded in R^D.
double log_unit_sphere_area(int dim);

// log C_D(kappa), the normalization constant of the von Mises-Fisher
// density on S^{D-1}: C_D(k) = k^{D/2-1} / ((2 pi)^{D/2} I_{D/2-1}(k)).
// Continuous at kappa -> 0 where it equals -log(area of S^{D-1}).
double log_vmf_norm_const(int dim, double kappa);

// Mean resultant length A_D(kappa) = I_{D/2}(kappa) / I_{D/2-1}(kappa),
// the expected cosine between a sample and the mean direction.
double vmf_mean_resultant(int dim, double kappa);

}  // namespace chronoface
