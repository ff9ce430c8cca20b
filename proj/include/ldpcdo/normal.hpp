#pragma once

namespace ldpcdo {

/// Standard Gaussian CDF, |error| <= 1e-15 (erfc-based).
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf on (0,1); accurate to 1e-12 over
/// (1e-300, 1-1e-16). Throws InvalidParameter outside (0,1).
double std_normal_quantile(double p);

}  // namespace ldpcdo
