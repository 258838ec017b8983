#pragma once

namespace firm {

/// Standard normal CDF, Phi(x).
double norm_cdf(double x);

/// Standard normal density, phi(x).
double norm_pdf(double x);

/// Standard normal quantile, Phi^-1(p) for p in (0,1).
///
/// Acklam's rational approximation (relative error < 1.15e-9) followed by one
/// Halley refinement step against erfc, giving close to full double
/// precision. Throws std::invalid_argument outside (0,1).
double norm_quantile(double p);

} // namespace firm
