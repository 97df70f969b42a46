// Removable-singularity-safe scalar kernels for the trigonometric propagator
// entries, applied entrywise over eigenvalue arrays:
//   sinc(x)  = sin(x)/x          -> 1    at x = 0
//   verc(x)  = (1-cos x)/x       -> 0
//   verc2(x) = (1-cos x)/x^2     -> 1/2
// The cosine differences are evaluated as 2 sin^2(x/2) to avoid cancellation;
// below |x| = 1e-4 a 4-term Taylor expansion takes over.
#pragma once

#include <cmath>

namespace epavf {

inline constexpr double kKernelTaylorThreshold = 1e-4;

inline double sinc(double x) {
  if (std::abs(x) < kKernelTaylorThreshold) {
    const double x2 = x * x;
    return 1.0 + x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (-1.0 / 5040.0 + x2 / 362880.0)));
  }
  return std::sin(x) / x;
}

inline double verc(double x) {
  if (std::abs(x) < kKernelTaylorThreshold) {
    const double x2 = x * x;
    return x * (0.5 + x2 * (-1.0 / 24.0 + x2 * (1.0 / 720.0 + x2 * (-1.0 / 40320.0))));
  }
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s / x;
}

inline double verc2(double x) {
  if (std::abs(x) < kKernelTaylorThreshold) {
    const double x2 = x * x;
    return 0.5 + x2 * (-1.0 / 24.0 + x2 * (1.0 / 720.0 + x2 * (-1.0 / 40320.0)));
  }
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s / (x * x);
}

}  // namespace epavf
