// Dense matrix exponential and phi-function for V = tau*S*L, plus the six
// structural identities relating them to the symmetry of S and L.
#pragma once

#include <array>

#include "epavf/core/types.hpp"

namespace epavf {

// Scaling-and-squaring Taylor evaluation of exp(A); accurate to ~1e-15
// relative for moderate norms.
Mat expm(const Mat& A);

// phi(A) = int_0^1 exp((1-xi)A) dxi, evaluated by a scaled Taylor series with
// the doubling recurrence phi(2A) = (exp(A)*phi(A) + phi(A)) / 2.
Mat phim(const Mat& A);

// Reference evaluation of phi by 32-node Gauss quadrature of the integral
// definition; used to cross-check phim.
Mat phim_quadrature(const Mat& A);

struct DensePropagator {
  Mat expV;
  Mat phiV;
  double tau = 0.0;
};

// Builds exp(V) and phi(V) for V = tau*S*L.  S must be skew-symmetric and L
// symmetric of the same dimension.
DensePropagator build_dense_propagator(const Mat& S, const Mat& L, double tau);

// Max-norm residuals of the six identities satisfied by V = tau*S*L:
//   (1) L exp(V) - exp(-V)^T L          (2) exp(V) S - S exp(-V)^T
//   (3) L phi(V) - phi(-V)^T L          (4) phi(V) S - S phi(-V)^T
//   (5) V phi(V) - (exp(V) - I)         (6) exp(-V) phi(V) - phi(-V)
std::array<double, 6> lemma_identities_check(const Mat& S, const Mat& L,
                                             double tau);

}  // namespace epavf
