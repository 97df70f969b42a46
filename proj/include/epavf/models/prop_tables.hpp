// Per-mode 2x2 propagator entries for blocks of the form
//   V_k = [[0, alpha_k], [beta_k, 0]],   alpha_k * beta_k <= 0,
// which covers every block arising from the KGS/KGZ semi-discretizations.
// With theta = sqrt(-alpha*beta):
//   exp(V) = [[cos th, a*sinc th], [b*sinc th, cos th]]
//   phi(V) = [[sinc th, a*verc2 th], [b*verc2 th, sinc th]]
//   (I - V/2)^{-1} = [[1, a/2], [b/2, 1]] / (1 - a*b/4)
#pragma once

#include "epavf/core/types.hpp"
#include "epavf/spectral/kernels.hpp"

namespace epavf {

template <typename Arr>
struct BlockTableT {
  Arr e11, e12, e21, e22;  // exp(V) entries
  Arr f11, f12, f21, f22;  // phi(V) entries
  Arr c11, c12, c21, c22;  // (I - V/2)^{-1} entries
};

using BlockTable = BlockTableT<Vec>;
using BlockTable2D = BlockTableT<Mat>;

namespace detail {
struct TableEntries {
  double e11, e12, e21, e22, f11, f12, f21, f22, c11, c12, c21, c22;
};

inline TableEntries table_entries(double alpha, double beta) {
  const double th = std::sqrt(-alpha * beta);
  const double c = std::cos(th);
  const double sc = sinc(th);
  const double v2 = verc2(th);
  const double det = 1.0 - 0.25 * alpha * beta;
  return {c,         alpha * sc, beta * sc, c,
          sc,        alpha * v2, beta * v2, sc,
          1.0 / det, 0.5 * alpha / det, 0.5 * beta / det, 1.0 / det};
}
}  // namespace detail

template <typename Arr, typename AlphaFn, typename BetaFn>
BlockTableT<Arr> make_block_table(const Arr& lambda, AlphaFn&& alpha,
                                  BetaFn&& beta) {
  BlockTableT<Arr> t;
  for (Arr* a : {&t.e11, &t.e12, &t.e21, &t.e22, &t.f11, &t.f12, &t.f21, &t.f22,
                 &t.c11, &t.c12, &t.c21, &t.c22})
    a->resize(lambda.rows(), lambda.cols());
  for (Eigen::Index j = 0; j < lambda.cols(); ++j)
    for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
      const double lam = lambda(i, j);
      const auto e = detail::table_entries(alpha(lam), beta(lam));
      t.e11(i, j) = e.e11;  t.e12(i, j) = e.e12;
      t.e21(i, j) = e.e21;  t.e22(i, j) = e.e22;
      t.f11(i, j) = e.f11;  t.f12(i, j) = e.f12;
      t.f21(i, j) = e.f21;  t.f22(i, j) = e.f22;
      t.c11(i, j) = e.c11;  t.c12(i, j) = e.c12;
      t.c21(i, j) = e.c21;  t.c22(i, j) = e.c22;
    }
  return t;
}

// Schroedinger-type block: V_k = tau*beta*lambda_k * [[0,-1],[1,0]].
template <typename Arr>
BlockTableT<Arr> schroedinger_table(const Arr& lambda, double tau, double beta) {
  return make_block_table(
      lambda, [&](double lam) { return -tau * beta * lam; },
      [&](double lam) { return tau * beta * lam; });
}

// Oscillator block: V_k = tau * [[0, 1], [-omega2_k, 0]].
template <typename Arr, typename Omega2Fn>
BlockTableT<Arr> oscillator_table(const Arr& lambda, double tau,
                                  Omega2Fn&& omega2) {
  return make_block_table(
      lambda, [&](double) { return tau; },
      [&](double lam) { return -tau * omega2(lam); });
}

// Wave block driven through the Laplacian: V_k = tau * [[0, lambda_k], [1, 0]].
template <typename Arr>
BlockTableT<Arr> wave_table(const Arr& lambda, double tau) {
  return make_block_table(
      lambda, [&](double lam) { return tau * lam; },
      [&](double) { return tau; });
}

}  // namespace epavf
