#include "epavf/core/dense_propagator.hpp"

#include <cmath>

namespace epavf {

namespace {

constexpr int kTaylorTerms = 20;

// Taylor series of exp and phi for a matrix with norm <= 1/2.
void exp_phi_taylor(const Mat& B, Mat& E, Mat& P) {
  const auto n = B.rows();
  Mat term = Mat::Identity(n, n);
  E = term;
  P = term;
  for (int k = 1; k <= kTaylorTerms; ++k) {
    term = (term * B) / static_cast<double>(k);
    E += term;
    P += term / static_cast<double>(k + 1);
  }
}

int scaling_exponent(const Mat& A) {
  const double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  if (nrm <= 0.5) return 0;
  return static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
}

}  // namespace

Mat expm(const Mat& A) {
  if (A.rows() != A.cols()) throw ContractViolation("expm: matrix not square");
  const int s = scaling_exponent(A);
  Mat E, P;
  exp_phi_taylor(A / std::ldexp(1.0, s), E, P);
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

Mat phim(const Mat& A) {
  if (A.rows() != A.cols()) throw ContractViolation("phim: matrix not square");
  const int s = scaling_exponent(A);
  Mat E, P;
  exp_phi_taylor(A / std::ldexp(1.0, s), E, P);
  for (int i = 0; i < s; ++i) {
    P = 0.5 * (E * P + P);
    E = E * E;
  }
  return P;
}

Mat phim_quadrature(const Mat& A) {
  // 32-node Gauss-Legendre on [0,1] applied to exp((1-xi)A).
  static const double gx[16] = {
      0.0483076656877383162348126, 0.1444719615827964934851864,
      0.2392873622521370745446032, 0.3318686022821276497799168,
      0.4213512761306353453641194, 0.5068999089322293900237475,
      0.5877157572407623290407455, 0.6630442669302152009751152,
      0.7321821187402896803874267, 0.7944837959679424069630973,
      0.8493676137325699701336930, 0.8963211557660521239653072,
      0.9349060759377396891709191, 0.9647622555875064307738119,
      0.9856115115452683354001750, 0.9972638618494815635449811};
  static const double gw[16] = {
      0.0965400885147278005667648, 0.0956387200792748594190820,
      0.0938443990808045656391802, 0.0911738786957638847128686,
      0.0876520930044038111427715, 0.0833119242269467552221991,
      0.0781938957870703064717409, 0.0723457941088485062253994,
      0.0658222227763618468376501, 0.0586840934785355471452836,
      0.0509980592623761761961632, 0.0428358980222266806568786,
      0.0342738629130214331026877, 0.0253920653092620594557526,
      0.0162743947309056706051706, 0.0070186100094700966004071};
  const auto n = A.rows();
  Mat acc = Mat::Zero(n, n);
  for (int k = 0; k < 16; ++k) {
    const double x0 = 0.5 * (1.0 - gx[k]);
    const double x1 = 0.5 * (1.0 + gx[k]);
    const double w = 0.5 * gw[k];
    acc += w * (expm((1.0 - x0) * A) + expm((1.0 - x1) * A));
  }
  return acc;
}

DensePropagator build_dense_propagator(const Mat& S, const Mat& L, double tau) {
  if (S.rows() != S.cols() || L.rows() != L.cols() || S.rows() != L.rows())
    throw ContractViolation("build_dense_propagator: dimension mismatch");
  const Mat V = tau * S * L;
  return DensePropagator{expm(V), phim(V), tau};
}

std::array<double, 6> lemma_identities_check(const Mat& S, const Mat& L,
                                             double tau) {
  const Mat V = tau * S * L;
  const auto n = V.rows();
  const Mat eV = expm(V);
  const Mat eVm = expm(-V);
  const Mat pV = phim(V);
  const Mat pVm = phim(-V);
  const Mat I = Mat::Identity(n, n);
  auto nrm = [](const Mat& M) { return M.cwiseAbs().maxCoeff(); };
  return {
      nrm(L * eV - eVm.transpose() * L),  nrm(eV * S - S * eVm.transpose()),
      nrm(L * pV - pVm.transpose() * L),  nrm(pV * S - S * pVm.transpose()),
      nrm(V * pV - (eV - I)),             nrm(eVm * pV - pVm),
  };
}

}  // namespace epavf
