// Spectral differentiation bases:
//   periodic  - N-point DFT grid x_j = a + j*h, j = 0..N-1 (x_N duplicates x_0
//               and is not stored); second-derivative eigenvalues
//               -[mu*(0,1,...,N/2,-N/2+1,...,-1)]^2 with mu = 2*pi/(b-a).
//   dirichlet - N-1 interior points of an N-cell grid, homogeneous boundary
//               values implicit; eigenvalues -[(mu/2)*(1,...,N-1)]^2.  The
//               transform is the orthonormal-symmetric DST-I, which is its
//               own inverse.
//
// Transform instances own their FFTW plans and scratch buffers; share across
// threads by giving each thread its own instance.
#pragma once

#include <complex>
#include <functional>
#include <memory>

#include "epavf/core/types.hpp"

struct fftw_plan_s;

namespace epavf {

enum class BasisKind { periodic, dirichlet };

Vec second_derivative_eigenvalues(BasisKind kind, int n, double a, double b);

class SpectralBasis {
 public:
  SpectralBasis(BasisKind kind, int n, double a, double b);
  ~SpectralBasis();
  SpectralBasis(const SpectralBasis&) = delete;
  SpectralBasis& operator=(const SpectralBasis&) = delete;

  BasisKind kind() const { return kind_; }
  int cells() const { return n_; }
  int size() const { return static_cast<int>(lambda_.size()); }  // stored points
  double a() const { return a_; }
  double b() const { return b_; }
  double h() const { return (b_ - a_) / n_; }
  double mu() const { return 2.0 * M_PI / (b_ - a_); }
  const Vec& eigenvalues() const { return lambda_; }
  Vec grid() const;

  // Periodic transforms (complex coefficients, unnormalized forward, inverse
  // carries the 1/N and discards the imaginary residue).
  CVec forward_c(const Vec& v) const;
  Vec inverse_c(const CVec& c) const;

  // Dirichlet transform (self-inverse orthonormal DST-I).
  Vec dst(const Vec& v) const;

  // Coefficient-space views used by the generic helpers below.
  Vec forward(const Vec& v) const;   // dirichlet only
  Vec inverse(const Vec& c) const;   // dirichlet only

 private:
  BasisKind kind_;
  int n_;
  double a_, b_;
  Vec lambda_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

// inverse(f(Lambda) o forward(v)); linear in v.
Vec apply_spectral_function(const SpectralBasis& basis,
                            const std::function<double(double)>& f, const Vec& v);

// Same with a precomputed multiplier array over the eigenvalue index.
Vec apply_diag(const SpectralBasis& basis, const Vec& multiplier, const Vec& v);

// 2x2 block application in diagonal space:
//   y1 = inv(e11 o x1^ + e12 o x2^),  y2 = inv(e21 o x1^ + e22 o x2^).
void apply_block2(const SpectralBasis& basis, const Vec& e11, const Vec& e12,
                  const Vec& e21, const Vec& e22, const Vec& x1, const Vec& x2,
                  Vec& y1, Vec& y2);

// Tensor-product grid with Lambda_ij = lambda_x(i) + lambda_y(j).
class Grid2D {
 public:
  Grid2D(BasisKind kind, int nx, double ax, double bx, int ny, double ay,
         double by);
  ~Grid2D();
  Grid2D(const Grid2D&) = delete;
  Grid2D& operator=(const Grid2D&) = delete;

  BasisKind kind() const { return kind_; }
  const SpectralBasis& basis_x() const { return *bx_; }
  const SpectralBasis& basis_y() const { return *by_; }
  const Mat& lambda_sum() const { return lambda_; }
  int rows() const { return static_cast<int>(lambda_.rows()); }
  int cols() const { return static_cast<int>(lambda_.cols()); }

  CMat forward_c(const Mat& v) const;
  Mat inverse_c(const CMat& c) const;
  Mat dst2(const Mat& v) const;  // self-inverse

 private:
  BasisKind kind_;
  std::unique_ptr<SpectralBasis> bx_, by_;
  Mat lambda_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

Mat apply_spectral_function_2d(const Grid2D& grid,
                               const std::function<double(double)>& f,
                               const Mat& v);

Mat apply_diag_2d(const Grid2D& grid, const Mat& multiplier, const Mat& v);

void apply_block2_2d(const Grid2D& grid, const Mat& e11, const Mat& e12,
                     const Mat& e21, const Mat& e22, const Mat& x1,
                     const Mat& x2, Mat& y1, Mat& y2);

}  // namespace epavf
