#include "epavf/spectral/basis.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace epavf {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution on distinct
// plans with their own buffers is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Vec second_derivative_eigenvalues(BasisKind kind, int n, double a, double b) {
  if (n < 4) throw ContractViolation("spectral basis: grid size must be >= 4");
  if (!(b > a)) throw ContractViolation("spectral basis: degenerate domain");
  const double mu = 2.0 * M_PI / (b - a);
  if (kind == BasisKind::periodic) {
    if (n % 2 != 0)
      throw ContractViolation("spectral basis: periodic grid size must be even");
    Vec lam(n);
    for (int k = 0; k < n; ++k) {
      const int kk = (k <= n / 2) ? k : k - n;
      lam[k] = -(mu * kk) * (mu * kk);
    }
    return lam;
  }
  Vec lam(n - 1);
  for (int k = 1; k < n; ++k) {
    const double w = 0.5 * mu * k;
    lam[k - 1] = -w * w;
  }
  return lam;
}

struct SpectralBasis::Plans {
  fftw_complex* cin = nullptr;
  fftw_complex* cout = nullptr;
  double* rin = nullptr;
  double* rout = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_plan dst = nullptr;
};

SpectralBasis::SpectralBasis(BasisKind kind, int n, double a, double b)
    : kind_(kind), n_(n), a_(a), b_(b) {
  lambda_ = second_derivative_eigenvalues(kind, n, a, b);
  plans_ = std::make_unique<Plans>();
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (kind_ == BasisKind::periodic) {
    plans_->cin = fftw_alloc_complex(n_);
    plans_->cout = fftw_alloc_complex(n_);
    plans_->fwd = fftw_plan_dft_1d(n_, plans_->cin, plans_->cout, FFTW_FORWARD,
                                   FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_dft_1d(n_, plans_->cin, plans_->cout, FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
  } else {
    plans_->rin = fftw_alloc_real(n_ - 1);
    plans_->rout = fftw_alloc_real(n_ - 1);
    plans_->dst = fftw_plan_r2r_1d(n_ - 1, plans_->rin, plans_->rout,
                                   FFTW_RODFT00, FFTW_ESTIMATE);
  }
}

SpectralBasis::~SpectralBasis() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
  if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
  if (plans_->dst) fftw_destroy_plan(plans_->dst);
  if (plans_->cin) fftw_free(plans_->cin);
  if (plans_->cout) fftw_free(plans_->cout);
  if (plans_->rin) fftw_free(plans_->rin);
  if (plans_->rout) fftw_free(plans_->rout);
}

Vec SpectralBasis::grid() const {
  const double step = h();
  Vec x(size());
  if (kind_ == BasisKind::periodic) {
    for (int j = 0; j < n_; ++j) x[j] = a_ + j * step;
  } else {
    for (int j = 1; j < n_; ++j) x[j - 1] = a_ + j * step;
  }
  return x;
}

CVec SpectralBasis::forward_c(const Vec& v) const {
  if (kind_ != BasisKind::periodic)
    throw ContractViolation("forward_c: periodic basis required");
  if (v.size() != n_) throw ContractViolation("forward_c: length mismatch");
  for (int j = 0; j < n_; ++j) {
    plans_->cin[j][0] = v[j];
    plans_->cin[j][1] = 0.0;
  }
  fftw_execute(plans_->fwd);
  CVec c(n_);
  for (int j = 0; j < n_; ++j)
    c[j] = std::complex<double>(plans_->cout[j][0], plans_->cout[j][1]);
  return c;
}

Vec SpectralBasis::inverse_c(const CVec& c) const {
  if (kind_ != BasisKind::periodic)
    throw ContractViolation("inverse_c: periodic basis required");
  if (c.size() != n_) throw ContractViolation("inverse_c: length mismatch");
  for (int j = 0; j < n_; ++j) {
    plans_->cin[j][0] = c[j].real();
    plans_->cin[j][1] = c[j].imag();
  }
  fftw_execute(plans_->bwd);
  Vec v(n_);
  const double s = 1.0 / n_;
  for (int j = 0; j < n_; ++j) v[j] = plans_->cout[j][0] * s;
  return v;
}

Vec SpectralBasis::dst(const Vec& v) const {
  if (kind_ != BasisKind::dirichlet)
    throw ContractViolation("dst: dirichlet basis required");
  const int m = n_ - 1;
  if (v.size() != m) throw ContractViolation("dst: length mismatch");
  for (int j = 0; j < m; ++j) plans_->rin[j] = v[j];
  fftw_execute(plans_->dst);
  Vec c(m);
  const double s = 1.0 / std::sqrt(2.0 * n_);
  for (int j = 0; j < m; ++j) c[j] = plans_->rout[j] * s;
  return c;
}

Vec SpectralBasis::forward(const Vec& v) const { return dst(v); }
Vec SpectralBasis::inverse(const Vec& c) const { return dst(c); }

Vec apply_spectral_function(const SpectralBasis& basis,
                            const std::function<double(double)>& f,
                            const Vec& v) {
  Vec mult(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    mult[k] = f(basis.eigenvalues()[k]);
    if (!std::isfinite(mult[k]))
      throw ContractViolation("apply_spectral_function: non-finite multiplier");
  }
  return apply_diag(basis, mult, v);
}

Vec apply_diag(const SpectralBasis& basis, const Vec& multiplier, const Vec& v) {
  if (multiplier.size() != basis.size() || v.size() != basis.size())
    throw ContractViolation("apply_diag: length mismatch");
  if (basis.kind() == BasisKind::periodic) {
    CVec c = basis.forward_c(v);
    c.array() *= multiplier.array();
    return basis.inverse_c(c);
  }
  Vec c = basis.dst(v);
  c.array() *= multiplier.array();
  return basis.dst(c);
}

void apply_block2(const SpectralBasis& basis, const Vec& e11, const Vec& e12,
                  const Vec& e21, const Vec& e22, const Vec& x1, const Vec& x2,
                  Vec& y1, Vec& y2) {
  if (basis.kind() == BasisKind::periodic) {
    const CVec c1 = basis.forward_c(x1);
    const CVec c2 = basis.forward_c(x2);
    CVec t1 = (e11.array() * c1.array()) + (e12.array() * c2.array());
    CVec t2 = (e21.array() * c1.array()) + (e22.array() * c2.array());
    y1 = basis.inverse_c(t1);
    y2 = basis.inverse_c(t2);
  } else {
    const Vec c1 = basis.dst(x1);
    const Vec c2 = basis.dst(x2);
    Vec t1 = (e11.array() * c1.array()) + (e12.array() * c2.array());
    Vec t2 = (e21.array() * c1.array()) + (e22.array() * c2.array());
    y1 = basis.dst(t1);
    y2 = basis.dst(t2);
  }
}

struct Grid2D::Plans {
  fftw_complex* cin = nullptr;
  fftw_complex* cout = nullptr;
  double* rin = nullptr;
  double* rout = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_plan dst = nullptr;
};

Grid2D::Grid2D(BasisKind kind, int nx, double ax, double bx, int ny, double ay,
               double by)
    : kind_(kind) {
  bx_ = std::make_unique<SpectralBasis>(kind, nx, ax, bx);
  by_ = std::make_unique<SpectralBasis>(kind, ny, ay, by);
  const int mx = bx_->size();
  const int my = by_->size();
  lambda_.resize(mx, my);
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < my; ++j)
      lambda_(i, j) = bx_->eigenvalues()[i] + by_->eigenvalues()[j];

  plans_ = std::make_unique<Plans>();
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (kind_ == BasisKind::periodic) {
    plans_->cin = fftw_alloc_complex(static_cast<size_t>(mx) * my);
    plans_->cout = fftw_alloc_complex(static_cast<size_t>(mx) * my);
    // Column-major (mx, my) storage is an FFTW row-major (my, mx) array.
    plans_->fwd = fftw_plan_dft_2d(my, mx, plans_->cin, plans_->cout,
                                   FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_dft_2d(my, mx, plans_->cin, plans_->cout,
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    plans_->rin = fftw_alloc_real(static_cast<size_t>(mx) * my);
    plans_->rout = fftw_alloc_real(static_cast<size_t>(mx) * my);
    plans_->dst = fftw_plan_r2r_2d(my, mx, plans_->rin, plans_->rout,
                                   FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  }
}

Grid2D::~Grid2D() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
  if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
  if (plans_->dst) fftw_destroy_plan(plans_->dst);
  if (plans_->cin) fftw_free(plans_->cin);
  if (plans_->cout) fftw_free(plans_->cout);
  if (plans_->rin) fftw_free(plans_->rin);
  if (plans_->rout) fftw_free(plans_->rout);
}

CMat Grid2D::forward_c(const Mat& v) const {
  if (kind_ != BasisKind::periodic)
    throw ContractViolation("forward_c: periodic grid required");
  if (v.rows() != rows() || v.cols() != cols())
    throw ContractViolation("forward_c: shape mismatch");
  const Eigen::Index total = v.size();
  const double* src = v.data();
  for (Eigen::Index j = 0; j < total; ++j) {
    plans_->cin[j][0] = src[j];
    plans_->cin[j][1] = 0.0;
  }
  fftw_execute(plans_->fwd);
  CMat c(v.rows(), v.cols());
  std::complex<double>* dst = c.data();
  for (Eigen::Index j = 0; j < total; ++j)
    dst[j] = std::complex<double>(plans_->cout[j][0], plans_->cout[j][1]);
  return c;
}

Mat Grid2D::inverse_c(const CMat& c) const {
  if (kind_ != BasisKind::periodic)
    throw ContractViolation("inverse_c: periodic grid required");
  if (c.rows() != rows() || c.cols() != cols())
    throw ContractViolation("inverse_c: shape mismatch");
  const Eigen::Index total = c.size();
  const std::complex<double>* src = c.data();
  for (Eigen::Index j = 0; j < total; ++j) {
    plans_->cin[j][0] = src[j].real();
    plans_->cin[j][1] = src[j].imag();
  }
  fftw_execute(plans_->bwd);
  Mat v(c.rows(), c.cols());
  double* dst = v.data();
  const double s = 1.0 / static_cast<double>(total);
  for (Eigen::Index j = 0; j < total; ++j) dst[j] = plans_->cout[j][0] * s;
  return v;
}

Mat Grid2D::dst2(const Mat& v) const {
  if (kind_ != BasisKind::dirichlet)
    throw ContractViolation("dst2: dirichlet grid required");
  if (v.rows() != rows() || v.cols() != cols())
    throw ContractViolation("dst2: shape mismatch");
  const Eigen::Index total = v.size();
  const double* src = v.data();
  for (Eigen::Index j = 0; j < total; ++j) plans_->rin[j] = src[j];
  fftw_execute(plans_->dst);
  Mat c(v.rows(), v.cols());
  double* dst = c.data();
  const double s =
      1.0 / (2.0 * std::sqrt(static_cast<double>(bx_->cells()) * by_->cells()));
  for (Eigen::Index j = 0; j < total; ++j) dst[j] = plans_->rout[j] * s;
  return c;
}

Mat apply_spectral_function_2d(const Grid2D& grid,
                               const std::function<double(double)>& f,
                               const Mat& v) {
  Mat mult(grid.rows(), grid.cols());
  for (int i = 0; i < grid.rows(); ++i)
    for (int j = 0; j < grid.cols(); ++j) {
      mult(i, j) = f(grid.lambda_sum()(i, j));
      if (!std::isfinite(mult(i, j)))
        throw ContractViolation("apply_spectral_function_2d: non-finite multiplier");
    }
  return apply_diag_2d(grid, mult, v);
}

Mat apply_diag_2d(const Grid2D& grid, const Mat& multiplier, const Mat& v) {
  if (grid.kind() == BasisKind::periodic) {
    CMat c = grid.forward_c(v);
    c.array() *= multiplier.array();
    return grid.inverse_c(c);
  }
  Mat c = grid.dst2(v);
  c.array() *= multiplier.array();
  return grid.dst2(c);
}

void apply_block2_2d(const Grid2D& grid, const Mat& e11, const Mat& e12,
                     const Mat& e21, const Mat& e22, const Mat& x1,
                     const Mat& x2, Mat& y1, Mat& y2) {
  if (grid.kind() == BasisKind::periodic) {
    const CMat c1 = grid.forward_c(x1);
    const CMat c2 = grid.forward_c(x2);
    CMat t1 = (e11.array() * c1.array()) + (e12.array() * c2.array());
    CMat t2 = (e21.array() * c1.array()) + (e22.array() * c2.array());
    y1 = grid.inverse_c(t1);
    y2 = grid.inverse_c(t2);
  } else {
    const Mat c1 = grid.dst2(x1);
    const Mat c2 = grid.dst2(x2);
    Mat t1 = (e11.array() * c1.array()) + (e12.array() * c2.array());
    Mat t2 = (e21.array() * c1.array()) + (e22.array() * c2.array());
    y1 = grid.dst2(t1);
    y2 = grid.dst2(t2);
  }
}

}  // namespace epavf
