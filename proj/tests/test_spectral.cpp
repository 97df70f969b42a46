#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "epavf/spectral/basis.hpp"
#include "epavf/spectral/kernels.hpp"

using namespace epavf;

namespace {

// Naive O(N^2) discrete Fourier differentiation matrix, independent of the
// FFT path: D2 = F^{-1} diag(Lambda) F with explicit exponential sums.
Mat dense_periodic_d2(int n, double a, double b) {
  const double mu = 2.0 * M_PI / (b - a);
  const std::complex<double> I(0.0, 1.0);
  CMat F(n, n), Fi(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      F(k, j) = std::exp(-2.0 * M_PI * I * double(k * j) / double(n));
      Fi(j, k) = std::exp(2.0 * M_PI * I * double(k * j) / double(n)) / double(n);
    }
  CVec lam(n);
  for (int k = 0; k < n; ++k) {
    const int kk = (k <= n / 2) ? k : k - n;
    lam[k] = -(mu * kk) * (mu * kk);
  }
  return (Fi * lam.asDiagonal() * F).real();
}

// Same for the sine basis on the interior points.
Mat dense_dirichlet_d2(int n, double a, double b) {
  const int m = n - 1;
  const double mu = 2.0 * M_PI / (b - a);
  Mat S(m, m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      S(k, j) = std::sqrt(2.0 / n) * std::sin(M_PI * (k + 1) * (j + 1) / double(n));
  Vec lam(m);
  for (int k = 1; k <= m; ++k) lam[k - 1] = -(0.5 * mu * k) * (0.5 * mu * k);
  return S * lam.asDiagonal() * S;  // S is orthogonal and symmetric
}

Vec random_vec(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

}  // namespace

TEST_CASE("second derivative eigenvalues") {
  SUBCASE("periodic N=4 on (0, 2pi)") {
    const Vec lam = second_derivative_eigenvalues(BasisKind::periodic, 4, 0, 2 * M_PI);
    CHECK(lam[0] == doctest::Approx(0.0));
    CHECK(lam[1] == doctest::Approx(-1.0));
    CHECK(lam[2] == doctest::Approx(-4.0));
    CHECK(lam[3] == doctest::Approx(-1.0));
  }
  SUBCASE("dirichlet N=4 on (0, 2pi)") {
    const Vec lam =
        second_derivative_eigenvalues(BasisKind::dirichlet, 4, 0, 2 * M_PI);
    CHECK(lam[0] == doctest::Approx(-0.25));
    CHECK(lam[1] == doctest::Approx(-1.0));
    CHECK(lam[2] == doctest::Approx(-2.25));
  }
  SUBCASE("periodic N=8 on (-32, 32)") {
    const Vec lam = second_derivative_eigenvalues(BasisKind::periodic, 8, -32, 32);
    const double mu = M_PI / 32.0;
    CHECK(lam[1] == doctest::Approx(-mu * mu));
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(second_derivative_eigenvalues(BasisKind::periodic, 3, 0, 1),
                    ContractViolation);
    CHECK_THROWS_AS(second_derivative_eigenvalues(BasisKind::periodic, 6, 1, 1),
                    ContractViolation);
    CHECK_THROWS_AS(second_derivative_eigenvalues(BasisKind::dirichlet, 10, 0, -1),
                    ContractViolation);
  }
}

TEST_CASE("transform round trips") {
  std::mt19937 rng(2024);
  for (int n : {8, 16, 64, 256}) {
    SpectralBasis per(BasisKind::periodic, n, -3.0, 5.0);
    const Vec v = random_vec(n, rng);
    const Vec w = per.inverse_c(per.forward_c(v));
    CHECK((w - v).cwiseAbs().maxCoeff() <= 1e-13 * v.cwiseAbs().maxCoeff());

    SpectralBasis dir(BasisKind::dirichlet, n, -3.0, 5.0);
    const Vec u = random_vec(n - 1, rng);
    const Vec z = dir.dst(dir.dst(u));
    CHECK((z - u).cwiseAbs().maxCoeff() <= 1e-13 * u.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("spectral differentiation against dense oracles") {
  SUBCASE("periodic sine eigenfunction") {
    SpectralBasis basis(BasisKind::periodic, 16, 0.0, 2 * M_PI);
    const Vec x = basis.grid();
    Vec v(16);
    for (int i = 0; i < 16; ++i) v[i] = std::sin(x[i]);
    const Vec d = apply_spectral_function(basis, [](double l) { return l; }, v);
    CHECK((d + v).cwiseAbs().maxCoeff() < 1e-12);
    const Mat D2 = dense_periodic_d2(16, 0.0, 2 * M_PI);
    CHECK((d - D2 * v).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("zero maps to zero") {
    SpectralBasis basis(BasisKind::periodic, 8, 0.0, 1.0);
    const Vec d =
        apply_spectral_function(basis, [](double l) { return l; }, Vec(Vec::Zero(8)));
    CHECK(d.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("dirichlet first eigenfunction") {
    const double a = -2.0, b = 3.0, L = b - a;
    SpectralBasis basis(BasisKind::dirichlet, 16, a, b);
    const Vec x = basis.grid();
    Vec v(15);
    for (int i = 0; i < 15; ++i) v[i] = std::sin(M_PI * (x[i] - a) / L);
    const Vec d = apply_spectral_function(basis, [](double l) { return l; }, v);
    const double expect = -(M_PI / L) * (M_PI / L);
    CHECK((d - expect * v).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("dense equivalence for random data") {
    std::mt19937 rng(9);
    for (int n : {8, 16, 32}) {
      SpectralBasis per(BasisKind::periodic, n, -1.0, 2.0);
      const Mat D2p = dense_periodic_d2(n, -1.0, 2.0);
      const Vec v = random_vec(n, rng);
      const Vec d = apply_spectral_function(per, [](double l) { return l; }, v);
      CHECK((d - D2p * v).cwiseAbs().maxCoeff() <=
            1e-11 * (1 + D2p.cwiseAbs().maxCoeff()));

      SpectralBasis dir(BasisKind::dirichlet, n, -1.0, 2.0);
      const Mat D2d = dense_dirichlet_d2(n, -1.0, 2.0);
      const Vec u = random_vec(n - 1, rng);
      const Vec e = apply_spectral_function(dir, [](double l) { return l; }, u);
      CHECK((e - D2d * u).cwiseAbs().maxCoeff() <=
            1e-11 * (1 + D2d.cwiseAbs().maxCoeff()));
    }
  }

  SUBCASE("unit multiplier is the identity") {
    std::mt19937 rng(10);
    SpectralBasis basis(BasisKind::periodic, 32, 0.0, 4.0);
    const Vec v = random_vec(32, rng);
    const Vec w = apply_spectral_function(basis, [](double) { return 1.0; }, v);
    CHECK((w - v).cwiseAbs().maxCoeff() <= 1e-13);
    // cos(tau*beta*lambda) with tau = 0 is also the identity multiplier.
    const Vec z = apply_spectral_function(
        basis, [](double l) { return std::cos(0.0 * l); }, v);
    CHECK((z - v).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("safe kernels") {
  SUBCASE("removable singularities") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(verc(0.0) == 0.0);
    CHECK(verc2(0.0) == 0.5);
  }

  SUBCASE("spot values against 50-digit references") {
    struct Row {
      double x, sinc_v, verc_v, verc2_v;
    };
    static const Row rows[] = {
        {1e-16, 1.0, 5.0000000000000000005e-17, 0.5},
        {1e-8, 0.99999999999999998333, 4.9999999999999999583e-9,
         0.49999999999999999583},
        {1e-5, 0.99999999998333333333, 4.9999999999583333333e-6,
         0.49999999999583333333},
        {9.999e-5, 0.99999999833366665083, 4.9994999958345832097e-5,
         0.49999999958341666264},
        {1.0001e-4, 0.99999999833299998417, 5.0004999958320832097e-5,
         0.49999999958324999597},
        {1e-3, 0.99999983333334166667, 4.9999995833333472222e-4,
         0.49999995833333472222},
        {1e-2, 0.99998333341666646825, 4.9999583334722219742e-3,
         0.49999583334722219742},
        {0.1, 0.99833416646828152307, 0.049958347219742339044,
         0.49958347219742339044},
        {0.5, 0.95885107720840600055, 0.24483487621925456777,
         0.48966975243850913553},
        {1.0, 0.84147098480789650665, 0.4596976941318602826,
         0.4596976941318602826},
        {1.5707963267948966, 0.63661977236758134308, 0.63661977236758134308,
         0.40528473456935108578},
        {3.0, 0.047040002686622407367, 0.66333083220014848576,
         0.22111027740004949525},
        {10.0, -0.05440211108893698134, 0.18390715290764524523,
         0.018390715290764524523},
        {100.0, -0.0050636564110975879366, 0.001376811277123160659,
         1.376811277123160659e-5},
        {1000.0, 0.00082687954053200256026, 0.00043762092370929700892,
         4.3762092370929700892e-7},
    };
    for (const auto& r : rows) {
      CHECK(std::abs(sinc(r.x) - r.sinc_v) <= 1e-14 * std::abs(r.sinc_v) + 1e-15);
      CHECK(std::abs(verc(r.x) - r.verc_v) <= 1e-14 * std::abs(r.verc_v) + 1e-15);
      CHECK(std::abs(verc2(r.x) - r.verc2_v) <=
            1e-14 * std::abs(r.verc2_v) + 1e-15);
    }
    // Tiny arguments: the series values are exact at double precision.
    for (double x : {1e-300, 1e-200, 1e-100, 1e-30}) {
      CHECK(sinc(x) == 1.0);
      CHECK(verc(x) == 0.5 * x);
      CHECK(verc2(x) == 0.5);
    }
  }

  SUBCASE("log-spaced sweep against long-double evaluation") {
    auto ref_sinc = [](long double x) {
      return x < 1e-8L ? 1.0L - x * x / 6.0L : sinl(x) / x;
    };
    auto ref_verc = [](long double x) {
      if (x < 1e-8L) return x / 2.0L - x * x * x / 24.0L;
      const long double s = sinl(0.5L * x);
      return 2.0L * s * s / x;
    };
    auto ref_verc2 = [](long double x) {
      if (x < 1e-8L) return 0.5L - x * x / 24.0L;
      const long double s = sinl(0.5L * x);
      return 2.0L * s * s / (x * x);
    };
    for (int k = 0; k < 1000; ++k) {
      const double x = std::pow(10.0, -300.0 + 303.0 * k / 999.0);
      CHECK(std::abs(sinc(x) - double(ref_sinc(x))) <=
            1e-14 * std::abs(double(ref_sinc(x))) + 1e-15);
      CHECK(std::abs(verc(x) - double(ref_verc(x))) <=
            1e-14 * std::abs(double(ref_verc(x))) + 1e-15);
      CHECK(std::abs(verc2(x) - double(ref_verc2(x))) <=
            1e-14 * std::abs(double(ref_verc2(x))) + 1e-15);
    }
  }

  SUBCASE("continuity across the series switch") {
    // Both branches must agree at the same argument near the threshold, so
    // crossing it introduces no jump beyond round-off.
    auto trig_sinc = [](double x) { return std::sin(x) / x; };
    auto trig_verc = [](double x) {
      const double s = std::sin(0.5 * x);
      return 2.0 * s * s / x;
    };
    auto trig_verc2 = [](double x) {
      const double s = std::sin(0.5 * x);
      return 2.0 * s * s / (x * x);
    };
    const double t = kKernelTaylorThreshold;
    for (double x : {t * (1 - 1e-3), t * (1 + 1e-3)}) {
      CHECK(std::abs(sinc(x) - trig_sinc(x)) <= 1e-15);
      CHECK(std::abs(verc(x) - trig_verc(x)) <= 1e-15);
      CHECK(std::abs(verc2(x) - trig_verc2(x)) <= 1e-15);
    }
  }
}

TEST_CASE("2D spectral operations") {
  SUBCASE("periodic 4x4 agrees with the dense Kronecker operator") {
    Grid2D grid(BasisKind::periodic, 4, 0.0, 2 * M_PI, 4, 0.0, 2 * M_PI);
    const Mat D2 = dense_periodic_d2(4, 0.0, 2 * M_PI);
    const Mat I4 = Mat::Identity(4, 4);
    Mat Dk = Mat::Zero(16, 16);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            Dk(i + 4 * j, k + 4 * l) += D2(i, k) * I4(j, l) + I4(i, k) * D2(j, l);
    std::mt19937 rng(77);
    Mat V(4, 4);
    for (int i = 0; i < 16; ++i) V(i / 4, i % 4) = random_vec(1, rng)[0];
    const Mat W = apply_spectral_function_2d(grid, [](double l) { return l; }, V);
    const Vec wv = Dk * Eigen::Map<const Vec>(V.data(), 16);
    CHECK((Eigen::Map<const Vec>(W.data(), 16) - wv).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("dirichlet 8x8 agrees with the dense Kronecker operator") {
    const int n = 8, m = n - 1;
    Grid2D grid(BasisKind::dirichlet, n, 0.0, 1.0, n, 0.0, 1.0);
    const Mat D2 = dense_dirichlet_d2(n, 0.0, 1.0);
    const Mat Im = Mat::Identity(m, m);
    Mat Dk = Mat::Zero(m * m, m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l)
            Dk(i + m * j, k + m * l) += D2(i, k) * Im(j, l) + Im(i, k) * D2(j, l);
    std::mt19937 rng(78);
    Mat V(m, m);
    for (int i = 0; i < m * m; ++i) V(i / m, i % m) = random_vec(1, rng)[0];
    const Mat W = apply_spectral_function_2d(grid, [](double l) { return l; }, V);
    const Vec wv = Dk * Eigen::Map<const Vec>(V.data(), m * m);
    CHECK((Eigen::Map<const Vec>(W.data(), m * m) - wv).cwiseAbs().maxCoeff() <
          1e-11 * (1 + Dk.cwiseAbs().maxCoeff()));
  }

  SUBCASE("unit multiplier is the identity") {
    Grid2D grid(BasisKind::periodic, 8, -1.0, 1.0, 8, -1.0, 1.0);
    std::mt19937 rng(79);
    Mat V(8, 8);
    for (int i = 0; i < 64; ++i) V(i / 8, i % 8) = random_vec(1, rng)[0];
    const Mat W = apply_spectral_function_2d(grid, [](double) { return 1.0; }, V);
    CHECK((W - V).cwiseAbs().maxCoeff() <= 1e-13);
  }

  SUBCASE("separable eigenfunction") {
    Grid2D grid(BasisKind::periodic, 16, 0.0, 2 * M_PI, 16, 0.0, 2 * M_PI);
    const Vec x = grid.basis_x().grid();
    const Vec y = grid.basis_y().grid();
    Mat V(16, 16);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) V(i, j) = std::sin(x[i]) * std::sin(y[j]);
    const Mat W = apply_spectral_function_2d(grid, [](double l) { return l; }, V);
    CHECK((W + 2.0 * V).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("field constant in y matches the 1D operation row-wise") {
    SpectralBasis b1(BasisKind::periodic, 16, -2.0, 2.0);
    Grid2D grid(BasisKind::periodic, 16, -2.0, 2.0, 8, -1.0, 1.0);
    std::mt19937 rng(80);
    const Vec v = random_vec(16, rng);
    Mat V(16, 8);
    for (int j = 0; j < 8; ++j) V.col(j) = v;
    auto f = [](double l) { return std::cos(0.3 * l) / (1.0 + l * l); };
    const Vec w1 = apply_spectral_function(b1, f, v);
    const Mat W = apply_spectral_function_2d(grid, f, V);
    for (int j = 0; j < 8; ++j)
      CHECK((W.col(j) - w1).cwiseAbs().maxCoeff() < 1e-12);
  }
}
