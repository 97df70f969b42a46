#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "epavf/models/kgs.hpp"

using namespace epavf;

namespace {

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

// Dense block description of the semi-discrete system, used as the oracle for
// the spectral fast path.
BlockSystem dense_kgs_system(int n, double a, double b, double beta, double eps) {
  const Mat D2 = dense_periodic_d2(n, a, b);
  const double eps2 = eps * eps;
  BlockSystem sys;
  {
    Mat S = Mat::Zero(2 * n, 2 * n), L = Mat::Zero(2 * n, 2 * n);
    S.topRightCorner(n, n) = 0.5 * Mat::Identity(n, n);
    S.bottomLeftCorner(n, n) = -0.5 * Mat::Identity(n, n);
    L.topLeftCorner(n, n) = -2.0 * beta * D2;
    L.bottomRightCorner(n, n) = -2.0 * beta * D2;
    sys.comps.push_back({S, L});
  }
  {
    Mat S = Mat::Zero(2 * n, 2 * n), L = Mat::Zero(2 * n, 2 * n);
    S.topRightCorner(n, n) = Mat::Identity(n, n) / eps2;
    S.bottomLeftCorner(n, n) = -Mat::Identity(n, n) / eps2;
    L.topLeftCorner(n, n) = -D2 + Mat::Identity(n, n) / eps2;
    L.bottomRightCorner(n, n) = eps2 * Mat::Identity(n, n);
    sys.comps.push_back({S, L});
  }
  sys.potential = [n](const BlockState& y) {
    const auto q = y.blocks[0].head(n).array();
    const auto p = y.blocks[0].tail(n).array();
    const auto u = y.blocks[1].head(n).array();
    return -((q.square() + p.square()) * u).sum();
  };
  sys.grad = [n](int i, const BlockState& y) {
    const auto q = y.blocks[0].head(n).array();
    const auto p = y.blocks[0].tail(n).array();
    const auto u = y.blocks[1].head(n).array();
    Vec g(2 * n);
    if (i == 0) {
      g.head(n) = -2.0 * (q * u);
      g.tail(n) = -2.0 * (p * u);
    } else {
      g.head(n) = -(q.square() + p.square());
      g.tail(n).setZero();
    }
    return g;
  };
  return sys;
}

KgsParams small_params(int n = 64, double h_override = 0.0) {
  KgsParams prm;
  prm.n = n;
  if (h_override > 0) {
    prm.a = -0.5 * h_override * n;
    prm.b = 0.5 * h_override * n;
  }
  return prm;
}

double max_diff(const KgsState& a, const KgsState& b) {
  return std::max({(a.q - b.q).cwiseAbs().maxCoeff(),
                   (a.p - b.p).cwiseAbs().maxCoeff(),
                   (a.u - b.u).cwiseAbs().maxCoeff(),
                   (a.v - b.v).cwiseAbs().maxCoeff()});
}

}  // namespace

TEST_CASE("kgs initial data") {
  SUBCASE("example preset samples") {
    KgsParams prm;
    prm.n = 128;  // h = 1/2, x = 0 lies on the grid
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    const KgsState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    const int j0 = 64;  // x = 0
    CHECK(model.basis().grid()[j0] == doctest::Approx(0.0));
    CHECK(s.q[j0] == doctest::Approx(0.5));
    CHECK(s.p[j0] == doctest::Approx(0.5));
    CHECK(s.u[j0] == doctest::Approx(0.5));
  }

  SUBCASE("zero u1 gives zero v") {
    KgsParams prm = small_params();
    prm.eps = 0.3;
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    const KgsState s =
        model.init(pr.psi_re, pr.psi_im, pr.u0, [](double) { return 0.0; });
    CHECK(s.v.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("v scales with 1/eps^2") {
    KgsParams prm;
    prm.n = 128;
    prm.eps = 0.5;
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    const KgsState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    CHECK(s.v[64] == doctest::Approx(4.0 / std::sqrt(2.0)));
  }
}

TEST_CASE("kgs propagator tables") {
  KgsParams prm = small_params(64);
  prm.eps = 0.5;
  Kgs1d model(prm);

  SUBCASE("tau -> 0 limit is the identity pattern") {
    const auto props = model.build_propagators(0.0);
    for (const auto* t : {&props.schro, &props.wave}) {
      CHECK((t->e11.array() - 1.0).abs().maxCoeff() == 0.0);
      CHECK(t->e12.cwiseAbs().maxCoeff() == 0.0);
      CHECK(t->e21.cwiseAbs().maxCoeff() == 0.0);
      CHECK((t->f11.array() - 1.0).abs().maxCoeff() == 0.0);
      CHECK(t->f12.cwiseAbs().maxCoeff() == 0.0);
      CHECK(t->f21.cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("zero mode entries of the Schroedinger block") {
    const auto props = model.build_propagators(0.1);
    CHECK(props.schro.f11[0] == 1.0);
    CHECK(props.schro.f12[0] == 0.0);
    CHECK(props.schro.f21[0] == 0.0);
    CHECK(props.schro.f22[0] == 1.0);
  }

  SUBCASE("per-mode identity V phi(V) = exp(V) - I") {
    const double tau = 0.1;
    const auto props = model.build_propagators(tau);
    const Vec& lam = model.basis().eigenvalues();
    const double eps2 = prm.eps * prm.eps;
    for (int k = 0; k < lam.size(); ++k) {
      {
        const double al = -tau * prm.beta * lam[k];
        Mat V(2, 2), E(2, 2), P(2, 2);
        V << 0, al, -al, 0;
        E << props.schro.e11[k], props.schro.e12[k], props.schro.e21[k],
            props.schro.e22[k];
        P << props.schro.f11[k], props.schro.f12[k], props.schro.f21[k],
            props.schro.f22[k];
        CHECK((V * P - (E - Mat::Identity(2, 2))).cwiseAbs().maxCoeff() <= 1e-12);
      }
      {
        const double w2 = (1.0 - eps2 * lam[k]) / (eps2 * eps2);
        Mat V(2, 2), E(2, 2), P(2, 2);
        V << 0, tau, -tau * w2, 0;
        E << props.wave.e11[k], props.wave.e12[k], props.wave.e21[k],
            props.wave.e22[k];
        P << props.wave.f11[k], props.wave.f12[k], props.wave.f21[k],
            props.wave.f22[k];
        CHECK((V * P - (E - Mat::Identity(2, 2))).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("kgs stepping") {
  FixedPointConfig fp;

  SUBCASE("free Schroedinger rotation for a single Fourier mode") {
    KgsParams prm;
    prm.n = 32;
    prm.a = 0.0;
    prm.b = 2.0 * M_PI;
    Kgs1d model(prm);
    const double tau = 0.2;
    const auto props = model.build_propagators(tau);
    const int k = 3;
    KgsState s = model.init([&](double x) { return std::cos(k * x); },
                            [&](double x) { return std::sin(k * x); },
                            [](double) { return 0.0; }, [](double) { return 0.0; });
    const KgsState out = model.epavf_step(s, props, fp);
    const Vec x = model.basis().grid();
    const double shift = tau * prm.beta * k * k;  // psi(t) = exp(i(kx - beta k^2 t))
    for (int j = 0; j < 32; ++j) {
      CHECK(std::abs(out.q[j] - std::cos(k * x[j] - shift)) <= 1e-12);
      CHECK(std::abs(out.p[j] - std::sin(k * x[j] - shift)) <= 1e-12);
    }
  }

  SUBCASE("energy conservation on the example preset") {
    KgsParams prm;
    prm.n = 128;  // h = 1/2 on [-32, 32]
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    KgsState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    const double h0 = model.energy(s);
    const double tau = 0.1;
    const auto props = model.build_propagators(tau);
    const auto half = model.build_propagators(0.5 * tau);
    KgsState a = s, b = s, c = s;
    for (int k = 0; k < 20; ++k) {
      a = model.epavf_step(a, props, fp);
      b = model.epavf_adjoint_step(b, props, fp);
      c = model.epavf_c_step(c, half, fp);
    }
    const double tol = 1e-11 * (1.0 + std::abs(h0));
    CHECK(std::abs(model.energy(a) - h0) <= tol);
    CHECK(std::abs(model.energy(b) - h0) <= tol);
    CHECK(std::abs(model.energy(c) - h0) <= tol);
  }

  SUBCASE("adjoint round-trip and composition symmetry") {
    KgsParams prm = small_params(64, 1.0);
    prm.eps = 0.5;
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    const KgsState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    const double tau = 0.1;
    const auto fwd = model.build_propagators(tau);
    const auto bwd = model.build_propagators(-tau);
    const KgsState mid = model.epavf_step(s, fwd, fp);
    const KgsState back = model.epavf_adjoint_step(mid, bwd, fp);
    CHECK(max_diff(back, s) <= 1e-10);

    const auto half_f = model.build_propagators(0.5 * tau);
    const auto half_b = model.build_propagators(-0.5 * tau);
    const KgsState m2 = model.epavf_c_step(s, half_f, fp);
    const KgsState b2 = model.epavf_c_step(m2, half_b, fp);
    CHECK(max_diff(b2, s) <= 1e-10);
  }

  SUBCASE("matches the dense generic integrator at N = 16") {
    const int n = 16;
    KgsParams prm;
    prm.n = n;
    prm.a = -8.0;
    prm.b = 8.0;
    prm.eps = 0.5;
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    KgsState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);

    BlockSystem sys = dense_kgs_system(n, prm.a, prm.b, prm.beta, prm.eps);
    const double tau = 0.05;
    const auto ops = make_dense_ops(sys, tau);
    const auto props = model.build_propagators(tau);
    const auto rule = gauss_legendre_01();
    BlockState y = model.to_blocks(s);
    for (int k = 0; k < 10; ++k) {
      s = model.epavf_step(s, props, fp);
      y = epavf_step(ops, y, DGSpec::natural(2), rule, fp);
    }
    CHECK(max_diff(s, model.from_blocks(y)) <= 1e-11);
  }

  SUBCASE("adjoint matches the dense generic integrator at N = 16") {
    const int n = 16;
    KgsParams prm;
    prm.n = n;
    prm.a = -8.0;
    prm.b = 8.0;
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    KgsState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    BlockSystem sys = dense_kgs_system(n, prm.a, prm.b, prm.beta, prm.eps);
    const double tau = 0.05;
    const auto ops = make_dense_ops(sys, tau);
    const auto props = model.build_propagators(tau);
    const auto rule = gauss_legendre_01();
    BlockState y = model.to_blocks(s);
    for (int k = 0; k < 5; ++k) {
      s = model.epavf_adjoint_step(s, props, fp);
      y = epavf_adjoint_step(ops, y, DGSpec::natural(2), rule, fp);
    }
    CHECK(max_diff(s, model.from_blocks(y)) <= 1e-11);
  }
}

TEST_CASE("kgs energy functional") {
  SUBCASE("zero state") {
    Kgs1d model(small_params());
    KgsState s;
    const int n = model.basis().size();
    s.q = s.p = s.u = s.v = Vec::Zero(n);
    CHECK(model.energy(s) == 0.0);
  }

  SUBCASE("constant u field") {
    KgsParams prm;
    prm.n = 64;
    prm.a = -3.0;
    prm.b = 5.0;
    Kgs1d model(prm);
    KgsState s;
    const int n = model.basis().size();
    const double c = 0.7;
    s.q = s.p = s.v = Vec::Zero(n);
    s.u = Vec::Constant(n, c);
    CHECK(model.energy(s) == doctest::Approx(0.5 * c * c * 8.0).epsilon(1e-13));
  }

  SUBCASE("initial energy matches a fine quadrature of the functional") {
    KgsParams prm;  // h = 1/8 on [-32, 32]
    prm.n = 512;
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    const KgsState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    const double hd = model.energy(s);

    // Continuous functional by 1e6-point trapezoid with analytic derivatives.
    auto sech = [](double t) {
      const double e = std::exp(-std::abs(t));
      return 2.0 * e / (1.0 + e * e);
    };
    const long npts = 1000000;
    const double a = -32.0, b = 32.0, dx = (b - a) / npts;
    double acc = 0.0;
    for (long j = 0; j <= npts; ++j) {
      const double x = a + j * dx;
      const double w = (j == 0 || j == npts) ? 0.5 : 1.0;
      const double q = 0.5 * sech(x * x), p = q;
      const double dq = -x * sech(x * x) * std::tanh(x * x);
      const double u = 0.5 * std::exp(-x * x);
      const double du = -2.0 * x * u;
      const double v = std::exp(-x * x) / std::sqrt(2.0);
      const double integrand = 0.5 * (u * u + v * v + du * du) +
                               (dq * dq + dq * dq) - (q * q + p * p) * u;
      acc += w * integrand;
    }
    acc *= dx;
    CHECK(std::abs(hd - acc) <= 1e-8);
  }
}

TEST_CASE("kgs baselines") {
  FixedPointConfig fp;
  const auto rule = gauss_legendre_01();

  SUBCASE("eavf, avf, pavf-c conserve the energy") {
    KgsParams prm;
    prm.n = 128;
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    const KgsState s0 = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    const double h0 = model.energy(s0);
    const double tau = 0.025;
    const auto props = model.build_propagators(tau);
    const auto half = model.build_propagators(0.5 * tau);
    const auto ops = model.block_ops(props);
    const auto ops_half = model.block_ops(half);

    BlockState ya = model.to_blocks(s0);
    BlockState yb = ya, yc = ya;
    for (int k = 0; k < 5; ++k) {
      ya = eavf_step(ops, ya, rule, fp);
      yb = avf_step(ops, yb, rule, fp);
      yc = pavf_c_step(ops_half, yc, DGSpec::natural(2), rule, fp);
    }
    const double tol = 1e-10 * (1.0 + std::abs(h0));
    CHECK(std::abs(model.energy(model.from_blocks(ya)) - h0) <= tol);
    CHECK(std::abs(model.energy(model.from_blocks(yb)) - h0) <= tol);
    CHECK(std::abs(model.energy(model.from_blocks(yc)) - h0) <= tol);
  }

  SUBCASE("eavf spectral path matches the dense generic integrator") {
    const int n = 16;
    KgsParams prm;
    prm.n = n;
    prm.a = -8.0;
    prm.b = 8.0;
    Kgs1d model(prm);
    const auto pr = kgs_example1();
    const KgsState s0 = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    BlockSystem sys = dense_kgs_system(n, prm.a, prm.b, prm.beta, prm.eps);
    const double tau = 0.05;
    const auto dense_ops = make_dense_ops(sys, tau);
    const auto props = model.build_propagators(tau);
    const auto spec_ops = model.block_ops(props);
    BlockState yd = model.to_blocks(s0), ys = yd;
    for (int k = 0; k < 5; ++k) {
      yd = eavf_step(dense_ops, yd, rule, fp);
      ys = eavf_step(spec_ops, ys, rule, fp);
    }
    CHECK(max_norm_diff(yd, ys) <= 1e-11);
  }
}

TEST_CASE("kgs 2D") {
  FixedPointConfig fp;

  SUBCASE("fields constant in y reproduce the 1D step column-wise") {
    const int n = 32;
    KgsParams p1;
    p1.n = n;
    p1.a = -8.0;
    p1.b = 8.0;
    p1.eps = 0.5;
    Kgs1d m1(p1);
    Kgs2dParams p2;
    p2.nx = n;
    p2.ax = -8.0;
    p2.bx = 8.0;
    p2.ny = 8;
    p2.ay = -2.0;
    p2.by = 2.0;
    p2.eps = 0.5;
    Kgs2d m2(p2);

    const auto pr = kgs_example1();
    KgsState s1 = m1.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    Kgs2dState s2 =
        m2.init([&](double x, double) { return pr.psi_re(x); },
                [&](double x, double) { return pr.psi_im(x); },
                [&](double x, double) { return pr.u0(x); },
                [&](double x, double) { return pr.u1(x); });

    const double tau = 0.1;
    const auto props1 = m1.build_propagators(0.5 * tau);
    const auto props2 = m2.build_propagators(0.5 * tau);
    for (int k = 0; k < 5; ++k) {
      s1 = m1.epavf_c_step(s1, props1, fp);
      s2 = m2.epavf_c_step(s2, props2, fp);
    }
    double worst = 0.0;
    for (int j = 0; j < 8; ++j) {
      worst = std::max(worst, (s2.q.col(j) - s1.q).cwiseAbs().maxCoeff());
      worst = std::max(worst, (s2.u.col(j) - s1.u).cwiseAbs().maxCoeff());
      worst = std::max(worst, (s2.v.col(j) - s1.v).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("energy conservation on a reduced 2D example") {
    Kgs2dParams prm;
    prm.nx = prm.ny = 32;
    prm.ax = prm.ay = -8.0;
    prm.bx = prm.by = 8.0;
    Kgs2d model(prm);
    const auto pr = kgs_example2();
    Kgs2dState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    const double h0 = model.energy(s);
    const auto half = model.build_propagators(0.05);
    for (int k = 0; k < 10; ++k) s = model.epavf_c_step(s, half, fp);
    CHECK(std::abs(model.energy(s) - h0) <= 1e-10 * (1.0 + std::abs(h0)));
  }

  SUBCASE("one step changes the state by O(tau)") {
    Kgs2dParams prm;
    prm.nx = prm.ny = 16;
    prm.ax = prm.ay = -4.0;
    prm.bx = prm.by = 4.0;
    Kgs2d model(prm);
    const auto pr = kgs_example2();
    const Kgs2dState s = model.init(pr.psi_re, pr.psi_im, pr.u0, pr.u1);
    double prev = 0.0;
    for (double tau : {1e-3, 1e-4}) {
      const auto props = model.build_propagators(tau);
      const Kgs2dState out = model.epavf_step(s, props, fp);
      const double delta = std::max({(out.q - s.q).cwiseAbs().maxCoeff(),
                                     (out.p - s.p).cwiseAbs().maxCoeff(),
                                     (out.u - s.u).cwiseAbs().maxCoeff(),
                                     (out.v - s.v).cwiseAbs().maxCoeff()});
      if (prev > 0) CHECK(delta <= 0.15 * prev);
      prev = delta;
    }
  }
}
