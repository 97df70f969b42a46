#include "epavf/models/kgs.hpp"

#include <cmath>

namespace epavf {

namespace {
double sech_safe(double t) {
  // sech(t) without overflow for large |t|.
  const double e = std::exp(-std::abs(t));
  return 2.0 * e / (1.0 + e * e);
}
}  // namespace

Kgs1d::Kgs1d(const KgsParams& prm)
    : prm_(prm), basis_(BasisKind::periodic, prm.n, prm.a, prm.b) {
  if (!(prm.eps > 0.0)) throw ContractViolation("kgs: eps must be positive");
}

KgsState Kgs1d::init(const SpaceFn& psi_re, const SpaceFn& psi_im,
                     const SpaceFn& u0, const SpaceFn& u1) const {
  const Vec x = basis_.grid();
  const int n = basis_.size();
  KgsState s;
  s.q.resize(n);
  s.p.resize(n);
  s.u.resize(n);
  s.v.resize(n);
  const double inv_eps2 = 1.0 / (prm_.eps * prm_.eps);
  for (int j = 0; j < n; ++j) {
    s.q[j] = psi_re(x[j]);
    s.p[j] = psi_im(x[j]);
    s.u[j] = u0(x[j]);
    s.v[j] = u1(x[j]) * inv_eps2;
  }
  return s;
}

KgsPropagators Kgs1d::build_propagators(double tau) const {
  const Vec& lam = basis_.eigenvalues();
  const double eps2 = prm_.eps * prm_.eps;
  KgsPropagators props;
  props.tau = tau;
  props.schro = schroedinger_table(lam, tau, prm_.beta);
  props.wave = oscillator_table(
      lam, tau, [&](double l) { return (1.0 - eps2 * l) / (eps2 * eps2); });
  return props;
}

KgsState Kgs1d::epavf_step(const KgsState& s, const KgsPropagators& props,
                           const FixedPointConfig& fp, StepStats* stats) const {
  const double tau = props.tau;
  const auto& t1 = props.schro;
  const auto& t2 = props.wave;

  // Linear part of the Schroedinger update, fixed during the iteration.
  const CVec cq = basis_.forward_c(s.q);
  const CVec cp = basis_.forward_c(s.p);
  const CVec lin_q = t1.e11.array() * cq.array() + t1.e12.array() * cp.array();
  const CVec lin_p = t1.e21.array() * cq.array() + t1.e22.array() * cp.array();

  auto map = [&](const BlockState& x) -> BlockState {
    const Vec& qs = x.blocks[0];
    const Vec& ps = x.blocks[1];
    const Vec A = s.u.array() * (0.5 * (s.p + ps)).array();
    const Vec B = s.u.array() * (0.5 * (s.q + qs)).array();
    const CVec cA = basis_.forward_c(A);
    const CVec cB = basis_.forward_c(B);
    CVec nq = lin_q - tau * (t1.f11.array() * cA.array()).matrix() +
              tau * (t1.f12.array() * cB.array()).matrix();
    CVec np = lin_p - tau * (t1.f21.array() * cA.array()).matrix() +
              tau * (t1.f22.array() * cB.array()).matrix();
    return BlockState{{basis_.inverse_c(nq), basis_.inverse_c(np)}};
  };
  auto [qp, iters] = fixed_point_solve(map, BlockState{{s.q, s.p}}, fp);
  if (stats) stats->iterations += iters;

  KgsState out;
  out.q = qp.blocks[0];
  out.p = qp.blocks[1];

  // Explicit wave update from the new (q,p).
  const double c = tau / (prm_.eps * prm_.eps);
  const Vec w = out.q.array().square() + out.p.array().square();
  const CVec cu = basis_.forward_c(s.u);
  const CVec cv = basis_.forward_c(s.v);
  const CVec cw = basis_.forward_c(w);
  CVec nu = t2.e11.array() * cu.array() + t2.e12.array() * cv.array() +
            c * (t2.f12.array() * cw.array());
  CVec nv = t2.e21.array() * cu.array() + t2.e22.array() * cv.array() +
            c * (t2.f22.array() * cw.array());
  out.u = basis_.inverse_c(nu);
  out.v = basis_.inverse_c(nv);
  return out;
}

KgsState Kgs1d::epavf_adjoint_step(const KgsState& s, const KgsPropagators& props,
                                   const FixedPointConfig& fp,
                                   StepStats* stats) const {
  const double tau = props.tau;
  const auto& t1 = props.schro;
  const auto& t2 = props.wave;

  // Wave block first, from the old (q,p).
  KgsState out;
  {
    const double c = tau / (prm_.eps * prm_.eps);
    const Vec w = s.q.array().square() + s.p.array().square();
    const CVec cu = basis_.forward_c(s.u);
    const CVec cv = basis_.forward_c(s.v);
    const CVec cw = basis_.forward_c(w);
    CVec nu = t2.e11.array() * cu.array() + t2.e12.array() * cv.array() +
              c * (t2.f12.array() * cw.array());
    CVec nv = t2.e21.array() * cu.array() + t2.e22.array() * cv.array() +
              c * (t2.f22.array() * cw.array());
    out.u = basis_.inverse_c(nu);
    out.v = basis_.inverse_c(nv);
  }

  const CVec cq = basis_.forward_c(s.q);
  const CVec cp = basis_.forward_c(s.p);
  const CVec lin_q = t1.e11.array() * cq.array() + t1.e12.array() * cp.array();
  const CVec lin_p = t1.e21.array() * cq.array() + t1.e22.array() * cp.array();

  auto map = [&](const BlockState& x) -> BlockState {
    const Vec& qs = x.blocks[0];
    const Vec& ps = x.blocks[1];
    const Vec A = out.u.array() * (0.5 * (s.p + ps)).array();
    const Vec B = out.u.array() * (0.5 * (s.q + qs)).array();
    const CVec cA = basis_.forward_c(A);
    const CVec cB = basis_.forward_c(B);
    CVec nq = lin_q - tau * (t1.f11.array() * cA.array()).matrix() +
              tau * (t1.f12.array() * cB.array()).matrix();
    CVec np = lin_p - tau * (t1.f21.array() * cA.array()).matrix() +
              tau * (t1.f22.array() * cB.array()).matrix();
    return BlockState{{basis_.inverse_c(nq), basis_.inverse_c(np)}};
  };
  auto [qp, iters] = fixed_point_solve(map, BlockState{{s.q, s.p}}, fp);
  if (stats) stats->iterations += iters;
  out.q = qp.blocks[0];
  out.p = qp.blocks[1];
  return out;
}

KgsState Kgs1d::epavf_c_step(const KgsState& s, const KgsPropagators& props_half,
                             const FixedPointConfig& fp, StepStats* stats) const {
  KgsState mid = epavf_step(s, props_half, fp, stats);
  return epavf_adjoint_step(mid, props_half, fp, stats);
}

double Kgs1d::energy(const KgsState& s) const {
  const double h = basis_.h();
  const double eps2 = prm_.eps * prm_.eps;
  auto seminorm2 = [&](const Vec& f) {
    const Vec d = apply_diag(basis_, -basis_.eigenvalues(), f);
    return h * d.dot(f);
  };
  const double norm_u2 = h * s.u.squaredNorm();
  const double norm_v2 = h * s.v.squaredNorm();
  const double coupling =
      h * ((s.q.array().square() + s.p.array().square()) * s.u.array()).sum();
  return 0.5 * (norm_u2 / eps2 + eps2 * norm_v2 + seminorm2(s.u)) +
         prm_.beta * (seminorm2(s.q) + seminorm2(s.p)) - coupling;
}

BlockState Kgs1d::to_blocks(const KgsState& s) const {
  const int n = basis_.size();
  Vec y1(2 * n), y2(2 * n);
  y1 << s.q, s.p;
  y2 << s.u, s.v;
  return BlockState{{y1, y2}};
}

KgsState Kgs1d::from_blocks(const BlockState& y) const {
  const int n = basis_.size();
  KgsState s;
  s.q = y.blocks[0].head(n);
  s.p = y.blocks[0].tail(n);
  s.u = y.blocks[1].head(n);
  s.v = y.blocks[1].tail(n);
  return s;
}

SystemOps Kgs1d::block_ops(const KgsPropagators& props) const {
  const int n = basis_.size();
  const double eps2 = prm_.eps * prm_.eps;
  const double beta = prm_.beta;
  const SpectralBasis* basis = &basis_;

  SystemOps ops;
  ops.tau = props.tau;

  // Component 0: stacked (q; p).
  {
    ComponentOps co;
    co.dim = 2 * n;
    co.S = [n](const Vec& x) {
      Vec y(2 * n);
      y.head(n) = 0.5 * x.tail(n);
      y.tail(n) = -0.5 * x.head(n);
      return y;
    };
    co.L = [n, beta, basis](const Vec& x) {
      Vec y(2 * n);
      y.head(n) = -2.0 * beta *
                  apply_diag(*basis, basis->eigenvalues(), Vec(x.head(n)));
      y.tail(n) = -2.0 * beta *
                  apply_diag(*basis, basis->eigenvalues(), Vec(x.tail(n)));
      return y;
    };
    auto apply_table = [n, basis](const BlockTable& t, bool phi, const Vec& x) {
      Vec y(2 * n), a(n), b(n);
      if (phi)
        apply_block2(*basis, t.f11, t.f12, t.f21, t.f22, Vec(x.head(n)),
                     Vec(x.tail(n)), a, b);
      else
        apply_block2(*basis, t.e11, t.e12, t.e21, t.e22, Vec(x.head(n)),
                     Vec(x.tail(n)), a, b);
      y << a, b;
      return y;
    };
    const BlockTable* t1 = &props.schro;
    co.expV = [apply_table, t1](const Vec& x) { return apply_table(*t1, false, x); };
    co.phiV = [apply_table, t1](const Vec& x) { return apply_table(*t1, true, x); };
    co.cay = [n, basis, t1](const Vec& x) {
      Vec y(2 * n), a(n), b(n);
      apply_block2(*basis, t1->c11, t1->c12, t1->c21, t1->c22, Vec(x.head(n)),
                   Vec(x.tail(n)), a, b);
      y << a, b;
      return y;
    };
    ops.comps.push_back(std::move(co));
  }

  // Component 1: stacked (u; v).
  {
    ComponentOps co;
    co.dim = 2 * n;
    co.S = [n, eps2](const Vec& x) {
      Vec y(2 * n);
      y.head(n) = x.tail(n) / eps2;
      y.tail(n) = -x.head(n) / eps2;
      return y;
    };
    co.L = [n, eps2, basis](const Vec& x) {
      Vec y(2 * n);
      y.head(n) =
          -apply_diag(*basis, basis->eigenvalues(), Vec(x.head(n))) +
          x.head(n) / eps2;
      y.tail(n) = eps2 * x.tail(n);
      return y;
    };
    const BlockTable* t2 = &props.wave;
    co.expV = [n, basis, t2](const Vec& x) {
      Vec y(2 * n), a(n), b(n);
      apply_block2(*basis, t2->e11, t2->e12, t2->e21, t2->e22, Vec(x.head(n)),
                   Vec(x.tail(n)), a, b);
      y << a, b;
      return y;
    };
    co.phiV = [n, basis, t2](const Vec& x) {
      Vec y(2 * n), a(n), b(n);
      apply_block2(*basis, t2->f11, t2->f12, t2->f21, t2->f22, Vec(x.head(n)),
                   Vec(x.tail(n)), a, b);
      y << a, b;
      return y;
    };
    co.cay = [n, basis, t2](const Vec& x) {
      Vec y(2 * n), a(n), b(n);
      apply_block2(*basis, t2->c11, t2->c12, t2->c21, t2->c22, Vec(x.head(n)),
                   Vec(x.tail(n)), a, b);
      y << a, b;
      return y;
    };
    ops.comps.push_back(std::move(co));
  }

  ops.potential = [n](const BlockState& y) {
    const auto q = y.blocks[0].head(n).array();
    const auto p = y.blocks[0].tail(n).array();
    const auto u = y.blocks[1].head(n).array();
    return -((q.square() + p.square()) * u).sum();
  };
  ops.grad = [n](int i, const BlockState& y) {
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
  return ops;
}

KgsPreset kgs_example1() {
  KgsPreset pr;
  pr.psi_re = [](double x) { return 0.5 * sech_safe(x * x); };
  pr.psi_im = [](double x) { return 0.5 * sech_safe(x * x); };
  pr.u0 = [](double x) { return 0.5 * std::exp(-x * x); };
  pr.u1 = [](double x) { return std::exp(-x * x) / std::sqrt(2.0); };
  return pr;
}

}  // namespace epavf
