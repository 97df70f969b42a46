#include <cmath>

#include "epavf/models/kgz.hpp"

namespace epavf {

namespace {
double sech_safe(double t) {
  const double e = std::exp(-std::abs(t));
  return 2.0 * e / (1.0 + e * e);
}
}  // namespace

Kgz1d::Kgz1d(const KgzParams& prm)
    : prm_(prm), basis_(BasisKind::dirichlet, prm.n, prm.a, prm.b) {
  if (!(prm.eps > 0.0)) throw ContractViolation("kgz: eps must be positive");
}

KgzState Kgz1d::init(const SpaceFn& E0, const SpaceFn& E1, const SpaceFn& M0,
                     const SpaceFn& M1) const {
  const Vec x = basis_.grid();
  const int m = basis_.size();
  KgzState s;
  s.E.resize(m);
  s.F.resize(m);
  s.M.resize(m);
  Vec m1(m);
  const double inv_eps2 = 1.0 / (prm_.eps * prm_.eps);
  for (int j = 0; j < m; ++j) {
    s.E[j] = E0(x[j]);
    s.F[j] = E1(x[j]) * inv_eps2;
    s.M[j] = M0(x[j]);
    m1[j] = M1(x[j]);
  }
  s.Nf = apply_spectral_function(basis_, [](double l) { return 1.0 / l; }, m1);
  return s;
}

KgzPropagators Kgz1d::build_propagators(double tau) const {
  const Vec& lam = basis_.eigenvalues();
  const double eps2 = prm_.eps * prm_.eps;
  KgzPropagators props;
  props.tau = tau;
  props.osc = oscillator_table(
      lam, tau, [&](double l) { return (1.0 - eps2 * l) / (eps2 * eps2); });
  props.wave = wave_table(lam, tau);
  return props;
}

KgzState Kgz1d::epavf_step(const KgzState& s, const KgzPropagators& props,
                           const FixedPointConfig& fp, StepStats* stats) const {
  const double tau = props.tau;
  const double c1 = tau / (prm_.eps * prm_.eps);
  const auto& t1 = props.osc;
  const auto& t2 = props.wave;

  const Vec cE = basis_.dst(s.E);
  const Vec cF = basis_.dst(s.F);
  const Vec lin_E = t1.e11.array() * cE.array() + t1.e12.array() * cF.array();

  Vec Ccoef;  // transform of M^n .* E^{n+1/2} at the converged iterate
  auto map = [&](const Vec& Es) -> Vec {
    const Vec C = s.M.array() * (0.5 * (s.E + Es)).array();
    Ccoef = basis_.dst(C);
    Vec nE = lin_E - c1 * (t1.f12.array() * Ccoef.array()).matrix();
    return basis_.dst(nE);
  };
  auto [Enew, iters] = fixed_point_solve(map, s.E, fp);
  if (stats) stats->iterations += iters;

  KgzState out;
  out.E = std::move(Enew);
  {
    // Refresh the coupling with the converged E before the explicit updates.
    const Vec C = s.M.array() * (0.5 * (s.E + out.E)).array();
    Ccoef = basis_.dst(C);
  }
  Vec nF = t1.e21.array() * cE.array() + t1.e22.array() * cF.array() -
           c1 * (t1.f22.array() * Ccoef.array());
  out.F = basis_.dst(nF);

  const Vec w = out.E.array().square();
  const Vec cM = basis_.dst(s.M);
  const Vec cN = basis_.dst(s.Nf);
  const Vec cw = basis_.dst(w);
  Vec nM = t2.e11.array() * cM.array() + t2.e12.array() * cN.array() +
           tau * (t2.f12.array() * cw.array());
  Vec nN = t2.e21.array() * cM.array() + t2.e22.array() * cN.array() +
           tau * (t2.f22.array() * cw.array());
  out.M = basis_.dst(nM);
  out.Nf = basis_.dst(nN);
  return out;
}

KgzState Kgz1d::epavf_adjoint_step(const KgzState& s, const KgzPropagators& props,
                                   const FixedPointConfig& fp,
                                   StepStats* stats) const {
  const double tau = props.tau;
  const double c1 = tau / (prm_.eps * prm_.eps);
  const auto& t1 = props.osc;
  const auto& t2 = props.wave;

  KgzState out;
  {
    const Vec w = s.E.array().square();
    const Vec cM = basis_.dst(s.M);
    const Vec cN = basis_.dst(s.Nf);
    const Vec cw = basis_.dst(w);
    Vec nM = t2.e11.array() * cM.array() + t2.e12.array() * cN.array() +
             tau * (t2.f12.array() * cw.array());
    Vec nN = t2.e21.array() * cM.array() + t2.e22.array() * cN.array() +
             tau * (t2.f22.array() * cw.array());
    out.M = basis_.dst(nM);
    out.Nf = basis_.dst(nN);
  }

  const Vec cE = basis_.dst(s.E);
  const Vec cF = basis_.dst(s.F);
  const Vec lin_E = t1.e11.array() * cE.array() + t1.e12.array() * cF.array();

  Vec Ccoef;
  auto map = [&](const Vec& Es) -> Vec {
    const Vec C = out.M.array() * (0.5 * (s.E + Es)).array();
    Ccoef = basis_.dst(C);
    Vec nE = lin_E - c1 * (t1.f12.array() * Ccoef.array()).matrix();
    return basis_.dst(nE);
  };
  auto [Enew, iters] = fixed_point_solve(map, s.E, fp);
  if (stats) stats->iterations += iters;
  out.E = std::move(Enew);
  {
    const Vec C = out.M.array() * (0.5 * (s.E + out.E)).array();
    Ccoef = basis_.dst(C);
  }
  Vec nF = t1.e21.array() * cE.array() + t1.e22.array() * cF.array() -
           c1 * (t1.f22.array() * Ccoef.array());
  out.F = basis_.dst(nF);
  return out;
}

KgzState Kgz1d::epavf_c_step(const KgzState& s, const KgzPropagators& props_half,
                             const FixedPointConfig& fp, StepStats* stats) const {
  KgzState mid = epavf_step(s, props_half, fp, stats);
  return epavf_adjoint_step(mid, props_half, fp, stats);
}

double Kgz1d::energy(const KgzState& s) const {
  const double h = basis_.h();
  const double eps2 = prm_.eps * prm_.eps;
  auto seminorm2 = [&](const Vec& f) {
    const Vec d = apply_diag(basis_, -basis_.eigenvalues(), f);
    return h * d.dot(f);
  };
  const double coupling = h * (s.M.array() * s.E.array().square()).sum();
  return (h * s.E.squaredNorm() / eps2 + eps2 * h * s.F.squaredNorm() +
          seminorm2(s.E)) +
         (0.5 * h * s.M.squaredNorm() + 0.5 * seminorm2(s.Nf)) + coupling;
}

BlockState Kgz1d::to_blocks(const KgzState& s) const {
  const int m = basis_.size();
  Vec y1(2 * m), y2(2 * m);
  y1 << s.E, s.F;
  y2 << s.M, s.Nf;
  return BlockState{{y1, y2}};
}

KgzState Kgz1d::from_blocks(const BlockState& y) const {
  const int m = basis_.size();
  KgzState s;
  s.E = y.blocks[0].head(m);
  s.F = y.blocks[0].tail(m);
  s.M = y.blocks[1].head(m);
  s.Nf = y.blocks[1].tail(m);
  return s;
}

SystemOps Kgz1d::block_ops(const KgzPropagators& props) const {
  const int m = basis_.size();
  const double eps2 = prm_.eps * prm_.eps;
  const SpectralBasis* basis = &basis_;

  auto table_op = [m, basis](const BlockTable& t, int which) {
    return [m, basis, &t, which](const Vec& x) {
      Vec y(2 * m), a(m), b(m);
      if (which == 0)
        apply_block2(*basis, t.e11, t.e12, t.e21, t.e22, Vec(x.head(m)),
                     Vec(x.tail(m)), a, b);
      else if (which == 1)
        apply_block2(*basis, t.f11, t.f12, t.f21, t.f22, Vec(x.head(m)),
                     Vec(x.tail(m)), a, b);
      else
        apply_block2(*basis, t.c11, t.c12, t.c21, t.c22, Vec(x.head(m)),
                     Vec(x.tail(m)), a, b);
      y << a, b;
      return y;
    };
  };

  SystemOps ops;
  ops.tau = props.tau;

  {
    ComponentOps co;
    co.dim = 2 * m;
    co.S = [m, eps2](const Vec& x) {
      Vec y(2 * m);
      y.head(m) = 0.5 * x.tail(m) / eps2;
      y.tail(m) = -0.5 * x.head(m) / eps2;
      return y;
    };
    co.L = [m, eps2, basis](const Vec& x) {
      Vec y(2 * m);
      y.head(m) =
          (2.0 / eps2) * x.head(m) -
          2.0 * apply_diag(*basis, basis->eigenvalues(), Vec(x.head(m)));
      y.tail(m) = 2.0 * eps2 * x.tail(m);
      return y;
    };
    co.expV = table_op(props.osc, 0);
    co.phiV = table_op(props.osc, 1);
    co.cay = table_op(props.osc, 2);
    ops.comps.push_back(std::move(co));
  }
  {
    ComponentOps co;
    co.dim = 2 * m;
    co.S = [m](const Vec& x) {
      Vec y(2 * m);
      y.head(m) = -x.tail(m);
      y.tail(m) = x.head(m);
      return y;
    };
    co.L = [m, basis](const Vec& x) {
      Vec y(2 * m);
      y.head(m) = x.head(m);
      y.tail(m) = -apply_diag(*basis, basis->eigenvalues(), Vec(x.tail(m)));
      return y;
    };
    co.expV = table_op(props.wave, 0);
    co.phiV = table_op(props.wave, 1);
    co.cay = table_op(props.wave, 2);
    ops.comps.push_back(std::move(co));
  }

  ops.potential = [m](const BlockState& y) {
    const auto E = y.blocks[0].head(m).array();
    const auto M = y.blocks[1].head(m).array();
    return (M * E.square()).sum();
  };
  ops.grad = [m](int i, const BlockState& y) {
    const auto E = y.blocks[0].head(m).array();
    const auto M = y.blocks[1].head(m).array();
    Vec g(2 * m);
    if (i == 0) {
      g.head(m) = 2.0 * (E * M);
      g.tail(m).setZero();
    } else {
      g.head(m) = E.square();
      g.tail(m).setZero();
    }
    return g;
  };
  return ops;
}

Kgz1d::TwoLevel Kgz1d::cisp_step(const TwoLevel& prev, const TwoLevel& curr,
                                 double tau, const FixedPointConfig& fp,
                                 StepStats* stats) const {
  const double eps2 = prm_.eps * prm_.eps;
  const Vec& lam = basis_.eigenvalues();
  const Vec aE = (eps2 / (tau * tau) + 0.5 / eps2) - 0.5 * lam.array();
  const Vec aM = 1.0 / (tau * tau) - 0.5 * lam.array();

  const Vec cEn = basis_.dst(curr.E);
  const Vec cEp = basis_.dst(prev.E);
  const Vec cMn = basis_.dst(curr.M);
  const Vec cMp = basis_.dst(prev.M);
  const Vec rhsE = (eps2 / (tau * tau)) * (2.0 * cEn - cEp).array() +
                   0.5 * lam.array() * cEp.array() - (0.5 / eps2) * cEp.array();
  const Vec rhsM = (2.0 * cMn - cMp).array() / (tau * tau) +
                   0.5 * lam.array() * cMp.array();

  auto map = [&](const BlockState& x) -> BlockState {
    const Vec& Es = x.blocks[0];
    const Vec& Ms = x.blocks[1];
    const Vec P = 0.25 * (Ms + prev.M).array() * (Es + prev.E).array();
    const Vec W = Es.array().square() + prev.E.array().square();
    const Vec cP = basis_.dst(P);
    const Vec cW = basis_.dst(W);
    Vec nE = (rhsE - cP).array() / aE.array();
    Vec nM = (rhsM.array() + 0.5 * lam.array() * cW.array()) / aM.array();
    return BlockState{{basis_.dst(nE), basis_.dst(nM)}};
  };
  auto [sol, iters] = fixed_point_solve(map, BlockState{{curr.E, curr.M}}, fp);
  if (stats) stats->iterations += iters;
  return TwoLevel{sol.blocks[0], sol.blocks[1]};
}

Kgz1d::TwoLevel Kgz1d::disp_step(const TwoLevel& prev, const TwoLevel& curr,
                                 double tau) const {
  const double eps2 = prm_.eps * prm_.eps;
  const Vec& lam = basis_.eigenvalues();

  const Vec d2E = apply_diag(basis_, lam, curr.E);
  const Vec denom =
      (eps2 / (tau * tau) + 0.5 / eps2) + 0.5 * curr.M.array();
  const Vec numer = d2E.array() + (2.0 * eps2 / (tau * tau)) * curr.E.array() -
                    denom.array() * prev.E.array();
  TwoLevel out;
  out.E = numer.array() / denom.array();

  const Vec mw = curr.M.array() + curr.E.array().square();
  out.M = 2.0 * curr.M - prev.M + tau * tau * apply_diag(basis_, lam, mw);
  return out;
}

Kgz1d::TwoLevel Kgz1d::taylor_start(const KgzState& s0, double tau) const {
  const double eps2 = prm_.eps * prm_.eps;
  const Vec& lam = basis_.eigenvalues();
  auto lap = [&](const Vec& v) { return apply_diag(basis_, lam, v); };
  // E_t = F, eps^2 E_tt = D2 E - E/eps^2 - E.*M, M_t = D2 N, M_tt = D2(M + E^2).
  const Vec Ett =
      (lap(s0.E) - s0.E / eps2 - (s0.E.array() * s0.M.array()).matrix()) / eps2;
  const Vec Mt = lap(s0.Nf);
  const Vec Mtt = lap(s0.M + Vec(s0.E.array().square().matrix()));
  TwoLevel out;
  out.E = s0.E + tau * s0.F + 0.5 * tau * tau * Ett;
  out.M = s0.M + tau * Mt + 0.5 * tau * tau * Mtt;
  return out;
}

KgzState Kgz1d::bootstrap(const KgzState& s0, double tau,
                          const FixedPointConfig& fp, int substeps) const {
  if (substeps < 1) throw ContractViolation("bootstrap: substeps must be >= 1");
  const KgzPropagators half = build_propagators(0.5 * tau / substeps);
  KgzState s = s0;
  for (int k = 0; k < substeps; ++k) s = epavf_c_step(s, half, fp);
  return s;
}

KgzPreset kgz_example3() {
  KgzPreset pr;
  pr.E0 = [](double x) { return std::sin(0.5 * x) * std::exp(-x * x); };
  pr.E1 = [](double x) { return 0.5 * std::exp(-std::sqrt(2.0) * x * x); };
  pr.M0 = [](double x) { return sech_safe(x * x); };
  pr.M1 = [](double x) { return std::cos(x / 3.0) * std::exp(-x * x); };
  return pr;
}

}  // namespace epavf
