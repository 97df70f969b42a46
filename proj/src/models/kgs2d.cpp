#include <cmath>

#include "epavf/models/kgs.hpp"

namespace epavf {

namespace {
double sech_safe(double t) {
  const double e = std::exp(-std::abs(t));
  return 2.0 * e / (1.0 + e * e);
}
}  // namespace

Kgs2d::Kgs2d(const Kgs2dParams& prm)
    : prm_(prm),
      grid_(BasisKind::periodic, prm.nx, prm.ax, prm.bx, prm.ny, prm.ay, prm.by) {
  if (!(prm.eps > 0.0)) throw ContractViolation("kgs2d: eps must be positive");
}

Kgs2dState Kgs2d::init(const SpaceFn2& psi_re, const SpaceFn2& psi_im,
                       const SpaceFn2& u0, const SpaceFn2& u1) const {
  const Vec x = grid_.basis_x().grid();
  const Vec y = grid_.basis_y().grid();
  const int mx = grid_.rows();
  const int my = grid_.cols();
  Kgs2dState s;
  s.q.resize(mx, my);
  s.p.resize(mx, my);
  s.u.resize(mx, my);
  s.v.resize(mx, my);
  const double inv_eps2 = 1.0 / (prm_.eps * prm_.eps);
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) {
      s.q(i, j) = psi_re(x[i], y[j]);
      s.p(i, j) = psi_im(x[i], y[j]);
      s.u(i, j) = u0(x[i], y[j]);
      s.v(i, j) = u1(x[i], y[j]) * inv_eps2;
    }
  return s;
}

Kgs2dPropagators Kgs2d::build_propagators(double tau) const {
  const Mat& lam = grid_.lambda_sum();
  const double eps2 = prm_.eps * prm_.eps;
  Kgs2dPropagators props;
  props.tau = tau;
  props.schro = schroedinger_table(lam, tau, prm_.beta);
  props.wave = oscillator_table(
      lam, tau, [&](double l) { return (1.0 - eps2 * l) / (eps2 * eps2); });
  return props;
}

Kgs2dState Kgs2d::epavf_step(const Kgs2dState& s, const Kgs2dPropagators& props,
                             const FixedPointConfig& fp, StepStats* stats) const {
  const double tau = props.tau;
  const auto& t1 = props.schro;
  const auto& t2 = props.wave;

  const CMat cq = grid_.forward_c(s.q);
  const CMat cp = grid_.forward_c(s.p);
  const CMat lin_q = t1.e11.array() * cq.array() + t1.e12.array() * cp.array();
  const CMat lin_p = t1.e21.array() * cq.array() + t1.e22.array() * cp.array();

  Mat q = s.q, p = s.p;
  double res = 0.0;
  int it = 0;
  for (it = 1; it <= fp.max_iter; ++it) {
    const Mat A = s.u.array() * (0.5 * (s.p + p)).array();
    const Mat B = s.u.array() * (0.5 * (s.q + q)).array();
    const CMat cA = grid_.forward_c(A);
    const CMat cB = grid_.forward_c(B);
    CMat nq = lin_q.array() - tau * (t1.f11.array() * cA.array()) +
              tau * (t1.f12.array() * cB.array());
    CMat np = lin_p.array() - tau * (t1.f21.array() * cA.array()) +
              tau * (t1.f22.array() * cB.array());
    Mat qn = grid_.inverse_c(nq);
    Mat pn = grid_.inverse_c(np);
    res = std::max((qn - q).cwiseAbs().maxCoeff(), (pn - p).cwiseAbs().maxCoeff());
    q = std::move(qn);
    p = std::move(pn);
    if (res <= fp.tol) break;
    if (!std::isfinite(res)) throw NonConvergence(it, res);
  }
  if (it > fp.max_iter) throw NonConvergence(fp.max_iter, res);
  if (stats) stats->iterations += it;

  Kgs2dState out;
  out.q = std::move(q);
  out.p = std::move(p);

  const double c = tau / (prm_.eps * prm_.eps);
  const Mat w = out.q.array().square() + out.p.array().square();
  const CMat cu = grid_.forward_c(s.u);
  const CMat cv = grid_.forward_c(s.v);
  const CMat cw = grid_.forward_c(w);
  CMat nu = t2.e11.array() * cu.array() + t2.e12.array() * cv.array() +
            c * (t2.f12.array() * cw.array());
  CMat nv = t2.e21.array() * cu.array() + t2.e22.array() * cv.array() +
            c * (t2.f22.array() * cw.array());
  out.u = grid_.inverse_c(nu);
  out.v = grid_.inverse_c(nv);
  return out;
}

Kgs2dState Kgs2d::epavf_adjoint_step(const Kgs2dState& s,
                                     const Kgs2dPropagators& props,
                                     const FixedPointConfig& fp,
                                     StepStats* stats) const {
  const double tau = props.tau;
  const auto& t1 = props.schro;
  const auto& t2 = props.wave;

  Kgs2dState out;
  {
    const double c = tau / (prm_.eps * prm_.eps);
    const Mat w = s.q.array().square() + s.p.array().square();
    const CMat cu = grid_.forward_c(s.u);
    const CMat cv = grid_.forward_c(s.v);
    const CMat cw = grid_.forward_c(w);
    CMat nu = t2.e11.array() * cu.array() + t2.e12.array() * cv.array() +
              c * (t2.f12.array() * cw.array());
    CMat nv = t2.e21.array() * cu.array() + t2.e22.array() * cv.array() +
              c * (t2.f22.array() * cw.array());
    out.u = grid_.inverse_c(nu);
    out.v = grid_.inverse_c(nv);
  }

  const CMat cq = grid_.forward_c(s.q);
  const CMat cp = grid_.forward_c(s.p);
  const CMat lin_q = t1.e11.array() * cq.array() + t1.e12.array() * cp.array();
  const CMat lin_p = t1.e21.array() * cq.array() + t1.e22.array() * cp.array();

  Mat q = s.q, p = s.p;
  double res = 0.0;
  int it = 0;
  for (it = 1; it <= fp.max_iter; ++it) {
    const Mat A = out.u.array() * (0.5 * (s.p + p)).array();
    const Mat B = out.u.array() * (0.5 * (s.q + q)).array();
    const CMat cA = grid_.forward_c(A);
    const CMat cB = grid_.forward_c(B);
    CMat nq = lin_q.array() - tau * (t1.f11.array() * cA.array()) +
              tau * (t1.f12.array() * cB.array());
    CMat np = lin_p.array() - tau * (t1.f21.array() * cA.array()) +
              tau * (t1.f22.array() * cB.array());
    Mat qn = grid_.inverse_c(nq);
    Mat pn = grid_.inverse_c(np);
    res = std::max((qn - q).cwiseAbs().maxCoeff(), (pn - p).cwiseAbs().maxCoeff());
    q = std::move(qn);
    p = std::move(pn);
    if (res <= fp.tol) break;
    if (!std::isfinite(res)) throw NonConvergence(it, res);
  }
  if (it > fp.max_iter) throw NonConvergence(fp.max_iter, res);
  if (stats) stats->iterations += it;
  out.q = std::move(q);
  out.p = std::move(p);
  return out;
}

Kgs2dState Kgs2d::epavf_c_step(const Kgs2dState& s,
                               const Kgs2dPropagators& props_half,
                               const FixedPointConfig& fp,
                               StepStats* stats) const {
  Kgs2dState mid = epavf_step(s, props_half, fp, stats);
  return epavf_adjoint_step(mid, props_half, fp, stats);
}

double Kgs2d::energy(const Kgs2dState& s) const {
  const double hh = grid_.basis_x().h() * grid_.basis_y().h();
  const double eps2 = prm_.eps * prm_.eps;
  auto seminorm2 = [&](const Mat& f) {
    const Mat d = apply_diag_2d(grid_, -grid_.lambda_sum(), f);
    return hh * (d.array() * f.array()).sum();
  };
  const double norm_u2 = hh * s.u.array().square().sum();
  const double norm_v2 = hh * s.v.array().square().sum();
  const double coupling =
      hh * ((s.q.array().square() + s.p.array().square()) * s.u.array()).sum();
  return 0.5 * (norm_u2 / eps2 + eps2 * norm_v2 + seminorm2(s.u)) +
         prm_.beta * (seminorm2(s.q) + seminorm2(s.p)) - coupling;
}

Kgs2dPreset kgs_example2() {
  Kgs2dPreset pr;
  auto amp = [](double x, double y) { return sech_safe(x * x + 2.0 * y * y); };
  auto phase = [](double x, double y) {
    return 5.0 * sech_safe(std::sqrt(4.0 * x * x + y * y));
  };
  pr.psi_re = [amp, phase](double x, double y) {
    return amp(x, y) * std::cos(phase(x, y));
  };
  pr.psi_im = [amp, phase](double x, double y) {
    return amp(x, y) * std::sin(phase(x, y));
  };
  pr.u0 = [](double x, double y) { return std::exp(-x * x - y * y); };
  pr.u1 = [](double x, double y) { return 0.5 * std::exp(-x * x - y * y); };
  return pr;
}

}  // namespace epavf
