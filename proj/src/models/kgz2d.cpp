#include <cmath>

#include "epavf/models/kgz.hpp"

namespace epavf {

namespace {
double sech_safe(double t) {
  const double e = std::exp(-std::abs(t));
  return 2.0 * e / (1.0 + e * e);
}
}  // namespace

Kgz2d::Kgz2d(const Kgz2dParams& prm)
    : prm_(prm),
      grid_(BasisKind::dirichlet, prm.nx, prm.ax, prm.bx, prm.ny, prm.ay,
            prm.by) {
  if (!(prm.eps > 0.0)) throw ContractViolation("kgz2d: eps must be positive");
}

Kgz2dState Kgz2d::init(const SpaceFn2& E0, const SpaceFn2& E1, const SpaceFn2& M0,
                       const SpaceFn2& M1) const {
  const Vec x = grid_.basis_x().grid();
  const Vec y = grid_.basis_y().grid();
  const int mx = grid_.rows();
  const int my = grid_.cols();
  Kgz2dState s;
  s.E.resize(mx, my);
  s.F.resize(mx, my);
  s.M.resize(mx, my);
  Mat m1(mx, my);
  const double inv_eps2 = 1.0 / (prm_.eps * prm_.eps);
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) {
      s.E(i, j) = E0(x[i], y[j]);
      s.F(i, j) = E1(x[i], y[j]) * inv_eps2;
      s.M(i, j) = M0(x[i], y[j]);
      m1(i, j) = M1(x[i], y[j]);
    }
  s.Nf = apply_spectral_function_2d(grid_, [](double l) { return 1.0 / l; }, m1);
  return s;
}

Kgz2dPropagators Kgz2d::build_propagators(double tau) const {
  const Mat& lam = grid_.lambda_sum();
  const double eps2 = prm_.eps * prm_.eps;
  Kgz2dPropagators props;
  props.tau = tau;
  props.osc = oscillator_table(
      lam, tau, [&](double l) { return (1.0 - eps2 * l) / (eps2 * eps2); });
  props.wave = wave_table(lam, tau);
  return props;
}

Kgz2dState Kgz2d::epavf_step(const Kgz2dState& s, const Kgz2dPropagators& props,
                             const FixedPointConfig& fp, StepStats* stats) const {
  const double tau = props.tau;
  const double c1 = tau / (prm_.eps * prm_.eps);
  const auto& t1 = props.osc;
  const auto& t2 = props.wave;

  const Mat cE = grid_.dst2(s.E);
  const Mat cF = grid_.dst2(s.F);
  const Mat lin_E =
      (t1.e11.array() * cE.array() + t1.e12.array() * cF.array()).matrix();

  Mat E = s.E;
  Mat Ccoef;
  double res = 0.0;
  int it = 0;
  for (it = 1; it <= fp.max_iter; ++it) {
    const Mat C = s.M.array() * (0.5 * (s.E + E)).array();
    Ccoef = grid_.dst2(C);
    Mat nE = (lin_E.array() - c1 * (t1.f12.array() * Ccoef.array())).matrix();
    Mat En = grid_.dst2(nE);
    res = (En - E).cwiseAbs().maxCoeff();
    E = std::move(En);
    if (res <= fp.tol) break;
    if (!std::isfinite(res)) throw NonConvergence(it, res);
  }
  if (it > fp.max_iter) throw NonConvergence(fp.max_iter, res);
  if (stats) stats->iterations += it;

  Kgz2dState out;
  out.E = std::move(E);
  {
    const Mat C = s.M.array() * (0.5 * (s.E + out.E)).array();
    Ccoef = grid_.dst2(C);
  }
  Mat nF = (t1.e21.array() * cE.array() + t1.e22.array() * cF.array() -
            c1 * (t1.f22.array() * Ccoef.array()))
               .matrix();
  out.F = grid_.dst2(nF);

  const Mat w = out.E.array().square();
  const Mat cM = grid_.dst2(s.M);
  const Mat cN = grid_.dst2(s.Nf);
  const Mat cw = grid_.dst2(w);
  Mat nM = (t2.e11.array() * cM.array() + t2.e12.array() * cN.array() +
            tau * (t2.f12.array() * cw.array()))
               .matrix();
  Mat nN = (t2.e21.array() * cM.array() + t2.e22.array() * cN.array() +
            tau * (t2.f22.array() * cw.array()))
               .matrix();
  out.M = grid_.dst2(nM);
  out.Nf = grid_.dst2(nN);
  return out;
}

Kgz2dState Kgz2d::epavf_adjoint_step(const Kgz2dState& s,
                                     const Kgz2dPropagators& props,
                                     const FixedPointConfig& fp,
                                     StepStats* stats) const {
  const double tau = props.tau;
  const double c1 = tau / (prm_.eps * prm_.eps);
  const auto& t1 = props.osc;
  const auto& t2 = props.wave;

  Kgz2dState out;
  {
    const Mat w = s.E.array().square();
    const Mat cM = grid_.dst2(s.M);
    const Mat cN = grid_.dst2(s.Nf);
    const Mat cw = grid_.dst2(w);
    Mat nM = (t2.e11.array() * cM.array() + t2.e12.array() * cN.array() +
              tau * (t2.f12.array() * cw.array()))
                 .matrix();
    Mat nN = (t2.e21.array() * cM.array() + t2.e22.array() * cN.array() +
              tau * (t2.f22.array() * cw.array()))
                 .matrix();
    out.M = grid_.dst2(nM);
    out.Nf = grid_.dst2(nN);
  }

  const Mat cE = grid_.dst2(s.E);
  const Mat cF = grid_.dst2(s.F);
  const Mat lin_E =
      (t1.e11.array() * cE.array() + t1.e12.array() * cF.array()).matrix();

  Mat E = s.E;
  Mat Ccoef;
  double res = 0.0;
  int it = 0;
  for (it = 1; it <= fp.max_iter; ++it) {
    const Mat C = out.M.array() * (0.5 * (s.E + E)).array();
    Ccoef = grid_.dst2(C);
    Mat nE = (lin_E.array() - c1 * (t1.f12.array() * Ccoef.array())).matrix();
    Mat En = grid_.dst2(nE);
    res = (En - E).cwiseAbs().maxCoeff();
    E = std::move(En);
    if (res <= fp.tol) break;
    if (!std::isfinite(res)) throw NonConvergence(it, res);
  }
  if (it > fp.max_iter) throw NonConvergence(fp.max_iter, res);
  if (stats) stats->iterations += it;
  out.E = std::move(E);
  {
    const Mat C = out.M.array() * (0.5 * (s.E + out.E)).array();
    Ccoef = grid_.dst2(C);
  }
  Mat nF = (t1.e21.array() * cE.array() + t1.e22.array() * cF.array() -
            c1 * (t1.f22.array() * Ccoef.array()))
               .matrix();
  out.F = grid_.dst2(nF);
  return out;
}

Kgz2dState Kgz2d::epavf_c_step(const Kgz2dState& s,
                               const Kgz2dPropagators& props_half,
                               const FixedPointConfig& fp,
                               StepStats* stats) const {
  Kgz2dState mid = epavf_step(s, props_half, fp, stats);
  return epavf_adjoint_step(mid, props_half, fp, stats);
}

double Kgz2d::energy(const Kgz2dState& s) const {
  const double hh = grid_.basis_x().h() * grid_.basis_y().h();
  const double eps2 = prm_.eps * prm_.eps;
  auto seminorm2 = [&](const Mat& f) {
    const Mat d = apply_diag_2d(grid_, Mat(-grid_.lambda_sum()), f);
    return hh * (d.array() * f.array()).sum();
  };
  const double coupling = hh * (s.M.array() * s.E.array().square()).sum();
  return (hh * s.E.array().square().sum() / eps2 +
          eps2 * hh * s.F.array().square().sum() + seminorm2(s.E)) +
         (0.5 * hh * s.M.array().square().sum() + 0.5 * seminorm2(s.Nf)) +
         coupling;
}

Kgz2dPreset kgz_example4() {
  Kgz2dPreset pr;
  pr.E0 = [](double x, double y) {
    return std::exp(-(x + 2.0) * (x + 2.0) - y * y) +
           std::exp(-(x - 2.0) * (x - 2.0) - y * y);
  };
  pr.E1 = [](double x, double y) { return std::exp(-x * x - y * y); };
  pr.M0 = [](double x, double y) {
    return sech_safe(x * x + (y + 2.0) * (y + 2.0)) +
           sech_safe(x * x + (y - 2.0) * (y - 2.0));
  };
  pr.M1 = [](double x, double y) { return sech_safe(x * x + y * y); };
  return pr;
}

}  // namespace epavf
