#include "epavf/core/steppers.hpp"

#include <cmath>

namespace epavf {

QuadratureRule gauss_legendre_01(int n) {
  // Gauss-Legendre nodes/weights on [-1,1], mapped to [0,1].
  QuadratureRule r;
  std::vector<double> x, w;
  switch (n) {
    case 1:
      x = {0.0};
      w = {2.0};
      break;
    case 2:
      x = {-0.5773502691896257645091488, 0.5773502691896257645091488};
      w = {1.0, 1.0};
      break;
    case 3:
      x = {-0.7745966692414833770358531, 0.0, 0.7745966692414833770358531};
      w = {0.5555555555555555555555556, 0.8888888888888888888888889,
           0.5555555555555555555555556};
      break;
    case 4:
      x = {-0.8611363115940525752239465, -0.3399810435848562648026658,
           0.3399810435848562648026658, 0.8611363115940525752239465};
      w = {0.3478548451374538573730639, 0.6521451548625461426269361,
           0.6521451548625461426269361, 0.3478548451374538573730639};
      break;
    case 5:
      x = {-0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
           0.5384693101056830910363144, 0.9061798459386639927976269};
      w = {0.2369268850561890875142640, 0.4786286704993664680412915,
           0.5688888888888888888888889, 0.4786286704993664680412915,
           0.2369268850561890875142640};
      break;
    default:
      throw ContractViolation("gauss_legendre_01: supported node counts are 1..5");
  }
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(0.5 * (x[i] + 1.0));
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

SystemOps make_dense_ops(const BlockSystem& sys, double tau) {
  SystemOps ops;
  ops.tau = tau;
  ops.potential = sys.potential;
  ops.grad = sys.grad;
  for (const auto& c : sys.comps) {
    const Mat V = tau * c.S * c.L;
    const auto n = V.rows();
    auto prop = build_dense_propagator(c.S, c.L, tau);
    // Shared dense factors captured by value in the closures.
    Mat S = c.S, L = c.L;
    Mat E = prop.expV, P = prop.phiV;
    Eigen::PartialPivLU<Mat> lu(Mat::Identity(n, n) - 0.5 * V);
    ComponentOps co;
    co.dim = n;
    co.S = [S](const Vec& x) { return Vec(S * x); };
    co.L = [L](const Vec& x) { return Vec(L * x); };
    co.expV = [E](const Vec& x) { return Vec(E * x); };
    co.phiV = [P](const Vec& x) { return Vec(P * x); };
    co.cay = [lu](const Vec& x) { return Vec(lu.solve(x)); };
    ops.comps.push_back(std::move(co));
  }
  return ops;
}

double hamiltonian_energy(const SystemOps& ops, const BlockState& y) {
  double h = ops.potential(y);
  for (size_t i = 0; i < ops.comps.size(); ++i)
    h += 0.5 * y.blocks[i].dot(ops.comps[i].L(y.blocks[i]));
  return h;
}

double hamiltonian_energy(const BlockSystem& sys, const BlockState& y) {
  double h = sys.potential(y);
  for (size_t i = 0; i < sys.comps.size(); ++i)
    h += 0.5 * y.blocks[i].dot(sys.comps[i].L * y.blocks[i]);
  return h;
}

namespace {

void check_step_inputs(const SystemOps& ops, const BlockState& y,
                       const DGSpec& spec) {
  const int m = static_cast<int>(ops.comps.size());
  if (y.count() != m)
    throw ContractViolation("stepper: state block count does not match system");
  for (int i = 0; i < m; ++i)
    if (y.blocks[i].size() != ops.comps[i].dim)
      throw ContractViolation("stepper: block dimension mismatch");
  if (!spec.is_permutation(m))
    throw ContractViolation("stepper: ordering is not a permutation");
}

void add_iters(StepStats* stats, int it) {
  if (stats) stats->iterations += it;
}

// Shared driver for the staircase methods.  `exponential` selects between
//   y_i <- exp(V_i) y_i^n + tau phi(V_i) S_i dG_i                  (epavf)
//   y_i <- cay_i[(I + V_i/2) y_i^n + tau S_i dG_i]                 (pavf)
// For the forward variant components are solved in sweep order; the adjoint
// staircase closes the last component first.
BlockState staircase_step(const SystemOps& ops, const BlockState& y,
                          const DGSpec& spec, const QuadratureRule& rule,
                          const FixedPointConfig& fp, bool exponential,
                          StepStats* stats) {
  check_step_inputs(ops, y, spec);
  const int m = static_cast<int>(ops.comps.size());
  const double tau = ops.tau;

  BlockState cur = y;  // already-solved components hold their new values
  for (int k = 0; k < m; ++k) {
    const int pos = (spec.variant == DGVariant::forward) ? k : m - 1 - k;
    const int i = spec.ordering[pos];
    const auto& co = ops.comps[i];

    Vec lin;
    if (exponential) {
      lin = co.expV(y.blocks[i]);
    } else {
      lin = y.blocks[i] + 0.5 * tau * co.S(co.L(y.blocks[i]));
    }

    auto map = [&](const Vec& x) -> Vec {
      const Vec dg = avf_line_segment(ops.grad, i, cur, x, y.blocks[i], rule);
      if (exponential) return lin + tau * co.phiV(co.S(dg));
      return co.cay(lin + tau * co.S(dg));
    };
    auto [sol, iters] = fixed_point_solve(map, y.blocks[i], fp);
    add_iters(stats, iters);
    cur.blocks[i] = std::move(sol);
  }
  return cur;
}

// Shared driver for the joint-segment methods (eavf / avf): one fixed point
// on the whole state, with every component averaged along the same segment.
BlockState joint_step(const SystemOps& ops, const BlockState& y,
                      const QuadratureRule& rule, const FixedPointConfig& fp,
                      bool exponential, StepStats* stats) {
  check_step_inputs(ops, y, DGSpec::natural(static_cast<int>(ops.comps.size())));
  const int m = static_cast<int>(ops.comps.size());
  const double tau = ops.tau;
  if (!rule.valid()) throw ContractViolation("stepper: invalid quadrature rule");

  std::vector<Vec> lin(m);
  for (int i = 0; i < m; ++i) {
    if (exponential)
      lin[i] = ops.comps[i].expV(y.blocks[i]);
    else
      lin[i] = y.blocks[i] + 0.5 * tau * ops.comps[i].S(ops.comps[i].L(y.blocks[i]));
  }

  auto map = [&](const BlockState& x) -> BlockState {
    // Joint segment average of the gradient of U.
    std::vector<Vec> dg(m);
    for (int i = 0; i < m; ++i) dg[i] = Vec::Zero(ops.comps[i].dim);
    BlockState node = y;
    for (size_t q = 0; q < rule.nodes.size(); ++q) {
      const double xi = rule.nodes[q];
      for (int i = 0; i < m; ++i)
        node.blocks[i] = xi * x.blocks[i] + (1.0 - xi) * y.blocks[i];
      for (int i = 0; i < m; ++i)
        dg[i] += rule.weights[q] * ops.grad(i, node);
    }
    BlockState next = y;
    for (int i = 0; i < m; ++i) {
      const auto& co = ops.comps[i];
      if (exponential)
        next.blocks[i] = lin[i] + tau * co.phiV(co.S(dg[i]));
      else
        next.blocks[i] = co.cay(lin[i] + tau * co.S(dg[i]));
    }
    return next;
  };
  auto [sol, iters] = fixed_point_solve(map, y, fp);
  add_iters(stats, iters);
  return sol;
}

DGSpec with_variant(const DGSpec& spec, DGVariant v) {
  DGSpec s = spec;
  s.variant = v;
  return s;
}

}  // namespace

BlockState epavf_step(const SystemOps& ops, const BlockState& y,
                      const DGSpec& spec, const QuadratureRule& rule,
                      const FixedPointConfig& fp, StepStats* stats) {
  return staircase_step(ops, y, with_variant(spec, DGVariant::forward), rule, fp,
                        /*exponential=*/true, stats);
}

BlockState epavf_adjoint_step(const SystemOps& ops, const BlockState& y,
                              const DGSpec& spec, const QuadratureRule& rule,
                              const FixedPointConfig& fp, StepStats* stats) {
  return staircase_step(ops, y, with_variant(spec, DGVariant::adjoint), rule, fp,
                        /*exponential=*/true, stats);
}

BlockState epavf_c_step(const SystemOps& ops_half, const BlockState& y,
                        const DGSpec& spec, const QuadratureRule& rule,
                        const FixedPointConfig& fp, StepStats* stats) {
  BlockState mid = epavf_step(ops_half, y, spec, rule, fp, stats);
  return epavf_adjoint_step(ops_half, mid, spec, rule, fp, stats);
}

BlockState eavf_step(const SystemOps& ops, const BlockState& y,
                     const QuadratureRule& rule, const FixedPointConfig& fp,
                     StepStats* stats) {
  return joint_step(ops, y, rule, fp, /*exponential=*/true, stats);
}

BlockState avf_step(const SystemOps& ops, const BlockState& y,
                    const QuadratureRule& rule, const FixedPointConfig& fp,
                    StepStats* stats) {
  return joint_step(ops, y, rule, fp, /*exponential=*/false, stats);
}

BlockState pavf_step(const SystemOps& ops, const BlockState& y,
                     const DGSpec& spec, const QuadratureRule& rule,
                     const FixedPointConfig& fp, StepStats* stats) {
  return staircase_step(ops, y, with_variant(spec, DGVariant::forward), rule, fp,
                        /*exponential=*/false, stats);
}

BlockState pavf_adjoint_step(const SystemOps& ops, const BlockState& y,
                             const DGSpec& spec, const QuadratureRule& rule,
                             const FixedPointConfig& fp, StepStats* stats) {
  return staircase_step(ops, y, with_variant(spec, DGVariant::adjoint), rule, fp,
                        /*exponential=*/false, stats);
}

BlockState pavf_c_step(const SystemOps& ops_half, const BlockState& y,
                       const DGSpec& spec, const QuadratureRule& rule,
                       const FixedPointConfig& fp, StepStats* stats) {
  BlockState mid = pavf_step(ops_half, y, spec, rule, fp, stats);
  return pavf_adjoint_step(ops_half, mid, spec, rule, fp, stats);
}

}  // namespace epavf
