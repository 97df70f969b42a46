// Energy-preserving one-step methods for multi-component Hamiltonian systems
//   dy_i/dt = S_i (L_i y_i + grad_i U(y)),   H = sum_i 1/2 y_i^T L_i y_i + U(y).
//
// The steppers are written against per-component linear-operator callbacks so
// the same code drives small dense systems (operators built from matrices)
// and spectral semi-discretizations (operators built from transforms).
//
//   epavf / adjoint / composition : exponential staircase methods
//   eavf                          : exponential method, joint segment average
//   avf                           : midpoint treatment of L, joint average
//   pavf / adjoint / composition  : midpoint treatment of L, staircase average
#pragma once

#include "epavf/core/dense_propagator.hpp"
#include "epavf/core/discrete_gradient.hpp"
#include "epavf/core/types.hpp"

namespace epavf {

using LinOp = std::function<Vec(const Vec&)>;

// One component's operators, with the step size baked into expV/phiV/cay.
//   expV: exp(tau S L)      phiV: phi(tau S L)
//   cay:  (I - tau S L / 2)^{-1}   (used by the non-exponential methods)
struct ComponentOps {
  Eigen::Index dim = 0;
  LinOp S, L, expV, phiV, cay;
};

struct SystemOps {
  std::vector<ComponentOps> comps;
  PotentialFn potential;
  GradFn grad;
  double tau = 0.0;  // signed step the propagators were built for
};

// Dense description of a system; used directly for small ODE tests and as the
// oracle for the spectral models.
struct BlockSystem {
  struct Component {
    Mat S;  // skew-symmetric
    Mat L;  // symmetric
  };
  std::vector<Component> comps;
  PotentialFn potential;
  GradFn grad;

  int count() const { return static_cast<int>(comps.size()); }
};

// Wraps a dense system into operator form for step size tau (may be negative).
SystemOps make_dense_ops(const BlockSystem& sys, double tau);

double hamiltonian_energy(const SystemOps& ops, const BlockState& y);
double hamiltonian_energy(const BlockSystem& sys, const BlockState& y);

struct StepStats {
  int iterations = 0;  // fixed-point iterations spent in the step
};

// Exponential staircase method: components are solved one after another in
// the sweep order, each by a fixed-point iteration on
//   y_i <- exp(V_i) y_i^n + tau phi(V_i) S_i dG_i.
BlockState epavf_step(const SystemOps& ops, const BlockState& y,
                      const DGSpec& spec, const QuadratureRule& rule,
                      const FixedPointConfig& fp, StepStats* stats = nullptr);

// Adjoint method: reversed staircase, components solved in reverse order.
BlockState epavf_adjoint_step(const SystemOps& ops, const BlockState& y,
                              const DGSpec& spec, const QuadratureRule& rule,
                              const FixedPointConfig& fp,
                              StepStats* stats = nullptr);

// Symmetric second-order composition: adjoint half-step after forward
// half-step.  ops_half must be built for tau/2.
BlockState epavf_c_step(const SystemOps& ops_half, const BlockState& y,
                        const DGSpec& spec, const QuadratureRule& rule,
                        const FixedPointConfig& fp, StepStats* stats = nullptr);

// Exponential method with the joint segment average (all components move
// along the segment simultaneously); fully implicit.
BlockState eavf_step(const SystemOps& ops, const BlockState& y,
                     const QuadratureRule& rule, const FixedPointConfig& fp,
                     StepStats* stats = nullptr);

// Non-exponential baselines.  The quadratic part of H is handled by the exact
// midpoint average, so the implicit equations are preconditioned with cay and
// the fixed point runs on the nonlinearity only.
BlockState avf_step(const SystemOps& ops, const BlockState& y,
                    const QuadratureRule& rule, const FixedPointConfig& fp,
                    StepStats* stats = nullptr);

BlockState pavf_step(const SystemOps& ops, const BlockState& y,
                     const DGSpec& spec, const QuadratureRule& rule,
                     const FixedPointConfig& fp, StepStats* stats = nullptr);

BlockState pavf_adjoint_step(const SystemOps& ops, const BlockState& y,
                             const DGSpec& spec, const QuadratureRule& rule,
                             const FixedPointConfig& fp,
                             StepStats* stats = nullptr);

BlockState pavf_c_step(const SystemOps& ops_half, const BlockState& y,
                       const DGSpec& spec, const QuadratureRule& rule,
                       const FixedPointConfig& fp, StepStats* stats = nullptr);

}  // namespace epavf
