// Coordinate-increment discrete gradients built from averaged-vector-field
// line integrals.  Component i is averaged along the segment between its old
// and new values while the other components are frozen on a staircase:
// forward freezes components swept earlier at the new level and later ones at
// the old level; the adjoint reverses the staircase.
#pragma once

#include "epavf/core/types.hpp"

namespace epavf {

using PotentialFn = std::function<double(const BlockState&)>;
using GradFn = std::function<Vec(int, const BlockState&)>;

// Quadrature approximation of  int_0^1 grad_i U(..., xi*y_hat_i + (1-xi)*y_i, ...) dxi
// with the other components taken from `frozen`.  Exact whenever the
// integrand is a polynomial in xi of degree <= 2*nodes - 1.
inline Vec avf_line_segment(const GradFn& grad, int i, BlockState frozen,
                            const Vec& y_hat_i, const Vec& y_i,
                            const QuadratureRule& rule) {
  if (y_hat_i.size() != y_i.size())
    throw ContractViolation("avf_line_segment: segment endpoint dimensions differ");
  if (i < 0 || i >= frozen.count() || frozen.blocks[i].size() != y_i.size())
    throw ContractViolation("avf_line_segment: component does not match state layout");
  if (!rule.valid()) throw ContractViolation("avf_line_segment: invalid quadrature rule");

  Vec acc = Vec::Zero(y_i.size());
  for (size_t k = 0; k < rule.nodes.size(); ++k) {
    const double xi = rule.nodes[k];
    frozen.blocks[i] = xi * y_hat_i + (1.0 - xi) * y_i;
    acc += rule.weights[k] * grad(i, frozen);
  }
  return acc;
}

// Full staircase discrete gradient; satisfies
//   <dG(y_new, y_old), y_new - y_old> = U(y_new) - U(y_old)
// exactly when the quadrature is exact for the potential's degree.
inline BlockState discrete_gradient(const GradFn& grad, const BlockState& y_new,
                                    const BlockState& y_old, const DGSpec& spec,
                                    const QuadratureRule& rule) {
  if (!y_new.same_layout(y_old))
    throw ContractViolation("discrete_gradient: state layouts differ");
  const int m = y_new.count();
  if (!spec.is_permutation(m))
    throw ContractViolation("discrete_gradient: ordering is not a permutation");

  BlockState out = y_old;  // layout only; every block overwritten below
  // Walk the staircase in sweep order, flipping components from old to new
  // (forward) or starting all-new and flipping to old (adjoint).
  BlockState frozen = (spec.variant == DGVariant::forward) ? y_old : y_new;
  for (int pos = 0; pos < m; ++pos) {
    const int i = spec.ordering[pos];
    out.blocks[i] =
        avf_line_segment(grad, i, frozen, y_new.blocks[i], y_old.blocks[i], rule);
    frozen.blocks[i] = (spec.variant == DGVariant::forward) ? y_new.blocks[i]
                                                            : y_old.blocks[i];
  }
  return out;
}

}  // namespace epavf
