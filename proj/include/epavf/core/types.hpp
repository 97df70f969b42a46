// Core types shared by the multi-component Hamiltonian integrators:
// block-structured states, quadrature rules for the line averages, and
// the fixed-point solver configuration.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace epavf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// State of a system split into m component vectors y = (y_1, ..., y_m).
struct BlockState {
  std::vector<Vec> blocks;

  BlockState() = default;
  explicit BlockState(std::vector<Vec> b) : blocks(std::move(b)) {}

  int count() const { return static_cast<int>(blocks.size()); }

  bool same_layout(const BlockState& o) const {
    if (blocks.size() != o.blocks.size()) return false;
    for (size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].size() != o.blocks[i].size()) return false;
    return true;
  }

  bool all_finite() const {
    for (const auto& b : blocks)
      if (!b.allFinite()) return false;
    return true;
  }

  double max_norm() const {
    double m = 0.0;
    for (const auto& b : blocks)
      if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
    return m;
  }
};

inline double max_norm_diff(const BlockState& a, const BlockState& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.blocks.size(); ++i)
    m = std::max(m, (a.blocks[i] - b.blocks[i]).cwiseAbs().maxCoeff());
  return m;
}

inline double max_norm_diff(const Vec& a, const Vec& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Quadrature on [0,1] used to approximate the xi-averages of the gradient
// along the line segment between old and new states.
struct QuadratureRule {
  std::vector<double> nodes;    // in [0,1]
  std::vector<double> weights;  // positive, sum to 1

  bool valid() const {
    if (nodes.empty() || nodes.size() != weights.size()) return false;
    double s = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(s - 1.0) > 1e-15 * nodes.size()) return false;
    for (double x : nodes)
      if (x < 0.0 || x > 1.0) return false;
    for (double w : weights)
      if (w <= 0.0) return false;
    return true;
  }
};

// Gauss-Legendre rule mapped to [0,1]; exact for polynomial degree 2n-1.
// Default n=3 covers cubic potentials (gradient quadratic along the segment)
// with margin.
QuadratureRule gauss_legendre_01(int n = 3);

enum class DGVariant { forward, adjoint };

// Which staircase the coordinate-increment discrete gradient walks:
// `ordering` is the sequence in which components are swept; forward freezes
// earlier-swept components at the new level, adjoint at the old level.
struct DGSpec {
  std::vector<int> ordering;
  DGVariant variant = DGVariant::forward;

  static DGSpec natural(int m, DGVariant v = DGVariant::forward) {
    DGSpec s;
    s.ordering.resize(m);
    for (int i = 0; i < m; ++i) s.ordering[i] = i;
    s.variant = v;
    return s;
  }

  bool is_permutation(int m) const {
    if (static_cast<int>(ordering.size()) != m) return false;
    std::vector<bool> seen(m, false);
    for (int i : ordering) {
      if (i < 0 || i >= m || seen[i]) return false;
      seen[i] = true;
    }
    return true;
  }
};

struct FixedPointConfig {
  double tol = 1e-14;  // max-norm tolerance on the increment
  int max_iter = 100;
};

struct NonConvergence : std::runtime_error {
  int iterations;
  double residual;
  NonConvergence(int it, double res)
      : std::runtime_error("fixed-point iteration did not converge after " +
                           std::to_string(it) +
                           " iterations (residual " + std::to_string(res) + ")"),
        iterations(it),
        residual(res) {}
};

struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterates x <- map(x) until the max-norm increment drops below cfg.tol.
// Throws NonConvergence when the iteration cap is hit.
template <typename State, typename Map>
std::pair<State, int> fixed_point_solve(Map&& map, State init,
                                        const FixedPointConfig& cfg) {
  if (cfg.tol <= 0 || cfg.max_iter < 1)
    throw ContractViolation("fixed_point_solve: tol > 0 and max_iter >= 1 required");
  State x = std::move(init);
  double res = 0.0;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    State next = map(x);
    res = max_norm_diff(next, x);
    x = std::move(next);
    if (!(res <= cfg.tol)) {  // also catches NaN
      if (!std::isfinite(res)) throw NonConvergence(k, res);
      continue;
    }
    return {std::move(x), k};
  }
  throw NonConvergence(cfg.max_iter, res);
}

}  // namespace epavf
