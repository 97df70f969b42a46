// Klein-Gordon-Schroedinger solver (periodic boundary conditions, Fourier
// pseudospectral).  First-order form with psi = q + i p and v = u_t:
//   q_t + beta*D2 p + p.*u = 0
//   p_t - beta*D2 q - q.*u = 0
//   u_t = v
//   eps^2 v_t = D2 u - u/eps^2 + q.^2 + p.^2
// Two components: (q,p) Schroedinger block and (u,v) wave block.  The forward
// sweep solves (q,p) first (linearly implicit, fixed point) and then updates
// (u,v) explicitly; the adjoint reverses the order.
#pragma once

#include <functional>

#include "epavf/core/steppers.hpp"
#include "epavf/models/prop_tables.hpp"
#include "epavf/spectral/basis.hpp"

namespace epavf {

struct KgsParams {
  double beta = 1.0;
  double eps = 1.0;
  double a = -32.0, b = 32.0;
  int n = 512;
};

struct KgsState {
  Vec q, p, u, v;
};

struct KgsPropagators {
  BlockTable schro;  // (q,p) block, argument tau*beta*Lambda
  BlockTable wave;   // (u,v) block, frequencies (1 - eps^2*Lambda)^(1/2)/eps^2
  double tau = 0.0;
};

using SpaceFn = std::function<double(double)>;

class Kgs1d {
 public:
  explicit Kgs1d(const KgsParams& prm);

  const KgsParams& params() const { return prm_; }
  const SpectralBasis& basis() const { return basis_; }

  KgsState init(const SpaceFn& psi_re, const SpaceFn& psi_im, const SpaceFn& u0,
                const SpaceFn& u1) const;

  KgsPropagators build_propagators(double tau) const;

  KgsState epavf_step(const KgsState& s, const KgsPropagators& props,
                      const FixedPointConfig& fp, StepStats* stats = nullptr) const;
  KgsState epavf_adjoint_step(const KgsState& s, const KgsPropagators& props,
                              const FixedPointConfig& fp,
                              StepStats* stats = nullptr) const;
  // props_half must be built for tau/2; advances by tau.
  KgsState epavf_c_step(const KgsState& s, const KgsPropagators& props_half,
                        const FixedPointConfig& fp,
                        StepStats* stats = nullptr) const;

  double energy(const KgsState& s) const;

  // Component-operator view of the semi-discretization for the generic
  // steppers (EAVF/AVF/PAVF baselines).  The returned ops reference this
  // object and the given propagators; both must outlive them.
  SystemOps block_ops(const KgsPropagators& props) const;

  BlockState to_blocks(const KgsState& s) const;
  KgsState from_blocks(const BlockState& y) const;

 private:
  KgsParams prm_;
  SpectralBasis basis_;
};

// Initial data of the 1D experiment preset on [-32, 32]:
//   psi0 = (1+i)/2 sech(x^2), u0 = exp(-x^2)/2, u1 = exp(-x^2)/sqrt(2).
struct KgsPreset {
  SpaceFn psi_re, psi_im, u0, u1;
};
KgsPreset kgs_example1();

// ---------------------------------------------------------------------------
// 2D variant (tensor-product Fourier grid, fields stored column-major so the
// flattened layout matches the Kronecker/vec convention).

struct Kgs2dParams {
  double beta = 1.0;
  double eps = 1.0;
  double ax = -64.0, bx = 64.0, ay = -64.0, by = 64.0;
  int nx = 512, ny = 512;
};

struct Kgs2dState {
  Mat q, p, u, v;
};

struct Kgs2dPropagators {
  BlockTable2D schro, wave;
  double tau = 0.0;
};

using SpaceFn2 = std::function<double(double, double)>;

class Kgs2d {
 public:
  explicit Kgs2d(const Kgs2dParams& prm);

  const Kgs2dParams& params() const { return prm_; }
  const Grid2D& grid() const { return grid_; }

  Kgs2dState init(const SpaceFn2& psi_re, const SpaceFn2& psi_im,
                  const SpaceFn2& u0, const SpaceFn2& u1) const;
  Kgs2dPropagators build_propagators(double tau) const;

  Kgs2dState epavf_step(const Kgs2dState& s, const Kgs2dPropagators& props,
                        const FixedPointConfig& fp,
                        StepStats* stats = nullptr) const;
  Kgs2dState epavf_adjoint_step(const Kgs2dState& s,
                                const Kgs2dPropagators& props,
                                const FixedPointConfig& fp,
                                StepStats* stats = nullptr) const;
  Kgs2dState epavf_c_step(const Kgs2dState& s, const Kgs2dPropagators& props_half,
                          const FixedPointConfig& fp,
                          StepStats* stats = nullptr) const;

  double energy(const Kgs2dState& s) const;

 private:
  Kgs2dParams prm_;
  Grid2D grid_;
};

struct Kgs2dPreset {
  SpaceFn2 psi_re, psi_im, u0, u1;
};
Kgs2dPreset kgs_example2();

}  // namespace epavf
