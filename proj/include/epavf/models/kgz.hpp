// Klein-Gordon-Zakharov solver (homogeneous Dirichlet boundary conditions,
// sine pseudospectral).  First-order form with F = E_t and N_t = M + E^2:
//   E_t = F
//   eps^2 F_t = D2 E - E/eps^2 - E.*M
//   M_t = D2 N
//   N_t = M + E^2
// Components: (E,F) oscillatory block and (M,N) wave block.  The forward
// sweep solves E by fixed point (the only implicit equation) and updates
// F, M, N explicitly; the adjoint computes (M,N) first.
//
// Also provides the two three-level comparison schemes: CISP (fully implicit,
// conservative in its own sense) and DISP (decoupled, explicit).
#pragma once

#include <functional>

#include "epavf/core/steppers.hpp"
#include "epavf/models/prop_tables.hpp"
#include "epavf/spectral/basis.hpp"

namespace epavf {

struct KgzParams {
  double eps = 1.0;
  double a = -32.0, b = 32.0;
  int n = 512;  // cells; fields live on the n-1 interior points
};

struct KgzState {
  Vec E, F, M, Nf;  // Nf holds the auxiliary variable N
};

struct KgzPropagators {
  BlockTable osc;   // (E,F) block, frequencies ((1 - eps^2*Lambda)^(1/2))/eps^2
  BlockTable wave;  // (M,N) block, frequencies (-Lambda)^(1/2)
  double tau = 0.0;
};

using SpaceFn = std::function<double(double)>;

class Kgz1d {
 public:
  explicit Kgz1d(const KgzParams& prm);

  const KgzParams& params() const { return prm_; }
  const SpectralBasis& basis() const { return basis_; }

  // N(0) is not part of the model data; it is recovered from M_t(x,0) = M1
  // through M_t = D2 N, i.e. N0 = D2^{-1} M1 (well-defined, Lambda < 0).
  KgzState init(const SpaceFn& E0, const SpaceFn& E1, const SpaceFn& M0,
                const SpaceFn& M1) const;

  KgzPropagators build_propagators(double tau) const;

  KgzState epavf_step(const KgzState& s, const KgzPropagators& props,
                      const FixedPointConfig& fp, StepStats* stats = nullptr) const;
  KgzState epavf_adjoint_step(const KgzState& s, const KgzPropagators& props,
                              const FixedPointConfig& fp,
                              StepStats* stats = nullptr) const;
  KgzState epavf_c_step(const KgzState& s, const KgzPropagators& props_half,
                        const FixedPointConfig& fp,
                        StepStats* stats = nullptr) const;

  double energy(const KgzState& s) const;

  SystemOps block_ops(const KgzPropagators& props) const;
  BlockState to_blocks(const KgzState& s) const;
  KgzState from_blocks(const BlockState& y) const;

  // Three-level schemes on (E, M).
  struct TwoLevel {
    Vec E, M;
  };

  // Fully implicit conservative scheme; solves the coupled system in
  // (E^{n+1}, M^{n+1}) by a diagonally preconditioned fixed point.
  TwoLevel cisp_step(const TwoLevel& prev, const TwoLevel& curr, double tau,
                     const FixedPointConfig& fp, StepStats* stats = nullptr) const;

  // Decoupled explicit scheme; E update is a pointwise division, no iteration.
  TwoLevel disp_step(const TwoLevel& prev, const TwoLevel& curr, double tau) const;

  // Start-up for the three-level schemes.  The classical second-order Taylor
  // expansion (the default) reproduces the published CISP/DISP errors at
  // coarse steps; the composed exponential step is available as an
  // alternative.
  TwoLevel taylor_start(const KgzState& s0, double tau) const;

  KgzState bootstrap(const KgzState& s0, double tau, const FixedPointConfig& fp,
                     int substeps = 1) const;

 private:
  KgzParams prm_;
  SpectralBasis basis_;
};

// Initial data of the 1D experiment preset on [-32, 32]:
//   E0 = sin(x/2) exp(-x^2), E1 = exp(-sqrt(2) x^2)/2,
//   M0 = sech(x^2), M1 = cos(x/3) exp(-x^2).
struct KgzPreset {
  SpaceFn E0, E1, M0, M1;
};
KgzPreset kgz_example3();

// ---------------------------------------------------------------------------
// 2D variant (tensor-product sine grid).

struct Kgz2dParams {
  double eps = 1.0;
  double ax = -32.0, bx = 32.0, ay = -32.0, by = 32.0;
  int nx = 256, ny = 256;
};

struct Kgz2dState {
  Mat E, F, M, Nf;
};

struct Kgz2dPropagators {
  BlockTable2D osc, wave;
  double tau = 0.0;
};

using SpaceFn2 = std::function<double(double, double)>;

class Kgz2d {
 public:
  explicit Kgz2d(const Kgz2dParams& prm);

  const Kgz2dParams& params() const { return prm_; }
  const Grid2D& grid() const { return grid_; }

  Kgz2dState init(const SpaceFn2& E0, const SpaceFn2& E1, const SpaceFn2& M0,
                  const SpaceFn2& M1) const;
  Kgz2dPropagators build_propagators(double tau) const;

  Kgz2dState epavf_step(const Kgz2dState& s, const Kgz2dPropagators& props,
                        const FixedPointConfig& fp,
                        StepStats* stats = nullptr) const;
  Kgz2dState epavf_adjoint_step(const Kgz2dState& s,
                                const Kgz2dPropagators& props,
                                const FixedPointConfig& fp,
                                StepStats* stats = nullptr) const;
  Kgz2dState epavf_c_step(const Kgz2dState& s, const Kgz2dPropagators& props_half,
                          const FixedPointConfig& fp,
                          StepStats* stats = nullptr) const;

  double energy(const Kgz2dState& s) const;

 private:
  Kgz2dParams prm_;
  Grid2D grid_;
};

struct Kgz2dPreset {
  SpaceFn2 E0, E1, M0, M1;
};
Kgz2dPreset kgz_example4();

}  // namespace epavf
