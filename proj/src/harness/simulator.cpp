#include "epavf/harness/simulator.hpp"

#include <cmath>

#include "epavf/models/kgs.hpp"
#include "epavf/models/kgz.hpp"

namespace epavf {

std::string to_string(Model m) {
  switch (m) {
    case Model::kgs1d: return "kgs1d";
    case Model::kgs2d: return "kgs2d";
    case Model::kgz1d: return "kgz1d";
    case Model::kgz2d: return "kgz2d";
  }
  return "?";
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::epavf: return "epavf";
    case Scheme::epavf_adjoint: return "epavf-adjoint";
    case Scheme::epavf_c: return "epavf-c";
    case Scheme::eavf: return "eavf";
    case Scheme::avf: return "avf";
    case Scheme::pavf_c: return "pavf-c";
    case Scheme::cisp: return "cisp";
    case Scheme::disp: return "disp";
  }
  return "?";
}

Model parse_model(const std::string& s) {
  if (s == "kgs1d") return Model::kgs1d;
  if (s == "kgs2d") return Model::kgs2d;
  if (s == "kgz1d") return Model::kgz1d;
  if (s == "kgz2d") return Model::kgz2d;
  throw ContractViolation("unknown model: " + s);
}

Scheme parse_scheme(const std::string& s) {
  if (s == "epavf") return Scheme::epavf;
  if (s == "epavf-adjoint") return Scheme::epavf_adjoint;
  if (s == "epavf-c") return Scheme::epavf_c;
  if (s == "eavf") return Scheme::eavf;
  if (s == "avf") return Scheme::avf;
  if (s == "pavf-c") return Scheme::pavf_c;
  if (s == "cisp") return Scheme::cisp;
  if (s == "disp") return Scheme::disp;
  throw ContractViolation("unknown scheme: " + s);
}

bool scheme_valid_for(Model m, Scheme s) {
  switch (s) {
    case Scheme::epavf:
    case Scheme::epavf_adjoint:
    case Scheme::epavf_c:
      return true;
    case Scheme::eavf:
    case Scheme::avf:
    case Scheme::pavf_c:
      return m == Model::kgs1d;
    case Scheme::cisp:
    case Scheme::disp:
      return m == Model::kgz1d;
  }
  return false;
}

namespace {

int grid_cells(double a, double b, double h) {
  const double cells = (b - a) / h;
  const int n = static_cast<int>(std::llround(cells));
  if (std::abs(cells - n) > 1e-9 || n < 4)
    throw ContractViolation("grid: (b-a)/h must be an integer >= 4");
  return n;
}

// --- KGS 1D ---------------------------------------------------------------

class KgsSim : public Simulator {
 public:
  KgsSim(const SimSpec& spec, const KgsPreset& preset, double a, double b)
      : scheme_(spec.scheme), fp_(spec.solver) {
    KgsParams prm;
    prm.beta = spec.beta;
    prm.eps = spec.eps;
    prm.a = a;
    prm.b = b;
    prm.n = grid_cells(a, b, spec.h);
    model_ = std::make_unique<Kgs1d>(prm);
    state_ = model_->init(preset.psi_re, preset.psi_im, preset.u0, preset.u1);
    tau_ = spec.tau;
    if (scheme_ == Scheme::epavf_c || scheme_ == Scheme::pavf_c)
      props_ = model_->build_propagators(0.5 * tau_);
    else
      props_ = model_->build_propagators(tau_);
    if (scheme_ == Scheme::eavf || scheme_ == Scheme::avf ||
        scheme_ == Scheme::pavf_c) {
      ops_ = model_->block_ops(props_);
      spec_dg_ = DGSpec::natural(2);
      rule_ = gauss_legendre_01();
    }
  }

  void step() override {
    StepStats st;
    switch (scheme_) {
      case Scheme::epavf:
        state_ = model_->epavf_step(state_, props_, fp_, &st);
        break;
      case Scheme::epavf_adjoint:
        state_ = model_->epavf_adjoint_step(state_, props_, fp_, &st);
        break;
      case Scheme::epavf_c:
        state_ = model_->epavf_c_step(state_, props_, fp_, &st);
        break;
      case Scheme::eavf: {
        BlockState y = eavf_step(ops_, model_->to_blocks(state_), rule_, fp_, &st);
        state_ = model_->from_blocks(y);
        break;
      }
      case Scheme::avf: {
        BlockState y = avf_step(ops_, model_->to_blocks(state_), rule_, fp_, &st);
        state_ = model_->from_blocks(y);
        break;
      }
      case Scheme::pavf_c: {
        BlockState y =
            pavf_c_step(ops_, model_->to_blocks(state_), spec_dg_, rule_, fp_, &st);
        state_ = model_->from_blocks(y);
        break;
      }
      default:
        throw ContractViolation("scheme not supported for kgs1d");
    }
    iters_ += st.iterations;
  }

  double energy() const override { return model_->energy(state_); }

  Snapshot snapshot() const override {
    Snapshot s;
    s.nx = model_->basis().size();
    s.ny = 1;
    s.a = model_->params().a;
    s.b = model_->params().b;
    s.fields["q"] = state_.q;
    s.fields["p"] = state_.p;
    s.fields["u"] = state_.u;
    s.fields["v"] = state_.v;
    return s;
  }

  double max_field_norm() const override {
    return std::max({state_.q.cwiseAbs().maxCoeff(), state_.p.cwiseAbs().maxCoeff(),
                     state_.u.cwiseAbs().maxCoeff(), state_.v.cwiseAbs().maxCoeff()});
  }

 private:
  Scheme scheme_;
  FixedPointConfig fp_;
  std::unique_ptr<Kgs1d> model_;
  KgsState state_;
  KgsPropagators props_;
  SystemOps ops_;
  DGSpec spec_dg_;
  QuadratureRule rule_;
};

// --- KGS 2D ---------------------------------------------------------------

class Kgs2dSim : public Simulator {
 public:
  Kgs2dSim(const SimSpec& spec, const Kgs2dPreset& preset, double a, double b)
      : scheme_(spec.scheme), fp_(spec.solver) {
    Kgs2dParams prm;
    prm.beta = spec.beta;
    prm.eps = spec.eps;
    prm.ax = prm.ay = a;
    prm.bx = prm.by = b;
    prm.nx = prm.ny = grid_cells(a, b, spec.h);
    model_ = std::make_unique<Kgs2d>(prm);
    state_ = model_->init(preset.psi_re, preset.psi_im, preset.u0, preset.u1);
    tau_ = spec.tau;
    props_ = model_->build_propagators(
        scheme_ == Scheme::epavf_c ? 0.5 * tau_ : tau_);
  }

  void step() override {
    StepStats st;
    switch (scheme_) {
      case Scheme::epavf:
        state_ = model_->epavf_step(state_, props_, fp_, &st);
        break;
      case Scheme::epavf_adjoint:
        state_ = model_->epavf_adjoint_step(state_, props_, fp_, &st);
        break;
      case Scheme::epavf_c:
        state_ = model_->epavf_c_step(state_, props_, fp_, &st);
        break;
      default:
        throw ContractViolation("scheme not supported for kgs2d");
    }
    iters_ += st.iterations;
  }

  double energy() const override { return model_->energy(state_); }

  Snapshot snapshot() const override {
    Snapshot s;
    s.nx = model_->grid().rows();
    s.ny = model_->grid().cols();
    s.a = model_->params().ax;
    s.b = model_->params().bx;
    auto flat = [](const Mat& m) {
      return Vec(Eigen::Map<const Vec>(m.data(), m.size()));
    };
    s.fields["q"] = flat(state_.q);
    s.fields["p"] = flat(state_.p);
    s.fields["u"] = flat(state_.u);
    s.fields["v"] = flat(state_.v);
    return s;
  }

  double max_field_norm() const override {
    return std::max({state_.q.cwiseAbs().maxCoeff(), state_.p.cwiseAbs().maxCoeff(),
                     state_.u.cwiseAbs().maxCoeff(), state_.v.cwiseAbs().maxCoeff()});
  }

 private:
  Scheme scheme_;
  FixedPointConfig fp_;
  std::unique_ptr<Kgs2d> model_;
  Kgs2dState state_;
  Kgs2dPropagators props_;
};

// --- KGZ 1D ---------------------------------------------------------------

class KgzSim : public Simulator {
 public:
  KgzSim(const SimSpec& spec, const KgzPreset& preset, double a, double b)
      : scheme_(spec.scheme), fp_(spec.solver) {
    KgzParams prm;
    prm.eps = spec.eps;
    prm.a = a;
    prm.b = b;
    prm.n = grid_cells(a, b, spec.h);
    model_ = std::make_unique<Kgz1d>(prm);
    state_ = model_->init(preset.E0, preset.E1, preset.M0, preset.M1);
    tau_ = spec.tau;
    props_ = model_->build_propagators(
        scheme_ == Scheme::epavf_c ? 0.5 * tau_ : tau_);
  }

  void step() override {
    StepStats st;
    switch (scheme_) {
      case Scheme::epavf:
        state_ = model_->epavf_step(state_, props_, fp_, &st);
        break;
      case Scheme::epavf_adjoint:
        state_ = model_->epavf_adjoint_step(state_, props_, fp_, &st);
        break;
      case Scheme::epavf_c:
        state_ = model_->epavf_c_step(state_, props_, fp_, &st);
        break;
      default:
        throw ContractViolation("scheme not supported by KgzSim");
    }
    iters_ += st.iterations;
  }

  double energy() const override { return model_->energy(state_); }

  Snapshot snapshot() const override {
    Snapshot s;
    s.nx = model_->basis().size();
    s.ny = 1;
    s.a = model_->params().a;
    s.b = model_->params().b;
    s.fields["E"] = state_.E;
    s.fields["F"] = state_.F;
    s.fields["M"] = state_.M;
    s.fields["N"] = state_.Nf;
    return s;
  }

  double max_field_norm() const override {
    return std::max({state_.E.cwiseAbs().maxCoeff(), state_.F.cwiseAbs().maxCoeff(),
                     state_.M.cwiseAbs().maxCoeff(),
                     state_.Nf.cwiseAbs().maxCoeff()});
  }

 private:
  Scheme scheme_;
  FixedPointConfig fp_;
  std::unique_ptr<Kgz1d> model_;
  KgzState state_;
  KgzPropagators props_;
};

// Three-level schemes: the first step() call bootstraps the second level with
// one composed exponential step; afterwards (E, M) advance on two levels.
class KgzThreeLevelSim : public Simulator {
 public:
  KgzThreeLevelSim(const SimSpec& spec, const KgzPreset& preset, double a,
                   double b)
      : scheme_(spec.scheme), fp_(spec.solver) {
    KgzParams prm;
    prm.eps = spec.eps;
    prm.a = a;
    prm.b = b;
    prm.n = grid_cells(a, b, spec.h);
    model_ = std::make_unique<Kgz1d>(prm);
    state0_ = model_->init(preset.E0, preset.E1, preset.M0, preset.M1);
    tau_ = spec.tau;
    curr_ = {state0_.E, state0_.M};
  }

  void step() override {
    if (!have_prev_) {
      prev_ = curr_;
      curr_ = model_->taylor_start(state0_, tau_);
      have_prev_ = true;
      return;
    }
    StepStats st;
    Kgz1d::TwoLevel next;
    if (scheme_ == Scheme::cisp)
      next = model_->cisp_step(prev_, curr_, tau_, fp_, &st);
    else
      next = model_->disp_step(prev_, curr_, tau_);
    iters_ += st.iterations;
    prev_ = curr_;
    curr_ = std::move(next);
  }

  // Diagnostic only: these schemes carry (E, M); the time derivatives entering
  // the energy functional are reconstructed by backward differences.
  double energy() const override {
    KgzState s;
    s.E = curr_.E;
    s.M = curr_.M;
    if (have_prev_) {
      s.F = (curr_.E - prev_.E) / tau_;
      const Vec dM = (curr_.M - prev_.M) / tau_;
      s.Nf = apply_spectral_function(
          model_->basis(), [](double l) { return 1.0 / l; }, dM);
    } else {
      s.F = state0_.F;
      s.Nf = state0_.Nf;
    }
    return model_->energy(s);
  }

  Snapshot snapshot() const override {
    Snapshot s;
    s.nx = model_->basis().size();
    s.ny = 1;
    s.a = model_->params().a;
    s.b = model_->params().b;
    s.fields["E"] = curr_.E;
    s.fields["M"] = curr_.M;
    return s;
  }

  double max_field_norm() const override {
    return std::max(curr_.E.cwiseAbs().maxCoeff(), curr_.M.cwiseAbs().maxCoeff());
  }

 private:
  Scheme scheme_;
  FixedPointConfig fp_;
  std::unique_ptr<Kgz1d> model_;
  KgzState state0_;
  Kgz1d::TwoLevel prev_, curr_;
  bool have_prev_ = false;
};

// --- KGZ 2D ---------------------------------------------------------------

class Kgz2dSim : public Simulator {
 public:
  Kgz2dSim(const SimSpec& spec, const Kgz2dPreset& preset, double a, double b)
      : scheme_(spec.scheme), fp_(spec.solver) {
    Kgz2dParams prm;
    prm.eps = spec.eps;
    prm.ax = prm.ay = a;
    prm.bx = prm.by = b;
    prm.nx = prm.ny = grid_cells(a, b, spec.h);
    model_ = std::make_unique<Kgz2d>(prm);
    state_ = model_->init(preset.E0, preset.E1, preset.M0, preset.M1);
    tau_ = spec.tau;
    props_ = model_->build_propagators(
        scheme_ == Scheme::epavf_c ? 0.5 * tau_ : tau_);
  }

  void step() override {
    StepStats st;
    switch (scheme_) {
      case Scheme::epavf:
        state_ = model_->epavf_step(state_, props_, fp_, &st);
        break;
      case Scheme::epavf_adjoint:
        state_ = model_->epavf_adjoint_step(state_, props_, fp_, &st);
        break;
      case Scheme::epavf_c:
        state_ = model_->epavf_c_step(state_, props_, fp_, &st);
        break;
      default:
        throw ContractViolation("scheme not supported for kgz2d");
    }
    iters_ += st.iterations;
  }

  double energy() const override { return model_->energy(state_); }

  Snapshot snapshot() const override {
    Snapshot s;
    s.nx = model_->grid().rows();
    s.ny = model_->grid().cols();
    s.a = model_->params().ax;
    s.b = model_->params().bx;
    auto flat = [](const Mat& m) {
      return Vec(Eigen::Map<const Vec>(m.data(), m.size()));
    };
    s.fields["E"] = flat(state_.E);
    s.fields["F"] = flat(state_.F);
    s.fields["M"] = flat(state_.M);
    s.fields["N"] = flat(state_.Nf);
    return s;
  }

  double max_field_norm() const override {
    return std::max({state_.E.cwiseAbs().maxCoeff(), state_.F.cwiseAbs().maxCoeff(),
                     state_.M.cwiseAbs().maxCoeff(),
                     state_.Nf.cwiseAbs().maxCoeff()});
  }

 private:
  Scheme scheme_;
  FixedPointConfig fp_;
  std::unique_ptr<Kgz2d> model_;
  Kgz2dState state_;
  Kgz2dPropagators props_;
};

struct PresetDomain {
  double a, b;
};

PresetDomain preset_domain(const std::string& preset) {
  if (preset == "kgs-example1") return {-32.0, 32.0};
  if (preset == "kgs-example2") return {-64.0, 64.0};
  if (preset == "kgz-example3") return {-32.0, 32.0};
  if (preset == "kgz-example4") return {-32.0, 32.0};
  throw ContractViolation("unknown preset: " + preset);
}

}  // namespace

std::unique_ptr<Simulator> make_simulator(const SimSpec& spec) {
  if (!scheme_valid_for(spec.model, spec.scheme))
    throw ContractViolation("scheme " + to_string(spec.scheme) +
                            " is not valid for model " + to_string(spec.model));
  const PresetDomain dom0 = preset_domain(spec.preset);
  const double a = (spec.domain_a != spec.domain_b) ? spec.domain_a : dom0.a;
  const double b = (spec.domain_a != spec.domain_b) ? spec.domain_b : dom0.b;

  switch (spec.model) {
    case Model::kgs1d:
      return std::make_unique<KgsSim>(spec, kgs_example1(), a, b);
    case Model::kgs2d:
      return std::make_unique<Kgs2dSim>(spec, kgs_example2(), a, b);
    case Model::kgz1d:
      if (spec.scheme == Scheme::cisp || spec.scheme == Scheme::disp)
        return std::make_unique<KgzThreeLevelSim>(spec, kgz_example3(), a, b);
      return std::make_unique<KgzSim>(spec, kgz_example3(), a, b);
    case Model::kgz2d:
      return std::make_unique<Kgz2dSim>(spec, kgz_example4(), a, b);
  }
  throw ContractViolation("unreachable model");
}

namespace {

// Subsamples a reference field stored on a grid finer by the integer factor r.
Vec subsample_1d(const Vec& ref, int n_coarse, BasisKind kind) {
  const int n_ref = static_cast<int>(ref.size());
  if (n_ref == n_coarse) return ref;
  if (kind == BasisKind::periodic) {
    const int r = n_ref / n_coarse;
    if (r * n_coarse != n_ref)
      throw ContractViolation("reference grid is not an integer refinement");
    Vec out(n_coarse);
    for (int j = 0; j < n_coarse; ++j) out[j] = ref[j * r];
    return out;
  }
  // Interior storage: coarse point j (1-based) sits at fine index j*r.
  const int r = (n_ref + 1) / (n_coarse + 1);
  if (r * (n_coarse + 1) != n_ref + 1)
    throw ContractViolation("reference grid is not an integer refinement");
  Vec out(n_coarse);
  for (int j = 1; j <= n_coarse; ++j) out[j - 1] = ref[j * r - 1];
  return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> error_fields(Model model,
                                                         const Snapshot& state,
                                                         const Snapshot& ref) {
  const bool kgs = (model == Model::kgs1d || model == Model::kgs2d);
  const BasisKind kind = kgs ? BasisKind::periodic : BasisKind::dirichlet;
  auto diff = [&](const std::string& name) {
    const Vec& a = state.fields.at(name);
    Vec b = ref.fields.at(name);
    if (state.ny == 1 && ref.ny == 1)
      b = subsample_1d(b, static_cast<int>(a.size()), kind);
    else if (a.size() != b.size())
      throw ContractViolation("error_fields: 2D grids must match");
    return (a - b).cwiseAbs().maxCoeff();
  };
  std::vector<std::pair<std::string, double>> out;
  if (kgs) {
    out.emplace_back("psi", std::max(diff("q"), diff("p")));
    out.emplace_back("u", diff("u"));
  } else {
    out.emplace_back("E", diff("E"));
    out.emplace_back("M", diff("M"));
  }
  return out;
}

}  // namespace epavf
