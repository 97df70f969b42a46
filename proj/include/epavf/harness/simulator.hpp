// Uniform driver interface over the four models and eight schemes, used by the
// experiment studies and the CLI.
#pragma once

#include <map>
#include <memory>
#include <string>

#include "epavf/core/types.hpp"

namespace epavf {

enum class Model { kgs1d, kgs2d, kgz1d, kgz2d };
enum class Scheme { epavf, epavf_adjoint, epavf_c, eavf, avf, pavf_c, cisp, disp };

std::string to_string(Model m);
std::string to_string(Scheme s);
Model parse_model(const std::string& s);
Scheme parse_scheme(const std::string& s);
bool scheme_valid_for(Model m, Scheme s);

// Grid snapshot of all fields, flattened column-major for 2D models.
struct Snapshot {
  std::map<std::string, Vec> fields;
  int nx = 0;       // stored points per x line
  int ny = 1;       // stored lines (1 for 1D)
  double a = 0, b = 0;
};

struct SimSpec {
  Model model = Model::kgs1d;
  Scheme scheme = Scheme::epavf_c;
  std::string preset;      // "kgs-example1", "kgs-example2", "kgz-example3", "kgz-example4"
  double eps = 1.0;
  double h = 0.125;
  double tau = 0.1;
  double beta = 1.0;       // KGS only
  double domain_a = 0.0, domain_b = 0.0;  // equal -> use the preset's domain
  FixedPointConfig solver;
};

class Simulator {
 public:
  virtual ~Simulator() = default;
  virtual void step() = 0;  // advance by tau; throws NonConvergence
  virtual double energy() const = 0;
  virtual Snapshot snapshot() const = 0;
  virtual double max_field_norm() const = 0;
  long iterations() const { return iters_; }
  double tau() const { return tau_; }

 protected:
  long iters_ = 0;
  double tau_ = 0.0;
};

std::unique_ptr<Simulator> make_simulator(const SimSpec& spec);

// Per-field max-norm errors between a run state and a reference on the same
// points (the reference may live on a grid finer by an integer factor).
// KGS reports e_psi = max over real/imaginary parts and e_u; KGZ reports
// e_E and e_M.
std::vector<std::pair<std::string, double>> error_fields(Model model,
                                                         const Snapshot& state,
                                                         const Snapshot& ref);

}  // namespace epavf
