// Command-line front end: reference generation, convergence/energy/efficiency
// studies, and plain trajectory runs with snapshot export.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "epavf/harness/experiment.hpp"

using namespace epavf;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config;
  std::string model = "kgs1d";
  std::string scheme = "epavf-c";
  std::string preset;
  std::vector<double> eps{1.0};
  std::vector<double> tau;
  double h = 0.125;
  double t_end = 1.0;
  std::string reference = "auto";
  double ref_tau = 1e-5;
  double ref_h = 0.0;
  bool paper_exact = false;
  int threads = 1;
  double beta = 1.0;
  double fp_tol = 1e-14;
  int fp_max_iter = 100;
  int record_every = 1;
  std::string out;
  std::string format = "csv";
  std::vector<std::string> schemes;  // efficiency
  double domain_a = 0.0, domain_b = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->set_help_flag("--help", "print help");  // frees -h/--h for the spatial step
  cmd->add_option("--config", a.config, "JSON config file; flags override its keys");
  cmd->add_option("--model", a.model, "kgs1d|kgs2d|kgz1d|kgz2d");
  cmd->add_option("--scheme", a.scheme,
                  "epavf|epavf-adjoint|epavf-c|eavf|avf|pavf-c|cisp|disp");
  cmd->add_option("--preset", a.preset, "initial-data preset (default per model)");
  cmd->add_option("--eps", a.eps, "epsilon values");
  cmd->add_option("--tau", a.tau, "time steps, descending");
  cmd->add_option("--h", a.h, "spatial step");
  cmd->add_option("--t-end", a.t_end, "final time");
  cmd->add_option("--reference", a.reference, "reference snapshot path or 'auto'");
  cmd->add_option("--ref-tau", a.ref_tau, "reference time step (auto mode)");
  cmd->add_option("--ref-h", a.ref_h, "reference spatial step (0 = same as --h)");
  cmd->add_flag("--paper-exact", a.paper_exact,
                "reference protocol h=1/32, tau=2.5e-6");
  cmd->add_option("--threads", a.threads, "sweep parallelism");
  cmd->add_option("--beta", a.beta, "KGS dispersion coefficient");
  cmd->add_option("--fp-tol", a.fp_tol, "fixed-point tolerance");
  cmd->add_option("--fp-max-iter", a.fp_max_iter, "fixed-point iteration cap");
  cmd->add_option("--record-every", a.record_every, "energy recording stride");
  cmd->add_option("--out", a.out, "output path (default: stdout)");
  cmd->add_option("--format", a.format, "csv|json");
  cmd->add_option("--domain", a.domain_a, "override domain lower bound")
      ->needs(cmd->add_option("--domain-b", a.domain_b, "override domain upper bound"));
}

void merge_config_file(CommonArgs& a) {
  if (a.config.empty()) return;
  std::ifstream in(a.config);
  if (!in) throw std::runtime_error("cannot open config: " + a.config);
  json j;
  in >> j;
  // File values fill fields still at their defaults; explicit flags win.
  CommonArgs def;
  auto take = [&](const char* key, auto& field, const auto& defval) {
    if (j.contains(key) && field == defval)
      field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("model", a.model, def.model);
  take("scheme", a.scheme, def.scheme);
  take("preset", a.preset, def.preset);
  take("eps", a.eps, def.eps);
  take("tau", a.tau, def.tau);
  take("h", a.h, def.h);
  take("t_end", a.t_end, def.t_end);
  take("reference", a.reference, def.reference);
  take("ref_tau", a.ref_tau, def.ref_tau);
  take("ref_h", a.ref_h, def.ref_h);
  take("threads", a.threads, def.threads);
  take("beta", a.beta, def.beta);
  take("fp_tol", a.fp_tol, def.fp_tol);
  take("fp_max_iter", a.fp_max_iter, def.fp_max_iter);
  take("record_every", a.record_every, def.record_every);
  take("out", a.out, def.out);
  take("format", a.format, def.format);
  take("schemes", a.schemes, def.schemes);
}

std::string default_preset(Model m) {
  switch (m) {
    case Model::kgs1d: return "kgs-example1";
    case Model::kgs2d: return "kgs-example2";
    case Model::kgz1d: return "kgz-example3";
    case Model::kgz2d: return "kgz-example4";
  }
  return "";
}

ExperimentConfig to_config(const CommonArgs& a) {
  ExperimentConfig cfg;
  cfg.base.model = parse_model(a.model);
  cfg.base.scheme = parse_scheme(a.scheme);
  cfg.base.preset = a.preset.empty() ? default_preset(cfg.base.model) : a.preset;
  cfg.base.h = a.h;
  cfg.base.beta = a.beta;
  cfg.base.solver.tol = a.fp_tol;
  cfg.base.solver.max_iter = a.fp_max_iter;
  cfg.base.domain_a = a.domain_a;
  cfg.base.domain_b = a.domain_b;
  cfg.eps_list = a.eps;
  cfg.tau_list = a.tau;
  cfg.t_end = a.t_end;
  cfg.reference = a.reference;
  cfg.ref_tau = a.ref_tau;
  cfg.ref_h = a.ref_h;
  cfg.paper_exact = a.paper_exact;
  cfg.threads = a.threads;
  cfg.record_every = a.record_every;
  cfg.out = a.out;
  cfg.format = a.format;
  for (const auto& s : a.schemes) cfg.schemes.push_back(parse_scheme(s));
  return cfg;
}

void emit(const ExperimentConfig& cfg, const std::string& content) {
  if (cfg.out.empty())
    std::cout << content;
  else
    write_file(cfg.out, content);
}

int cmd_reference(const CommonArgs& a) {
  ExperimentConfig cfg = to_config(a);
  if (cfg.out.empty()) throw std::runtime_error("reference: --out is required");
  ReferenceMeta meta;
  meta.model = cfg.base.model;
  meta.preset = cfg.base.preset;
  meta.eps = cfg.eps_list.at(0);
  meta.h = cfg.paper_exact ? (1.0 / 32.0) : cfg.base.h;
  meta.tau = cfg.paper_exact ? 2.5e-6
                             : (cfg.tau_list.empty() ? cfg.ref_tau : cfg.tau_list[0]);
  meta.t_end = cfg.t_end;
  meta.beta = cfg.base.beta;
  Snapshot snap = generate_reference(meta, cfg.base.solver);
  save_reference(cfg.out, meta, snap);
  std::cerr << "reference written to " << cfg.out << "\n";
  return 0;
}

int cmd_converge(const CommonArgs& a) {
  ExperimentConfig cfg = to_config(a);
  auto rows = convergence_study(cfg);
  emit(cfg, cfg.format == "json" ? convergence_json(cfg, rows)
                                 : convergence_csv(cfg, rows));
  return 0;
}

int cmd_energy(const CommonArgs& a) {
  ExperimentConfig cfg = to_config(a);
  if (cfg.t_end == 1.0) cfg.t_end = 100.0;  // long-run default for this study
  auto series = energy_study(cfg);
  emit(cfg, cfg.format == "json" ? energy_json(cfg, series)
                                 : energy_csv(cfg, series));
  return 0;
}

int cmd_efficiency(const CommonArgs& a) {
  ExperimentConfig cfg = to_config(a);
  if (cfg.schemes.empty()) cfg.schemes.push_back(cfg.base.scheme);
  cfg.threads = 1;  // fair timing
  auto recs = efficiency_study(cfg);
  emit(cfg, cfg.format == "json" ? efficiency_json(cfg, recs)
                                 : efficiency_csv(cfg, recs));
  return 0;
}

int cmd_simulate(const CommonArgs& a) {
  ExperimentConfig cfg = to_config(a);
  SimSpec spec = cfg.base;
  spec.eps = cfg.eps_list.at(0);
  spec.tau = cfg.tau_list.empty() ? 0.1 : cfg.tau_list[0];
  RunResult r = run_simulation(spec, cfg.t_end, cfg.record_every, true);

  std::ostringstream os;
  if (cfg.format == "json") {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "simulation";
    j["model"] = to_string(spec.model);
    j["scheme"] = to_string(spec.scheme);
    j["eps"] = spec.eps;
    j["tau"] = spec.tau;
    j["stable"] = r.stable;
    j["note"] = r.note;
    j["t_reached"] = r.t_reached;
    j["wall_seconds"] = r.wall_seconds;
    j["iterations"] = r.iterations;
    j["energy_t"] = r.energy.times;
    j["energy_rh"] = r.energy.rh;
    if (r.stable) {
      json fields = json::object();
      for (const auto& [name, v] : r.final_state.fields)
        fields[name] = std::vector<double>(v.data(), v.data() + v.size());
      j["fields"] = std::move(fields);
    }
    os << j.dump(2);
  } else {
    // (x, fields...) table of the final state plus a stability line.
    os << "# stable=" << (r.stable ? "true" : "false") << " t_reached="
       << format_double(r.t_reached) << " max_rh=" << format_double(r.energy.max_rh())
       << "\n";
    if (r.stable) {
      std::vector<std::string> names;
      for (const char* f : {"q", "p", "u", "v", "E", "F", "M", "N"})
        if (r.final_state.fields.count(f)) names.push_back(f);
      os << "x";
      for (const auto& name : names) os << ',' << name;
      os << '\n';
      const int nx = r.final_state.nx;
      const int ny = r.final_state.ny;
      const double h = (r.final_state.b - r.final_state.a) /
                       (spec.model == Model::kgs1d || spec.model == Model::kgs2d
                            ? nx
                            : nx + 1);
      for (int i = 0; i < nx * ny; ++i) {
        const int ix = i % nx;
        const double x =
            r.final_state.a +
            ((spec.model == Model::kgs1d || spec.model == Model::kgs2d) ? ix
                                                                        : ix + 1) *
                h;
        os << format_double(x);
        for (const auto& name : names)
          os << ',' << format_double(r.final_state.fields.at(name)[i]);
        os << '\n';
      }
    }
  }
  emit(cfg, os.str());
  return r.stable ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-preserving exponential integrators for coupled "
               "Klein-Gordon-Schroedinger / Klein-Gordon-Zakharov systems"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* ref = app.add_subcommand("reference", "generate a reference snapshot");
  auto* conv = app.add_subcommand("converge", "temporal convergence study");
  auto* ene = app.add_subcommand("energy", "long-run energy drift study");
  auto* eff = app.add_subcommand("efficiency", "error vs wall-clock sweep");
  auto* sim = app.add_subcommand("simulate", "single trajectory run");
  for (auto* c : {ref, conv, ene, eff, sim}) add_common(c, args);
  eff->add_option("--schemes", args.schemes, "schemes to sweep (comma separated)")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    merge_config_file(args);
    if (ref->parsed()) return cmd_reference(args);
    if (conv->parsed()) return cmd_converge(args);
    if (ene->parsed()) return cmd_energy(args);
    if (eff->parsed()) return cmd_efficiency(args);
    if (sim->parsed()) return cmd_simulate(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
