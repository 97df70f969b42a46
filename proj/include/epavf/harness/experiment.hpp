// Experiment orchestration: reference generation, convergence/energy/
// efficiency studies, and CSV/JSON report emission.
#pragma once

#include <optional>
#include <vector>

#include "epavf/harness/simulator.hpp"

namespace epavf {

struct ExperimentConfig {
  SimSpec base;                   // model/scheme/preset/h/beta/solver
  std::vector<double> eps_list{1.0};
  std::vector<double> tau_list;   // sorted descending
  double t_end = 1.0;
  std::string reference = "auto";  // snapshot path, or "auto" to generate
  double ref_tau = 1e-5;
  double ref_h = 0.0;             // 0 -> same spatial grid as the runs
  bool paper_exact = false;       // restores tau_ref = 2.5e-6, h_ref = 1/32
  int threads = 1;
  int record_every = 1;
  std::vector<Scheme> schemes;    // efficiency sweeps
  std::string out;
  std::string format = "csv";
};

struct EnergySeries {
  std::vector<double> times;
  std::vector<double> rh;  // RH^n = |(H^n - H^0)/H^0|
  double max_rh() const {
    double m = 0.0;
    for (double r : rh) m = std::max(m, r);
    return m;
  }
};

struct RunResult {
  bool stable = true;
  std::string note;
  EnergySeries energy;
  double wall_seconds = 0.0;
  long iterations = 0;
  Snapshot final_state;
  double t_reached = 0.0;
};

// Steps the scheme from t=0 to t_end recording RH^n every record_every steps.
// Instability (non-convergence, non-finite fields, or max-norm growth beyond
// 1e8 x initial) yields stable=false with the partial energy series.
RunResult run_simulation(const SimSpec& spec, double t_end, int record_every = 1,
                         bool record_energy = true);

struct ReferenceMeta {
  int schema_version = 1;
  Model model = Model::kgs1d;
  std::string preset;
  double eps = 1.0;
  double h = 0.0;
  double tau = 0.0;
  double t_end = 0.0;
  double beta = 1.0;
  std::string code_version;
};

// Composed-scheme run at the reference resolution.
Snapshot generate_reference(const ReferenceMeta& meta,
                            const FixedPointConfig& solver);
void save_reference(const std::string& path, const ReferenceMeta& meta,
                    const Snapshot& snap);
Snapshot load_reference(const std::string& path, ReferenceMeta* meta = nullptr);

struct ConvergenceRow {
  double eps = 1.0;
  double tau = 0.0;
  bool stable = true;
  std::vector<std::pair<std::string, double>> errors;  // per field
  std::vector<std::pair<std::string, double>> rates;   // vs previous stable row
};

// Runs each (eps, tau) cell to t_end and measures max-norm errors against the
// eps-matched reference; rates are filled between consecutive stable rows.
std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& cfg);

struct EnergyStudyEntry {
  double eps = 1.0;
  bool stable = true;
  EnergySeries series;
};
std::vector<EnergyStudyEntry> energy_study(const ExperimentConfig& cfg);

struct EfficiencyRecord {
  Scheme scheme = Scheme::epavf_c;
  double tau = 0.0;
  double wall_seconds = 0.0;
  long iterations = 0;
  bool stable = true;
  std::vector<std::pair<std::string, double>> errors;
};
// Timing runs are executed sequentially regardless of cfg.threads.
std::vector<EfficiencyRecord> efficiency_study(const ExperimentConfig& cfg);

// --- report emission -------------------------------------------------------

std::string convergence_csv(const ExperimentConfig& cfg,
                            const std::vector<ConvergenceRow>& rows);
std::string convergence_json(const ExperimentConfig& cfg,
                             const std::vector<ConvergenceRow>& rows);
std::string energy_csv(const ExperimentConfig& cfg,
                       const std::vector<EnergyStudyEntry>& series);
std::string energy_json(const ExperimentConfig& cfg,
                        const std::vector<EnergyStudyEntry>& series);
std::string efficiency_csv(const ExperimentConfig& cfg,
                           const std::vector<EfficiencyRecord>& recs);
std::string efficiency_json(const ExperimentConfig& cfg,
                            const std::vector<EfficiencyRecord>& recs);

void write_file(const std::string& path, const std::string& content);

// 17-significant-digit decimal form that round-trips doubles exactly.
std::string format_double(double x);

}  // namespace epavf
