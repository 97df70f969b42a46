#include "epavf/harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace epavf {

namespace {

// Conservative-system trajectories stay within a few multiples of their
// initial norm; growth past this factor is scheme blow-up.  The factor is
// small enough to classify a coarse-step (few-step) unstable run whose
// exponential growth has not yet overflowed.
constexpr double kBlowupFactor = 1e6;

long step_count(double t_end, double tau) {
  const long n = std::llround(t_end / tau);
  if (n < 0) throw ContractViolation("run: negative step count");
  if (std::abs(n * tau - t_end) > 1e-9 * std::max(1.0, t_end))
    throw ContractViolation("run: t_end must be an integer multiple of tau");
  return n;
}

}  // namespace

RunResult run_simulation(const SimSpec& spec, double t_end, int record_every,
                         bool record_energy) {
  RunResult res;
  auto sim = make_simulator(spec);
  const long nsteps = step_count(t_end, spec.tau);
  const double norm0 = std::max(sim->max_field_norm(), 1e-30);

  double h0 = 0.0;
  if (record_energy) {
    h0 = sim->energy();
    res.energy.times.push_back(0.0);
    res.energy.rh.push_back(0.0);
  }

  const auto t_start = std::chrono::steady_clock::now();
  for (long k = 1; k <= nsteps; ++k) {
    try {
      sim->step();
    } catch (const NonConvergence& e) {
      res.stable = false;
      res.note = e.what();
      break;
    }
    const double nrm = sim->max_field_norm();
    if (!std::isfinite(nrm) || nrm > kBlowupFactor * norm0) {
      res.stable = false;
      res.note = "field norm blow-up at step " + std::to_string(k);
      break;
    }
    res.t_reached = k * spec.tau;
    if (record_energy && (k % record_every == 0 || k == nsteps)) {
      const double hk = sim->energy();
      res.energy.times.push_back(res.t_reached);
      res.energy.rh.push_back(std::abs((hk - h0) / h0));
    }
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  res.iterations = sim->iterations();
  if (res.stable) res.final_state = sim->snapshot();
  return res;
}

Snapshot generate_reference(const ReferenceMeta& meta,
                            const FixedPointConfig& solver) {
  SimSpec spec;
  spec.model = meta.model;
  spec.scheme = Scheme::epavf_c;
  spec.preset = meta.preset;
  spec.eps = meta.eps;
  spec.h = meta.h;
  spec.tau = meta.tau;
  spec.beta = meta.beta;
  spec.solver = solver;
  RunResult r = run_simulation(spec, meta.t_end, /*record_every=*/1,
                               /*record_energy=*/false);
  if (!r.stable)
    throw std::runtime_error("reference run unstable: " + r.note);
  return r.final_state;
}

namespace {

struct RefKey {
  double eps;
  bool operator<(const RefKey& o) const { return eps < o.eps; }
};

Snapshot obtain_reference(const ExperimentConfig& cfg, double eps) {
  if (cfg.reference != "auto" && !cfg.reference.empty()) {
    ReferenceMeta meta;
    Snapshot snap = load_reference(cfg.reference, &meta);
    if (std::abs(meta.eps - eps) > 0)
      throw ContractViolation("reference file eps does not match requested eps");
    return snap;
  }
  ReferenceMeta meta;
  meta.model = cfg.base.model;
  meta.preset = cfg.base.preset;
  meta.eps = eps;
  meta.h = cfg.paper_exact ? (1.0 / 32.0) : (cfg.ref_h > 0 ? cfg.ref_h : cfg.base.h);
  meta.tau = cfg.paper_exact ? 2.5e-6 : cfg.ref_tau;
  meta.t_end = cfg.t_end;
  meta.beta = cfg.base.beta;
  return generate_reference(meta, cfg.base.solver);
}

template <typename Fn>
void parallel_for(int nitems, int threads, Fn&& fn) {
  if (threads <= 1 || nitems <= 1) {
    for (int i = 0; i < nitems; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= nitems) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(threads, nitems);
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& cfg) {
  if (cfg.tau_list.empty())
    throw ContractViolation("convergence_study: tau_list is empty");
  for (size_t i = 1; i < cfg.tau_list.size(); ++i)
    if (!(cfg.tau_list[i] < cfg.tau_list[i - 1]))
      throw ContractViolation("convergence_study: tau_list must be descending");

  std::vector<ConvergenceRow> rows(cfg.eps_list.size() * cfg.tau_list.size());

  for (size_t ei = 0; ei < cfg.eps_list.size(); ++ei) {
    const double eps = cfg.eps_list[ei];
    const Snapshot ref = obtain_reference(cfg, eps);

    parallel_for(static_cast<int>(cfg.tau_list.size()), cfg.threads, [&](int ti) {
      SimSpec spec = cfg.base;
      spec.eps = eps;
      spec.tau = cfg.tau_list[ti];
      ConvergenceRow row;
      row.eps = eps;
      row.tau = spec.tau;
      RunResult r = run_simulation(spec, cfg.t_end, /*record_every=*/1,
                                   /*record_energy=*/false);
      row.stable = r.stable;
      if (r.stable) row.errors = error_fields(cfg.base.model, r.final_state, ref);
      rows[ei * cfg.tau_list.size() + ti] = std::move(row);
    });

    // Rates between consecutive stable rows of this eps.
    for (size_t ti = 1; ti < cfg.tau_list.size(); ++ti) {
      ConvergenceRow& cur = rows[ei * cfg.tau_list.size() + ti];
      const ConvergenceRow& prev = rows[ei * cfg.tau_list.size() + ti - 1];
      if (!cur.stable || !prev.stable) continue;
      const double ltau = std::log(prev.tau / cur.tau);
      for (size_t f = 0; f < cur.errors.size(); ++f) {
        const double e0 = prev.errors[f].second;
        const double e1 = cur.errors[f].second;
        if (e0 > 0 && e1 > 0)
          cur.rates.emplace_back(cur.errors[f].first, std::log(e0 / e1) / ltau);
      }
    }
  }
  return rows;
}

std::vector<EnergyStudyEntry> energy_study(const ExperimentConfig& cfg) {
  const double tau = cfg.tau_list.empty() ? cfg.base.tau : cfg.tau_list.front();
  std::vector<EnergyStudyEntry> out(cfg.eps_list.size());
  parallel_for(static_cast<int>(cfg.eps_list.size()), cfg.threads, [&](int i) {
    SimSpec spec = cfg.base;
    spec.eps = cfg.eps_list[i];
    spec.tau = tau;
    RunResult r = run_simulation(spec, cfg.t_end, cfg.record_every,
                                 /*record_energy=*/true);
    out[i] = EnergyStudyEntry{spec.eps, r.stable, std::move(r.energy)};
  });
  return out;
}

std::vector<EfficiencyRecord> efficiency_study(const ExperimentConfig& cfg) {
  std::vector<Scheme> schemes = cfg.schemes;
  if (schemes.empty()) schemes.push_back(cfg.base.scheme);
  std::vector<EfficiencyRecord> recs;
  for (double eps : cfg.eps_list) {
    const Snapshot ref = obtain_reference(cfg, eps);
    for (Scheme sch : schemes) {
      for (double tau : cfg.tau_list) {
        SimSpec spec = cfg.base;
        spec.scheme = sch;
        spec.eps = eps;
        spec.tau = tau;
        // Timing runs stay single-threaded and skip per-step energy.
        RunResult r = run_simulation(spec, cfg.t_end, /*record_every=*/1,
                                     /*record_energy=*/false);
        EfficiencyRecord rec;
        rec.scheme = sch;
        rec.tau = tau;
        rec.wall_seconds = r.wall_seconds;
        rec.iterations = r.iterations;
        rec.stable = r.stable;
        if (r.stable)
          rec.errors = error_fields(cfg.base.model, r.final_state, ref);
        recs.push_back(std::move(rec));
      }
    }
  }
  return recs;
}

}  // namespace epavf
