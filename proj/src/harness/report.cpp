#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "epavf/harness/experiment.hpp"

namespace epavf {

using nlohmann::json;

namespace {
constexpr const char* kCodeVersion = "epavf-1.0";
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_reference(const std::string& path, const ReferenceMeta& meta,
                    const Snapshot& snap) {
  json j;
  j["schema_version"] = meta.schema_version;
  j["kind"] = "reference";
  j["model"] = to_string(meta.model);
  j["preset"] = meta.preset;
  j["eps"] = meta.eps;
  j["h"] = meta.h;
  j["tau"] = meta.tau;
  j["t_end"] = meta.t_end;
  j["beta"] = meta.beta;
  j["code_version"] = kCodeVersion;
  j["nx"] = snap.nx;
  j["ny"] = snap.ny;
  j["a"] = snap.a;
  j["b"] = snap.b;
  json fields = json::object();
  for (const auto& [name, v] : snap.fields)
    fields[name] = std::vector<double>(v.data(), v.data() + v.size());
  j["fields"] = std::move(fields);
  write_file(path, j.dump());
}

Snapshot load_reference(const std::string& path, ReferenceMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open reference: " + path);
  json j;
  in >> j;
  if (meta) {
    meta->schema_version = j.at("schema_version").get<int>();
    meta->model = parse_model(j.at("model").get<std::string>());
    meta->preset = j.at("preset").get<std::string>();
    meta->eps = j.at("eps").get<double>();
    meta->h = j.at("h").get<double>();
    meta->tau = j.at("tau").get<double>();
    meta->t_end = j.at("t_end").get<double>();
    meta->beta = j.value("beta", 1.0);
    meta->code_version = j.value("code_version", "");
  }
  Snapshot s;
  s.nx = j.at("nx").get<int>();
  s.ny = j.at("ny").get<int>();
  s.a = j.at("a").get<double>();
  s.b = j.at("b").get<double>();
  for (const auto& [name, arr] : j.at("fields").items()) {
    const auto v = arr.get<std::vector<double>>();
    s.fields[name] = Eigen::Map<const Vec>(v.data(), v.size());
  }
  return s;
}

namespace {

void append_convergence_rows(std::ostringstream& os, const ExperimentConfig& cfg,
                             const std::vector<ConvergenceRow>& rows) {
  for (const auto& row : rows) {
    const auto emit = [&](const std::string& field, const std::string& err,
                          const std::string& rate) {
      os << to_string(cfg.base.model) << ',' << to_string(cfg.base.scheme) << ','
         << format_double(row.eps) << ',' << format_double(row.tau) << ','
         << field << ',' << err << ',' << rate << ','
         << (row.stable ? "true" : "false") << '\n';
    };
    if (!row.stable) {
      emit("*", "*", "");
      continue;
    }
    for (const auto& [field, err] : row.errors) {
      std::string rate;
      for (const auto& [rf, rv] : row.rates)
        if (rf == field) rate = format_double(rv);
      emit(field, format_double(err), rate);
    }
  }
}

}  // namespace

std::string convergence_csv(const ExperimentConfig& cfg,
                            const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  os << "model,scheme,eps,tau,field,error,rate,stable\n";
  append_convergence_rows(os, cfg, rows);
  return os.str();
}

std::string convergence_json(const ExperimentConfig& cfg,
                             const std::vector<ConvergenceRow>& rows) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "convergence";
  j["model"] = to_string(cfg.base.model);
  j["scheme"] = to_string(cfg.base.scheme);
  json arr = json::array();
  for (const auto& row : rows) {
    json r;
    r["eps"] = row.eps;
    r["tau"] = row.tau;
    r["stable"] = row.stable;
    json errs = json::object();
    json rates = json::object();
    if (row.stable) {
      for (const auto& [f, e] : row.errors) errs[f] = e;
      for (const auto& [f, v] : row.rates) rates[f] = v;
    } else {
      errs = nullptr;
      rates = nullptr;
    }
    r["error"] = errs;
    r["rate"] = rates;
    arr.push_back(std::move(r));
  }
  j["rows"] = std::move(arr);
  return j.dump(2);
}

std::string energy_csv(const ExperimentConfig& cfg,
                       const std::vector<EnergyStudyEntry>& series) {
  std::ostringstream os;
  os << "model,scheme,eps,t,rh,stable\n";
  for (const auto& e : series)
    for (size_t k = 0; k < e.series.times.size(); ++k)
      os << to_string(cfg.base.model) << ',' << to_string(cfg.base.scheme) << ','
         << format_double(e.eps) << ',' << format_double(e.series.times[k]) << ','
         << format_double(e.series.rh[k]) << ',' << (e.stable ? "true" : "false")
         << '\n';
  return os.str();
}

std::string energy_json(const ExperimentConfig& cfg,
                        const std::vector<EnergyStudyEntry>& series) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "energy";
  j["model"] = to_string(cfg.base.model);
  j["scheme"] = to_string(cfg.base.scheme);
  json arr = json::array();
  for (const auto& e : series) {
    json s;
    s["eps"] = e.eps;
    s["stable"] = e.stable;
    s["t"] = e.series.times;
    s["rh"] = e.series.rh;
    arr.push_back(std::move(s));
  }
  j["series"] = std::move(arr);
  return j.dump(2);
}

std::string efficiency_csv(const ExperimentConfig& cfg,
                           const std::vector<EfficiencyRecord>& recs) {
  std::ostringstream os;
  os << "model,scheme,tau,wall_seconds,iterations,field,error,stable\n";
  for (const auto& r : recs) {
    if (!r.stable) {
      os << to_string(cfg.base.model) << ',' << to_string(r.scheme) << ','
         << format_double(r.tau) << ',' << format_double(r.wall_seconds) << ','
         << r.iterations << ",*,*,false\n";
      continue;
    }
    for (const auto& [f, e] : r.errors)
      os << to_string(cfg.base.model) << ',' << to_string(r.scheme) << ','
         << format_double(r.tau) << ',' << format_double(r.wall_seconds) << ','
         << r.iterations << ',' << f << ',' << format_double(e) << ",true\n";
  }
  return os.str();
}

std::string efficiency_json(const ExperimentConfig& cfg,
                            const std::vector<EfficiencyRecord>& recs) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "efficiency";
  j["model"] = to_string(cfg.base.model);
  json arr = json::array();
  for (const auto& r : recs) {
    json e;
    e["scheme"] = to_string(r.scheme);
    e["tau"] = r.tau;
    e["wall_seconds"] = r.wall_seconds;
    e["iterations"] = r.iterations;
    e["stable"] = r.stable;
    json errs = json::object();
    if (r.stable)
      for (const auto& [f, v] : r.errors) errs[f] = v;
    else
      errs = nullptr;
    e["error"] = errs;
    arr.push_back(std::move(e));
  }
  j["records"] = std::move(arr);
  return j.dump(2);
}

}  // namespace epavf
