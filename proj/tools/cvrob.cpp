// cvrob: robustness brackets, witnesses, discrimination and sweeps from the shell.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cvr/acceptance.hpp"
#include "cvr/discrimination.hpp"
#include "cvr/io.hpp"
#include "cvr/measures.hpp"
#include "cvr/solver.hpp"

namespace fs = std::filesystem;
using cvr::io::Json;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitSchema = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config;
  std::string out;
  std::string out_dir;
  std::string format = "json";
  std::uint64_t seed = 1;

  std::string state;
  std::string free = "classical";
  int dim = 0;
  double tail_cap = 1e-8;
  double radius = 0.0;
  double radial_step = 0.1;
  int angular = 64;
  std::vector<std::string> measures{"robustness"};
  cvr::SolverConfig solver;

  std::string witness_file;
  std::string task_file;
  int random_tasks = 0;
  bool binary = false;

  std::string family;
  std::vector<double> values;
  std::vector<int> truncations{50, 100, 200, 400};

  bool quick = false;
  std::vector<int> skip;
};

[[noreturn]] void schema(const std::string& what) { throw cvr::Error(cvr::ErrorKind::Schema, what); }

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Config keys override the command-line values.
void apply_config(Options& o) {
  if (o.config.empty()) return;
  const Json j = cvr::io::parse_json(cvr::io::read_file(o.config));
  if (!j.is_object()) schema("config must be a JSON object");
  static const std::set<std::string> known{"state", "free", "dim", "tail_cap", "grid", "solver", "format", "seed",
                                           "measures", "family", "values", "truncations", "quick", "random_tasks"};
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) schema("unknown config key '" + k + "'");
  try {
    if (j.contains("state")) o.state = j["state"].get<std::string>();
    if (j.contains("free")) o.free = j["free"].get<std::string>();
    if (j.contains("dim")) o.dim = j["dim"].get<int>();
    if (j.contains("tail_cap")) o.tail_cap = j["tail_cap"].get<double>();
    if (j.contains("format")) o.format = j["format"].get<std::string>();
    if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("measures")) o.measures = j["measures"].get<std::vector<std::string>>();
    if (j.contains("family")) o.family = j["family"].get<std::string>();
    if (j.contains("values")) o.values = j["values"].get<std::vector<double>>();
    if (j.contains("truncations")) o.truncations = j["truncations"].get<std::vector<int>>();
    if (j.contains("quick")) o.quick = j["quick"].get<bool>();
    if (j.contains("random_tasks")) o.random_tasks = j["random_tasks"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    schema(std::string("config value has the wrong type: ") + e.what());
  }
  if (j.contains("grid")) {
    const cvr::CoherentGrid g = cvr::io::grid_from_json(j["grid"]);
    o.radius = g.radius;
    o.radial_step = g.radial_step;
    o.angular = g.angular_count;
  }
  if (j.contains("solver")) o.solver = cvr::io::solver_config_from_json(j["solver"], o.solver);
}

void validate(const Options& o) {
  if (o.format != "json" && o.format != "csv") schema("format must be json or csv");
  if (o.dim < 0) schema("dim must be positive");
  if (!(o.tail_cap > 0.0 && o.tail_cap < 1.0)) schema("tail_cap must lie in (0, 1)");
  if (o.radius < 0.0) schema("radius must be positive");
}

fs::path out_dir(const Options& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("CVROB_OUT_DIR")) return env;
  return ".";
}

void emit(const Options& o, const std::string& content) {
  if (o.out.empty()) {
    std::cout << content;
    return;
  }
  fs::path p = o.out;
  if (p.is_relative()) p = out_dir(o) / p;
  cvr::io::write_file_atomic(p, content);
}

int auto_dim(const cvr::StateSpec& s) {
  if (const auto* t = std::get_if<cvr::spec::TwoModeSqueezed>(&s))
    return t->lambda <= 0 ? 2 : std::clamp(static_cast<int>(std::ceil(std::log(1e-10) / std::log(t->lambda))), 2, 40);
  if (const auto* sc = std::get_if<cvr::spec::Schmidt>(&s)) return std::max<int>(2, static_cast<int>(sc->coefficients.size()));
  if (const auto* a = std::get_if<cvr::spec::Amplitudes>(&s)) return static_cast<int>(a->values.size());
  if (std::holds_alternative<cvr::spec::Squeezed>(s)) return 60;
  return 40;
}

struct Prepared {
  cvr::StateSpec spec;
  int dim = 0;
  cvr::DensityOperator rho;
  cvr::FreeSetModel model;
};

Prepared prepare(const Options& o) {
  if (o.state.empty()) schema("--state is required");
  const cvr::StateSpec s = cvr::io::parse_state(o.state);
  const int dim = o.dim > 0 ? o.dim : auto_dim(s);
  cvr::DensityOperator rho = cvr::make_density(s, dim, cvr::TruncationPolicy{o.tail_cap});
  cvr::FreeSetModel f;
  switch (cvr::io::parse_free_kind(o.free)) {
    case cvr::FreeKind::Classical: {
      cvr::CoherentGrid g = cvr::default_grid_for(rho.matrix());
      if (o.radius > 0) g.radius = o.radius;
      g.radial_step = o.radial_step;
      g.angular_count = o.angular;
      g.validate();
      f = cvr::FreeSetModel::classical(g);
      break;
    }
    case cvr::FreeKind::Incoherent: f = cvr::FreeSetModel::incoherent(); break;
    case cvr::FreeKind::Separable:
      if (rho.dims().size() != 2) schema("separable free set needs a bipartite state");
      f = cvr::FreeSetModel::separable(rho.dims()[0], rho.dims()[1]);
      break;
  }
  return {s, dim, std::move(rho), std::move(f)};
}

Json meta(const Prepared& p, const cvr::SolverConfig& cfg) {
  return Json{{"truncation", p.dim}, {"tail_weight", p.rho.tail_weight()}, {"tolerance", cfg.gap_tol}, {"cut_tol", cfg.cut_tol}};
}

// ---------------------------------------------------------------------------

int cmd_measure(const Options& o) {
  const Prepared p = prepare(o);
  std::vector<Json> records;
  for (const std::string& m : o.measures) {
    Json rec{{"schema_version", cvr::io::kSchemaVersion}, {"measure", m}, {"state_spec", cvr::io::to_json(p.spec)},
             {"state", cvr::io::label(p.spec)}, {"free", o.free}};
    if (m == "robustness") {
      const cvr::SolverReport rep = cvr::sandwich(p.rho, p.model, o.solver);
      try {
        const cvr::ClosedForm cf = cvr::closed_form(p.spec, p.model.kind);
        rec["value"] = cf.value;
        rec["method"] = cf.upper_only ? "closed_form_upper" : "closed_form";
        rec["formula"] = cf.formula;
      } catch (const cvr::Error& e) {
        if (e.kind() != cvr::ErrorKind::NoClosedForm) throw;
        rec["value"] = cvr::io::number(rep.bounds.upper);
        rec["method"] = cvr::to_string(rep.bounds.upper_method);
      }
      rec["bounds"] = cvr::io::to_json(rep.bounds);
    } else if (m == "negativity") {
      if (!p.rho.bipartite()) schema("negativity needs a bipartite state");
      rec["value"] = cvr::negativity(p.rho);
      rec["method"] = "partial_transpose";
    } else if (m == "l1") {
      rec["value"] = cvr::l1_norm(p.rho);
      rec["method"] = "l1_offdiagonal";
    } else if (m == "std_lower") {
      if (p.model.kind != cvr::FreeKind::Classical) schema("std_lower needs the classical free set");
      const cvr::StdRobustnessBound sb = cvr::std_robustness_lower(p.rho, p.model.grid);
      rec["value"] = sb.lower;
      rec["method"] = "chi1_grid";
      rec["sup_chi1"] = sb.sup_chi1;
    } else {
      schema("unknown measure '" + m + "'");
    }
    rec["metadata"] = meta(p, o.solver);
    records.push_back(rec);
  }
  if (o.format == "csv") {
    std::ostringstream os;
    os << "state,free,measure,value,lower,upper,method,truncation,tail_weight,tolerance\n";
    for (const Json& r : records) {
      const bool b = r.contains("bounds");
      auto field = [&](const char* k) { return b && r["bounds"][k].is_number() ? num(r["bounds"][k].get<double>()) : std::string(b ? "inf" : ""); };
      os << r["state"].get<std::string>() << ',' << o.free << ',' << r["measure"].get<std::string>() << ','
         << (r["value"].is_number() ? num(r["value"].get<double>()) : r["value"].get<std::string>()) << ',' << field("lower") << ','
         << field("upper") << ',' << r["method"].get<std::string>() << ',' << p.dim << ',' << num(p.rho.tail_weight()) << ','
         << num(o.solver.gap_tol) << '\n';
    }
    emit(o, os.str());
  } else {
    Json arr = Json::array();
    for (const Json& r : records) arr.push_back(r);
    emit(o, (records.size() == 1 ? records.front() : arr).dump(2) + "\n");
  }
  return 0;
}

int cmd_sandwich(const Options& o) {
  const Prepared p = prepare(o);
  const cvr::SolverReport rep = cvr::sandwich(p.rho, p.model, o.solver);
  Json j{{"schema_version", cvr::io::kSchemaVersion},
         {"state_spec", cvr::io::to_json(p.spec)},
         {"free_set", cvr::io::to_json(p.model)},
         {"metadata", meta(p, o.solver)},
         {"report", cvr::io::to_json(rep, o.solver.emit_cuts)}};
  emit(o, j.dump(2) + "\n");
  return 0;
}

int cmd_witness(const Options& o) {
  const Prepared p = prepare(o);
  const cvr::SolverReport rep = cvr::sandwich(p.rho, p.model, o.solver);
  if (o.binary) {
    emit(o, cvr::io::matrix_to_binary(rep.witness.op));
    return 0;
  }
  Json j = cvr::io::to_json(rep.witness);
  j["state_spec"] = cvr::io::to_json(p.spec);
  j["free_set"] = cvr::io::to_json(p.model);
  j["expectation"] = rep.witness.expectation(p.rho.matrix());
  j["metadata"] = meta(p, o.solver);
  emit(o, j.dump(2) + "\n");
  return 0;
}

int cmd_discriminate(const Options& o) {
  const Prepared p = prepare(o);
  Json j{{"schema_version", cvr::io::kSchemaVersion}, {"state_spec", cvr::io::to_json(p.spec)}, {"free_set", cvr::io::to_json(p.model)}};
  if (!o.witness_file.empty() || !o.task_file.empty()) {
    cvr::DiscriminationTask task;
    if (!o.task_file.empty()) {
      task = cvr::io::task_from_json(cvr::io::parse_json(cvr::io::read_file(o.task_file)));
    } else {
      const std::string raw = cvr::io::read_file(o.witness_file);
      cvr::Witness w;
      if (raw.rfind("CVRM", 0) == 0) w.op = cvr::io::matrix_from_binary(raw);
      else w = cvr::io::witness_from_json(cvr::io::parse_json(raw));
      if (w.op.rows() != p.rho.dim()) schema("witness size does not match the state");
      task = cvr::optimal_binary_task(w);
    }
    task.validate();
    j["task"] = cvr::io::to_json(task);
    j["advantage"] = cvr::io::to_json(cvr::advantage_ratio(p.rho.matrix(), task, p.model));
  }
  if (o.random_tasks > 0) {
    Json rows = Json::array();
    double best = 0.0;
    for (int i = 0; i < o.random_tasks; ++i) {
      const cvr::DiscriminationTask t = cvr::random_task(p.rho.dim(), 2, cvr::derive_seed(o.seed, static_cast<std::uint64_t>(i)));
      const cvr::AdvantageReport a = cvr::advantage_ratio(p.rho.matrix(), t, p.model);
      best = std::max(best, a.ratio);
      rows.push_back(Json{{"index", i}, {"ratio", a.ratio}, {"p_rho", a.p_rho}, {"p_free_best", a.p_free_best}});
    }
    j["random_tasks"] = Json{{"seed", o.seed}, {"count", o.random_tasks}, {"max_ratio", best}, {"tasks", rows}};
  }
  if (!j.contains("advantage") && !j.contains("random_tasks")) schema("discriminate needs --witness, --task or --random-tasks");
  j["metadata"] = Json{{"truncation", p.dim}, {"tail_weight", p.rho.tail_weight()}};
  emit(o, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> plot_header;
  std::vector<std::vector<std::string>> plot_rows;
};

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

std::vector<double> default_values(const std::string& family) {
  if (family == "squeezed") return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  if (family == "cat") return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  if (family == "fock") return {1, 2, 3, 4};
  if (family == "tmsv") return {0.1, 0.2, 0.3, 0.4, 0.5};
  return {};
}

SweepTable gallery_table(const std::vector<int>& truncations) {
  SweepTable t;
  t.header = {"truncation", "tail_weight", "method", "tolerance", "negativity_plus", "negativity_minus", "l1_plus", "l1_minus",
              "separable_upper", "separable_min_eig", "incoherent_upper", "incoherent_min_eig"};
  t.plot_header = {"truncation", "negativity", "l1", "robustness_upper"};
  std::vector<std::vector<std::string>> rows(truncations.size()), plot(truncations.size());
  std::vector<std::string> errors(truncations.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < truncations.size(); ++i) {
    try {
      const cvr::HilbertGallery g = cvr::hilbert_gallery(truncations[i]);
      const cvr::RVector sigma = g.weights.array().square() / g.normalization;
      double sep_eig = 1e300, inc_eig = 1e300;
      bool ok = true;
      for (int k = 0; k < 2; ++k) {
        const auto& mc = k == 0 ? g.rho_plus : g.rho_minus;
        const auto& om = k == 0 ? g.omega_plus : g.omega_minus;
        const cvr::FeasibleCheck s = cvr::feasible_point_upper(mc, sigma, 2.0);
        const cvr::FeasibleCheck c = cvr::feasible_point_upper(om.matrix(), cvr::CMatrix(sigma.cast<cvr::cplx>().asDiagonal()), 2.0);
        sep_eig = std::min(sep_eig, s.min_eigenvalue);
        inc_eig = std::min(inc_eig, c.min_eigenvalue);
        ok = ok && s.accepted && c.accepted;
      }
      const double np = cvr::negativity(g.rho_plus), nm = cvr::negativity(g.rho_minus);
      const double lp = cvr::l1_norm(g.omega_plus), lm = cvr::l1_norm(g.omega_minus);
      const std::string upper = ok ? "2" : "rejected";
      rows[i] = {std::to_string(truncations[i]), "0", "feasible_point", "1e-09", num(np), num(nm), num(lp), num(lm), upper, num(sep_eig), upper, num(inc_eig)};
      plot[i] = {std::to_string(truncations[i]), num(np), num(lp), upper};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw cvr::Error(cvr::ErrorKind::InvalidParameter, e);
  t.rows = rows;
  t.plot_rows = plot;
  return t;
}

SweepTable family_table(const Options& o, const std::string& family, const std::vector<double>& values) {
  SweepTable t;
  const std::size_t n = values.size();
  std::vector<std::vector<std::string>> rows(n), plot(n);
  std::vector<std::string> errors(n);
  std::vector<cvr::ErrorKind> kinds(n, cvr::ErrorKind::InvalidParameter);
  cvr::SolverConfig cfg = o.solver;
  cfg.exec = cvr::kernels::Exec::Serial;  // points run in parallel; per-point kernels stay serial
  if (family == "squeezed") {
    t.header = {"r", "truncation", "tail_weight", "method", "tolerance", "lower", "upper", "ansatz_upper", "exp_r"};
    t.plot_header = {"r", "lower", "upper", "exp_r"};
  } else if (family == "cat") {
    t.header = {"alpha", "truncation", "tail_weight", "method", "tolerance", "witness_lower", "upper", "upper_formula"};
    t.plot_header = {"alpha", "witness_lower", "upper"};
  } else if (family == "fock") {
    t.header = {"n", "truncation", "tail_weight", "method", "tolerance", "lower", "upper", "closed_form"};
    t.plot_header = {"n", "lower", "upper", "closed_form"};
  } else if (family == "tmsv") {
    t.header = {"lambda", "truncation", "tail_weight", "method", "tolerance", "lower", "upper", "closed_form"};
    t.plot_header = {"lambda", "value", "closed_form"};
  } else {
    schema("unknown sweep family '" + family + "'");
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    try {
      if (family == "squeezed") {
        const int dim = o.dim > 0 ? o.dim : 60;
        const cvr::DensityOperator rho = cvr::make_density(cvr::spec::Squeezed{v}, dim, cvr::TruncationPolicy{std::max(o.tail_cap, 1e-6)});
        cvr::FreeSetModel f = cvr::FreeSetModel::classical();
        f.grid.radius = o.radius > 0 ? o.radius : 6.0;
        const cvr::SolverReport rep = cvr::sandwich(rho, f, cfg);
        const cvr::FockVector psi = cvr::make_pure(cvr::spec::Squeezed{v}, dim, cvr::TruncationPolicy{std::max(o.tail_cap, 1e-6)});
        const double ansatz = cvr::squeezed_ansatz_upper(psi).bound.value;
        rows[i] = {num(v), std::to_string(dim), num(rho.tail_weight()), "sandwich", num(cfg.gap_tol), num(rep.bounds.lower),
                   num(rep.bounds.upper), num(ansatz), num(std::exp(v))};
        plot[i] = {num(v), num(rep.bounds.lower), num(rep.bounds.upper), num(std::exp(v))};
      } else if (family == "cat") {
        const int dim = o.dim > 0 ? o.dim : 60;
        const cvr::FockVector psi = cvr::make_pure(cvr::spec::Cat{v, true}, dim, cvr::TruncationPolicy{o.tail_cap});
        const cvr::Lemma4Upper up = cvr::lemma4_upper(psi, cvr::two_coherent_mixture(v, dim));
        cvr::FreeSetModel f = cvr::FreeSetModel::classical();
        f.grid.radius = std::max(5.0, v + 3.0);
        const double lower = cvr::lemma4_lower_certified(psi, f).value;
        const double formula = 2.0 / (1.0 + std::exp(-2.0 * v * v));
        rows[i] = {num(v), std::to_string(dim), num(psi.tail_weight()), "lemma4", num(1e-10), num(lower), num(up.value), num(formula)};
        plot[i] = {num(v), num(lower), num(up.value)};
      } else if (family == "fock") {
        const int k = static_cast<int>(v);
        if (k != v || k < 0) throw cvr::Error(cvr::ErrorKind::Schema, "fock sweep values must be integers");
        const int dim = o.dim > 0 ? o.dim : 40;
        const cvr::DensityOperator rho = cvr::make_density(cvr::spec::Fock{k}, dim);
        cvr::FreeSetModel f = cvr::FreeSetModel::classical(cvr::default_grid_for(rho.matrix()));
        if (o.radius > 0) f.grid.radius = o.radius;
        const cvr::SolverReport rep = cvr::sandwich(rho, f, cfg);
        const double cf = cvr::closed_form(cvr::spec::Fock{k}, cvr::FreeKind::Classical).value;
        rows[i] = {std::to_string(k), std::to_string(dim), num(0.0), "sandwich", num(cfg.gap_tol), num(rep.bounds.lower), num(rep.bounds.upper), num(cf)};
        plot[i] = {std::to_string(k), num(rep.bounds.lower), num(rep.bounds.upper), num(cf)};
      } else {
        const int dim = o.dim > 0 ? o.dim : auto_dim(cvr::spec::TwoModeSqueezed{v});
        const cvr::DensityOperator rho = cvr::make_density(cvr::spec::TwoModeSqueezed{v}, dim);
        const cvr::SolverReport rep = cvr::sandwich(rho, cvr::FreeSetModel::separable(dim, dim), cfg);
        const double cf = (1 + v) / (1 - v);
        rows[i] = {num(v), std::to_string(dim), num(rho.tail_weight()), "schmidt_exact", num(1e-9), num(rep.bounds.lower), num(rep.bounds.upper), num(cf)};
        plot[i] = {num(v), num(rep.bounds.upper), num(cf)};
      }
    } catch (const cvr::Error& e) {
      errors[i] = e.what();
      kinds[i] = e.kind();
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) throw cvr::Error(kinds[i], family + " sweep at " + num(values[i]) + ": " + errors[i]);
  t.rows = rows;
  t.plot_rows = plot;
  return t;
}

void write_tables(const Options& o, const std::string& stem, const SweepTable& t) {
  const std::string table = csv(t.header, t.rows);
  const std::string plot = csv(t.plot_header, t.plot_rows);
  const fs::path dir = out_dir(o);
  cvr::io::write_file_atomic(dir / (stem + ".csv"), table);
  cvr::io::write_file_atomic(dir / (stem + "_plot.csv"), plot);
  if (o.format == "json") {
    Json rows = Json::array();
    for (const auto& r : t.rows) {
      Json row = Json::object();
      for (std::size_t i = 0; i < r.size(); ++i) row[t.header[i]] = r[i];
      rows.push_back(row);
    }
    std::cout << Json{{"schema_version", cvr::io::kSchemaVersion}, {"table", stem}, {"rows", rows}}.dump(2) << "\n";
  } else {
    std::cout << table;
  }
}

int cmd_sweep(const Options& o) {
  if (o.family.empty()) schema("--family is required");
  if (o.family == "gallery") {
    write_tables(o, "gallery_sweep", gallery_table(o.truncations));
    return 0;
  }
  const std::vector<double> values = o.values.empty() ? default_values(o.family) : o.values;
  write_tables(o, o.family + "_sweep", family_table(o, o.family, values));
  return 0;
}

int cmd_gallery(const Options& o) {
  write_tables(o, "gallery", gallery_table(o.truncations));
  return 0;
}

int cmd_reproduce(const Options& o) {
  cvr::acceptance::Options ao;
  ao.quick = o.quick;
  ao.seed = o.seed;
  ao.scratch_dir = (out_dir(o) / "acceptance_scratch").string();
  std::vector<cvr::acceptance::Result> results;
  for (int id = 1; id <= cvr::acceptance::kCriteria; ++id) {
    if (std::find(o.skip.begin(), o.skip.end(), id) != o.skip.end()) continue;
    results.push_back(cvr::acceptance::run(id, ao));
    std::cout << cvr::acceptance::line(results.back()) << std::endl;
  }
  const Json rep = cvr::acceptance::report(results, ao);
  cvr::io::write_file_atomic(out_dir(o) / "reproduce_all.json", rep.dump(2) + "\n");
  const bool all = rep["all_passed"].get<bool>();
  std::cout << rep["passed"].get<int>() << "/" << results.size() << " criteria passed" << std::endl;
  return all ? 0 : kExitFailed;
}

void add_common(CLI::App* c, Options& o) {
  c->add_option("--config", o.config, "JSON config; its keys override flags")->check(CLI::ExistingFile);
  c->add_option("--out", o.out, "output file (relative paths resolve against the output directory)");
  c->add_option("--out-dir", o.out_dir, "output directory (default $CVROB_OUT_DIR or .)");
  c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  c->add_option("--seed", o.seed, "random seed");
}

void add_state(CLI::App* c, Options& o) {
  c->add_option("--state", o.state, "state spec, e.g. fock:3, squeezed:0.5, cat+:1, tmsv:lambda=0.5");
  c->add_option("--free", o.free, "classical | incoherent | separable")->check(CLI::IsMember({"classical", "incoherent", "separable"}));
  c->add_option("--dim", o.dim, "Fock truncation per mode");
  c->add_option("--tail-cap", o.tail_cap, "maximum discarded probability");
  c->add_option("--radius", o.radius, "coherent grid radius");
  c->add_option("--radial-step", o.radial_step, "coherent grid ring spacing");
  c->add_option("--angular", o.angular, "points per ring");
  c->add_option("--gap-tol", o.solver.gap_tol, "relative gap target");
  c->add_option("--cut-tol", o.solver.cut_tol, "cut eigenvalue tolerance");
  c->add_option("--max-cuts", o.solver.max_cuts, "cut cap");
  c->add_option("--refinements", o.solver.refinement_rounds, "grid refinement rounds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified generalized-robustness brackets for continuous-variable states"};
  app.require_subcommand(1);
  Options o;

  auto* measure = app.add_subcommand("measure", "closed forms and certified bounds for one state");
  add_common(measure, o);
  add_state(measure, o);
  measure->add_option("--measures", o.measures, "robustness, negativity, l1, std_lower")->delimiter(',');

  auto* sw = app.add_subcommand("sandwich", "full solver report");
  add_common(sw, o);
  add_state(sw, o);
  sw->add_flag("--emit-cuts", o.solver.emit_cuts, "include the cut vectors");

  auto* wit = app.add_subcommand("witness", "rescaled dual witness");
  add_common(wit, o);
  add_state(wit, o);
  wit->add_flag("--binary", o.binary, "write the operator in the CVRM binary layout");

  auto* disc = app.add_subcommand("discriminate", "advantage ratio of a discrimination task");
  add_common(disc, o);
  add_state(disc, o);
  disc->add_option("--witness", o.witness_file, "witness file (JSON or CVRM) for the optimal binary task");
  disc->add_option("--task", o.task_file, "task JSON");
  disc->add_option("--random-tasks", o.random_tasks, "number of seeded random binary tasks");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV and plot data");
  add_common(sweep, o);
  sweep->add_option("--family", o.family, "squeezed | cat | fock | tmsv | gallery");
  sweep->add_option("--values", o.values, "parameter values")->delimiter(',');
  sweep->add_option("--truncations", o.truncations, "gallery truncations")->delimiter(',');
  sweep->add_option("--dim", o.dim, "Fock truncation per mode");
  sweep->add_option("--radius", o.radius, "coherent grid radius");
  sweep->add_option("--tail-cap", o.tail_cap, "maximum discarded probability");

  auto* gal = app.add_subcommand("gallery", "Hilbert-operator states: negativity, l1 and R <= 2 checks");
  add_common(gal, o);
  gal->add_option("--truncations", o.truncations, "truncations")->delimiter(',');

  auto* rep = app.add_subcommand("reproduce-all", "run every acceptance criterion");
  add_common(rep, o);
  rep->add_flag("--quick", o.quick, "one refinement round instead of three");
  rep->add_option("--skip-criteria", o.skip, "criteria to skip")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitSchema;
  }

  try {
    apply_config(o);
    validate(o);
    if (*measure) return cmd_measure(o);
    if (*sw) return cmd_sandwich(o);
    if (*wit) return cmd_witness(o);
    if (*disc) return cmd_discriminate(o);
    if (*sweep) return cmd_sweep(o);
    if (*gal) return cmd_gallery(o);
    if (*rep) return cmd_reproduce(o);
  } catch (const cvr::Error& e) {
    std::cerr << "error (" << cvr::to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == cvr::ErrorKind::Schema ? kExitSchema : kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
