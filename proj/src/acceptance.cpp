#include "cvr/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "cvr/discrimination.hpp"
#include "cvr/measures.hpp"
#include "cvr/solver.hpp"

namespace cvr::acceptance {

namespace {

using io::Json;
using io::number;

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

double fock_closed_form(int n) { return std::exp(n + std::lgamma(n + 1.0) - n * std::log(static_cast<double>(n))); }

SolverReport classical_sandwich(const DensityOperator& rho, double radius, int rounds) {
  FreeSetModel f = FreeSetModel::classical();
  f.grid.radius = radius;
  SolverConfig cfg;
  cfg.refinement_rounds = rounds;
  return sandwich(rho, f, cfg);
}

Json bracket_json(const SolverReport& r) {
  return Json{{"lower", number(r.bounds.lower)},
              {"upper", number(r.bounds.upper)},
              {"termination", to_string(r.termination)},
              {"cuts", r.cuts},
              {"rounds", r.iterations},
              {"tail_weight", r.truncation_tail}};
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

CMatrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(m);
  return qr.householderQ() * CMatrix::Identity(d, d);
}

// ---------------------------------------------------------------------------

Result fock_closed_forms(const Options& o) {
  Result r{1, "Fock closed forms", true, "", Json::object()};
  const int rounds = o.quick ? 1 : 3;
  Json rows = Json::array();
  std::string worst;
  double worst_dev = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const SolverReport rep = classical_sandwich(make_density(spec::Fock{n}, 40), 6.0, rounds);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double cf = fock_closed_form(n);
    const bool ok = within(rep.bounds.lower, cf, 0.02) && within(rep.bounds.upper, cf, 0.02) &&
                    rep.bounds.lower <= cf * (1 + 1e-9) && rep.bounds.upper >= cf * (1 - 1e-9) && secs < 120.0;
    r.passed = r.passed && ok;
    const double dev = std::max(std::abs(rep.bounds.lower - cf), std::abs(rep.bounds.upper - cf)) / cf;
    if (dev > worst_dev) worst_dev = dev;
    Json row = bracket_json(rep);
    row["n"] = n;
    row["closed_form"] = cf;
    row["ok"] = ok;
    rows.push_back(row);
  }
  r.details = Json{{"dim", 40}, {"radius", 6.0}, {"refinement_cap", rounds}, {"states", rows}};
  r.summary = "n=1..4 bracketed, worst relative deviation " + sci(worst_dev);
  return r;
}

Result squeezed(const Options& o) {
  Result r{2, "Squeezed vacuum e^r", true, "", Json::object()};
  Json rows = Json::array();
  double worst = 0.0;
  const double radius = std::ceil(std::sqrt(60.0)) + 2.0;
  for (double s : {0.2, 0.5, 1.0}) {
    TruncationPolicy p{1e-6};
    const SolverReport rep = classical_sandwich(make_density(spec::Squeezed{s}, 60, p), radius, o.quick ? 1 : 3);
    const double cf = std::exp(s);
    const bool ok = within(rep.bounds.lower, cf, 0.02) && within(rep.bounds.upper, cf, 0.02);
    r.passed = r.passed && ok;
    worst = std::max({worst, std::abs(rep.bounds.lower - cf) / cf, std::abs(rep.bounds.upper - cf) / cf});
    Json row = bracket_json(rep);
    row["r"] = s;
    row["closed_form"] = cf;
    row["ok"] = ok;
    rows.push_back(row);
  }
  r.details = Json{{"dim", 60}, {"tail_cap", 1e-6}, {"radius", radius}, {"states", rows}};
  r.summary = "r in {0.2,0.5,1} bracketed, worst relative deviation " + sci(worst);
  return r;
}

Result cats(const Options&) {
  Result r{3, "Cat states", true, "", Json::object()};
  Json rows = Json::array();
  double worst = 0.0;
  const int dim = 40;
  for (double a : {0.5, 1.0, 2.0}) {
    for (bool plus : {true, false}) {
      const FockVector psi = make_pure(spec::Cat{a, plus}, dim);
      const Lemma4Upper up = lemma4_upper(psi, two_coherent_mixture(a, dim));
      const double cf = 2.0 / (1.0 + (plus ? 1.0 : -1.0) * std::exp(-2.0 * a * a));
      const double dev = std::abs(up.value - cf);
      worst = std::max(worst, dev);
      r.passed = r.passed && dev <= 1e-6;
      rows.push_back(Json{{"alpha", a}, {"parity", plus ? "plus" : "minus"}, {"lemma4_upper", up.value}, {"closed_form", cf}});
    }
  }
  const double cf1 = 2.0 / (1.0 + std::exp(-2.0));
  const SolverReport s1 = classical_sandwich(make_density(spec::Cat{1.0, true}, 30), 5.0, 3);
  const double gap1 = (cf1 - s1.bounds.lower) / cf1;
  const bool tight = gap1 < 0.01;
  FreeSetModel f2 = FreeSetModel::classical();
  f2.grid.radius = 5.0;
  const double lower2 = lemma4_lower_certified(make_pure(spec::Cat{2.0, true}, dim), f2).value;
  const bool grows = lower2 > 1.95;
  r.passed = r.passed && tight && grows;
  r.details = Json{{"upper_formula_checks", rows},
                   {"plus_alpha1", {{"witness_lower", s1.bounds.lower}, {"upper", cf1}, {"relative_gap", gap1}}},
                   {"plus_alpha2_witness_lower", lower2}};
  r.summary = "upper max error " + sci(worst) + ", alpha=1 gap " + fixed(100 * gap1, 3) + "%, alpha=2 lower " + fixed(lower2, 5);
  return r;
}

Result pure_entanglement(const Options& o) {
  Result r{4, "Pure-state entanglement (sum mu)^2", true, "", Json::object()};
  std::mt19937_64 rng(derive_seed(o.seed, 4));
  std::uniform_int_distribution<int> rank_d(1, 6), extra_d(0, 2);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  double worst_dual = 0.0;
  int certified = 0;
  const int count = 20;
  Json rows = Json::array();
  for (int i = 0; i < count; ++i) {
    const int k = rank_d(rng);
    const int d = k + extra_d(rng);
    std::vector<double> mu(static_cast<std::size_t>(k));
    double norm = 0.0;
    for (double& m : mu) {
      m = u(rng);
      norm += m * m;
    }
    double sum = 0.0;
    for (double& m : mu) {
      m /= std::sqrt(norm);
      sum += m;
    }
    const CMatrix ua = random_unitary(d, rng), ub = random_unitary(d, rng);
    CVector psi = CVector::Zero(d * d);
    for (int n = 0; n < k; ++n)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) psi(a * d + b) += mu[static_cast<std::size_t>(n)] * ua(a, n) * ub(b, n);
    const FockVector fv({d, d}, psi);
    const CMatrix rho = fv.amplitudes() * fv.amplitudes().adjoint();
    const SchmidtDecomposition sd = schmidt_decompose(fv);
    const DualResult dual = dual_lower(rho, FreeSetModel::separable(d, d), cauchy_schwarz_witness(sd, d, d));
    const double target = sum * sum;
    const double dev = std::abs(dual.bounds.lower - target);
    worst_dual = std::max(worst_dual, dev);
    const FeasibleCheck fc = feasible_point_upper(rho, separable_noise_state(sd, d, d), target);
    if (fc.accepted) ++certified;
    const bool ok = dev <= 1e-8 && dual.bounds.lower_certified && fc.accepted;
    r.passed = r.passed && ok;
    rows.push_back(Json{{"rank", k}, {"local_dim", d}, {"target", target}, {"lower", dual.bounds.lower}, {"upper_accepted", fc.accepted}});
  }
  r.details = Json{{"instances", rows}, {"max_dual_error", worst_dual}, {"upper_certified", certified}};
  r.summary = std::to_string(count) + " instances, dual error " + sci(worst_dual) + ", upper certified " +
              std::to_string(certified) + "/" + std::to_string(count);
  return r;
}

int tmsv_dim(double lambda) { return static_cast<int>(std::ceil(std::log(1e-10) / std::log(lambda))); }

Result tmsv(const Options&) {
  Result r{5, "Two-mode squeezed vacuum", true, "", Json::object()};
  Json rows = Json::array();
  double worst = 0.0;
  struct Case {
    double lambda;
    double r;  // 0 when not derived from a squeezing parameter
  };
  const Case cases[] = {{0.2, 0.0}, {0.5, 0.0}, {std::tanh(0.25), 0.5}, {std::tanh(0.5), 1.0}};
  for (const Case& c : cases) {
    const int d = tmsv_dim(c.lambda);
    const DensityOperator rho = make_density(spec::TwoModeSqueezed{c.lambda}, d);
    const SolverReport rep = sandwich(rho, FreeSetModel::separable(d, d));
    const double target = (1 + c.lambda) / (1 - c.lambda);
    const double dev = std::max(std::abs(rep.bounds.lower - target), std::abs(rep.bounds.upper - target));
    worst = std::max(worst, dev);
    bool ok = dev <= 1e-8;
    Json row{{"lambda", c.lambda}, {"dim", d}, {"lower", rep.bounds.lower}, {"upper", rep.bounds.upper}, {"target", target}};
    if (c.r > 0) {
      ok = ok && std::abs(rep.bounds.lower - std::exp(c.r)) <= 1e-8;
      row["squeezing_r"] = c.r;
      row["exp_r"] = std::exp(c.r);
    }
    row["ok"] = ok;
    r.passed = r.passed && ok;
    rows.push_back(row);
  }
  r.details = Json{{"cases", rows}, {"max_error", worst}};
  r.summary = "4 cases, max error " + sci(worst);
  return r;
}

Result gallery(const Options&) {
  Result r{6, "Hilbert gallery separation", true, "", Json::object()};
  Json rows = Json::array();
  double prev_neg[2] = {-1, -1}, prev_l1[2] = {-1, -1};
  bool psd = true, neg_up = true, l1_up = true, sep_ok = true, inc_ok = true;
  const auto t0 = std::chrono::steady_clock::now();
  for (int d : {50, 100, 200, 400}) {
    const HilbertGallery g = hilbert_gallery(d);
    const RVector sigma = g.weights.array().square() / g.normalization;
    Json row{{"truncation", d}};
    int k = 0;
    for (const auto* pair : {&g.omega_plus, &g.omega_minus}) {
      const MaximallyCorrelated& mc = k == 0 ? g.rho_plus : g.rho_minus;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(pair->matrix(), Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues()(0);
      psd = psd && lmin >= -1e-9 && std::abs(pair->matrix().trace().real() - 1.0) <= 1e-9;
      const double neg = negativity(mc);
      const double l1 = l1_norm(*pair);
      neg_up = neg_up && neg > prev_neg[k];
      l1_up = l1_up && l1 > prev_l1[k];
      prev_neg[k] = neg;
      prev_l1[k] = l1;
      const FeasibleCheck s = feasible_point_upper(mc, sigma, 2.0);
      const FeasibleCheck i = feasible_point_upper(pair->matrix(), CMatrix(sigma.cast<cplx>().asDiagonal()), 2.0);
      sep_ok = sep_ok && s.accepted;
      inc_ok = inc_ok && i.accepted;
      const char* tag = k == 0 ? "plus" : "minus";
      row[tag] = Json{{"min_eigenvalue", lmin}, {"negativity", neg}, {"l1", l1},
                      {"separable_t2_min_eig", s.min_eigenvalue}, {"incoherent_t2_min_eig", i.min_eigenvalue}};
      ++k;
    }
    rows.push_back(row);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = psd && neg_up && l1_up && sep_ok && inc_ok && secs < 300.0;
  r.details = Json{{"rows", rows}, {"psd", psd}, {"negativity_increasing", neg_up}, {"l1_increasing", l1_up},
                   {"separable_upper_2", sep_ok}, {"incoherent_upper_2", inc_ok}};
  r.summary = std::string("psd ") + (psd ? "ok" : "FAIL") + ", negativity " + (neg_up ? "increasing" : "NOT increasing") +
              ", l1 " + (l1_up ? "increasing" : "NOT increasing") + ", R<=2 " + (sep_ok && inc_ok ? "certified" : "REJECTED");
  return r;
}

Result std_divergence(const Options&) {
  Result r{7, "Standard-robustness divergence", true, "", Json::object()};
  CoherentGrid grid;
  grid.radius = 3.0;
  Json rows = Json::array();
  for (int n = 1; n <= 3; ++n) {
    const DensityOperator rho = make_density(spec::Fock{n}, 40);
    const StdRobustnessBound sb = std_robustness_lower(rho, grid);
    const SolverReport gen = classical_sandwich(rho, 6.0, 1);
    const bool ok = sb.lower > 5.0 && gen.bounds.upper < 5.0;
    r.passed = r.passed && ok;
    rows.push_back(Json{{"n", n}, {"std_lower", sb.lower}, {"sup_chi1", sb.sup_chi1}, {"generalized_upper", number(gen.bounds.upper)}, {"ok", ok}});
  }
  double worst = 0.0;
  for (cplx a : {cplx(0.5, 0.0), cplx(1.0, 0.5), cplx(0.0, -1.5)}) {
    const DensityOperator rho = make_density(spec::Coherent{a}, 40);
    for (cplx b : grid.points()) worst = std::max(worst, std::abs(std::abs(chi1(rho, b)) - 1.0));
  }
  const bool coherent_ok = worst <= 1e-6;
  r.passed = r.passed && coherent_ok;
  r.details = Json{{"fock", rows}, {"coherent_max_deviation", worst}, {"grid_radius", 3.0}};
  std::string s;
  for (const auto& row : rows) s += (s.empty() ? "" : ", ") + ("n=" + std::to_string(row["n"].get<int>()) + " R^s>=" + fixed(row["std_lower"].get<double>(), 3));
  r.summary = s + "; coherent |chi1| deviation " + sci(worst);
  return r;
}

Result theorem1(const Options& o) {
  Result r{8, "Discrimination advantage", true, "", Json::object()};
  const DensityOperator rho = make_density(spec::Fock{1}, 40);
  FreeSetModel f = FreeSetModel::classical();
  f.grid.radius = 5.0;
  const SolverReport rep = sandwich(rho, f);
  const DiscriminationTask task = optimal_binary_task(rep.witness);
  task.validate();
  FreeSetModel fine = f;
  fine.grid.radial_step = 0.025;
  fine.grid.angular_count = 256;
  const AdvantageReport adv = advantage_ratio(rho.matrix(), task, fine);
  const bool opt_ok = within(adv.ratio, rep.bounds.lower, 0.02);

  const int dim = 20;
  const DensityOperator rho20 = make_density(spec::Fock{1}, dim);
  const TruncationPolicy loose{1e-6};
  std::vector<DensityOperator> classical;
  for (cplx b : {cplx(0, 0), cplx(0.5, 0), cplx(1, 1), cplx(0, -1.5), cplx(2, 0)})
    classical.push_back(make_density(spec::Coherent{b}, dim, loose));
  classical.push_back(make_density(spec::Thermal{0.5}, dim, loose));
  classical.push_back(make_density(spec::PhaseRandomizedCoherent{1.0}, dim, loose));
  double max_ratio = 0.0, max_free_ratio = 0.0;
  const int tasks = 50;
  for (int i = 0; i < tasks; ++i) {
    const DiscriminationTask t = random_task(dim, 2, derive_seed(o.seed, 800 + static_cast<std::uint64_t>(i)));
    const AdvantageReport a = advantage_ratio(rho20.matrix(), t, fine);
    max_ratio = std::max(max_ratio, a.ratio);
    for (const DensityOperator& s : classical) max_free_ratio = std::max(max_free_ratio, p_success(s, t) / a.p_free_best);
  }
  const bool random_ok = max_ratio <= rep.bounds.upper + 1e-2;
  const bool free_ok = max_free_ratio <= 1.0 + 1e-6;
  r.passed = opt_ok && random_ok && free_ok;
  r.details = Json{{"sandwich", bracket_json(rep)},
                   {"optimal_task_ratio", adv.ratio},
                   {"random_tasks", tasks},
                   {"random_max_ratio", max_ratio},
                   {"classical_max_ratio", max_free_ratio}};
  r.summary = "optimal ratio " + fixed(adv.ratio) + " vs lower " + fixed(rep.bounds.lower) + ", random max " + fixed(max_ratio) +
              ", classical max " + fixed(max_free_ratio, 9);
  return r;
}

double inc_value(const CMatrix& rho, bool upper) {
  const SolverReport rep = incoherent_exact(rho);
  return upper ? rep.bounds.upper : rep.bounds.lower;
}

Result axioms(const Options& o) {
  Result r{9, "Robustness axioms (incoherent)", true, "", Json::object()};
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(derive_seed(o.seed, 9));
  std::uniform_int_distribution<int> dim_d(2, 8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int faith_free = 0, faith_res = 0, conv = 0, mono = 0, res_cases = 0;
  double worst_conv = -1e300, worst_mono = -1e300, worst_free = 0.0;
  const int instances = 100, channels = 20;
  for (int i = 0; i < instances; ++i) {
    const int d = dim_d(rng);
    const std::uint64_t s = rng();
    const CMatrix rho1 = random_state(d, 1 + static_cast<int>(s % static_cast<std::uint64_t>(d)), s);
    const CMatrix rho2 = random_state(d, d, rng());
    CMatrix diag = CMatrix::Zero(d, d);
    diag.diagonal() = rho2.diagonal();
    const double rf = inc_value(diag, true);
    worst_free = std::max(worst_free, rf - 1.0);
    if (rf <= 1.0 + 1e-6) ++faith_free;
    double off = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (a != b) off = std::max(off, std::abs(rho1(a, b)));
    const double l1 = inc_value(rho1, false);
    if (off > 0.1) {
      ++res_cases;
      if (l1 > 1.0 + 1e-4) ++faith_res;
    }
    const double p = unif(rng);
    const double l2 = inc_value(rho2, false);
    const double mix = inc_value(p * rho1 + (1 - p) * rho2, true);
    const double excess = mix - (p * l1 + (1 - p) * l2);
    worst_conv = std::max(worst_conv, excess);
    if (excess <= 1e-6) ++conv;
    bool all = true;
    for (int c = 0; c < channels; ++c) {
      const auto kraus = random_incoherent_channel(d, rng());
      const CMatrix out = apply_subchannel(rho1, kraus);
      const double m = inc_value(out, true) - l1;
      worst_mono = std::max(worst_mono, m);
      all = all && m <= 1e-6;
    }
    if (all) ++mono;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = faith_free == instances && faith_res == res_cases && conv == instances && mono == instances && secs < 60.0;
  r.details = Json{{"instances", instances},
                   {"channels_per_instance", channels},
                   {"faithful_free", faith_free},
                   {"faithful_resource", faith_res},
                   {"resource_cases", res_cases},
                   {"convexity", conv},
                   {"monotonicity", mono},
                   {"max_free_excess", worst_free},
                   {"max_convexity_excess", worst_conv},
                   {"max_monotonicity_excess", worst_mono}};
  r.summary = "faithful " + std::to_string(faith_free) + "+" + std::to_string(faith_res) + "/" + std::to_string(instances + res_cases) +
              ", convex " + std::to_string(conv) + "/" + std::to_string(instances) + ", monotone " + std::to_string(mono) + "/" +
              std::to_string(instances) + ", worst excess " + sci(std::max(worst_conv, worst_mono));
  return r;
}

Json determinism_payload(const Options& o) {
  Json out = Json::object();
  SolverConfig cfg;
  cfg.refinement_rounds = 1;
  cfg.emit_cuts = true;
  FreeSetModel f = FreeSetModel::classical();
  f.grid.radius = 5.0;
  const SolverReport rep = sandwich(make_density(spec::Fock{2}, 30), f, cfg);
  out["fock2"] = io::to_json(rep, true);
  out["witness"] = io::to_json(rep.witness);
  const DiscriminationTask t = random_task(12, 3, derive_seed(o.seed, 1000));
  out["task_ratio"] = io::to_json(advantage_ratio(make_density(spec::Fock{1}, 12).matrix(), t, f));
  out["incoherent"] = io::to_json(incoherent_exact(random_state(6, 3, derive_seed(o.seed, 1001)), o.seed), false);
  return out;
}

Result determinism(const Options& o) {
  Result r{10, "Determinism", true, "", Json::object()};
#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string a = determinism_payload(o).dump();
  omp_set_num_threads(max_threads);
#else
  const int max_threads = 1;
  const std::string a = determinism_payload(o).dump();
#endif
  const std::string b = determinism_payload(o).dump();
  const std::string c = determinism_payload(o).dump();
  const bool in_process = a == b && b == c;
  r.details = Json{{"threads_compared", Json::array({1, max_threads})}, {"in_process_identical", in_process}};
  bool cli_ok = true;
  if (o.cli_path) {
    namespace fs = std::filesystem;
    const fs::path base = fs::path(o.scratch_dir);
    fs::create_directories(base);
    std::string outs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = base / ("run" + std::to_string(run));
      fs::remove_all(dir);
      fs::create_directories(dir);
      const std::string cmd = "\"" + *o.cli_path + "\" reproduce-all --quick --skip-criteria 10 --seed " + std::to_string(o.seed) +
                              " --out-dir \"" + dir.string() + "\" > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
      const int rc = std::system(cmd.c_str());
      (void)rc;
      const fs::path report = dir / "reproduce_all.json";
      outs[run] = fs::exists(report) ? io::read_file(report) : std::string();
    }
    cli_ok = !outs[0].empty() && outs[0] == outs[1];
    r.details["cli_reports_identical"] = cli_ok;
    r.details["cli_report_bytes"] = outs[0].size();
  }
  r.passed = in_process && cli_ok;
  r.summary = std::string("in-process ") + (in_process ? "identical" : "DIFFERENT") +
              (o.cli_path ? std::string(", CLI reports ") + (cli_ok ? "identical" : "DIFFERENT") : std::string());
  return r;
}

}  // namespace

CMatrix random_state(int dim, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix m(dim, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = cplx(g(rng), g(rng));
  CMatrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

std::vector<CMatrix> random_incoherent_channel(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int perms = 1 + static_cast<int>(rng() % 3);
  std::vector<double> w(static_cast<std::size_t>(perms + 1));
  double total = 0.0;
  for (double& x : w) total += (x = u(rng) + 1e-3);
  std::vector<CMatrix> kraus;
  auto perm_matrix = [&]() {
    std::vector<int> p(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = i;
    std::shuffle(p.begin(), p.end(), rng);
    CMatrix m = CMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) m(p[static_cast<std::size_t>(i)], i) = 1.0;
    return m;
  };
  for (int k = 0; k < perms; ++k) kraus.push_back(std::sqrt(w[static_cast<std::size_t>(k)] / total) * perm_matrix());
  const CMatrix p = perm_matrix();
  const double q = std::sqrt(w.back() / total);
  for (int i = 0; i < dim; ++i) {
    CMatrix k = CMatrix::Zero(dim, dim);
    k.col(i) = q * p.col(i);
    kraus.push_back(k);
  }
  return kraus;
}

Result run(int id, const Options& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    switch (id) {
      case 1: r = fock_closed_forms(opts); break;
      case 2: r = squeezed(opts); break;
      case 3: r = cats(opts); break;
      case 4: r = pure_entanglement(opts); break;
      case 5: r = tmsv(opts); break;
      case 6: r = gallery(opts); break;
      case 7: r = std_divergence(opts); break;
      case 8: r = theorem1(opts); break;
      case 9: r = axioms(opts); break;
      case 10: r = determinism(opts); break;
      default: throw Error(ErrorKind::InvalidParameter, "no criterion " + std::to_string(id));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidParameter && (id < 1 || id > kCriteria)) throw;
    r.id = id;
    r.passed = false;
    r.summary = std::string("error: ") + e.what();
    r.details = Json{{"error", to_string(e.kind())}, {"message", e.what()}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<Result> run_all(const Options& opts, const std::function<void(const Result&)>& on_done) {
  std::vector<Result> out;
  for (int id = 1; id <= kCriteria; ++id) {
    out.push_back(run(id, opts));
    if (on_done) on_done(out.back());
  }
  return out;
}

Json report(const std::vector<Result>& results, const Options& opts) {
  Json crit = Json::array();
  int passed = 0;
  for (const Result& r : results) {
    passed += r.passed ? 1 : 0;
    crit.push_back(Json{{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"summary", r.summary}, {"details", r.details}});
  }
  return Json{{"schema_version", io::kSchemaVersion},
              {"quick", opts.quick},
              {"seed", opts.seed},
              {"criteria", crit},
              {"passed", passed},
              {"total", results.size()},
              {"all_passed", passed == static_cast<int>(results.size())}};
}

std::string line(const Result& r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, " (%.1f s)", r.seconds);
  return std::string(r.passed ? "PASS" : "FAIL") + "  criterion " + std::to_string(r.id) + ": " + r.title + " - " + r.summary + buf;
}

}  // namespace cvr::acceptance
