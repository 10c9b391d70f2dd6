#include "cvr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <functional>
#include <optional>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cvr/lp.hpp"

namespace cvr {

double Witness::expectation(const CMatrix& rho) const {
  if (rho.rows() != op.rows()) throw Error(ErrorKind::ShapeMismatch, "witness and state sizes differ");
  return (op.cwiseProduct(rho.transpose())).sum().real();
}

void Witness::check() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (op + op.adjoint())), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) throw Error(ErrorKind::InvariantViolation, "witness is not PSD");
  if (rescaled && !(free_value.value >= 1.0 - 1e-6 && free_value.value <= 1.0 + 1e-12))
    throw Error(ErrorKind::InvariantViolation, "rescaled witness has free value away from 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::IterationCap: return "iteration_cap";
    case Termination::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// B with B B^H = rho, columns on the numerical support.
CMatrix sqrt_factor(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> rs(hermitize(rho));
  const RVector& rev = rs.eigenvalues();
  const double rtop = rev(rev.size() - 1);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < rev.size(); ++i)
    if (rev(i) > 1e-14 * rtop) keep.push_back(i);
  CMatrix b(rho.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    b.col(static_cast<Eigen::Index>(i)) = rs.eigenvectors().col(keep[i]) * std::sqrt(rev(keep[i]));
  return b;
}

double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Largest eigenvalue of L^{-1} rho L^{-H} for sigma = L L^H.
double scaling_via_cholesky(const CMatrix& rho, const CMatrix& sigma, bool& ok) {
  Eigen::LLT<CMatrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    ok = false;
    return 0.0;
  }
  CMatrix k = llt.matrixL().solve(rho);
  k = llt.matrixL().solve(CMatrix(k.adjoint())).adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(k), Eigen::EigenvaluesOnly);
  ok = true;
  return es.eigenvalues()(k.rows() - 1);
}

double scaling_via_support(const CMatrix& rho, const CMatrix& sigma, bool& ok) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma);
  const RVector& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  ok = false;
  if (!(top > 0.0)) return 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-12 * top) keep.push_back(i);
  const auto k = static_cast<Eigen::Index>(keep.size());
  CMatrix e(sigma.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) e.col(i) = es.eigenvectors().col(keep[static_cast<std::size_t>(i)]) / std::sqrt(ev(keep[static_cast<std::size_t>(i)]));
  const CMatrix m = e.adjoint() * rho * e;
  Eigen::SelfAdjointEigenSolver<CMatrix> ms(hermitize(m), Eigen::EigenvaluesOnly);
  ok = true;
  return ms.eigenvalues()(k - 1);
}

}  // namespace

ScalingCertificate certify_scaling(const CMatrix& rho, const CMatrix& atoms, const RVector& c, kernels::Exec exec) {
  ScalingCertificate best;
  const double cost = c.sum();
  if (!(cost > 0.0)) return best;
  const CMatrix sigma = hermitize(kernels::weighted_gram(atoms, c, exec));
  auto consider = [&](const RVector& w, const CMatrix& s_mat, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) return;
    const double scaled = s * (1.0 + 1e-12);
    const double t = scaled * w.sum();
    if (t >= best.t) return;
    const double lmin = min_eigenvalue(scaled * s_mat - rho);
    if (lmin < -1e-9) return;
    best.t = t;
    best.weights = scaled * w;
    best.min_eigenvalue = lmin;
    best.ok = true;
  };
  bool ok = false;
  const double s0 = scaling_via_support(rho, sigma, ok);
  if (ok) consider(c, sigma, s0);
  const Eigen::Index n = atoms.cols();
  const RVector uniform = RVector::Constant(n, 1.0 / static_cast<double>(n));
  const CMatrix g = hermitize(kernels::weighted_gram(atoms, uniform, exec));
  for (int e = -12; e <= -1; ++e) {
    const double eps = std::pow(10.0, e) * cost;
    const RVector w = c + eps * uniform;
    const CMatrix s_mat = sigma + eps * g;
    const double s = scaling_via_cholesky(rho, s_mat, ok);
    if (ok) consider(w, s_mat, s);
  }
  return best;
}

RVector design_polish(const CMatrix& rho, const CMatrix& atoms, int iters, RVector start, kernels::Exec exec) {
  const Eigen::Index n = atoms.cols();
  RVector c = start.size() == n ? start : RVector::Constant(n, 1.0 / static_cast<double>(n));
  c /= c.sum();
  const CMatrix b = sqrt_factor(rho);
  RVector best = c;
  double best_t = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iters; ++it) {
    const CMatrix sigma = hermitize(kernels::weighted_gram(atoms, c, exec));
    Eigen::LLT<CMatrix> llt(sigma);
    if (llt.info() != Eigen::Success) break;
    const CMatrix y = llt.solve(b);
    const CMatrix m = hermitize(b.adjoint() * y);
    Eigen::SelfAdjointEigenSolver<CMatrix> ms(m);
    const double g = ms.eigenvalues()(m.rows() - 1);
    if (!(g > 0.0) || !std::isfinite(g)) break;
    const double t = g * c.sum();
    if (t < best_t) {
      best_t = t;
      best = c;
    }
    const CVector x = y * ms.eigenvectors().col(m.rows() - 1);
    const RVector w = kernels::overlaps_abs2(x, atoms, exec);
    c = c.cwiseProduct(w) / g;
    const double top = c.maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j)
      if (c(j) < 1e-18 * top) c(j) = 0.0;
    c /= c.sum();
  }
  return best;
}

Witness design_witness(const CMatrix& rho, const CMatrix& atoms, const RVector& c, kernels::Exec exec) {
  const CMatrix b = sqrt_factor(rho);
  const RVector uniform = RVector::Constant(atoms.cols(), 1.0 / static_cast<double>(atoms.cols()));
  CMatrix sigma = hermitize(kernels::weighted_gram(atoms, c, exec));
  Eigen::LLT<CMatrix> llt(sigma);
  for (double eps = 1e-14; llt.info() != Eigen::Success && eps < 1.0; eps *= 10.0) {
    sigma = hermitize(kernels::weighted_gram(atoms, c + eps * c.sum() * uniform, exec));
    llt.compute(sigma);
  }
  Witness w;
  if (llt.info() != Eigen::Success) {
    w.op = CMatrix::Identity(rho.rows(), rho.cols());
    return w;
  }
  const CMatrix y = llt.solve(b);
  Eigen::SelfAdjointEigenSolver<CMatrix> ms(hermitize(b.adjoint() * y));
  const CVector x = y * ms.eigenvectors().col(ms.eigenvalues().size() - 1);
  w.op = x * x.adjoint();
  return w;
}

// ---------------------------------------------------------------------------

namespace {

struct CutLoop {
  RVector c;
  RVector y;
  std::vector<CVector> cuts;
  double lp_value = 0.0;
  double min_eig = 0.0;
  Termination termination = Termination::Converged;
};

// Runs cutting planes until PSD within tol, the LP value reaches `stop_at`, or the cap.
CutLoop run_cuts(const CMatrix& rho, const CMatrix& atoms, const SolverConfig& cfg,
                 const std::vector<CVector>& seeds, double stop_at,
                 const std::function<bool(const CutLoop&)>& progress = {}, int every = 25) {
  CoveringLP lp(atoms.cols());
  CutLoop out;
  auto add_cut = [&](const CVector& v0) {
    const CVector v = v0.normalized();
    lp.add_row(kernels::overlaps_abs2(v, atoms, cfg.exec), v.dot(rho * v).real());
    out.cuts.push_back(v);
  };
  for (const CVector& s : seeds)
    if (s.norm() > 0.0) add_cut(s);
  if (out.cuts.empty()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(rho));
    add_cut(es.eigenvectors().col(rho.rows() - 1));
  }
  const int limit = std::max<int>(cfg.max_cuts, static_cast<int>(out.cuts.size()));
  for (;;) {
    const auto st = lp.solve();
    if (st == CoveringLP::Status::Infeasible)
      throw Error(ErrorKind::Infeasible, "state has support outside the span of the extreme points");
    if (st == CoveringLP::Status::IterationLimit) {
      out.termination = Termination::IterationCap;
      break;
    }
    out.c = lp.primal();
    out.lp_value = lp.objective();
    const CMatrix x = hermitize(kernels::weighted_gram(atoms, out.c, cfg.exec) - rho);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
    out.min_eig = es.eigenvalues()(0);
    if (out.min_eig >= -cfg.cut_tol) {
      out.termination = Termination::Converged;
      break;
    }
    if (out.lp_value >= stop_at) {
      out.termination = Termination::Converged;
      break;
    }
    if (progress && out.cuts.size() % static_cast<std::size_t>(every) == 0) {
      out.y = lp.dual();
      if (progress(out)) {
        out.termination = Termination::Converged;
        break;
      }
    }
    if (static_cast<int>(out.cuts.size()) >= limit) {
      out.termination = Termination::IterationCap;
      break;
    }
    add_cut(es.eigenvectors().col(0));
  }
  out.y = lp.dual();
  if (out.c.size() == 0) out.c = lp.primal();
  return out;
}

CMatrix witness_from_cuts(const CutLoop& loop, Eigen::Index d) {
  CMatrix w = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < loop.cuts.size(); ++i) {
    const double yi = loop.y(static_cast<Eigen::Index>(i));
    if (yi > 0.0) w.noalias() += yi * loop.cuts[i] * loop.cuts[i].adjoint();
  }
  return hermitize(w);
}

std::vector<CVector> default_seeds(const CMatrix& rho) {
  std::vector<CVector> seeds;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(rho));
  const RVector& ev = es.eigenvalues();
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > 1e-12 * ev(ev.size() - 1)) seeds.push_back(es.eigenvectors().col(i));
  for (Eigen::Index k = 0; k < rho.rows(); ++k) seeds.push_back(CVector::Unit(rho.rows(), k));
  return seeds;
}

}  // namespace

SolverReport primal_upper(const CMatrix& rho, const CMatrix& atoms, const SolverConfig& config,
                          const std::vector<CVector>& seed_cuts) {
  if (atoms.cols() == 0) throw Error(ErrorKind::InvalidParameter, "no extreme points");
  if (atoms.rows() != rho.rows()) throw Error(ErrorKind::ShapeMismatch, "atom and state sizes differ");
  for (Eigen::Index j = 0; j < atoms.cols(); ++j)
    if (atoms.col(j).squaredNorm() > 1.0 + 1e-9)
      throw Error(ErrorKind::InvalidParameter, "extreme points must have trace <= 1");
  const std::vector<CVector> seeds = seed_cuts.empty() ? default_seeds(rho) : seed_cuts;
  const CutLoop loop = run_cuts(rho, atoms, config, seeds, std::numeric_limits<double>::infinity());
  SolverReport rep;
  rep.cuts = static_cast<int>(loop.cuts.size());
  rep.iterations = rep.cuts;
  rep.lp_value = loop.lp_value;
  rep.min_eigenvalue = loop.min_eig;
  rep.termination = loop.termination;
  const ScalingCertificate cert = certify_scaling(rho, atoms, loop.c, config.exec);
  rep.bounds.lower = 1.0;
  rep.bounds.lower_method = Method::None;
  if (cert.ok) {
    rep.bounds.upper = cert.t;
    rep.bounds.upper_method = Method::CuttingPlane;
    rep.weights = cert.weights;
  }
  rep.bounds.note = "upper bound relative to the discretized free set";
  rep.witness.op = witness_from_cuts(loop, rho.rows());
  rep.witness.rescaled = false;
  if (config.emit_cuts) rep.cut_log = loop.cuts;
  return rep;
}

DualResult dual_lower(const CMatrix& rho, const FreeSetModel& f, const Witness& candidate) {
  require_psd(candidate.op, "witness");
  if (candidate.op.rows() != rho.rows()) throw Error(ErrorKind::ShapeMismatch, "witness and state sizes differ");
  const FreeValueResult fv = free_value(candidate.op, f);
  if (!(fv.value > 0.0)) throw Error(ErrorKind::ZeroWitness, "witness has zero free value");
  DualResult out;
  out.witness.op = candidate.op / fv.value;
  out.witness.free_value = fv;
  out.witness.free_value.value = 1.0;
  out.witness.rescaled = true;
  const double val = out.witness.expectation(rho);
  out.bounds.lower = std::max(1.0, val);
  out.bounds.lower_method = val >= 1.0 ? Method::Witness : Method::None;
  out.bounds.lower_certified = fv.certified != Certification::Heuristic;
  if (!out.bounds.lower_certified) out.bounds.note = "lower bound uses a heuristic free value";
  return out;
}

FeasibleCheck feasible_point_upper(const CMatrix& rho, const CMatrix& sigma, double t) {
  if (rho.rows() != sigma.rows()) throw Error(ErrorKind::ShapeMismatch, "rho and sigma sizes differ");
  if (!(t >= 1.0)) throw Error(ErrorKind::InvalidParameter, "t must be >= 1");
  FeasibleCheck out;
  out.t = t;
  out.min_eigenvalue = min_eigenvalue(t * sigma - rho);
  out.accepted = out.min_eigenvalue >= -1e-9;
  return out;
}

FeasibleCheck feasible_point_upper(const MaximallyCorrelated& rho, const RVector& sigma_diag, double t) {
  const CMatrix& w = rho.block().matrix();
  if (sigma_diag.size() != w.rows()) throw Error(ErrorKind::ShapeMismatch, "sigma and rho block sizes differ");
  if (!(t >= 1.0)) throw Error(ErrorKind::InvalidParameter, "t must be >= 1");
  CMatrix m = -w;
  m.diagonal() += t * sigma_diag.cast<cplx>();
  FeasibleCheck out;
  out.t = t;
  out.min_eigenvalue = min_eigenvalue(m);
  out.accepted = out.min_eigenvalue >= -1e-9;
  return out;
}

// ---------------------------------------------------------------------------

SolverReport incoherent_exact(const CMatrix& rho, std::uint64_t seed) {
  const Eigen::Index d = rho.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix v(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) v(i, k) = cplx(g(rng), g(rng));
    v.row(i).normalize();
  }
  auto objective = [&]() { return (rho.cwiseProduct((v * v.adjoint()).transpose())).sum().real(); };
  double val = objective();
  int sweeps = 0;
  for (; sweeps < 5000; ++sweeps) {
    for (Eigen::Index n = 0; n < d; ++n) {
      Eigen::RowVectorXcd h = Eigen::RowVectorXcd::Zero(d);
      for (Eigen::Index m = 0; m < d; ++m)
        if (m != n) h += rho(n, m) * v.row(m);
      const double hn = h.norm();
      if (hn > 0.0) v.row(n) = h / hn;
    }
    const double nv = objective();
    const bool done = nv - val <= 1e-15 * std::max(1.0, std::abs(nv));
    val = nv;
    if (done) break;
  }
  SolverReport rep;
  rep.iterations = sweeps + 1;
  const CMatrix w = hermitize(v * v.adjoint());
  rep.witness.op = w;
  rep.witness.free_value.value = w.diagonal().real().maxCoeff();
  rep.witness.free_value.certified = Certification::Exact;
  Eigen::Index arg = 0;
  w.diagonal().real().maxCoeff(&arg);
  rep.witness.free_value.maximizer = static_cast<int>(arg);
  rep.witness.op /= rep.witness.free_value.value;
  rep.witness.free_value.value = 1.0;
  rep.witness.rescaled = true;
  const double lower = rep.witness.expectation(rho);
  RVector c(d);
  for (Eigen::Index n = 0; n < d; ++n) {
    Eigen::RowVectorXcd h = Eigen::RowVectorXcd::Zero(d);
    for (Eigen::Index m = 0; m < d; ++m)
      if (m != n) h += rho(n, m) * v.row(m);
    c(n) = std::max(0.0, rho(n, n).real()) + h.norm();
  }
  const ScalingCertificate cert = certify_scaling(rho, CMatrix::Identity(d, d), c, kernels::Exec::Serial);
  rep.bounds.lower = std::max(1.0, lower);
  rep.bounds.lower_method = Method::Witness;
  if (cert.ok) {
    rep.bounds.upper = std::max(cert.t, rep.bounds.lower);
    rep.bounds.upper_method = Method::FeasiblePoint;
    rep.weights = cert.weights;
    rep.min_eigenvalue = cert.min_eigenvalue;
  }
  rep.lp_value = lower;
  rep.termination = Termination::Converged;
  rep.bounds.check();
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace

Witness cauchy_schwarz_witness(const SchmidtDecomposition& sd, int dim_a, int dim_b) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim_a) * dim_b);
  for (Eigen::Index n = 0; n < sd.coefficients.size(); ++n) v += kron(sd.left.col(n), sd.right.col(n));
  Witness w;
  w.op = v * v.adjoint();
  w.free_value.value = 1.0;
  w.free_value.maximizer = ProductMaximizer{sd.left.col(0), sd.right.col(0)};
  w.free_value.certified = Certification::Analytic;
  w.rescaled = true;
  return w;
}

CMatrix separable_noise_state(const SchmidtDecomposition& sd, int dim_a, int dim_b) {
  const Eigen::Index k = sd.coefficients.size();
  const double s = sd.coefficients.sum();
  const CVector psi = sd.reconstruct();
  CMatrix y(static_cast<Eigen::Index>(dim_a) * dim_b, k * (k - 1));
  Eigen::Index col = 0;
  for (Eigen::Index n = 0; n < k; ++n)
    for (Eigen::Index m = 0; m < k; ++m)
      if (n != m) y.col(col++) = std::sqrt(sd.coefficients(n) * sd.coefficients(m)) * kron(sd.left.col(n), sd.right.col(m));
  CMatrix sigma = psi * psi.adjoint();
  if (col > 0) sigma.noalias() += y * y.adjoint();
  return hermitize(sigma / (s * s));
}

SolverReport separable_pure(const FockVector& psi, bool dense_check) {
  if (!psi.bipartite()) throw Error(ErrorKind::NotBipartite, "separable robustness needs two subsystems");
  const int da = psi.dims()[0], db = psi.dims()[1];
  const SchmidtDecomposition sd = schmidt_decompose(psi);
  const CMatrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  const DualResult dual = dual_lower(rho, FreeSetModel::separable(da, db), cauchy_schwarz_witness(sd, da, db));
  const double s = sd.coefficients.sum();
  SolverReport rep;
  rep.bounds.lower = dual.bounds.lower;
  rep.bounds.lower_method = Method::Witness;
  rep.bounds.lower_certified = dual.bounds.lower_certified;
  rep.witness = dual.witness;
  rep.truncation_tail = psi.tail_weight();
  const double t = s * s;
  if (dense_check) {
    const FeasibleCheck fc = feasible_point_upper(rho, separable_noise_state(sd, da, db), t);
    rep.min_eigenvalue = fc.min_eigenvalue;
    if (!fc.accepted) throw Error(ErrorKind::InvariantViolation, "separable noise construction rejected");
    rep.bounds.note = "upper bound from the explicit separable noise state, eigenvalue-checked";
  } else {
    rep.bounds.note = "upper bound from the explicit separable noise state (t sigma - rho diagonal in the Schmidt product basis)";
  }
  rep.bounds.upper = std::max(t, rep.bounds.lower);
  rep.bounds.upper_method = Method::FeasiblePoint;
  rep.termination = Termination::Converged;
  rep.bounds.check();
  return rep;
}

CMatrix product_atoms(int dim_a, int dim_b, int count, std::uint64_t seed) {
  const Eigen::Index da = dim_a, db = dim_b;
  CMatrix out(da * db, da * db + count);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < da * db; ++i) out.col(col++) = CVector::Unit(da * db, i);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int k = 0; k < count; ++k) {
    CVector a(da), b(db);
    for (Eigen::Index i = 0; i < da; ++i) a(i) = cplx(g(rng), g(rng));
    for (Eigen::Index i = 0; i < db; ++i) b(i) = cplx(g(rng), g(rng));
    out.col(col++) = kron(a.normalized(), b.normalized());
  }
  return out;
}

CoherentGrid default_grid_for(const CMatrix& rho) {
  double mean = 0.0, second = 0.0;
  for (Eigen::Index n = 0; n < rho.rows(); ++n) {
    const double p = rho(n, n).real();
    mean += p * static_cast<double>(n);
    second += p * static_cast<double>(n * n);
  }
  const double sd = std::sqrt(std::max(0.0, second - mean * mean));
  return CoherentGrid::for_max_photon(static_cast<int>(std::ceil(mean + 3.0 * sd)));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<cplx> top_points(const RVector& w, const std::vector<cplx>& pts, std::size_t count) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w(j) > 1e-8 * w.maxCoeff()) idx.push_back(j);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return w(a) > w(b); });
  if (idx.size() > count) idx.resize(count);
  std::vector<cplx> out;
  for (Eigen::Index j : idx) out.push_back(pts[static_cast<std::size_t>(j)]);
  return out;
}

SolverReport sandwich_classical(const DensityOperator& rho, const FreeSetModel& f, const SolverConfig& cfg) {
  const CMatrix& r = rho.matrix();
  CoherentGrid grid = f.grid;
  std::vector<CVector> seeds = default_seeds(r);
  SolverReport rep;
  rep.truncation_tail = rho.tail_weight();
  rep.bounds.lower = 1.0;
  rep.bounds.lower_method = Method::None;
  RVector warm;
  int total_cuts = 0;
  auto take_upper = [&](const ScalingCertificate& cert, Method m, const std::vector<cplx>& pts) {
    if (!cert.ok || !(cert.t < rep.bounds.upper)) return;
    rep.bounds.upper = cert.t;
    rep.bounds.upper_method = m;
    rep.weights = cert.weights;
    rep.points = pts;
    rep.min_eigenvalue = cert.min_eigenvalue;
  };
  auto take_lower = [&](const Witness& cand, const CoherentGrid& g) {
    FreeSetModel full = f;
    full.grid = g;
    std::optional<DualResult> found;
    try {
      found = dual_lower(r, full, cand);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::GridTooCoarse) throw;
    }
    if (!found) {
      // The mesh only locates the supremum over all amplitudes; widen it to the
      // region where truncated coherent vectors keep their weight.
      full.grid.radius = std::max(g.radius, std::sqrt(static_cast<double>(rho.dim())) + 4.0);
      try {
        found = dual_lower(r, full, cand);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::GridTooCoarse) throw;
        return;
      }
    }
    const DualResult& dual = *found;
    if (dual.bounds.lower > rep.bounds.lower || rep.bounds.lower_method == Method::None) {
      rep.bounds.lower = dual.bounds.lower;
      rep.bounds.lower_method = dual.bounds.lower_method;
      rep.witness = dual.witness;
    }
  };
  for (int round = 0; round <= cfg.refinement_rounds; ++round) {
    const std::vector<cplx> pts = grid.points();
    const CMatrix atoms = kernels::coherent_columns(pts, rho.dim(), cfg.exec);
    RVector start;
    if (warm.size() > 0) {
      start = RVector::Constant(atoms.cols(), warm.maxCoeff() * 1e-3);
      start.head(warm.size()) += warm;
    }
    const RVector design = design_polish(r, atoms, cfg.polish_iters, start, cfg.exec);
    warm = design;
    take_upper(certify_scaling(r, atoms, design, cfg.exec), Method::FeasiblePoint, pts);
    take_lower(design_witness(r, atoms, design, cfg.exec), grid);
    rep.iterations = round + 1;
    std::vector<cplx> centers = top_points(design, pts, 32);
    if (rep.bounds.relative_gap() > cfg.gap_tol) {
      const double stop_at = std::isfinite(rep.bounds.upper) ? rep.bounds.upper * (1.0 - 0.25 * cfg.gap_tol)
                                                             : std::numeric_limits<double>::infinity();
      auto check = [&](const CutLoop& partial) {
        const ScalingCertificate lc = certify_scaling(r, atoms, partial.c, cfg.exec);
        take_upper(lc, Method::CuttingPlane, pts);
        take_upper(certify_scaling(r, atoms, 0.5 * partial.c + 0.5 * design, cfg.exec), Method::CuttingPlane, pts);
        Witness cand;
        cand.op = witness_from_cuts(partial, rho.dim());
        take_lower(cand, grid);
        return rep.bounds.relative_gap() <= cfg.gap_tol;
      };
      const CutLoop loop = run_cuts(r, atoms, cfg, seeds, stop_at, check);
      total_cuts += static_cast<int>(loop.cuts.size());
      rep.lp_value = loop.lp_value;
      if (cfg.emit_cuts) rep.cut_log = loop.cuts;
      check(loop);
      seeds = loop.cuts;
      const std::vector<cplx> lp_centers = top_points(loop.c, pts, 32);
      centers.insert(centers.end(), lp_centers.begin(), lp_centers.end());
    }
    if (rep.bounds.relative_gap() <= cfg.gap_tol) {
      rep.termination = Termination::Converged;
      break;
    }
    if (round == cfg.refinement_rounds) {
      rep.termination = Termination::IterationCap;
      break;
    }
    if (auto* a = std::get_if<cplx>(&rep.witness.free_value.maximizer)) centers.push_back(*a);
    refine_around(grid, centers);
  }
  rep.cuts = total_cuts;
  if (rep.bounds.lower > rep.bounds.upper && rep.bounds.lower <= rep.bounds.upper + 1e-8)
    rep.bounds.lower = rep.bounds.upper;
  rep.bounds.note = "upper bound relative to the grid-discretized classical set; truncation tail reported separately";
  rep.bounds.check();
  return rep;
}

SolverReport sandwich_separable_mixed(const DensityOperator& rho, const FreeSetModel& f, const SolverConfig& cfg) {
  const CMatrix& r = rho.matrix();
  const CMatrix atoms = product_atoms(f.dims[0], f.dims[1], cfg.product_atoms, cfg.seed);
  const RVector design = design_polish(r, atoms, cfg.polish_iters, {}, cfg.exec);
  const ScalingCertificate dcert = certify_scaling(r, atoms, design, cfg.exec);
  const double stop_at = dcert.ok ? dcert.t * (1.0 - 0.25 * cfg.gap_tol) : std::numeric_limits<double>::infinity();
  const CutLoop loop = run_cuts(r, atoms, cfg, default_seeds(r), stop_at);
  const ScalingCertificate lcert = certify_scaling(r, atoms, loop.c, cfg.exec);
  SolverReport rep;
  rep.truncation_tail = rho.tail_weight();
  rep.cuts = static_cast<int>(loop.cuts.size());
  rep.iterations = 1;
  rep.lp_value = loop.lp_value;
  rep.termination = loop.termination;
  if (cfg.emit_cuts) rep.cut_log = loop.cuts;
  const ScalingCertificate& best = (lcert.ok && (!dcert.ok || lcert.t < dcert.t)) ? lcert : dcert;
  if (best.ok) {
    rep.bounds.upper = best.t;
    rep.bounds.upper_method = &best == &lcert ? Method::CuttingPlane : Method::FeasiblePoint;
    rep.weights = best.weights;
    rep.min_eigenvalue = best.min_eigenvalue;
  }
  Witness cand;
  cand.op = witness_from_cuts(loop, rho.dim());
  const DualResult dual = dual_lower(r, f, cand);
  rep.bounds.lower = std::min(dual.bounds.lower, rep.bounds.upper);
  rep.bounds.lower_method = dual.bounds.lower_method;
  rep.bounds.lower_certified = dual.bounds.lower_certified;
  rep.witness = dual.witness;
  rep.bounds.note = "upper bound over a sampled product-state discretization";
  if (!rep.bounds.lower_certified) rep.bounds.note += "; lower bound uses a heuristic free value";
  rep.bounds.check();
  return rep;
}

bool is_pure(const CMatrix& r) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(r), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(r.rows() - 1) >= 1.0 - 1e-12;
}

}  // namespace

SolverReport sandwich(const DensityOperator& rho, const FreeSetModel& f, const SolverConfig& config) {
  switch (f.kind) {
    case FreeKind::Incoherent: {
      if (rho.bipartite()) throw Error(ErrorKind::ShapeMismatch, "incoherent model expects a single system");
      SolverReport rep = incoherent_exact(rho.matrix(), config.seed);
      rep.truncation_tail = rho.tail_weight();
      return rep;
    }
    case FreeKind::Classical:
      if (rho.bipartite()) throw Error(ErrorKind::ShapeMismatch, "classical model expects a single mode");
      return sandwich_classical(rho, f, config);
    case FreeKind::Separable: {
      if (!rho.bipartite()) throw Error(ErrorKind::NotBipartite, "separable model needs two subsystems");
      if (f.dims != rho.dims()) throw Error(ErrorKind::ShapeMismatch, "model dims do not match the state");
      if (is_pure(rho.matrix())) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(rho.matrix()));
        const FockVector psi(rho.dims(), es.eigenvectors().col(rho.dim() - 1), rho.tail_weight());
        return separable_pure(psi, rho.dim() <= 1600);
      }
      return sandwich_separable_mixed(rho, f, config);
    }
  }
  throw Error(ErrorKind::InvalidParameter, "unknown free set");
}

}  // namespace cvr
