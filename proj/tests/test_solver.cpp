#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cvr/solver.hpp"
#include "generators.hpp"

using namespace cvr;

namespace {

const double kE = std::exp(1.0);

// max eigenvalue of sigma^{-1/2} rho sigma^{-1/2} minimized over sigma = diag(q, 1 - q).
double two_level_oracle(const CMatrix& rho) {
  double best = 1e300;
  const int n = 200000;
  for (int i = 1; i < n; ++i) {
    const double q = static_cast<double>(i) / n;
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    s(0, 0) = 1.0 / std::sqrt(q);
    s(1, 1) = 1.0 / std::sqrt(1.0 - q);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(s * rho * s);
    best = std::min(best, es.eigenvalues()(1));
  }
  return best;
}

CMatrix grid_atoms(const CoherentGrid& g, int dim) {
  const auto pts = g.points();
  return kernels::coherent_columns(pts, dim);
}

double incoherent_by_cuts(const CMatrix& rho) {
  SolverConfig cfg;
  cfg.cut_tol = 1e-11;
  return primal_upper(rho, CMatrix::Identity(rho.rows(), rho.cols()), cfg).bounds.upper;
}

}  // namespace

TEST_CASE("primal upper bound on diagonal inputs with basis atoms is one") {
  gen::Rng rng(40);
  const int d = 6;
  const RVector p = gen::probabilities(rng, d);
  const CMatrix rho = p.cast<cplx>().asDiagonal();
  const SolverReport rep = primal_upper(rho, CMatrix::Identity(d, d));
  CHECK(std::abs(rep.bounds.upper - 1.0) < 1e-9);
}

TEST_CASE("maximally coherent qubit has robustness two") {
  CVector psi(2);
  psi << 1.0, 1.0;
  psi /= std::sqrt(2.0);
  const CMatrix rho = psi * psi.adjoint();
  const double oracle = two_level_oracle(rho);
  const SolverReport rep = primal_upper(rho, CMatrix::Identity(2, 2));
  CHECK(std::abs(oracle - 2.0) < 1e-6);
  CHECK(std::abs(rep.bounds.upper - 2.0) < 1e-6);
  CHECK(std::abs(incoherent_exact(rho).bounds.lower - 2.0) < 1e-6);
}

TEST_CASE("two-level coherence against the diagonal scan") {
  gen::Rng rng(41);
  for (int t = 0; t < 5; ++t) {
    const CMatrix rho = gen::density(rng, 2, gen::integer(rng, 1, 2));
    const double oracle = two_level_oracle(rho);
    const SolverReport ex = incoherent_exact(rho);
    CHECK(std::abs(ex.bounds.lower - oracle) < 1e-6);
    CHECK(std::abs(ex.bounds.upper - oracle) < 1e-6);
  }
}

TEST_CASE("Fock |1> on a radius 5 grid") {
  const DensityOperator rho = make_density(spec::Fock{1}, 20);
  CoherentGrid g;
  g.radius = 5.0;
  SolverConfig cfg;
  cfg.cut_tol = 1e-6;
  cfg.max_cuts = 200;
  const SolverReport rep = primal_upper(rho.matrix(), grid_atoms(g, 20), cfg);
  CHECK(rep.bounds.upper >= kE - 1e-9);
  CHECK(rep.bounds.upper <= kE + 0.05);
  if (rep.termination == Termination::Converged) CHECK(rep.min_eigenvalue >= -cfg.cut_tol);

  Witness cand = rep.witness;
  const DualResult dual = dual_lower(rho.matrix(), FreeSetModel::classical(g), cand);
  CHECK(dual.bounds.lower >= kE - 0.05);
  CHECK(dual.bounds.lower <= rep.bounds.upper + 1e-6);
  dual.witness.check();
}

TEST_CASE("support outside the atoms is infeasible") {
  const DensityOperator rho = make_density(spec::Fock{1}, 5);
  CMatrix atoms = CMatrix::Zero(5, 1);
  atoms(0, 0) = 1.0;
  try {
    primal_upper(rho.matrix(), atoms);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("dual lower bounds") {
  gen::Rng rng(42);
  Witness id;
  id.op = CMatrix::Identity(6, 6);
  const CMatrix rho = gen::density(rng, 6, 3);
  CHECK(std::abs(dual_lower(rho, FreeSetModel::incoherent(), id).bounds.lower - 1.0) < 1e-12);
  CHECK(std::abs(dual_lower(rho, FreeSetModel::classical(), id).bounds.lower - 1.0) < 1e-9);

  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0;
  Witness bell;
  bell.op = v * v.adjoint();
  const CMatrix rb = 0.5 * v * v.adjoint();
  const DualResult d = dual_lower(rb, FreeSetModel::separable(2, 2), bell);
  CHECK(std::abs(d.bounds.lower - 2.0) < 1e-9);
  CHECK(d.bounds.lower_certified);
  CHECK(std::abs(d.witness.free_value.value - 1.0) < 1e-9);

  CMatrix bad = CMatrix::Identity(3, 3);
  bad(0, 0) = -1.0;
  Witness neg;
  neg.op = bad;
  CHECK_THROWS_AS(dual_lower(CMatrix::Identity(3, 3) / 3.0, FreeSetModel::incoherent(), neg), Error);
}

TEST_CASE("feasible points") {
  const HilbertGallery g = hilbert_gallery(20);
  const RVector sdiag = g.weights.cwiseAbs2() / g.normalization;
  CHECK(feasible_point_upper(g.rho_plus, sdiag, 2.0).accepted);
  CHECK(feasible_point_upper(g.rho_plus.to_dense().matrix(),
                             [&] {
                               CMatrix s = CMatrix::Zero(400, 400);
                               for (int n = 0; n < 20; ++n) s(n * 20 + n, n * 20 + n) = sdiag(n);
                               return s;
                             }(),
                             2.0)
            .accepted);
  const CMatrix th = make_density(spec::Thermal{0.4}, 30).matrix();
  CHECK(feasible_point_upper(th, th, 1.0).accepted);
  const FeasibleCheck rej = feasible_point_upper(make_density(spec::Fock{1}, 4).matrix(), make_density(spec::Fock{0}, 4).matrix(), 5.0);
  CHECK_FALSE(rej.accepted);
  CHECK(rej.min_eigenvalue < -0.5);
}

TEST_CASE("sandwich examples") {
  const SolverReport f1 = sandwich(make_density(spec::Fock{1}, 40), FreeSetModel::classical());
  CHECK(f1.bounds.lower >= kE - 1e-2);
  CHECK(f1.bounds.upper <= kE + 1e-2);
  CHECK(f1.bounds.lower <= f1.bounds.upper);
  CHECK(f1.iterations <= 4);

  FreeSetModel wide = FreeSetModel::classical();
  wide.grid.radius = std::ceil(std::sqrt(60.0)) + 2.0;
  const SolverReport sq = sandwich(make_density(spec::Squeezed{0.5}, 60, TruncationPolicy{1e-6}), wide);
  CHECK(std::abs(sq.bounds.lower - std::exp(0.5)) <= 0.01 * std::exp(0.5));
  CHECK(std::abs(sq.bounds.upper - std::exp(0.5)) <= 0.01 * std::exp(0.5));

  const HilbertGallery g = hilbert_gallery(100);
  const SolverReport om = sandwich(g.omega_plus, FreeSetModel::incoherent());
  CHECK(om.bounds.upper <= 2.0 + 1e-6);
}

TEST_CASE("converged reports respect the gap tolerance") {
  for (int n : {1, 2}) {
    SolverConfig cfg;
    cfg.gap_tol = 1e-2;
    const SolverReport rep = sandwich(make_density(spec::Fock{n}, 30), FreeSetModel::classical(), cfg);
    if (rep.termination == Termination::Converged) CHECK(rep.bounds.relative_gap() <= cfg.gap_tol);
    rep.bounds.check();
  }
}

TEST_CASE("pure bipartite states") {
  gen::Rng rng(43);
  for (int t = 0; t < 10; ++t) {
    const int k = gen::integer(rng, 1, 5);
    std::vector<double> mu;
    for (int i = 0; i < k; ++i) mu.push_back(gen::uniform(rng, 0.05, 1.0));
    const FockVector psi = make_pure(spec::Schmidt{mu}, 6);
    const SchmidtDecomposition sd = schmidt_decompose(psi);
    const double cf = std::pow(sd.coefficients.sum(), 2);
    const SolverReport rep = separable_pure(psi);
    CHECK(std::abs(rep.bounds.lower - cf) < 1e-8);
    CHECK(std::abs(rep.bounds.upper - cf) < 1e-8);
    const CMatrix noise = separable_noise_state(sd, 6, 6);
    CHECK(std::abs(noise.trace().real() - 1.0) < 1e-12);
  }
  for (int t = 0; t < 10; ++t) {
    const FockVector psi({3, 4}, gen::unit_vector(rng, 12));
    const SchmidtDecomposition sd = schmidt_decompose(psi);
    const Witness w = cauchy_schwarz_witness(sd, 3, 4);
    const double at = evaluate_maximizer(w.op, FreeSetModel::separable(3, 4), w.free_value.maximizer);
    CHECK(std::abs(at - w.free_value.value) < 1e-9);
    CHECK(std::abs(w.expectation(psi.projector().matrix()) - std::pow(sd.coefficients.sum(), 2)) < 1e-9);
  }
}

TEST_CASE("the exact incoherent solver agrees with cutting planes") {
  gen::Rng rng(44);
  for (int t = 0; t < 15; ++t) {
    const int d = gen::integer(rng, 2, 8);
    const CMatrix rho = gen::density(rng, d, gen::integer(rng, 1, d));
    const SolverReport ex = incoherent_exact(rho);
    const double cuts = incoherent_by_cuts(rho);
    CHECK(ex.bounds.lower <= ex.bounds.upper + 1e-8);
    CHECK(ex.bounds.upper - ex.bounds.lower < 1e-6);
    CHECK(std::abs(cuts - ex.bounds.upper) < 1e-6);
  }
}

TEST_CASE("weak duality across free sets") {
  gen::Rng rng(45);
  for (int t = 0; t < 6; ++t) {
    const int d = gen::integer(rng, 3, 8);
    const DensityOperator rho({d}, gen::density(rng, d, gen::integer(rng, 1, 3)));
    for (const FreeSetModel& f : {FreeSetModel::incoherent(), FreeSetModel::classical()}) {
      const SolverReport rep = sandwich(rho, f);
      CHECK(rep.bounds.lower <= rep.bounds.upper + 1e-6);
      CHECK(rep.bounds.lower >= 1.0 - 1e-9);
    }
  }
  for (int t = 0; t < 4; ++t) {
    const DensityOperator rho({2, 3}, gen::density(rng, 6, gen::integer(rng, 2, 4)));
    const SolverReport rep = sandwich(rho, FreeSetModel::separable(2, 3));
    CHECK(rep.bounds.lower <= rep.bounds.upper + 1e-6);
  }
}

TEST_CASE("convexity of the incoherent robustness") {
  gen::Rng rng(46);
  for (int t = 0; t < 40; ++t) {
    const int d = gen::integer(rng, 2, 8);
    const CMatrix a = gen::density(rng, d, gen::integer(rng, 1, d));
    const CMatrix b = gen::density(rng, d, gen::integer(rng, 1, d));
    const double p = gen::uniform(rng);
    const double mix = incoherent_exact(p * a + (1 - p) * b).bounds.lower;
    const double sep = p * incoherent_exact(a).bounds.upper + (1 - p) * incoherent_exact(b).bounds.upper;
    CHECK(mix <= sep + 1e-6);
  }
}

TEST_CASE("monotonicity under incoherent channels") {
  gen::Rng rng(47);
  for (int t = 0; t < 40; ++t) {
    const int d = gen::integer(rng, 2, 8);
    const DensityOperator rho({d}, gen::density(rng, d, gen::integer(rng, 1, d)));
    const auto kraus = gen::incoherent_kraus(rng, d);
    const DensityOperator out = apply_channel(rho, kraus);
    CHECK(incoherent_exact(out.matrix()).bounds.lower <= incoherent_exact(rho.matrix()).bounds.upper + 1e-6);
  }
}

TEST_CASE("faithfulness on coherent mixtures") {
  gen::Rng rng(48);
  const FreeSetModel f = FreeSetModel::classical();
  std::vector<cplx> near;
  for (cplx z : f.grid.points())
    if (std::abs(z) <= 1.5) near.push_back(z);
  for (int t = 0; t < 20; ++t) {
    const int terms = gen::integer(rng, 1, 4);
    const RVector p = gen::probabilities(rng, terms);
    CMatrix m = CMatrix::Zero(24, 24);
    for (int k = 0; k < terms; ++k) {
      const cplx z = near[static_cast<std::size_t>(gen::integer(rng, 0, static_cast<int>(near.size()) - 1))];
      const CVector v = coherent_amplitudes(z, 24).normalized();
      m += p(k) * v * v.adjoint();
    }
    SolverConfig cfg;
    cfg.gap_tol = 5e-5;
    const SolverReport rep = sandwich(DensityOperator({24}, m), f, cfg);
    CHECK(rep.bounds.upper <= 1.0 + 1e-4);
  }
  gen::Rng rng2(49);
  for (int t = 0; t < 20; ++t) {
    const int d = gen::integer(rng2, 2, 8);
    const RVector p = gen::probabilities(rng2, d);
    const SolverReport rep = incoherent_exact(p.cast<cplx>().asDiagonal().toDenseMatrix());
    CHECK(std::abs(rep.bounds.upper - 1.0) < 1e-9);
  }
}

TEST_CASE("sandwich is covariant under grid-preserving phase rotations") {
  const DensityOperator sq = make_density(spec::Squeezed{0.3}, 30);
  const double theta = 2.0 * M_PI * 5.0 / 64.0;
  CVector ph(30);
  for (int k = 0; k < 30; ++k) ph(k) = std::polar(1.0, theta * k);
  const CMatrix u = ph.asDiagonal();
  const DensityOperator rot({30}, u * sq.matrix() * u.adjoint());
  SolverConfig cfg;
  cfg.refinement_rounds = 0;
  const SolverReport a = sandwich(sq, FreeSetModel::classical(), cfg);
  const SolverReport b = sandwich(rot, FreeSetModel::classical(), cfg);
  CHECK(std::abs(a.bounds.upper - b.bounds.upper) < 1e-6);
  CHECK(std::abs(a.bounds.lower - b.bounds.lower) < 1e-6);
}
