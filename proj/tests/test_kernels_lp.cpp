#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>
#include <tuple>

#include <omp.h>

#include "cvr/kernels.hpp"
#include "cvr/lp.hpp"
#include "generators.hpp"

using namespace cvr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<cplx> random_points(gen::Rng& rng, int n, double radius) {
  std::vector<cplx> pts;
  for (int i = 0; i < n; ++i) pts.push_back(gen::amplitude(rng, radius));
  return pts;
}

// Enumerates every basic solution of {M c >= b, c >= 0} and returns the best objective.
double vertex_oracle(const MatrixXd& m, const VectorXd& b) {
  const int rows = static_cast<int>(m.rows()), n = static_cast<int>(m.cols());
  MatrixXd a(rows + n, n);
  VectorXd rhs(rows + n);
  a << m, MatrixXd::Identity(n, n);
  rhs << b, VectorXd::Zero(n);
  const int total = rows + n;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(n));
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      MatrixXd sub(n, n);
      VectorXd sr(n);
      for (int i = 0; i < n; ++i) {
        sub.row(i) = a.row(pick[static_cast<std::size_t>(i)]);
        sr(i) = rhs(pick[static_cast<std::size_t>(i)]);
      }
      Eigen::FullPivLU<MatrixXd> lu(sub);
      if (lu.rank() < n) return;
      const VectorXd c = lu.solve(sr);
      if ((a * c - rhs).minCoeff() < -1e-9) return;
      best = std::min(best, c.sum());
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("coherent columns against direct amplitudes") {
  gen::Rng rng(1);
  const auto pts = random_points(rng, 37, 3.0);
  const CMatrix cols = kernels::coherent_columns(pts, 25, kernels::Exec::Serial);
  for (std::size_t j = 0; j < pts.size(); ++j)
    CHECK((cols.col(static_cast<Eigen::Index>(j)) - coherent_amplitudes(pts[j], 25)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("parallel kernels agree with the serial reference") {
  gen::Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    const int dim = gen::integer(rng, 5, 40);
    const auto pts = random_points(rng, gen::integer(rng, 1, 3000), 5.0);
    const CMatrix s = kernels::coherent_columns(pts, dim, kernels::Exec::Serial);
    CHECK(s == kernels::coherent_columns(pts, dim, kernels::Exec::Parallel));
    const CMatrix w = gen::psd(rng, dim, 3);
    const RVector qs = kernels::quadratic_forms(w, s, kernels::Exec::Serial);
    CHECK((qs - kernels::quadratic_forms(w, s, kernels::Exec::Parallel)).cwiseAbs().maxCoeff() <= 1e-12 * w.norm());
    const CVector v = gen::unit_vector(rng, dim);
    const RVector os = kernels::overlaps_abs2(v, s, kernels::Exec::Serial);
    CHECK((os - kernels::overlaps_abs2(v, s, kernels::Exec::Parallel)).cwiseAbs().maxCoeff() <= 1e-13);
    RVector c = RVector::Zero(s.cols());
    for (Eigen::Index j = 0; j < c.size(); ++j)
      if (gen::uniform(rng) < 0.3) c(j) = gen::uniform(rng);
    const CMatrix gs = kernels::weighted_gram(s, c, kernels::Exec::Serial);
    CHECK((gs - kernels::weighted_gram(s, c, kernels::Exec::Parallel)).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, c.sum()));
  }
}

TEST_CASE("parallel kernels are bitwise independent of the thread count") {
  gen::Rng rng(6);
  const int dim = 33;
  const auto pts = random_points(rng, 2500, 5.0);
  const CMatrix w = gen::psd(rng, dim, 5);
  const CVector v = gen::unit_vector(rng, dim);
  RVector c(static_cast<Eigen::Index>(pts.size()));
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = gen::uniform(rng) < 0.5 ? 0.0 : gen::uniform(rng);
  auto run = [&] {
    const CMatrix a = kernels::coherent_columns(pts, dim);
    return std::make_tuple(a, kernels::quadratic_forms(w, a), kernels::overlaps_abs2(v, a), kernels::weighted_gram(a, c));
  };
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = run();
  omp_set_num_threads(std::max(saved, 4));
  const auto many = run();
  omp_set_num_threads(saved);
  CHECK(std::get<0>(one) == std::get<0>(many));
  CHECK(std::get<1>(one) == std::get<1>(many));
  CHECK(std::get<2>(one) == std::get<2>(many));
  CHECK(std::get<3>(one) == std::get<3>(many));
}

TEST_CASE("kernel values match naive formulas") {
  gen::Rng rng(3);
  const int dim = 12;
  const auto pts = random_points(rng, 50, 2.0);
  const CMatrix atoms = kernels::coherent_columns(pts, dim);
  const CMatrix w = gen::psd(rng, dim, 4);
  const CVector v = gen::unit_vector(rng, dim);
  RVector c(atoms.cols());
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = gen::uniform(rng);
  const RVector q = kernels::quadratic_forms(w, atoms);
  const RVector o = kernels::overlaps_abs2(v, atoms);
  CMatrix g = CMatrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    CHECK(std::abs(q(j) - (atoms.col(j).adjoint() * w * atoms.col(j))(0, 0).real()) < 1e-12);
    CHECK(std::abs(o(j) - std::norm(v.dot(atoms.col(j)))) < 1e-12);
    g += c(j) * atoms.col(j) * atoms.col(j).adjoint();
  }
  CHECK((g - kernels::weighted_gram(atoms, c)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("covering LP matches vertex enumeration and strong duality") {
  gen::Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const int n = gen::integer(rng, 1, 4), rows = gen::integer(rng, 1, 5);
    MatrixXd m(rows, n);
    VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = gen::uniform(rng) < 0.2 ? 0.0 : gen::uniform(rng, 0.0, 2.0);
      if (m.row(i).maxCoeff() == 0.0) m(i, 0) = 1.0;
      b(i) = gen::uniform(rng, -0.2, 1.0);
    }
    CoveringLP lp(n);
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      lp.add_row(m.row(i).transpose(), b(i));
      REQUIRE(lp.solve() == CoveringLP::Status::Optimal);
      CHECK(lp.objective() >= prev - 1e-12);
      prev = lp.objective();
    }
    const double oracle = std::max(0.0, vertex_oracle(m, b));
    CHECK(std::abs(lp.objective() - oracle) <= 1e-9 * std::max(1.0, oracle));
    const VectorXd c = lp.primal(), y = lp.dual();
    CHECK(c.minCoeff() >= -1e-12);
    CHECK((m * c - b).minCoeff() >= -1e-9);
    CHECK(y.minCoeff() >= -1e-12);
    CHECK((m.transpose() * y).maxCoeff() <= 1.0 + 1e-9);
    CHECK(std::abs(b.dot(y) - lp.objective()) <= 1e-9 * std::max(1.0, oracle));
  }
}

TEST_CASE("covering LP detects infeasibility") {
  CoveringLP lp(2);
  lp.add_row(VectorXd::Ones(2), 1.0);
  CHECK(lp.solve() == CoveringLP::Status::Optimal);
  lp.add_row(VectorXd::Zero(2), 0.5);
  CHECK(lp.solve() == CoveringLP::Status::Infeasible);
}
