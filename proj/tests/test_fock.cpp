#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "cvr/fock.hpp"
#include "cvr/measures.hpp"
#include "generators.hpp"

using namespace cvr;

namespace {

CMatrix expm_generator(cplx alpha, int dim) {
  const CMatrix a = annihilation(dim);
  const CMatrix g = alpha * a.adjoint() - std::conj(alpha) * a;
  return g.exp();
}

CMatrix density_of(const State& s) { return to_density(s).matrix(); }

void check_density_invariants(const CMatrix& m) {
  CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(std::abs(m.trace().real() - 1.0) <= 1e-9);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  CHECK(es.eigenvalues()(0) >= -1e-9);
}

}  // namespace

TEST_CASE("vacuum and Fock amplitudes") {
  const FockVector vac = make_pure(spec::Coherent{0.0}, 10);
  CHECK(std::abs(vac.amplitudes()(0) - 1.0) < 1e-15);
  CHECK(vac.amplitudes().tail(9).norm() == 0.0);
  const FockVector f2 = make_pure(spec::Fock{2}, 10);
  for (int k = 0; k < 10; ++k) CHECK(std::abs(f2.amplitudes()(k)) == (k == 2 ? 1.0 : 0.0));
}

TEST_CASE("squeezed amplitudes agree with the exponentiated generator") {
  const double r = 0.5;
  const FockVector psi = make_pure(spec::Squeezed{r}, 40);
  CHECK(std::abs(psi.amplitudes()(0).real() - 1.0 / std::sqrt(std::cosh(r))) < 1e-7);
  CHECK(std::abs(psi.amplitudes()(0).real() - 0.94171) < 1e-5);
  for (int k = 1; k < 40; k += 2) CHECK(std::abs(psi.amplitudes()(k)) == 0.0);

  const int big = 160;
  const CMatrix a = annihilation(big);
  const CMatrix g = 0.5 * r * (a * a - a.adjoint() * a.adjoint());
  const CVector ref = g.exp().col(0);
  const CVector amp = squeezed_amplitudes(r, 40);
  CHECK((amp - ref.head(40)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("squeeze operator matches the matrix exponential on a low block") {
  const double r = 0.3;
  const int big = 160;
  const CMatrix a = annihilation(big);
  const CMatrix ref = (0.5 * r * (a * a - a.adjoint() * a.adjoint())).exp();
  const CMatrix s = squeeze_operator(r, 20);
  CHECK((s - ref.topLeftCorner(20, 20)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("phase-randomized coherent state against theta quadrature") {
  const int dim = 30;
  const DensityOperator rho = make_density(spec::PhaseRandomizedCoherent{1.0}, dim);
  const int m = 97;
  CMatrix quad = CMatrix::Zero(dim, dim);
  for (int j = 0; j < m; ++j) {
    const CVector v = coherent_amplitudes(std::polar(1.0, 2.0 * M_PI * j / m), dim);
    quad += v * v.adjoint() / static_cast<double>(m);
  }
  CHECK((rho.matrix() - quad).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(rho.matrix()(1, 1).real() - std::exp(-1.0)) < 1e-12);
}

TEST_CASE("displacement operator") {
  CHECK((displacement_operator(0.0, 8) - CMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(displacement_operator(1.0, 10)(0, 0) - std::exp(-0.5)) < 1e-14);
  CHECK(std::abs(displacement_operator(1.0, 10)(0, 0).real() - 0.60653) < 1e-5);

  const cplx alpha(0.7, -0.4);
  const CMatrix ref = expm_generator(alpha, 140);
  CHECK((displacement_operator(alpha, 20) - ref.topLeftCorner(20, 20)).cwiseAbs().maxCoeff() < 1e-10);

  gen::Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const cplx b = gen::amplitude(rng, 1.5);
    const CMatrix p = displacement_operator(b, 60) * displacement_operator(-b, 60);
    CHECK((p - CMatrix::Identity(60, 60)).topLeftCorner(31, 31).cwiseAbs().maxCoeff() < 1e-6);
  }
  // At |alpha| = 2 the spread of D(alpha)|n> reaches level 60 from n = 26 on.
  const cplx b2 = std::polar(2.0, 0.3);
  const CMatrix p2 = displacement_operator(b2, 60) * displacement_operator(-b2, 60) - CMatrix::Identity(60, 60);
  CHECK(p2.topLeftCorner(26, 26).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(p2.topLeftCorner(31, 31).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("Schmidt decompositions") {
  CVector bell = CVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const SchmidtDecomposition sb = schmidt_decompose(bell, 2, 2);
  REQUIRE(sb.coefficients.size() >= 2);
  CHECK(std::abs(sb.coefficients(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(sb.coefficients(1) - 1.0 / std::sqrt(2.0)) < 1e-12);

  CVector prod = CVector::Zero(4);
  prod(1) = 1.0;
  const SchmidtDecomposition sp = schmidt_decompose(prod, 2, 2);
  CHECK(std::abs(sp.coefficients(0) - 1.0) < 1e-12);
  for (Eigen::Index k = 1; k < sp.coefficients.size(); ++k) CHECK(sp.coefficients(k) < 1e-12);

  const FockVector tmsv = make_pure(spec::TwoModeSqueezed{0.5}, 20);
  const SchmidtDecomposition st = schmidt_decompose(tmsv);
  for (int n = 0; n < 10; ++n) CHECK(std::abs(st.coefficients(n) - std::sqrt(0.75) * std::pow(0.5, n)) < 1e-9);
  CHECK(std::abs(st.coefficients(0) - 0.86603) < 1e-5);

  CHECK_THROWS_AS(schmidt_decompose(CVector::Zero(5), 2, 2), Error);
}

TEST_CASE("Schmidt reconstruction property") {
  gen::Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const int da = gen::integer(rng, 1, 6), db = gen::integer(rng, 1, 6);
    const CVector psi = gen::unit_vector(rng, da * db);
    const SchmidtDecomposition sd = schmidt_decompose(psi, da, db);
    CHECK((sd.reconstruct() - psi).norm() < 1e-9);
    const double s2 = sd.coefficients.squaredNorm();
    CHECK(s2 <= 1.0 + 1e-9);
    CHECK(s2 >= 1.0 - 1e-9);
    for (Eigen::Index k = 1; k < sd.coefficients.size(); ++k) CHECK(sd.coefficients(k) <= sd.coefficients(k - 1));
    const Eigen::Index k = sd.coefficients.size();
    CHECK((sd.left.adjoint() * sd.left - CMatrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((sd.right.adjoint() * sd.right - CMatrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("partial transpose and trace norm") {
  CMatrix diag = CMatrix::Zero(9, 9);
  diag(0, 0) = 0.5;
  diag(4, 4) = 0.3;
  diag(8, 8) = 0.2;
  CHECK((partial_transpose(diag, 3, 3) - diag).norm() == 0.0);
  CHECK(std::abs(trace_norm(partial_transpose(diag, 3, 3)) - 1.0) < 1e-12);

  CVector bell = CVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const DensityOperator rho({2, 2}, bell * bell.adjoint());
  const CMatrix pt = partial_transpose(rho);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(pt);
  CHECK(std::abs(es.eigenvalues().cwiseAbs().sum() - 2.0) < 1e-12);
  CHECK(std::abs(trace_norm(pt) - 2.0) < 1e-12);
  CHECK(std::abs(trace_norm(CMatrix::Identity(5, 5)) - 5.0) < 1e-12);

  const DensityOperator single = make_density(spec::Fock{1}, 4);
  CHECK_THROWS_AS(partial_transpose(single), Error);
}

TEST_CASE("Hilbert gallery") {
  const CMatrix h2 = hilbert_matrix(2);
  CHECK(h2(0, 1).real() == -1.0);
  CHECK(h2(1, 0).real() == 1.0);
  CHECK(h2(0, 0).real() == 0.0);
  const RVector w2 = gallery_weights(2);
  CHECK(std::abs(w2(0) - 1.0 / std::log(2.0)) < 1e-15);
  CHECK(std::abs(w2(1) - 1.0 / (std::sqrt(2.0) * std::log(3.0))) < 1e-15);
  CHECK_THROWS_AS(hilbert_gallery(3), Error);

  for (int dim : {4, 17, 50, 200}) {
    const HilbertGallery g = hilbert_gallery(dim);
    const CMatrix d2 = g.weights.cwiseAbs2().asDiagonal().toDenseMatrix().cast<cplx>();
    const CMatrix sum = g.omega_plus.matrix() + g.omega_minus.matrix();
    CHECK((sum - 2.0 * d2 / g.normalization).cwiseAbs().maxCoeff() == 0.0);
    for (const CMatrix* m : {&g.omega_plus.matrix(), &g.omega_minus.matrix()}) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(*m);
      CHECK(es.eigenvalues()(0) >= -1e-10);
    }
  }

  const HilbertGallery small = hilbert_gallery(6);
  const CMatrix dense = small.rho_plus.to_dense().matrix();
  CHECK(dense.rows() == 36);
  for (int n = 0; n < 6; ++n)
    for (int m = 0; m < 6; ++m) CHECK(dense(n * 6 + n, m * 6 + m) == small.omega_plus.matrix()(n, m));
}

TEST_CASE("negativity of the gallery grows with truncation") {
  double prev = -1.0;
  for (int dim : {50, 100, 200, 400}) {
    const double t = 2.0 * negativity(hilbert_gallery(dim).rho_plus) + 1.0;
    CHECK(t > prev);
    prev = t;
  }
  for (int dim : {8, 30}) {
    const HilbertGallery g = hilbert_gallery(dim);
    CHECK(std::abs(negativity(g.rho_minus) - negativity(g.rho_minus.to_dense())) < 1e-9);
  }
}

TEST_CASE("tensor, dephasing and channels") {
  const DensityOperator a = make_density(spec::Fock{0}, 2);
  const DensityOperator b = make_density(spec::Fock{1}, 2);
  const DensityOperator ab = tensor(a, b);
  CHECK(ab.matrix()(1, 1).real() == 1.0);
  CHECK(ab.matrix().cwiseAbs().sum() == 1.0);

  const DensityOperator th = make_density(spec::Thermal{0.7}, 60);
  CHECK(dephase_diag(th).matrix() == th.matrix());

  gen::Rng rng(3);
  const DensityOperator r({6}, gen::density(rng, 6, 3));
  const std::vector<CMatrix> id{CMatrix::Identity(6, 6)};
  CHECK(apply_channel(r, id).matrix() == r.matrix());
  const std::vector<CMatrix> half{0.5 * CMatrix::Identity(6, 6)};
  CHECK_THROWS_AS(apply_channel(r, half), Error);
  const std::vector<CMatrix> inc = gen::incoherent_kraus(rng, 6);
  check_density_invariants(apply_channel(r, inc).matrix());
}

TEST_CASE("constructor invariants over random parameters") {
  gen::Rng rng(17);
  const TruncationPolicy loose{1e-6};
  for (int t = 0; t < 40; ++t) {
    const int dim = gen::integer(rng, 30, 50);
    const std::vector<StateSpec> specs{
        spec::Fock{gen::integer(rng, 0, 10)},
        spec::Coherent{gen::amplitude(rng, 2.0)},
        spec::Squeezed{gen::uniform(rng, -0.6, 0.6)},
        spec::Cat{gen::amplitude(rng, 2.0) + 0.1, gen::uniform(rng) < 0.5},
        spec::Thermal{gen::uniform(rng, 0.0, 1.0)},
        spec::PhaseRandomizedCoherent{gen::uniform(rng, 0.0, 3.0)},
    };
    for (const StateSpec& s : specs) {
      const State st = make_state(s, dim, loose);
      if (const auto* v = std::get_if<FockVector>(&st)) {
        CHECK(std::abs(v->amplitudes().squaredNorm() - 1.0) <= 1e-12);
        CHECK(v->tail_weight() >= 0.0);
      }
      check_density_invariants(density_of(st));
    }
    const double lambda = gen::uniform(rng, 0.0, 0.4);
    const State tm = make_state(spec::TwoModeSqueezed{lambda}, 12, loose);
    check_density_invariants(density_of(tm));
  }
  CHECK_THROWS_AS(make_state(spec::Thermal{-0.1}, 10), Error);
  CHECK_THROWS_AS(make_state(spec::Coherent{3.0}, 10), Error);
  CHECK_THROWS_AS(make_state(spec::Fock{0}, 1), Error);
}

TEST_CASE("doubling the truncation moves overlaps by less than ten tails") {
  gen::Rng rng(23);
  const TruncationPolicy loose{1e-4};
  for (int t = 0; t < 30; ++t) {
    const cplx a = gen::amplitude(rng, 2.0), b = gen::amplitude(rng, 2.0);
    const int n = gen::integer(rng, 14, 24);
    const FockVector a1 = make_pure(spec::Coherent{a}, n, loose), b1 = make_pure(spec::Coherent{b}, n, loose);
    const FockVector a2 = make_pure(spec::Coherent{a}, 2 * n, loose), b2 = make_pure(spec::Coherent{b}, 2 * n, loose);
    const double o1 = std::abs(a1.amplitudes().dot(b1.amplitudes()));
    const double o2 = std::abs(a2.amplitudes().dot(b2.amplitudes()));
    const double tail = std::max(a1.tail_weight(), b1.tail_weight());
    CHECK(std::abs(o1 - o2) <= 10.0 * tail + 1e-14);
    CHECK(std::abs(coherent_tail(a, n) - a1.tail_weight()) <= 1e-12);
  }
}
