#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cvr/discrimination.hpp"
#include "generators.hpp"

using namespace cvr;

namespace {

// sum_i p_i sum_k Tr[M_i K_k rho K_k^dag], contracted in the opposite order.
double kraus_oracle(const CMatrix& rho, const std::vector<double>& p, const std::vector<std::vector<CMatrix>>& kraus,
                    const std::vector<CMatrix>& povm) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (const CMatrix& k : kraus[i]) total += p[i] * (k.adjoint() * povm[i] * k * rho).trace().real();
  return total;
}

DiscriminationTask two_state_task() {
  DiscriminationTask t;
  t.probs = {0.5, 0.5};
  t.channels = {channel::Identity{}, channel::Identity{}};
  CMatrix m0 = CMatrix::Zero(2, 2), m1 = CMatrix::Zero(2, 2);
  m0(0, 0) = 1.0;
  m1(1, 1) = 1.0;
  t.povm = {m0, m1};
  return t;
}

}  // namespace

TEST_CASE("success probability examples") {
  DiscriminationTask t = two_state_task();
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  CHECK(p_success(rho, t) == doctest::Approx(0.5).epsilon(1e-15));

  CMatrix flip = CMatrix::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  t.channels[1] = channel::Kraus{{flip}};
  CHECK(p_success(rho, t) == doctest::Approx(1.0).epsilon(1e-15));

  CMatrix target = CMatrix::Zero(2, 2);
  target(1, 1) = 1.0;
  channel::Replacer rep;
  rep.target = target;
  t.channels[1] = rep;
  CHECK(p_success(rho, t) == doctest::Approx(1.0).epsilon(1e-15));
  t.validate();
}

TEST_CASE("success probability against explicit Kraus sums") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DiscriminationTask t = random_task(4, 3, derive_seed(99, s));
    t.validate();
    gen::Rng rng(s);
    const CMatrix rho = gen::density(rng, 4, gen::integer(rng, 1, 4));
    std::vector<std::vector<CMatrix>> kraus;
    for (const Channel& c : t.channels) kraus.push_back(std::get<channel::Kraus>(c).ops);
    const double oracle = kraus_oracle(rho, t.probs, kraus, t.povm);
    CHECK(std::abs(p_success(rho, t) - oracle) < 1e-12);
    const CMatrix a = effective_observable(t);
    CHECK(std::abs((a * rho).trace().real() - oracle) < 1e-12);
    CHECK(oracle >= -1e-12);
    CHECK(oracle <= 1.0 + 1e-12);
  }
}

TEST_CASE("random tasks are reproducible from their seed") {
  const DiscriminationTask a = random_task(5, 3, 17), b = random_task(5, 3, 17), c = random_task(5, 3, 18);
  const bool same = effective_observable(a) == effective_observable(b);
  const bool differs = effective_observable(a) != effective_observable(c);
  CHECK(same);
  CHECK(differs);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
}

TEST_CASE("replacer channels preserve trace") {
  gen::Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const int d = gen::integer(rng, 2, 8);
    channel::Replacer r;
    r.target = gen::density(rng, d, 2);
    const CMatrix rho = gen::density(rng, d, 3);
    const CMatrix out = cvr::apply(Channel{r}, rho);
    CHECK(std::abs(out.trace().real() - 1.0) < 1e-12);
    const CMatrix m = gen::psd(rng, d, 2);
    CHECK(std::abs((m * out).trace() - (cvr::apply_adjoint(Channel{r}, m) * rho).trace()) < 1e-12);
  }
}

TEST_CASE("optimal binary task invariants") {
  gen::Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const int d = gen::integer(rng, 2, 7);
    Witness w;
    w.op = gen::psd(rng, d, gen::integer(rng, 1, d));
    const DiscriminationTask task = optimal_binary_task(w);
    task.validate();
    const CMatrix rho = gen::density(rng, d, gen::integer(rng, 1, d));
    const double second = (task.povm[1] * cvr::apply(task.channels[1], rho)).trace().real();
    CHECK(std::abs(second) < 1e-12);
    const FreeSetModel f = FreeSetModel::incoherent();
    const AdvantageReport rep = advantage_ratio(rho, task, f);
    const double expected = (w.op * rho).trace().real() / free_value(w.op, f).value;
    CHECK(std::abs(rep.ratio - expected) < 1e-10 * std::max(1.0, expected));

    Witness scaled;
    scaled.op = gen::uniform(rng, 0.1, 20.0) * w.op;
    CHECK(std::abs(advantage_ratio(rho, optimal_binary_task(scaled), f).ratio - rep.ratio) < 1e-10 * rep.ratio);
  }
}

TEST_CASE("identity and Bell witnesses") {
  Witness id;
  id.op = CMatrix::Identity(6, 6);
  gen::Rng rng(6);
  const CMatrix rho = gen::density(rng, 6, 2);
  CHECK(advantage_ratio(rho, optimal_binary_task(id), FreeSetModel::incoherent()).ratio == doctest::Approx(1.0));
  CHECK(advantage_ratio(rho, optimal_binary_task(id), FreeSetModel::classical()).ratio == doctest::Approx(1.0).epsilon(1e-9));

  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0;
  Witness bell;
  bell.op = v * v.adjoint();
  const AdvantageReport rep = advantage_ratio(0.5 * bell.op, optimal_binary_task(bell), FreeSetModel::separable(2, 2));
  CHECK(rep.ratio == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.p_rho == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.p_free_best == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("advantage never exceeds the robustness") {
  gen::Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const int d = gen::integer(rng, 2, 6);
    const CMatrix rho = gen::density(rng, d, gen::integer(rng, 1, d));
    const SolverReport rob = incoherent_exact(rho);
    for (std::uint64_t k = 0; k < 10; ++k) {
      const DiscriminationTask task = random_task(d, gen::integer(rng, 2, 4), derive_seed(t, k));
      CHECK(advantage_ratio(rho, task, FreeSetModel::incoherent()).ratio <= rob.bounds.upper + 1e-8);
    }
    const double best = advantage_ratio(rho, optimal_binary_task(rob.witness), FreeSetModel::incoherent()).ratio;
    CHECK(std::abs(best - rob.bounds.lower) < 1e-8 * rob.bounds.lower);
  }
}

TEST_CASE("degenerate witnesses are rejected") {
  for (const CMatrix& op : {CMatrix(), CMatrix(-CMatrix::Identity(3, 3)), CMatrix(CMatrix::Zero(3, 3))}) {
    Witness w;
    w.op = op;
    try {
      optimal_binary_task(w);
      FAIL("expected ZeroWitness");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ZeroWitness);
    }
  }
}

TEST_CASE("task validation") {
  auto kind_of = [](const DiscriminationTask& t) {
    try {
      t.validate();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvariantViolation;
  };
  DiscriminationTask t = two_state_task();
  t.probs = {0.6, 0.5};
  CHECK(kind_of(t) == ErrorKind::InvalidParameter);
  t = two_state_task();
  t.probs.push_back(0.0);
  CHECK(kind_of(t) == ErrorKind::ShapeMismatch);
  t = two_state_task();
  t.povm[0](0, 0) = 1.5;
  t.povm[1](0, 0) = -0.5;
  CHECK(kind_of(t) == ErrorKind::NotPSD);
  t = two_state_task();
  t.povm[1] *= 0.5;
  CHECK(kind_of(t) == ErrorKind::InvalidParameter);
  t = two_state_task();
  t.channels[0] = channel::Kraus{{0.5 * CMatrix::Identity(2, 2)}};
  CHECK(kind_of(t) == ErrorKind::NotTracePreserving);
  CHECK_THROWS_AS(p_success(CMatrix::Identity(3, 3) / 3.0, two_state_task()), Error);
}
