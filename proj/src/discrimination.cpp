#include "cvr/discrimination.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace cvr {

namespace {
template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;
}  // namespace

const char* channel_name(const Channel& c) {
  return std::visit(overloaded{[](const channel::Identity&) { return "identity"; },
                               [](const channel::Replacer&) { return "replacer"; },
                               [](const channel::Kraus&) { return "kraus"; }},
                    c);
}

CMatrix apply(const Channel& c, const CMatrix& rho) {
  return std::visit(overloaded{[&](const channel::Identity&) -> CMatrix { return rho; },
                               [&](const channel::Replacer& r) -> CMatrix {
                                 if (r.target.rows() != rho.rows()) throw Error(ErrorKind::ShapeMismatch, "replacer target size");
                                 return rho.trace() * r.target;
                               },
                               [&](const channel::Kraus& k) -> CMatrix {
                                 CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
                                 for (const CMatrix& a : k.ops) {
                                   if (a.cols() != rho.rows()) throw Error(ErrorKind::ShapeMismatch, "Kraus operator size");
                                   out.noalias() += a * rho * a.adjoint();
                                 }
                                 return out;
                               }},
                    c);
}

CMatrix apply_adjoint(const Channel& c, const CMatrix& m) {
  return std::visit(overloaded{[&](const channel::Identity&) -> CMatrix { return m; },
                               [&](const channel::Replacer& r) -> CMatrix {
                                 if (r.target.rows() != m.rows()) throw Error(ErrorKind::ShapeMismatch, "replacer target size");
                                 const cplx v = (m.cwiseProduct(r.target.transpose())).sum();
                                 return v * CMatrix::Identity(m.rows(), m.cols());
                               },
                               [&](const channel::Kraus& k) -> CMatrix {
                                 CMatrix out = CMatrix::Zero(m.rows(), m.cols());
                                 for (const CMatrix& a : k.ops) {
                                   if (a.rows() != m.rows()) throw Error(ErrorKind::ShapeMismatch, "Kraus operator size");
                                   out.noalias() += a.adjoint() * m * a;
                                 }
                                 return out;
                               }},
                    c);
}

int DiscriminationTask::dim() const { return povm.empty() ? 0 : static_cast<int>(povm.front().rows()); }

void DiscriminationTask::validate() const {
  if (probs.empty()) throw Error(ErrorKind::InvalidParameter, "empty ensemble");
  if (probs.size() != channels.size() || probs.size() != povm.size())
    throw Error(ErrorKind::ShapeMismatch, "ensemble and POVM lengths differ");
  double s = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw Error(ErrorKind::InvalidParameter, "negative probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw Error(ErrorKind::InvalidParameter, "probabilities do not sum to 1");
  const Eigen::Index d = dim();
  CMatrix total = CMatrix::Zero(d, d);
  for (const CMatrix& m : povm) {
    if (m.rows() != d || m.cols() != d) throw Error(ErrorKind::ShapeMismatch, "POVM element size");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (m + m.adjoint())), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-9) throw Error(ErrorKind::NotPSD, "POVM element is not PSD");
    total += m;
  }
  if ((total - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
    throw Error(ErrorKind::InvalidParameter, "POVM does not sum to the identity");
  for (const Channel& c : channels) {
    const CMatrix id = apply_adjoint(c, CMatrix::Identity(d, d));
    if ((id - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
      throw Error(ErrorKind::NotTracePreserving, std::string(channel_name(c)) + " channel is not trace preserving");
  }
}

double p_success(const CMatrix& rho, const DiscriminationTask& task) {
  if (rho.rows() != task.dim()) throw Error(ErrorKind::ShapeMismatch, "state and task sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < task.probs.size(); ++i) {
    const CMatrix out = apply(task.channels[i], rho);
    total += task.probs[i] * (task.povm[i].cwiseProduct(out.transpose())).sum().real();
  }
  return total;
}

double p_success(const DensityOperator& rho, const DiscriminationTask& task) { return p_success(rho.matrix(), task); }

CMatrix effective_observable(const DiscriminationTask& task) {
  const Eigen::Index d = task.dim();
  CMatrix a = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < task.probs.size(); ++i) a += task.probs[i] * apply_adjoint(task.channels[i], task.povm[i]);
  return 0.5 * (a + a.adjoint());
}

DiscriminationTask optimal_binary_task(const Witness& w) {
  const CMatrix op = 0.5 * (w.op + w.op.adjoint());
  if (op.size() == 0) throw Error(ErrorKind::ZeroWitness, "empty witness");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op);
  const Eigen::Index d = op.rows();
  const double top = es.eigenvalues()(d - 1);
  if (!(top > 0.0)) throw Error(ErrorKind::ZeroWitness, "witness has no positive part");
  const CVector e = es.eigenvectors().col(d - 1);
  DiscriminationTask t;
  t.probs = {0.5, 0.5};
  t.channels = {channel::Identity{}, channel::Replacer{e * e.adjoint()}};
  const CMatrix m1 = op / top;
  t.povm = {m1, CMatrix::Identity(d, d) - m1};
  return t;
}

AdvantageReport advantage_ratio(const CMatrix& rho, const DiscriminationTask& task, const FreeSetModel& f) {
  const CMatrix a = effective_observable(task);
  if (a.rows() != rho.rows()) throw Error(ErrorKind::ShapeMismatch, "state and task sizes differ");
  AdvantageReport r;
  r.free = free_value(a, f);
  r.p_free_best = r.free.value;
  r.p_rho = (a.cwiseProduct(rho.transpose())).sum().real();
  if (!(r.p_free_best > 0.0)) throw Error(ErrorKind::ZeroWitness, "task has zero success on every free state");
  r.ratio = r.p_rho / r.p_free_best;
  return r;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DiscriminationTask random_task(int dim, int n, std::uint64_t seed, int kraus_rank) {
  if (dim < 1 || n < 1 || kraus_rank < 1) throw Error(ErrorKind::InvalidParameter, "random task sizes must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::exponential_distribution<double> ex(1.0);
  auto gauss = [&](Eigen::Index r, Eigen::Index c) {
    CMatrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = cplx(g(rng), g(rng));
    return m;
  };
  const Eigen::Index d = dim;
  DiscriminationTask t;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    t.probs.push_back(ex(rng));
    s += t.probs.back();
  }
  for (double& p : t.probs) p /= s;
  double check = 0.0;
  for (double p : t.probs) check += p;
  t.probs.back() += 1.0 - check;
  for (int i = 0; i < n; ++i) {
    Eigen::HouseholderQR<CMatrix> qr(gauss(d * kraus_rank, d));
    const CMatrix v = qr.householderQ() * CMatrix::Identity(d * kraus_rank, d);
    channel::Kraus k;
    for (int r = 0; r < kraus_rank; ++r) k.ops.push_back(v.middleRows(r * d, d));
    t.channels.emplace_back(std::move(k));
  }
  std::vector<CMatrix> gs;
  CMatrix total = CMatrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const CMatrix x = gauss(d, d);
    gs.push_back(x * x.adjoint());
    total += gs.back();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (total + total.adjoint()));
  const CMatrix isqrt = es.operatorInverseSqrt();
  for (const CMatrix& gi : gs) {
    const CMatrix m = isqrt * gi * isqrt;
    t.povm.push_back(0.5 * (m + m.adjoint()));
  }
  return t;
}

}  // namespace cvr
