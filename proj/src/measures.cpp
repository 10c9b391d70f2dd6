#include "cvr/measures.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace cvr {

std::string to_string(Method m) {
  switch (m) {
    case Method::None: return "none";
    case Method::ClosedForm: return "closed_form";
    case Method::Lemma4: return "lemma4";
    case Method::Witness: return "witness";
    case Method::CuttingPlane: return "cutting_plane";
    case Method::FeasiblePoint: return "feasible_point";
  }
  return "unknown";
}

void RobustnessBounds::check() const {
  if (!(lower <= upper + 1e-8))
    throw Error(ErrorKind::InvariantViolation, "lower bound exceeds upper bound");
  if (!(lower >= 1.0 - 1e-9) || !(upper >= 1.0 - 1e-9))
    throw Error(ErrorKind::InvariantViolation, "robustness bounds below 1");
}

// ---------------------------------------------------------------------------

namespace {

ClosedForm classical_closed_form(const StateSpec& s) {
  if (auto* f = std::get_if<spec::Fock>(&s)) {
    if (f->n < 0) throw Error(ErrorKind::InvalidParameter, "photon number must be >= 0");
    if (f->n == 0) return {1.0, false, "vacuum"};
    const double n = f->n;
    return {std::exp(n + std::lgamma(n + 1.0) - n * std::log(n)), false, "e^n n!/n^n"};
  }
  if (std::holds_alternative<spec::Coherent>(s) || std::holds_alternative<spec::Thermal>(s) ||
      std::holds_alternative<spec::PhaseRandomizedCoherent>(s))
    return {1.0, false, "classical state"};
  if (auto* q = std::get_if<spec::Squeezed>(&s)) return {std::exp(std::abs(q->r)), false, "e^r"};
  if (auto* c = std::get_if<spec::Cat>(&s)) {
    const double e = std::exp(-2.0 * std::norm(c->alpha));
    if (c->plus) return {2.0 / (1.0 + e), false, "2/(1+e^{-2|alpha|^2})"};
    return {2.0 / (1.0 - e), true, "2/(1-e^{-2|alpha|^2})"};
  }
  throw Error(ErrorKind::NoClosedForm, "no classical closed form for " + kind_name(s));
}

ClosedForm separable_closed_form(const StateSpec& s) {
  if (auto* t = std::get_if<spec::TwoModeSqueezed>(&s)) {
    if (!(t->lambda >= 0.0 && t->lambda < 1.0))
      throw Error(ErrorKind::InvalidParameter, "TMSV parameter lambda must lie in [0, 1)");
    return {(1.0 + t->lambda) / (1.0 - t->lambda), false, "(1+lambda)/(1-lambda)"};
  }
  if (auto* m = std::get_if<spec::Schmidt>(&s)) {
    double s1 = 0.0, s2 = 0.0;
    for (double mu : m->coefficients) {
      if (!(mu >= 0.0)) throw Error(ErrorKind::InvalidParameter, "Schmidt coefficients must be >= 0");
      s1 += mu;
      s2 += mu * mu;
    }
    if (!(s2 > 0.0)) throw Error(ErrorKind::InvalidParameter, "zero Schmidt vector");
    return {s1 * s1 / s2, false, "(sum mu)^2"};
  }
  throw Error(ErrorKind::NoClosedForm, "no separable closed form for " + kind_name(s));
}

ClosedForm incoherent_closed_form(const StateSpec& s) {
  if (std::holds_alternative<spec::Fock>(s) || std::holds_alternative<spec::Thermal>(s) ||
      std::holds_alternative<spec::PhaseRandomizedCoherent>(s))
    return {1.0, false, "diagonal state"};
  if (auto* a = std::get_if<spec::Amplitudes>(&s)) {
    double s1 = 0.0, s2 = 0.0;
    for (cplx v : a->values) {
      s1 += std::abs(v);
      s2 += std::norm(v);
    }
    if (!(s2 > 0.0)) throw Error(ErrorKind::InvalidParameter, "zero amplitude vector");
    return {s1 * s1 / s2, false, "(sum |psi_n|)^2"};
  }
  throw Error(ErrorKind::NoClosedForm, "no incoherent closed form for " + kind_name(s));
}

}  // namespace

ClosedForm closed_form(const StateSpec& s, FreeKind free) {
  switch (free) {
    case FreeKind::Classical: return classical_closed_form(s);
    case FreeKind::Separable: return separable_closed_form(s);
    case FreeKind::Incoherent: return incoherent_closed_form(s);
  }
  throw Error(ErrorKind::NoClosedForm, "unknown free set");
}

// ---------------------------------------------------------------------------

Lemma4Value lemma4_lower(const FockVector& psi, const DensityOperator& sigma) {
  if (psi.dim() != sigma.dim()) throw Error(ErrorKind::ShapeMismatch, "psi and sigma sizes differ");
  const double ov = psi.amplitudes().dot(sigma.matrix() * psi.amplitudes()).real();
  if (!(ov > 0.0)) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / ov, false};
}

Lemma4Value lemma4_lower_certified(const FockVector& psi, const FreeSetModel& f) {
  const CVector& v = psi.amplitudes();
  const FreeValueResult fv = free_value(CMatrix(v * v.adjoint()), f);
  if (!(fv.value > 0.0)) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / fv.value, false};
}

Lemma4Upper lemma4_upper(const FockVector& psi, const DensityOperator& sigma, double cutoff_rel) {
  if (psi.dim() != sigma.dim()) throw Error(ErrorKind::ShapeMismatch, "psi and sigma sizes differ");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma.matrix());
  const RVector& ev = es.eigenvalues();
  const CVector coeff = es.eigenvectors().adjoint() * psi.amplitudes();
  const double cut = cutoff_rel * ev.maxCoeff();
  auto evaluate = [&](double c, double& outside) {
    double val = 0.0;
    outside = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) > c)
        val += std::norm(coeff(i)) / ev(i);
      else
        outside += std::norm(coeff(i));
    }
    return val;
  };
  Lemma4Upper out;
  double outside = 0.0, outside_fine = 0.0;
  out.value = evaluate(cut, outside);
  out.value_fine = evaluate(cut / 10.0, outside_fine);
  out.support_residual = std::sqrt(outside);
  if (out.support_residual > 1e-8)
    throw Error(ErrorKind::OutsideSupport, "psi leaves the support of sigma");
  out.relative_sensitivity = std::abs(out.value_fine - out.value) / std::max(out.value, 1e-300);
  out.stable = out.relative_sensitivity <= 1e-3;
  return out;
}

DensityOperator squeezed_thermal_ansatz(double nbar, int dim) {
  if (!(nbar > 0.0) || !std::isfinite(nbar)) throw Error(ErrorKind::InvalidParameter, "ansatz needs N > 0");
  if (dim < 2) throw Error(ErrorKind::DimensionTooSmall, "truncation must be >= 2");
  const double q = nbar / (nbar + 1.0);
  const int extra = static_cast<int>(std::ceil(std::log(1e-18) / std::log(q)));
  const int k = dim + std::clamp(extra, 40, 4000);
  const double s = 0.5 * std::log(2.0 * nbar + 1.0);
  const double t = std::tanh(s);
  const double sech = 1.0 / std::cosh(s);
  // rows < dim of <m|S(s)|n>, n < k
  CMatrix sm = CMatrix::Zero(dim, k);
  std::vector<double> sq(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) sq[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i));
  sm(0, 0) = std::sqrt(sech);
  for (int m = 2; m < dim; m += 2) sm(m, 0) = sq[m - 1] / sq[m] * (-t) * sm(m - 2, 0);
  for (int n = 1; n < k; ++n)
    for (int m = 0; m < dim; ++m) {
      if ((m + n) % 2 != 0) continue;
      cplx v = 0.0;
      if (n >= 2) v += sq[n - 1] / sq[n] * t * sm(m, n - 2);
      if (m >= 1) v += sq[m] / sq[n] * sech * sm(m - 1, n - 1);
      sm(m, n) = v;
    }
  RVector tau(k);
  double p = 1.0 / (nbar + 1.0);
  for (int i = 0; i < k; ++i, p *= q) tau(i) = p;
  CMatrix sigma = sm * tau.asDiagonal() * sm.adjoint();
  sigma = 0.5 * (sigma + sigma.adjoint()).eval();
  const double tr = sigma.trace().real();
  sigma /= tr;
  return DensityOperator({dim}, sigma, std::max(0.0, 1.0 - tr));
}

SqueezedAnsatzResult squeezed_ansatz_upper(const FockVector& psi, double tol) {
  auto f = [&](double n) {
    try {
      return lemma4_upper(psi, squeezed_thermal_ansatz(n, psi.dim())).value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::OutsideSupport) throw;
      return std::numeric_limits<double>::infinity();
    }
  };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-3, b = 20.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  const double n = 0.5 * (a + b);
  return {n, lemma4_upper(psi, squeezed_thermal_ansatz(n, psi.dim()))};
}

DensityOperator two_coherent_mixture(cplx alpha, int dim) {
  const CVector a = coherent_amplitudes(alpha, dim);
  const CVector b = coherent_amplitudes(-alpha, dim);
  CMatrix m = 0.5 * (a * a.adjoint() + b * b.adjoint());
  const double tr = m.trace().real();
  m /= tr;
  return DensityOperator({dim}, m, coherent_tail(alpha, dim));
}

// ---------------------------------------------------------------------------

double negativity(const DensityOperator& rho) {
  return std::max(0.0, 0.5 * (trace_norm(partial_transpose(rho)) - 1.0));
}

double negativity(const MaximallyCorrelated& rho) {
  return std::max(0.0, 0.5 * (l1_norm(rho.block()) - 1.0));
}

double l1_norm(const CMatrix& rho) { return rho.cwiseAbs().sum(); }

namespace {

int displacement_check_dim(int dim, double r) {
  return std::max(2 * dim, dim + static_cast<int>(std::ceil(r * r + 10.0 * r + 20.0)));
}

}  // namespace

cplx chi1(const DensityOperator& rho, cplx alpha) {
  if (rho.bipartite()) throw Error(ErrorKind::ShapeMismatch, "chi1 is single-mode");
  const int d = rho.dim();
  if (alpha == cplx(0.0, 0.0)) return rho.matrix().trace();
  const int big = displacement_check_dim(d, std::abs(alpha));
  const CMatrix dp = displacement_operator(alpha, big);
  const CMatrix dm = displacement_operator(-alpha, big);
  const CMatrix prod = dp.topRows(d) * dm.leftCols(d);
  const double dev = (prod - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-6)) throw Error(ErrorKind::TruncationUnsound, "displacement unitarity check failed");
  const cplx tr = (rho.matrix().cwiseProduct(dp.topLeftCorner(d, d).transpose())).sum();
  const cplx out = std::exp(0.5 * std::norm(alpha)) * tr;
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
    throw Error(ErrorKind::TruncationUnsound, "characteristic function overflows at |alpha| = " + std::to_string(std::abs(alpha)));
  return out;
}

StdRobustnessBound std_robustness_lower(const DensityOperator& rho, const CoherentGrid& grid) {
  const std::vector<cplx> pts = grid.points();
  std::vector<double> mag(pts.size());
  std::vector<int> failed(pts.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      mag[i] = std::abs(chi1(rho, pts[i]));
    } catch (const Error&) {
      failed[i] = 1;
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (failed[i]) throw Error(ErrorKind::TruncationUnsound, "displacement unitarity check failed on the grid");
  StdRobustnessBound out;
  out.grid = grid;
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (mag[i] > mag[best]) best = i;
  out.sup_chi1 = mag[best];
  out.argmax = pts[best];
  out.lower = 0.5 * (out.sup_chi1 + 1.0);
  return out;
}

}  // namespace cvr
