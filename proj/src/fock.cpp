#include "cvr/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace cvr {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

int product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

void check_dims(const std::vector<int>& dims, Eigen::Index size) {
  if (dims.empty() || dims.size() > 2)
    throw Error(ErrorKind::ShapeMismatch, "states have one or two subsystems");
  for (int d : dims)
    if (d < 1) throw Error(ErrorKind::ShapeMismatch, "subsystem dimension must be positive");
  if (product(dims) != size)
    throw Error(ErrorKind::ShapeMismatch, "product dimension does not match data size");
}

void check_tail(double tail, const TruncationPolicy& policy, const std::string& what) {
  if (tail > policy.tail_cap)
    throw Error(ErrorKind::DimensionTooSmall,
                what + " discards mass " + fmt_double(tail) + " > cap " + fmt_double(policy.tail_cap));
}

// Sum of e^{-x} x^k / k! over k >= start (or over k >= start with k of the
// given parity when parity is 0 or 1).
double poisson_tail(double x, int start, int parity = -1) {
  if (x == 0.0) return start <= 0 ? 1.0 : 0.0;
  double total = 0.0;
  const double lx = std::log(x);
  for (int k = start;; ++k) {
    if (parity >= 0 && (k & 1) != parity) continue;
    const double term = std::exp(-x + k * lx - std::lgamma(k + 1.0));
    total += term;
    if (k > x + 1 && term < 1e-18 * std::max(total, 1e-300)) break;
    if (k > start + 100000) break;
  }
  return total;
}

}  // namespace

FockVector::FockVector(std::vector<int> dims, CVector amplitudes, double tail_weight)
    : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)), tail_weight_(tail_weight) {
  check_dims(dims_, amplitudes_.size());
  if (!(tail_weight_ >= 0.0)) throw Error(ErrorKind::InvalidParameter, "tail weight must be >= 0");
  const double norm = amplitudes_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorKind::InvalidParameter, "zero or non-finite state vector");
  amplitudes_ /= norm;
}

DensityOperator FockVector::projector() const {
  return DensityOperator(dims_, amplitudes_ * amplitudes_.adjoint(), tail_weight_);
}

DensityOperator::DensityOperator(std::vector<int> dims, CMatrix matrix, double tail_weight)
    : dims_(std::move(dims)), matrix_(std::move(matrix)), tail_weight_(tail_weight) {
  if (matrix_.rows() != matrix_.cols())
    throw Error(ErrorKind::ShapeMismatch, "density operator must be square");
  check_dims(dims_, matrix_.rows());
  if (!(tail_weight_ >= 0.0)) throw Error(ErrorKind::InvalidParameter, "tail weight must be >= 0");
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= 1e-10))
    throw Error(ErrorKind::InvariantViolation, "not Hermitian (deviation " + fmt_double(herm) + ")");
  const double tr = matrix_.trace().real();
  if (!(std::abs(tr - 1.0) <= 1e-9))
    throw Error(ErrorKind::InvariantViolation, "trace " + fmt_double(tr) + " is not 1");
  CMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmin >= -1e-9))
    throw Error(ErrorKind::InvariantViolation, "negative eigenvalue " + fmt_double(lmin));
}

// ---------------------------------------------------------------------------

CVector coherent_amplitudes(cplx alpha, int dim) {
  CVector v(dim);
  if (dim == 0) return v;
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int k = 1; k < dim; ++k) v(k) = v(k - 1) * alpha / std::sqrt(static_cast<double>(k));
  return v;
}

double coherent_tail(cplx alpha, int dim) { return poisson_tail(std::norm(alpha), dim); }

CVector squeezed_amplitudes(double r, int dim) {
  CVector v = CVector::Zero(dim);
  if (dim == 0) return v;
  const double t = std::tanh(r);
  v(0) = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 2; n < dim; n += 2)
    v(n) = v(n - 2) * (-t) * std::sqrt((n - 1.0) / n);
  return v;
}

namespace {

double squeezed_tail(double r, int dim) {
  const double t2 = std::tanh(r) * std::tanh(r);
  // |c_{2m}|^2 = sech(r) t2^m (2m)! / (4^m m!^2)
  int m = (dim + 1) / 2;
  auto log_term = [&](int mm) {
    return -std::log(std::cosh(r)) + (t2 > 0 ? mm * std::log(t2) : (mm == 0 ? 0.0 : -INFINITY)) +
           std::lgamma(2.0 * mm + 1) - 2.0 * std::lgamma(mm + 1.0) - mm * std::log(4.0);
  };
  if (t2 == 0.0) return 0.0;
  double term = std::exp(log_term(m));
  double total = 0.0;
  for (int guard = 0; guard < 10000000; ++guard) {
    total += term;
    term *= t2 * (2.0 * m + 1.0) / (2.0 * m + 2.0);
    ++m;
    if (term < 1e-20 * total || term < 1e-300) {
      // remaining terms are bounded by a geometric series in t2
      total += term / (1.0 - t2);
      break;
    }
  }
  return total;
}

}  // namespace

CMatrix displacement_operator(cplx alpha, int dim) {
  CMatrix d = CMatrix::Zero(dim, dim);
  if (dim == 0) return d;
  const double x = std::norm(alpha);
  const double lr = x > 0.0 ? 0.5 * std::log(x) : 0.0;
  const double th = std::arg(alpha);
  // f_n = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^{(k)}(x), bounded by 1 in modulus.
  std::vector<double> f(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    const int len = dim - k;
    if (x == 0.0) {
      std::fill(f.begin(), f.end(), 0.0);
      if (k == 0) std::fill(f.begin(), f.begin() + len, 1.0);
    } else {
      f[0] = std::exp(k * lr - 0.5 * x - 0.5 * std::lgamma(k + 1.0));
      if (len > 1) f[1] = (1.0 + k - x) * f[0] / std::sqrt(k + 1.0);
      for (int n = 1; n + 1 < len; ++n)
        f[static_cast<std::size_t>(n + 1)] =
            ((2.0 * n + 1.0 + k - x) * f[static_cast<std::size_t>(n)] -
             std::sqrt(static_cast<double>(n) * (n + k)) * f[static_cast<std::size_t>(n - 1)]) /
            std::sqrt((n + 1.0) * (n + k + 1.0));
    }
    const cplx below = std::polar(1.0, k * th);                        // alpha^k / |alpha|^k
    const cplx above = std::polar(1.0, k * (std::numbers::pi - th));  // (-conj alpha)^k / |alpha|^k
    for (int n = 0; n < len; ++n) {
      d(n + k, n) = below * f[static_cast<std::size_t>(n)];
      if (k > 0) d(n, n + k) = above * f[static_cast<std::size_t>(n)];
    }
  }
  return d;
}

CMatrix squeeze_operator(double r, int dim) {
  CMatrix s = CMatrix::Zero(dim, dim);
  if (dim == 0) return s;
  const double t = std::tanh(r);
  const double sech = 1.0 / std::cosh(r);
  std::vector<double> sq(dim + 1);
  for (int k = 0; k <= dim; ++k) sq[k] = std::sqrt(static_cast<double>(k));
  s(0, 0) = std::sqrt(sech);
  for (int m = 2; m < dim; m += 2) s(m, 0) = sq[m - 1] / sq[m] * (-t) * s(m - 2, 0);
  for (int n = 1; n < dim; ++n) {
    for (int m = 0; m < dim; ++m) {
      if ((m + n) % 2 != 0) continue;
      cplx v = 0.0;
      if (n >= 2) v += sq[n - 1] / sq[n] * t * s(m, n - 2);
      if (m >= 1) v += sq[m] / sq[n] * sech * s(m - 1, n - 1);
      s(m, n) = v;
    }
  }
  return s;
}

CMatrix annihilation(int dim) {
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

// ---------------------------------------------------------------------------

std::string kind_name(const StateSpec& s) {
  struct Visitor {
    std::string operator()(const spec::Fock&) const { return "fock"; }
    std::string operator()(const spec::Coherent&) const { return "coherent"; }
    std::string operator()(const spec::Squeezed&) const { return "squeezed"; }
    std::string operator()(const spec::Cat& c) const { return c.plus ? "cat_plus" : "cat_minus"; }
    std::string operator()(const spec::Thermal&) const { return "thermal"; }
    std::string operator()(const spec::PhaseRandomizedCoherent&) const { return "phase_randomized_coherent"; }
    std::string operator()(const spec::TwoModeSqueezed&) const { return "tmsv"; }
    std::string operator()(const spec::Schmidt&) const { return "schmidt"; }
    std::string operator()(const spec::Amplitudes&) const { return "amplitudes"; }
  };
  return std::visit(Visitor{}, s);
}

bool is_bipartite(const StateSpec& s) {
  return std::holds_alternative<spec::TwoModeSqueezed>(s) || std::holds_alternative<spec::Schmidt>(s);
}

namespace {

struct Builder {
  int dim;
  const TruncationPolicy& policy;

  State operator()(const spec::Fock& f) const {
    if (f.n < 0) throw Error(ErrorKind::InvalidParameter, "photon number must be >= 0");
    if (f.n >= dim) throw Error(ErrorKind::DimensionTooSmall, "Fock level outside truncation");
    CVector v = CVector::Zero(dim);
    v(f.n) = 1.0;
    return FockVector({dim}, v, 0.0);
  }

  State operator()(const spec::Coherent& c) const {
    if (!std::isfinite(c.alpha.real()) || !std::isfinite(c.alpha.imag()))
      throw Error(ErrorKind::InvalidParameter, "non-finite coherent amplitude");
    const double tail = coherent_tail(c.alpha, dim);
    check_tail(tail, policy, "coherent state");
    return FockVector({dim}, coherent_amplitudes(c.alpha, dim), tail);
  }

  State operator()(const spec::Squeezed& s) const {
    if (!std::isfinite(s.r)) throw Error(ErrorKind::InvalidParameter, "non-finite squeezing");
    const double tail = squeezed_tail(s.r, dim);
    check_tail(tail, policy, "squeezed state");
    return FockVector({dim}, squeezed_amplitudes(s.r, dim), tail);
  }

  State operator()(const spec::Cat& c) const {
    const double x = std::norm(c.alpha);
    const double norm2 = 2.0 * (1.0 + (c.plus ? 1.0 : -1.0) * std::exp(-2.0 * x));
    if (!(norm2 > 1e-300)) throw Error(ErrorKind::InvalidParameter, "odd cat with alpha = 0 vanishes");
    CVector v = coherent_amplitudes(c.alpha, dim);
    for (int k = 0; k < dim; ++k) {
      const bool even = (k % 2 == 0);
      v(k) *= (c.plus == even) ? 2.0 : 0.0;
    }
    // Kept parity: even for plus, odd for minus; each kept |n> carries 4 Poisson(n).
    const double tail = 4.0 * poisson_tail(x, dim, c.plus ? 0 : 1) / norm2;
    check_tail(tail, policy, "cat state");
    return FockVector({dim}, v, tail);
  }

  State operator()(const spec::Thermal& t) const {
    if (!(t.nbar >= 0.0) || !std::isfinite(t.nbar))
      throw Error(ErrorKind::InvalidParameter, "thermal occupation must be >= 0");
    const double q = t.nbar / (t.nbar + 1.0);
    const double tail = std::pow(q, dim);
    check_tail(tail, policy, "thermal state");
    CMatrix m = CMatrix::Zero(dim, dim);
    double p = 1.0 / (t.nbar + 1.0);
    for (int k = 0; k < dim; ++k, p *= q) m(k, k) = p;
    m /= (1.0 - tail);
    return DensityOperator({dim}, m, tail);
  }

  State operator()(const spec::PhaseRandomizedCoherent& p) const {
    if (!(p.nbar >= 0.0) || !std::isfinite(p.nbar))
      throw Error(ErrorKind::InvalidParameter, "mean photon number must be >= 0");
    const double tail = poisson_tail(p.nbar, dim);
    check_tail(tail, policy, "phase-randomized coherent state");
    CMatrix m = CMatrix::Zero(dim, dim);
    const CVector a = coherent_amplitudes(std::sqrt(p.nbar), dim);
    double kept = 0.0;
    for (int k = 0; k < dim; ++k) {
      m(k, k) = std::norm(a(k));
      kept += std::norm(a(k));
    }
    m /= kept;
    return DensityOperator({dim}, m, tail);
  }

  State operator()(const spec::TwoModeSqueezed& t) const {
    if (!(t.lambda >= 0.0 && t.lambda < 1.0))
      throw Error(ErrorKind::InvalidParameter, "TMSV parameter lambda must lie in [0, 1)");
    const double tail = std::pow(t.lambda, 2.0 * dim);
    check_tail(tail, policy, "two-mode squeezed vacuum");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim) * dim);
    double mu = std::sqrt(1.0 - t.lambda * t.lambda);
    for (int n = 0; n < dim; ++n, mu *= t.lambda) v(n * dim + n) = mu;
    return FockVector({dim, dim}, v, tail);
  }

  State operator()(const spec::Schmidt& s) const {
    if (s.coefficients.empty()) throw Error(ErrorKind::InvalidParameter, "no Schmidt coefficients");
    if (static_cast<int>(s.coefficients.size()) > dim)
      throw Error(ErrorKind::DimensionTooSmall, "Schmidt rank exceeds truncation");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim) * dim);
    for (std::size_t n = 0; n < s.coefficients.size(); ++n) {
      if (!(s.coefficients[n] >= 0.0))
        throw Error(ErrorKind::InvalidParameter, "Schmidt coefficients must be >= 0");
      v(static_cast<Eigen::Index>(n) * dim + static_cast<Eigen::Index>(n)) = s.coefficients[n];
    }
    return FockVector({dim, dim}, v, 0.0);
  }

  State operator()(const spec::Amplitudes& a) const {
    if (a.values.empty()) throw Error(ErrorKind::InvalidParameter, "no amplitudes");
    if (static_cast<int>(a.values.size()) > dim)
      throw Error(ErrorKind::DimensionTooSmall, "amplitude list exceeds truncation");
    CVector v = CVector::Zero(dim);
    for (std::size_t k = 0; k < a.values.size(); ++k) v(static_cast<Eigen::Index>(k)) = a.values[k];
    return FockVector({dim}, v, 0.0);
  }
};

}  // namespace

State make_state(const StateSpec& s, int dim, const TruncationPolicy& policy) {
  if (dim < 2) throw Error(ErrorKind::DimensionTooSmall, "truncation must be >= 2");
  return std::visit(Builder{dim, policy}, s);
}

FockVector make_pure(const StateSpec& s, int dim, const TruncationPolicy& policy) {
  State st = make_state(s, dim, policy);
  if (auto* v = std::get_if<FockVector>(&st)) return *v;
  throw Error(ErrorKind::InvalidParameter, kind_name(s) + " is a mixed state");
}

DensityOperator to_density(const State& s) {
  if (auto* v = std::get_if<FockVector>(&s)) return v->projector();
  return std::get<DensityOperator>(s);
}

DensityOperator make_density(const StateSpec& s, int dim, const TruncationPolicy& policy) {
  return to_density(make_state(s, dim, policy));
}

// ---------------------------------------------------------------------------

CVector SchmidtDecomposition::reconstruct() const {
  const Eigen::Index da = left.rows(), db = right.rows();
  CVector psi = CVector::Zero(da * db);
  for (Eigen::Index k = 0; k < coefficients.size(); ++k)
    for (Eigen::Index a = 0; a < da; ++a)
      for (Eigen::Index b = 0; b < db; ++b)
        psi(a * db + b) += coefficients(k) * left(a, k) * right(b, k);
  return psi;
}

SchmidtDecomposition schmidt_decompose(const CVector& psi, int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || static_cast<Eigen::Index>(dim_a) * dim_b != psi.size())
    throw Error(ErrorKind::ShapeMismatch, "amplitude length does not match dim_a * dim_b");
  CMatrix m(dim_a, dim_b);
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b) m(a, b) = psi(static_cast<Eigen::Index>(a) * dim_b + b);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > 1e-13 * std::max(1.0, s(0))) ++k;
  SchmidtDecomposition out;
  out.coefficients = s.head(k);
  out.left = svd.matrixU().leftCols(k);
  // m = U S V^H, so psi(a,b) = sum_k s_k U(a,k) conj(V(b,k))
  out.right = svd.matrixV().leftCols(k).conjugate();
  return out;
}

SchmidtDecomposition schmidt_decompose(const FockVector& psi) {
  if (!psi.bipartite()) throw Error(ErrorKind::NotBipartite, "Schmidt decomposition needs two subsystems");
  return schmidt_decompose(psi.amplitudes(), psi.dims()[0], psi.dims()[1]);
}

CMatrix partial_transpose(const CMatrix& rho, int dim_a, int dim_b) {
  if (rho.rows() != rho.cols() || static_cast<Eigen::Index>(dim_a) * dim_b != rho.rows())
    throw Error(ErrorKind::ShapeMismatch, "operator size does not match dim_a * dim_b");
  CMatrix out(rho.rows(), rho.cols());
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b)
      for (int a2 = 0; a2 < dim_a; ++a2)
        for (int b2 = 0; b2 < dim_b; ++b2)
          out(a * dim_b + b, a2 * dim_b + b2) = rho(a * dim_b + b2, a2 * dim_b + b);
  return out;
}

CMatrix partial_transpose(const DensityOperator& rho) {
  if (!rho.bipartite()) throw Error(ErrorKind::NotBipartite, "partial transpose needs two subsystems");
  return partial_transpose(rho.matrix(), rho.dims()[0], rho.dims()[1]);
}

double trace_norm(const CMatrix& m) {
  if (m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    CMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  if (a.bipartite() || b.bipartite())
    throw Error(ErrorKind::ShapeMismatch, "tensor expects single-mode factors");
  const int da = a.dim(), db = b.dim();
  CMatrix m(static_cast<Eigen::Index>(da) * db, static_cast<Eigen::Index>(da) * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  const double tail = 1.0 - (1.0 - a.tail_weight()) * (1.0 - b.tail_weight());
  return DensityOperator({da, db}, m, tail);
}

DensityOperator dephase_diag(const DensityOperator& rho) {
  CMatrix m = CMatrix::Zero(rho.dim(), rho.dim());
  m.diagonal() = rho.matrix().diagonal();
  return DensityOperator(rho.dims(), m, rho.tail_weight());
}

namespace {

CMatrix kraus_sum(const CMatrix& rho, std::span<const CMatrix> kraus) {
  if (kraus.empty()) throw Error(ErrorKind::ShapeMismatch, "empty Kraus list");
  const Eigen::Index n = rho.rows();
  const Eigen::Index out = kraus[0].rows();
  CMatrix completeness = CMatrix::Zero(n, n);
  CMatrix result = CMatrix::Zero(out, out);
  for (const CMatrix& k : kraus) {
    if (k.cols() != n || k.rows() != out) throw Error(ErrorKind::ShapeMismatch, "Kraus operator shape");
    completeness.noalias() += k.adjoint() * k;
    result.noalias() += k * rho * k.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(completeness, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().maxCoeff() > 1.0 + 1e-9)
    throw Error(ErrorKind::NotTracePreserving, "sum K^dag K exceeds the identity");
  return result;
}

}  // namespace

DensityOperator apply_channel(const DensityOperator& rho, std::span<const CMatrix> kraus) {
  if (kraus.empty()) throw Error(ErrorKind::ShapeMismatch, "empty Kraus list");
  const Eigen::Index n = rho.dim();
  CMatrix completeness = CMatrix::Zero(n, n);
  for (const CMatrix& k : kraus) {
    if (k.cols() != n || k.rows() != n) throw Error(ErrorKind::ShapeMismatch, "Kraus operator shape");
    completeness.noalias() += k.adjoint() * k;
  }
  const double dev = (completeness - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > 1e-8)
    throw Error(ErrorKind::NotTracePreserving, "sum K^dag K deviates from 1 by " + fmt_double(dev));
  CMatrix out = CMatrix::Zero(n, n);
  for (const CMatrix& k : kraus) out.noalias() += k * rho.matrix() * k.adjoint();
  return DensityOperator(rho.dims(), out, rho.tail_weight());
}

CMatrix apply_subchannel(const CMatrix& rho, std::span<const CMatrix> kraus) {
  return kraus_sum(rho, kraus);
}

// ---------------------------------------------------------------------------

DensityOperator MaximallyCorrelated::to_dense() const {
  const int d = local_dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  CMatrix m = CMatrix::Zero(n, n);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) m(a * d + a, b * d + b) = block_.matrix()(a, b);
  return DensityOperator({d, d}, m, block_.tail_weight());
}

CMatrix hilbert_matrix(int dim) {
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int m = 0; m < dim; ++m)
      if (n != m) h(n, m) = 1.0 / static_cast<double>(n - m);
  return h;
}

RVector gallery_weights(int dim) {
  RVector w(dim);
  for (int k = 0; k < dim; ++k) {
    const double n = k + 1.0;
    w(k) = 1.0 / (std::sqrt(n) * std::log(n + 1.0));
  }
  return w;
}

HilbertGallery hilbert_gallery(int dim) {
  if (dim < 4) throw Error(ErrorKind::DimensionTooSmall, "Hilbert gallery needs dim >= 4");
  const RVector d = gallery_weights(dim);
  const CMatrix h = hilbert_matrix(dim);
  const double c = d.squaredNorm();
  CMatrix plus(dim, dim), minus(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m < dim; ++m) {
      const double base = d(n) * d(m) / c;
      const double re = (n == m) ? base : 0.0;
      const double im = base * h(n, m).real() / std::numbers::pi;
      plus(n, m) = cplx(re, im);
      minus(n, m) = cplx(re, -im);
    }
  }
  DensityOperator wp({dim}, plus), wm({dim}, minus);
  return HilbertGallery{dim, c, d, h, wp, wm, MaximallyCorrelated(wp), MaximallyCorrelated(wm)};
}

}  // namespace cvr
