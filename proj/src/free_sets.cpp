#include "cvr/free_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace cvr {

// ---------------------------------------------------------------------------
// Grid

std::vector<cplx> CoherentGrid::points() const {
  validate();
  std::vector<cplx> pts;
  pts.emplace_back(0.0, 0.0);
  const int rings = static_cast<int>(std::floor(radius / radial_step + 1e-9));
  for (int k = 1; k <= rings; ++k) {
    const double r = k * radial_step;
    for (int a = 0; a < angular_count; ++a) pts.push_back(std::polar(r, 2.0 * std::numbers::pi * a / angular_count));
  }
  pts.insert(pts.end(), extra.begin(), extra.end());
  return pts;
}

double CoherentGrid::cell_size(double r) const {
  const double arc = std::max(r, radial_step) * 2.0 * std::numbers::pi / angular_count;
  return std::hypot(radial_step, arc);
}

CoherentGrid CoherentGrid::for_max_photon(int max_photon) {
  CoherentGrid g;
  g.radius = std::max(4.0, 2.0 * std::sqrt(static_cast<double>(std::max(max_photon, 0))) + 2.0);
  return g;
}

void CoherentGrid::validate() const {
  if (!(radius > 0.0) || !(radial_step > 0.0) || angular_count < 1)
    throw Error(ErrorKind::InvalidParameter, "grid needs radius > 0, radial_step > 0, angular_count >= 1");
  if (radius / radial_step > 1e6) throw Error(ErrorKind::InvalidParameter, "grid too fine");
}

void refine_around(CoherentGrid& grid, const std::vector<cplx>& centers) {
  ++grid.level;
  const double scale = std::ldexp(1.0, -grid.level);
  const double dr = grid.radial_step * scale;
  const double dth = 2.0 * std::numbers::pi / grid.angular_count * scale;
  for (cplx c : centers) {
    const double r = std::abs(c);
    const double th = std::arg(c);
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        if (i == 0 && j == 0) continue;
        const double rr = r + i * dr;
        if (rr < 0.0) continue;
        grid.extra.push_back(std::polar(rr, th + j * dth));
      }
    }
  }
}

// ---------------------------------------------------------------------------

FreeSetModel FreeSetModel::classical(CoherentGrid grid) {
  FreeSetModel f;
  f.kind = FreeKind::Classical;
  f.grid = std::move(grid);
  return f;
}

FreeSetModel FreeSetModel::incoherent() {
  FreeSetModel f;
  f.kind = FreeKind::Incoherent;
  return f;
}

FreeSetModel FreeSetModel::separable(int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1) throw Error(ErrorKind::InvalidParameter, "separable dims must be positive");
  FreeSetModel f;
  f.kind = FreeKind::Separable;
  f.dims = {dim_a, dim_b};
  return f;
}

std::string kind_name(FreeKind kind) {
  switch (kind) {
    case FreeKind::Classical: return "classical";
    case FreeKind::Incoherent: return "incoherent";
    case FreeKind::Separable: return "separable";
  }
  return "unknown";
}

std::string to_string(Certification c) {
  switch (c) {
    case Certification::Exact: return "exact";
    case Certification::GridRefined: return "grid_refined";
    case Certification::Heuristic: return "heuristic";
    case Certification::Analytic: return "analytic";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Classical oracle

double coherent_q(const CMatrix& w, cplx alpha) {
  const CVector v = coherent_amplitudes(alpha, static_cast<int>(w.rows()));
  return v.dot(w * v).real();
}

std::pair<double, double> coherent_q_gradient(const CMatrix& w, cplx alpha) {
  const Eigen::Index d = w.rows();
  const CVector v = coherent_amplitudes(alpha, static_cast<int>(d));
  CVector up = CVector::Zero(d);
  for (Eigen::Index k = 1; k < d; ++k) up(k) = std::sqrt(static_cast<double>(k)) * v(k - 1);
  const CVector wv = w * v;
  const double q = v.dot(wv).real();
  const cplx m = up.dot(wv);
  return {2.0 * m.real() - 2.0 * alpha.real() * q, 2.0 * m.imag() - 2.0 * alpha.imag() * q};
}

void require_psd(const CMatrix& w, const char* what) {
  if (w.rows() != w.cols()) throw Error(ErrorKind::ShapeMismatch, std::string(what) + " must be square");
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw Error(ErrorKind::NotPSD, std::string(what) + " is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (w + w.adjoint())), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw Error(ErrorKind::NotPSD, std::string(what) + " has a negative eigenvalue");
}

namespace {

struct Ascent {
  cplx alpha;
  double value;
};

// Newton ascent on Q with a trust region and a gradient fallback.
Ascent ascend(const CMatrix& w, cplx start, double trust, const RefinementSettings& s) {
  cplx a = start;
  double q = coherent_q(w, a);
  double step = s.initial_step;
  const double h = 1e-5;
  for (int it = 0; it < s.max_iters; ++it) {
    const auto [gx, gy] = coherent_q_gradient(w, a);
    const double gnorm = std::hypot(gx, gy);
    if (gnorm < 1e-15) break;
    const auto [gxx1, gyx1] = coherent_q_gradient(w, a + cplx(h, 0.0));
    const auto [gxx0, gyx0] = coherent_q_gradient(w, a - cplx(h, 0.0));
    const auto [gxy1, gyy1] = coherent_q_gradient(w, a + cplx(0.0, h));
    const auto [gxy0, gyy0] = coherent_q_gradient(w, a - cplx(0.0, h));
    const double hxx = (gxx1 - gxx0) / (2 * h);
    const double hyy = (gyy1 - gyy0) / (2 * h);
    const double hxy = 0.25 * ((gyx1 - gyx0) + (gxy1 - gxy0)) / h;
    const double det = hxx * hyy - hxy * hxy;
    cplx dir;
    if (hxx < 0.0 && det > 0.0) {
      // -H^{-1} g
      dir = cplx(-(hyy * gx - hxy * gy) / det, -(-hxy * gx + hxx * gy) / det);
    } else {
      dir = cplx(gx, gy) * (step / gnorm);
    }
    if (std::abs(dir) > trust) dir *= trust / std::abs(dir);
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      const cplx cand = a + dir;
      const double qc = coherent_q(w, cand);
      if (qc > q) {
        a = cand;
        q = qc;
        moved = true;
        break;
      }
      dir *= 0.5;
    }
    if (!moved) break;
    step = std::min(step * 1.5, trust);
    if (std::abs(dir) < s.tolerance) break;
  }
  return {a, q};
}

std::vector<Eigen::Index> top_indices(const RVector& q, int k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(q.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const auto cmp = [&](Eigen::Index a, Eigen::Index b) { return q(a) > q(b) || (q(a) == q(b) && a < b); };
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end(), cmp);
  idx.resize(kk);
  return idx;
}

FreeValueResult classical_value(const CMatrix& w, const CoherentGrid& grid, kernels::Exec exec) {
  const std::vector<cplx> pts = grid.points();
  const int d = static_cast<int>(w.rows());
  const CMatrix atoms = kernels::coherent_columns(pts, d, exec);
  const RVector q = kernels::quadratic_forms(w, atoms, exec);
  const auto starts = top_indices(q, grid.refinement.starts);
  std::vector<Ascent> results(starts.size());
#pragma omp parallel for schedule(static) if (exec == kernels::Exec::Parallel)
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const cplx a0 = pts[static_cast<std::size_t>(starts[i])];
    results[i] = ascend(w, a0, 0.5 * grid.cell_size(std::abs(a0)), grid.refinement);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].value > results[best].value) best = i;
  const cplx a0 = pts[static_cast<std::size_t>(starts[best])];
  const Ascent& r = results[best];
  const double gain = r.value - q(starts[0]);
  const bool material = gain > 1e-3 * std::max(1e-12, std::abs(q(starts[0])));
  // A peak inside a cell can sit up to two diagonals from the best vertex;
  // anything further left the cells around the start.
  if (material && std::abs(r.alpha - a0) > 2.0 * grid.cell_size(std::abs(a0)) + 1e-12)
    throw Error(ErrorKind::GridTooCoarse, "refinement moved the maximizer from " + std::to_string(std::abs(a0)) + " by " +
                                              std::to_string(std::abs(r.alpha - a0)) + " (beyond the neighbouring cells), gaining " +
                                              std::to_string(gain / std::abs(q(starts[0]))) + " relative");
  if (material && std::abs(r.alpha) > grid.radius + grid.cell_size(grid.radius))
    throw Error(ErrorKind::GridTooCoarse, "maximizer lies outside the grid radius");
  FreeValueResult out;
  if (r.value >= q(starts[0])) {
    out.value = r.value;
    out.maximizer = r.alpha;
  } else {
    out.value = q(starts[0]);
    out.maximizer = pts[static_cast<std::size_t>(starts[0])];
  }
  out.value = std::max(out.value, 0.0);
  out.certified = Certification::GridRefined;
  return out;
}

// ---------------------------------------------------------------------------
// Separable oracle

CVector top_eigenvector(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (h + h.adjoint())));
  return es.eigenvectors().col(h.rows() - 1);
}

// <e| W |e> on the B side and the A-side analogue.
CMatrix contract_a(const CMatrix& w, const CVector& e, int da, int db) {
  CMatrix out = CMatrix::Zero(db, db);
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2) {
      const cplx f = std::conj(e(a)) * e(a2);
      if (f == 0.0) continue;
      out += f * w.block(a * db, a2 * db, db, db);
    }
  return out;
}

CMatrix contract_b(const CMatrix& w, const CVector& f, int da, int db) {
  CMatrix out(da, da);
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2) out(a, a2) = f.dot(w.block(a * db, a2 * db, db, db) * f);
  return out;
}

FreeValueResult separable_value(const CMatrix& w, int da, int db) {
  if (static_cast<Eigen::Index>(da) * db != w.rows())
    throw Error(ErrorKind::ShapeMismatch, "witness size does not match the bipartition");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (w + w.adjoint())));
  const RVector& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  FreeValueResult out;
  if (top <= 0.0) {
    CVector e = CVector::Zero(da), f = CVector::Zero(db);
    e(0) = 1.0;
    f(0) = 1.0;
    out.value = 0.0;
    out.maximizer = ProductMaximizer{e, f};
    out.certified = Certification::Exact;
    return out;
  }
  const double second = ev.size() > 1 ? ev(ev.size() - 2) : 0.0;
  if (second <= 1e-12 * top) {
    // rank one: sup over products is top * (largest Schmidt coefficient)^2
    const CVector v = es.eigenvectors().col(ev.size() - 1);
    const SchmidtDecomposition sd = schmidt_decompose(v, da, db);
    const double s0 = sd.coefficients.size() ? sd.coefficients(0) : 0.0;
    out.value = top * s0 * s0;
    out.maximizer = ProductMaximizer{sd.left.col(0), sd.right.col(0)};
    out.certified = Certification::Analytic;
    return out;
  }
  std::vector<CVector> starts;
  for (int a = 0; a < da; ++a) {
    CVector e = CVector::Zero(da);
    e(a) = 1.0;
    starts.push_back(e);
  }
  {
    const SchmidtDecomposition sd = schmidt_decompose(es.eigenvectors().col(ev.size() - 1), da, db);
    starts.push_back(sd.left.col(0));
  }
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> g;
  for (int k = 0; k < 8; ++k) {
    CVector e(da);
    for (int a = 0; a < da; ++a) e(a) = cplx(g(rng), g(rng));
    starts.push_back(e.normalized());
  }
  double best = -1.0;
  ProductMaximizer arg;
  for (const CVector& s : starts) {
    CVector e = s;
    double val = -1.0;
    ProductMaximizer at;
    for (int it = 0; it < 500; ++it) {
      const CVector f = top_eigenvector(contract_a(w, e, da, db));
      e = top_eigenvector(contract_b(w, f, da, db));
      const CVector ef = tensor_vec(e, f);
      const double nv = ef.dot(w * ef).real();
      const bool stalled = nv <= val + 1e-15 * std::abs(nv);
      if (nv > val) {
        val = nv;
        at = ProductMaximizer{e, f};
      }
      if (stalled) break;
    }
    if (val > best) {
      best = val;
      arg = at;
    }
  }
  out.value = std::max(best, 0.0);
  out.maximizer = arg;
  out.certified = Certification::Heuristic;
  return out;
}

}  // namespace

CVector tensor_vec(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

FreeValueResult free_value(const CMatrix& w, const FreeSetModel& f, kernels::Exec exec) {
  require_psd(w, "witness");
  switch (f.kind) {
    case FreeKind::Incoherent: {
      Eigen::Index idx = 0;
      const RVector diag = w.diagonal().real();
      diag.maxCoeff(&idx);
      FreeValueResult out;
      out.value = std::max(diag(idx), 0.0);
      out.maximizer = static_cast<int>(idx);
      out.certified = Certification::Exact;
      return out;
    }
    case FreeKind::Classical: return classical_value(w, f.grid, exec);
    case FreeKind::Separable:
      if (f.dims.size() != 2) throw Error(ErrorKind::NotBipartite, "separable model needs two dims");
      return separable_value(w, f.dims[0], f.dims[1]);
  }
  throw Error(ErrorKind::InvalidParameter, "unknown free set");
}

double evaluate_maximizer(const CMatrix& w, const FreeSetModel& f, const Maximizer& m) {
  switch (f.kind) {
    case FreeKind::Incoherent: {
      const int i = std::get<int>(m);
      return w(i, i).real();
    }
    case FreeKind::Classical: return coherent_q(w, std::get<cplx>(m));
    case FreeKind::Separable: {
      const auto& p = std::get<ProductMaximizer>(m);
      const CVector ef = tensor_vec(p.left, p.right);
      return ef.dot(w * ef).real();
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Inner certificate

namespace {

// Real coordinates of a Hermitian matrix that preserve the Frobenius norm.
RVector hermitian_coords(const CMatrix& x) {
  const Eigen::Index d = x.rows();
  RVector out(d * d);
  Eigen::Index k = 0;
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    out(k++) = x(i, i).real();
    for (Eigen::Index j = i + 1; j < d; ++j) {
      out(k++) = r2 * x(i, j).real();
      out(k++) = r2 * x(i, j).imag();
    }
  }
  return out;
}

// Lawson-Hanson: min |A c - b| subject to c >= 0.
RVector nnls(const Eigen::MatrixXd& a, const RVector& b, int max_outer) {
  const Eigen::Index n = a.cols();
  RVector c = RVector::Zero(n);
  std::vector<char> passive(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> pset;
  std::vector<char> blocked(static_cast<std::size_t>(n), 0);
  const double wtol = 1e-14 * std::max(1.0, b.norm());
  RVector w = a.transpose() * b;
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::Index t = -1;
    double wmax = wtol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && !blocked[static_cast<std::size_t>(j)] && w(j) > wmax) {
        wmax = w(j);
        t = j;
      }
    if (t < 0) break;
    {
      // reject a column whose unconstrained coefficient is not positive
      Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(pset.size()) + 1);
      for (std::size_t i = 0; i < pset.size(); ++i) ap.col(static_cast<Eigen::Index>(i)) = a.col(pset[i]);
      ap.col(ap.cols() - 1) = a.col(t);
      const RVector z = ap.colPivHouseholderQr().solve(b);
      if (!(z(z.size() - 1) > 0.0)) {
        blocked[static_cast<std::size_t>(t)] = 1;
        continue;
      }
    }
    std::fill(blocked.begin(), blocked.end(), 0);
    passive[static_cast<std::size_t>(t)] = 1;
    pset.push_back(t);
    for (int inner = 0; inner < 1000 && !pset.empty(); ++inner) {
      const auto k = static_cast<Eigen::Index>(pset.size());
      Eigen::MatrixXd ap(a.rows(), k);
      for (Eigen::Index i = 0; i < k; ++i) ap.col(i) = a.col(pset[static_cast<std::size_t>(i)]);
      const RVector z = ap.colPivHouseholderQr().solve(b);
      bool all_pos = true;
      for (Eigen::Index i = 0; i < k; ++i)
        if (!(z(i) > 0.0)) all_pos = false;
      if (all_pos) {
        for (Eigen::Index i = 0; i < k; ++i) c(pset[static_cast<std::size_t>(i)]) = z(i);
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        const double ci = c(pset[static_cast<std::size_t>(i)]);
        if (!(z(i) > 0.0)) alpha = std::min(alpha, ci / (ci - z(i)));
      }
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Index j = pset[static_cast<std::size_t>(i)];
        c(j) += alpha * (z(i) - c(j));
        if (c(j) <= 0.0 || (!(z(i) > 0.0) && c(j) <= 1e-300)) {
          c(j) = 0.0;
          passive[static_cast<std::size_t>(j)] = 0;
        } else {
          keep.push_back(j);
        }
      }
      if (keep.size() == pset.size()) {
        // alpha hit a blocking index exactly at its current value
        for (std::size_t i = 0; i < pset.size(); ++i)
          if (!(z(static_cast<Eigen::Index>(i)) > 0.0) && c(pset[i]) <= 1e-16) {
            c(pset[i]) = 0.0;
            passive[static_cast<std::size_t>(pset[i])] = 0;
          }
        keep.clear();
        for (Eigen::Index j : pset)
          if (passive[static_cast<std::size_t>(j)]) keep.push_back(j);
      }
      pset = std::move(keep);
    }
    w = a.transpose() * (b - a * c);
  }
  return c;
}

}  // namespace

namespace {

bool is_diagonal(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > 1e-14) return false;
  return true;
}

// A phase-invariant rho is matched by ring-uniform weights: averaging any
// decomposition over the grid's rotation group keeps it valid, and a uniform
// ring of angular_count >= dim points is exactly diagonal.
RVector ring_weights(const DensityOperator& rho, const CoherentGrid& grid, const std::vector<cplx>& pts) {
  const Eigen::Index d = rho.dim();
  const int rings = static_cast<int>(std::floor(grid.radius / grid.radial_step + 1e-9));
  Eigen::MatrixXd a(d, rings + 1);
  for (int k = 0; k <= rings; ++k) {
    CVector u = coherent_amplitudes(cplx(k * grid.radial_step, 0.0), static_cast<int>(d));
    u.normalize();
    a.col(k) = u.cwiseAbs2();
  }
  const RVector ring = nnls(a, rho.matrix().diagonal().real(), static_cast<int>(40 * (rings + 1)));
  RVector c = RVector::Zero(static_cast<Eigen::Index>(pts.size()));
  c(0) = ring(0);
  for (int k = 1; k <= rings; ++k)
    for (int j = 0; j < grid.angular_count; ++j)
      c(1 + static_cast<Eigen::Index>(k - 1) * grid.angular_count + j) = ring(k) / grid.angular_count;
  return c;
}

}  // namespace

std::optional<InnerCertificate> classicality_inner_certificate(const DensityOperator& rho,
                                                               const CoherentGrid& grid,
                                                               double tolerance) {
  if (rho.bipartite()) throw Error(ErrorKind::ShapeMismatch, "inner certificate is single-mode");
  const std::vector<cplx> pts = grid.points();
  CMatrix u = kernels::coherent_columns(pts, rho.dim());
  for (Eigen::Index j = 0; j < u.cols(); ++j) u.col(j).normalize();
  const CMatrix& r = rho.matrix();
  const Eigen::Index d = rho.dim();
  RVector c;
  if (is_diagonal(r) && grid.extra.empty() && grid.angular_count >= d) {
    c = ring_weights(rho, grid, pts);
  } else {
    Eigen::MatrixXd a(d * d, u.cols());
    for (Eigen::Index j = 0; j < u.cols(); ++j) a.col(j) = hermitian_coords(CMatrix(u.col(j) * u.col(j).adjoint()));
    c = nnls(a, hermitian_coords(r), static_cast<int>(4 * d * d + 16));
  }
  const double total = c.sum();
  if (!(total > 0.0)) return std::nullopt;
  InnerCertificate cert;
  RVector wts = c / total;
  CMatrix approx = kernels::weighted_gram(u, wts);
  approx = 0.5 * (approx + approx.adjoint()).eval();
  cert.residual = trace_norm(CMatrix(r - approx));
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (c(j) > 0.0) {
      cert.points.push_back(pts[static_cast<std::size_t>(j)]);
    }
  }
  cert.weights.resize(static_cast<Eigen::Index>(cert.points.size()));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < c.size(); ++j)
    if (c(j) > 0.0) cert.weights(k++) = wts(j);
  if (cert.residual > tolerance) return std::nullopt;
  return cert;
}

}  // namespace cvr
