#include "cvr/kernels.hpp"

#include <omp.h>

namespace cvr::kernels {

namespace {

constexpr Eigen::Index kBlock = 16;

Eigen::Index block_count(Eigen::Index n) { return (n + kBlock - 1) / kBlock; }

}  // namespace

int max_threads() { return omp_get_max_threads(); }

CMatrix coherent_columns(std::span<const cplx> alphas, int dim, Exec exec) {
  const auto n = static_cast<Eigen::Index>(alphas.size());
  CMatrix out(dim, n);
  if (exec == Exec::Serial) {
    for (Eigen::Index j = 0; j < n; ++j) out.col(j) = coherent_amplitudes(alphas[j], dim);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = coherent_amplitudes(alphas[j], dim);
  return out;
}

RVector quadratic_forms(const CMatrix& w, const CMatrix& atoms, Exec exec) {
  const Eigen::Index d = atoms.rows(), n = atoms.cols();
  RVector q(n);
  if (exec == Exec::Serial) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (Eigen::Index r = 0; r < d; ++r) {
        cplx row = 0.0;
        for (Eigen::Index c = 0; c < d; ++c) row += w(r, c) * atoms(c, j);
        acc += std::conj(atoms(r, j)) * row;
      }
      q(j) = acc.real();
    }
    return q;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    const CVector wa = w * atoms.col(j);
    q(j) = atoms.col(j).dot(wa).real();
  }
  return q;
}

RVector overlaps_abs2(const CVector& v, const CMatrix& atoms, Exec exec) {
  const Eigen::Index d = atoms.rows(), n = atoms.cols();
  RVector out(n);
  if (exec == Exec::Serial) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (Eigen::Index r = 0; r < d; ++r) acc += std::conj(v(r)) * atoms(r, j);
      out(j) = std::norm(acc);
    }
    return out;
  }
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) out(j) = std::norm(v.dot(atoms.col(j)));
  return out;
}

CMatrix weighted_gram(const CMatrix& atoms, const RVector& c, Exec exec) {
  const Eigen::Index d = atoms.rows();
  if (exec == Exec::Serial) {
    CMatrix out = CMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
      if (c(j) == 0.0) continue;
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index s = 0; s < d; ++s) out(r, s) += c(j) * atoms(r, j) * std::conj(atoms(s, j));
    }
    return out;
  }
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < atoms.cols(); ++j)
    if (c(j) != 0.0) active.push_back(j);
  CMatrix b(d, static_cast<Eigen::Index>(active.size()));
  RVector weights(static_cast<Eigen::Index>(active.size()));
  for (std::size_t k = 0; k < active.size(); ++k) {
    b.col(static_cast<Eigen::Index>(k)) = atoms.col(active[k]);
    weights(static_cast<Eigen::Index>(k)) = c(active[k]);
  }
  const CMatrix bw = b * weights.asDiagonal();
  CMatrix out(d, d);
  const Eigen::Index blocks = block_count(d);
#pragma omp parallel for schedule(static)
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    const Eigen::Index r0 = blk * kBlock;
    const Eigen::Index rows = std::min(kBlock, d - r0);
    out.middleRows(r0, rows).noalias() = bw.middleRows(r0, rows) * b.adjoint();
  }
  return out;
}

}  // namespace cvr::kernels
