#pragma once

// Hot loops shared by the free-set oracles and the solver.
//
// Each kernel has a serial reference (plain loops, used by the tests as an
// oracle) and an OpenMP version. The OpenMP version partitions work into
// fixed-size blocks that do not depend on the thread count, so its output is
// bitwise identical for any number of threads.

#include <span>

#include "cvr/fock.hpp"

namespace cvr::kernels {

enum class Exec { Serial, Parallel };

/// Column j is the truncated coherent vector for alphas[j].
CMatrix coherent_columns(std::span<const cplx> alphas, int dim, Exec exec = Exec::Parallel);

/// q_j = Re(a_j^H W a_j) for each column a_j.
RVector quadratic_forms(const CMatrix& w, const CMatrix& atoms, Exec exec = Exec::Parallel);

/// |<v|a_j>|^2 for each column a_j.
RVector overlaps_abs2(const CVector& v, const CMatrix& atoms, Exec exec = Exec::Parallel);

/// sum_j c_j a_j a_j^H; entries with c_j == 0 are skipped.
CMatrix weighted_gram(const CMatrix& atoms, const RVector& c, Exec exec = Exec::Parallel);

int max_threads();

}  // namespace cvr::kernels
