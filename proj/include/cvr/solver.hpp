#pragma once

// Certified brackets of the generalized robustness
//
//   R(rho) = min { sum_j c_j : sum_j c_j a_j a_j^H >= rho, c >= 0 }
//
// over rank-one free atoms a_j, together with its dual witnesses W >= 0,
// sup_F Tr[W sigma] <= 1.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cvr/free_sets.hpp"
#include "cvr/measures.hpp"

namespace cvr {

struct Witness {
  CMatrix op;
  FreeValueResult free_value;
  bool rescaled = false;

  double expectation(const CMatrix& rho) const;
  /// min eigenvalue >= -1e-9 and, when rescaled, free value in [1 - 1e-6, 1].
  void check() const;
};

enum class Termination { Converged, IterationCap, Infeasible };
std::string to_string(Termination t);

struct SolverConfig {
  double cut_tol = 1e-9;
  int max_cuts = 2000;
  double gap_tol = 5e-3;  // relative
  int refinement_rounds = 3;
  int polish_iters = 400;
  int product_atoms = 200;
  std::uint64_t seed = 1;
  bool emit_cuts = false;
  kernels::Exec exec = kernels::Exec::Parallel;
};

struct SolverReport {
  RobustnessBounds bounds;
  int iterations = 0;
  int cuts = 0;
  double lp_value = 0.0;
  double min_eigenvalue = 0.0;  // of the terminal sum_j c_j a_j a_j^H - rho
  Witness witness;
  Termination termination = Termination::Converged;
  std::vector<CVector> cut_log;
  RVector weights;               // certified primal weights on `atoms`
  std::vector<cplx> points;      // coherent amplitudes of the atoms (classical runs)
  double truncation_tail = 0.0;  // tail weight of the input state
};

struct ScalingCertificate {
  double t = std::numeric_limits<double>::infinity();
  RVector weights;
  double min_eigenvalue = -std::numeric_limits<double>::infinity();
  bool ok = false;
};

/// Smallest s with s * sum_j c_j a_j a_j^H >= rho, trying the support
/// pseudo-inverse and regularizations by the uniform atom average, each
/// verified by an eigenvalue check at -1e-9.
ScalingCertificate certify_scaling(const CMatrix& rho, const CMatrix& atoms, const RVector& c,
                                   kernels::Exec exec = kernels::Exec::Parallel);

/// Multiplicative design updates on the atom weights; returns the best weights found.
RVector design_polish(const CMatrix& rho, const CMatrix& atoms, int iters, RVector start = {},
                      kernels::Exec exec = kernels::Exec::Parallel);

/// Rank-one witness candidate |x><x| with x = sigma^{-1} B u, where rho = B B^H,
/// sigma = sum_j c_j a_j a_j^H and u is the top eigenvector of B^H sigma^{-1} B.
/// Optimal for pure states at the optimal design.
Witness design_witness(const CMatrix& rho, const CMatrix& atoms, const RVector& c,
                       kernels::Exec exec = kernels::Exec::Parallel);

/// Eigenvector cutting planes over the atoms. bounds.upper is the certified
/// scaled value; lp_value is the relaxation value. Throws Infeasible when rho
/// leaves the span of the atoms.
SolverReport primal_upper(const CMatrix& rho, const CMatrix& atoms, const SolverConfig& config = {},
                          const std::vector<CVector>& seed_cuts = {});

struct DualResult {
  RobustnessBounds bounds;
  Witness witness;
};

/// Rescales the candidate by its free value over the full model.
DualResult dual_lower(const CMatrix& rho, const FreeSetModel& f, const Witness& candidate);

struct FeasibleCheck {
  bool accepted = false;
  double t = 0.0;
  double min_eigenvalue = 0.0;
};

/// Accepts t when t sigma - rho >= -1e-9.
FeasibleCheck feasible_point_upper(const CMatrix& rho, const CMatrix& sigma, double t);
/// rho = sum omega_nm |nn><mm| against sigma = sum s_n |nn><nn|.
FeasibleCheck feasible_point_upper(const MaximallyCorrelated& rho, const RVector& sigma_diag, double t);

/// Exact incoherent robustness: block-coordinate ascent on the dual
/// (W = V V^H with unit rows) and the primal read off by complementary slackness.
SolverReport incoherent_exact(const CMatrix& rho, std::uint64_t seed = 1);

/// W = |v><v| with v = sum_n |u_n w_n>: free value 1 over product states.
Witness cauchy_schwarz_witness(const SchmidtDecomposition& sd, int dim_a, int dim_b);
/// (|psi><psi| + sum_{n != m} mu_n mu_m |u_n w_m><u_n w_m|) / (sum mu)^2, separable.
CMatrix separable_noise_state(const SchmidtDecomposition& sd, int dim_a, int dim_b);
/// Exact pure-state separable robustness with both certificates.
SolverReport separable_pure(const FockVector& psi, bool dense_check = true);

/// Random product vectors (seeded) plus the computational product basis.
CMatrix product_atoms(int dim_a, int dim_b, int count, std::uint64_t seed);

SolverReport sandwich(const DensityOperator& rho, const FreeSetModel& f, const SolverConfig& config = {});

/// Default grid for a state: CoherentGrid::for_max_photon(ceil(<n> + 3 sd(n))).
CoherentGrid default_grid_for(const CMatrix& rho);

}  // namespace cvr
