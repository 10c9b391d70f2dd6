#pragma once

// Closed forms, the pure-state sandwich, negativity, l1 coherence and the
// normally ordered characteristic function.

#include <limits>
#include <string>

#include "cvr/fock.hpp"
#include "cvr/free_sets.hpp"

namespace cvr {

enum class Method { None, ClosedForm, Lemma4, Witness, CuttingPlane, FeasiblePoint };
std::string to_string(Method m);

struct RobustnessBounds {
  double lower = 1.0;
  double upper = std::numeric_limits<double>::infinity();
  Method lower_method = Method::None;
  Method upper_method = Method::None;
  /// False when the lower bound rests on a heuristic free value.
  bool lower_certified = true;
  std::string note;

  double gap() const { return upper - lower; }
  double relative_gap() const { return (upper - lower) / std::max(1.0, std::abs(upper)); }
  /// lower <= upper + 1e-8 and both >= 1 - 1e-9.
  void check() const;
};

struct ClosedForm {
  double value = 1.0;
  bool upper_only = false;
  std::string formula;
};

/// Throws NoClosedForm for families without a known value under `free`.
ClosedForm closed_form(const StateSpec& s, FreeKind free);

struct Lemma4Value {
  double value = 0.0;
  bool infinite = false;
};

/// 1 / <psi|sigma|psi>. Only a valid lower bound for the minimizing sigma;
/// see lemma4_lower_certified for a bound that holds on its own.
Lemma4Value lemma4_lower(const FockVector& psi, const DensityOperator& sigma);

/// 1 / sup_{sigma in F} <psi|sigma|psi>, the witness bound from W = |psi><psi|.
Lemma4Value lemma4_lower_certified(const FockVector& psi, const FreeSetModel& f);

struct Lemma4Upper {
  double value = 0.0;
  double value_fine = 0.0;        // at cutoff / 10
  double relative_sensitivity = 0.0;
  double support_residual = 0.0;  // |(1 - P_supp) psi|
  bool stable = true;             // the two cutoffs agree within 0.1%
};

/// <psi|sigma^+|psi> with eigenvalue cutoff `cutoff_rel` * lambda_max.
/// Throws OutsideSupport if psi leaves the support by more than 1e-8.
Lemma4Upper lemma4_upper(const FockVector& psi, const DensityOperator& sigma, double cutoff_rel = 1e-10);

/// S(s) tau_N S(s)^dag with e^{2s} = 2N + 1: a classical squeezed thermal state
/// on the boundary of the classical set.
DensityOperator squeezed_thermal_ansatz(double nbar, int dim);

struct SqueezedAnsatzResult {
  double nbar = 0.0;
  Lemma4Upper bound;
};

/// Golden-section minimization of lemma4_upper(psi, ansatz(N)) over N.
SqueezedAnsatzResult squeezed_ansatz_upper(const FockVector& psi, double tol = 1e-6);

/// Equal mixture of |alpha><alpha| and |-alpha><-alpha| (truncated, renormalized).
DensityOperator two_coherent_mixture(cplx alpha, int dim);

double negativity(const DensityOperator& rho);
/// Uses |rho^Gamma|_1 = sum_{n,m} |omega_nm|.
double negativity(const MaximallyCorrelated& rho);
double l1_norm(const CMatrix& rho);
inline double l1_norm(const DensityOperator& rho) { return l1_norm(rho.matrix()); }

/// e^{|alpha|^2/2} Tr[rho D(alpha)]; throws TruncationUnsound if D(alpha)D(-alpha)
/// deviates from the identity on rho's block by more than 1e-6.
cplx chi1(const DensityOperator& rho, cplx alpha);

struct StdRobustnessBound {
  double lower = 1.0;
  double sup_chi1 = 1.0;
  cplx argmax{0.0, 0.0};
  CoherentGrid grid;
};

StdRobustnessBound std_robustness_lower(const DensityOperator& rho, const CoherentGrid& grid);

}  // namespace cvr
