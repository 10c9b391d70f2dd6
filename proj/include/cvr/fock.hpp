#pragma once

// Truncated Fock-space states and operators.
//
// Single-mode states live on span{|0>,...,|N-1>}; bipartite states on the
// product of two such spaces with row-major index a * dim_b + b. Every state
// that is analytically infinite records the probability mass dropped by the
// truncation (`tail_weight`) and is renormalized on the retained block.

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cvr/error.hpp"

namespace cvr {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

struct TruncationPolicy {
  double tail_cap = 1e-8;
};

class DensityOperator;

class FockVector {
 public:
  /// Renormalizes `amplitudes`; `tail_weight` is the pre-renormalization deficit.
  FockVector(std::vector<int> dims, CVector amplitudes, double tail_weight = 0.0);

  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(amplitudes_.size()); }
  bool bipartite() const { return dims_.size() == 2; }
  const CVector& amplitudes() const { return amplitudes_; }
  double tail_weight() const { return tail_weight_; }

  DensityOperator projector() const;

 private:
  std::vector<int> dims_;
  CVector amplitudes_;
  double tail_weight_;
};

class DensityOperator {
 public:
  /// Checks the invariants (Hermitian to 1e-10, eigenvalues >= -1e-9, unit
  /// trace to 1e-9) and throws InvariantViolation otherwise.
  DensityOperator(std::vector<int> dims, CMatrix matrix, double tail_weight = 0.0);

  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  bool bipartite() const { return dims_.size() == 2; }
  const CMatrix& matrix() const { return matrix_; }
  double tail_weight() const { return tail_weight_; }

 private:
  std::vector<int> dims_;
  CMatrix matrix_;
  double tail_weight_;
};

// ---------------------------------------------------------------------------
// State specifications

namespace spec {
struct Fock { int n = 0; };
struct Coherent { cplx alpha{0.0, 0.0}; };
/// e^{r(a^2 - a^dag^2)/2}|0>
struct Squeezed { double r = 0.0; };
/// (|alpha> + |-alpha>) or (|alpha> - |-alpha>), normalized
struct Cat { cplx alpha{0.0, 0.0}; bool plus = true; };
struct Thermal { double nbar = 0.0; };
/// Phase average of |sqrt(nbar) e^{i theta}>; diagonal Poisson operator.
struct PhaseRandomizedCoherent { double nbar = 0.0; };
/// sqrt(1 - lambda^2) sum_n lambda^n |nn>; r = 2 artanh(lambda) is only a label.
struct TwoModeSqueezed { double lambda = 0.0; };
/// sum_n mu_n |nn> with the given (renormalized) Schmidt coefficients.
struct Schmidt { std::vector<double> coefficients; };
/// Explicit single-mode amplitudes, renormalized.
struct Amplitudes { std::vector<cplx> values; };
}  // namespace spec

using StateSpec = std::variant<spec::Fock, spec::Coherent, spec::Squeezed, spec::Cat,
                               spec::Thermal, spec::PhaseRandomizedCoherent,
                               spec::TwoModeSqueezed, spec::Schmidt, spec::Amplitudes>;

using State = std::variant<FockVector, DensityOperator>;

std::string kind_name(const StateSpec& s);
bool is_bipartite(const StateSpec& s);

/// Builds the truncated state. Bipartite specs use `dim` per subsystem.
State make_state(const StateSpec& s, int dim, const TruncationPolicy& policy = {});
FockVector make_pure(const StateSpec& s, int dim, const TruncationPolicy& policy = {});
DensityOperator make_density(const StateSpec& s, int dim, const TruncationPolicy& policy = {});
DensityOperator to_density(const State& s);

/// Unnormalized truncation of the infinite coherent vector: entries
/// e^{-|a|^2/2} a^k / sqrt(k!), k < dim.
CVector coherent_amplitudes(cplx alpha, int dim);
/// Probability mass of |alpha> on photon numbers >= dim.
double coherent_tail(cplx alpha, int dim);
/// Amplitudes of the squeezed vacuum on |0..dim-1>, unnormalized truncation.
CVector squeezed_amplitudes(double r, int dim);

/// <m|D(alpha)|n> for m, n < dim, exact matrix elements of the infinite operator.
CMatrix displacement_operator(cplx alpha, int dim);
/// <m|S(r)|n> for S(r) = e^{r(a^2 - a^dag^2)/2}, exact infinite-operator elements.
CMatrix squeeze_operator(double r, int dim);
CMatrix annihilation(int dim);

// ---------------------------------------------------------------------------
// Bipartite tools

struct SchmidtDecomposition {
  RVector coefficients;  // nonincreasing
  CMatrix left;          // columns u_n (d_A x k)
  CMatrix right;         // columns v_n (d_B x k)

  CVector reconstruct() const;
};

SchmidtDecomposition schmidt_decompose(const CVector& psi, int dim_a, int dim_b);
SchmidtDecomposition schmidt_decompose(const FockVector& psi);

CMatrix partial_transpose(const CMatrix& rho, int dim_a, int dim_b);
CMatrix partial_transpose(const DensityOperator& rho);
double trace_norm(const CMatrix& m);

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator dephase_diag(const DensityOperator& rho);
/// Trace-preserving Kraus channel; throws NotTracePreserving if
/// sum K^dag K deviates from the identity by more than 1e-8.
DensityOperator apply_channel(const DensityOperator& rho, std::span<const CMatrix> kraus);
/// Trace-nonincreasing CP map (sum K^dag K <= 1 + 1e-9); output is unnormalized.
CMatrix apply_subchannel(const CMatrix& rho, std::span<const CMatrix> kraus);

// ---------------------------------------------------------------------------
// Hilbert-operator gallery

/// State supported on span{|nn>}: rho = sum omega_{nm} |nn><mm|. Stored via
/// its d x d block so that large truncations stay cheap.
class MaximallyCorrelated {
 public:
  explicit MaximallyCorrelated(DensityOperator block) : block_(std::move(block)) {}
  const DensityOperator& block() const { return block_; }
  int local_dim() const { return block_.dim(); }
  DensityOperator to_dense() const;

 private:
  DensityOperator block_;
};

struct HilbertGallery {
  int dim;
  double normalization;  // c
  RVector weights;       // D_{nn} = 1 / (sqrt(n) ln(n+1)), n = 1..dim
  CMatrix hilbert;       // (H_{-1})_{nm}
  DensityOperator omega_plus;
  DensityOperator omega_minus;
  MaximallyCorrelated rho_plus;
  MaximallyCorrelated rho_minus;
};

/// (H_{-1})_{nm} = 1/(n-m) off the diagonal, 0 on it.
CMatrix hilbert_matrix(int dim);
/// 1 / (sqrt(n) ln(n+1)) for n = 1..dim.
RVector gallery_weights(int dim);
/// Requires dim >= 4.
HilbertGallery hilbert_gallery(int dim);

}  // namespace cvr
