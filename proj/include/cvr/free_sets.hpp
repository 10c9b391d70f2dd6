#pragma once

// Free sets and their free-value oracles sup_{sigma in F} Tr[W sigma].

#include <optional>
#include <variant>
#include <vector>

#include "cvr/fock.hpp"
#include "cvr/kernels.hpp"

namespace cvr {

struct RefinementSettings {
  int starts = 16;
  double initial_step = 0.05;
  int max_iters = 200;
  double tolerance = 1e-13;
};

/// Polar discretization of the disk |alpha| <= radius: the origin plus rings at
/// k * radial_step, each with angular_count equally spaced points. `extra`
/// holds points added by local refinement.
struct CoherentGrid {
  double radius = 4.0;
  double radial_step = 0.1;
  int angular_count = 64;
  RefinementSettings refinement;
  std::vector<cplx> extra;
  int level = 0;  // number of local refinement rounds applied

  std::vector<cplx> points() const;
  /// Diagonal of a grid cell at modulus r.
  double cell_size(double r) const;
  /// radius = max(4, 2 sqrt(max_photon) + 2).
  static CoherentGrid for_max_photon(int max_photon);
  void validate() const;
};

/// Appends the eight neighbours of each center at spacing radial_step / 2^level
/// and 2 pi / (angular_count 2^level), after incrementing level.
void refine_around(CoherentGrid& grid, const std::vector<cplx>& centers);

enum class FreeKind { Classical, Incoherent, Separable };

struct FreeSetModel {
  FreeKind kind = FreeKind::Classical;
  CoherentGrid grid;
  std::vector<int> dims;
  double tolerance = 1e-9;

  static FreeSetModel classical(CoherentGrid grid = {});
  static FreeSetModel incoherent();
  static FreeSetModel separable(int dim_a, int dim_b);
};

std::string kind_name(FreeKind kind);

enum class Certification { Exact, GridRefined, Heuristic, Analytic };
std::string to_string(Certification c);

struct ProductMaximizer {
  CVector left;
  CVector right;
};

/// Coherent amplitude, basis index, or product vector pair.
using Maximizer = std::variant<cplx, int, ProductMaximizer>;

struct FreeValueResult {
  double value = 0.0;
  Maximizer maximizer;
  Certification certified = Certification::Exact;
};

/// Q_W(alpha) = v^H W v with v the truncated coherent vector.
double coherent_q(const CMatrix& w, cplx alpha);
/// (dQ/dRe alpha, dQ/dIm alpha).
std::pair<double, double> coherent_q_gradient(const CMatrix& w, cplx alpha);

CVector tensor_vec(const CVector& a, const CVector& b);

/// Throws NotPSD if W has an eigenvalue below -1e-9 * max(1, |W|).
void require_psd(const CMatrix& w, const char* what);

FreeValueResult free_value(const CMatrix& w, const FreeSetModel& f,
                           kernels::Exec exec = kernels::Exec::Parallel);
/// Re-evaluates Tr[W sigma] at the reported maximizer.
double evaluate_maximizer(const CMatrix& w, const FreeSetModel& f, const Maximizer& m);

struct InnerCertificate {
  std::vector<cplx> points;  // normalized truncated coherent atoms
  RVector weights;           // nonnegative, summing to 1
  double residual = 0.0;     // trace norm of rho - sum_j w_j |alpha_j><alpha_j|
};

/// Nonnegative least squares of rho over the grid's normalized truncated
/// coherent projectors. std::nullopt means "not found", which is inconclusive.
std::optional<InnerCertificate> classicality_inner_certificate(const DensityOperator& rho,
                                                               const CoherentGrid& grid,
                                                               double tolerance = 1e-6);

}  // namespace cvr
