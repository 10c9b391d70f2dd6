#pragma once

// Channel discrimination tasks and the operational advantage ratio.

#include <cstdint>
#include <variant>
#include <vector>

#include "cvr/free_sets.hpp"
#include "cvr/solver.hpp"

namespace cvr {

namespace channel {
struct Identity {};
/// rho -> Tr[rho] * target
struct Replacer {
  CMatrix target;
};
struct Kraus {
  std::vector<CMatrix> ops;
};
}  // namespace channel

using Channel = std::variant<channel::Identity, channel::Replacer, channel::Kraus>;

const char* channel_name(const Channel& c);
CMatrix apply(const Channel& c, const CMatrix& rho);
/// Heisenberg-picture action on an effect.
CMatrix apply_adjoint(const Channel& c, const CMatrix& m);

struct DiscriminationTask {
  std::vector<double> probs;
  std::vector<Channel> channels;
  std::vector<CMatrix> povm;

  int dim() const;
  /// Sum p = 1 (1e-12), sum M = 1 (1e-9), M >= -1e-9, matching lengths,
  /// trace-preserving channels.
  void validate() const;
};

double p_success(const CMatrix& rho, const DiscriminationTask& task);
double p_success(const DensityOperator& rho, const DiscriminationTask& task);

/// Effective observable A = sum_i p_i Lambda_i^dag(M_i).
CMatrix effective_observable(const DiscriminationTask& task);

/// Two-outcome task whose advantage ratio equals Tr[W rho] / free value.
DiscriminationTask optimal_binary_task(const Witness& w);

struct AdvantageReport {
  double p_rho = 0.0;
  double p_free_best = 0.0;
  double ratio = 0.0;
  FreeValueResult free;
};

AdvantageReport advantage_ratio(const CMatrix& rho, const DiscriminationTask& task, const FreeSetModel& f);

/// Per-index seed derived by splitmix64, so tasks can be drawn independently.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Random task with `n` Kraus channels (isometries with `kraus_rank` operators)
/// and a random n-outcome POVM.
DiscriminationTask random_task(int dim, int n, std::uint64_t seed, int kraus_rank = 2);

}  // namespace cvr
