#pragma once

// The end-to-end acceptance suite, shared by the CLI and the acceptance binary.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cvr/io.hpp"

namespace cvr::acceptance {

struct Options {
  bool quick = false;
  std::uint64_t seed = 1;
  /// When set, criterion 10 also runs `<cli> reproduce-all --quick` twice and
  /// compares the files byte for byte.
  std::optional<std::string> cli_path;
  std::string scratch_dir = "acceptance_scratch";
};

struct Result {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;
  io::Json details;
  double seconds = 0.0;  // wall time, kept out of the report
};

inline constexpr int kCriteria = 10;

Result run(int id, const Options& opts);
std::vector<Result> run_all(const Options& opts, const std::function<void(const Result&)>& on_done = {});
/// Deterministic summary: no wall-clock fields.
io::Json report(const std::vector<Result>& results, const Options& opts);
std::string line(const Result& r);

/// Random density matrix G G^dag / Tr with G of size dim x rank.
CMatrix random_state(int dim, int rank, std::uint64_t seed);
/// Kraus operators of q P_1 . P_1^dag mixtures of permutations plus a full-dephasing branch.
std::vector<CMatrix> random_incoherent_channel(int dim, std::uint64_t seed);

}  // namespace cvr::acceptance
