#pragma once

// JSON and binary serialization of specs, matrices, models, reports and tasks.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "cvr/discrimination.hpp"
#include "cvr/fock.hpp"
#include "cvr/free_sets.hpp"
#include "cvr/measures.hpp"
#include "cvr/solver.hpp"

namespace cvr::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct StateRequest {
  StateSpec spec;
  int dim = 0;
  TruncationPolicy policy;
};

/// Accepts "fock:3", "coherent:1.5", "coherent:1+0.5i", "squeezed:0.5",
/// "cat+:1", "cat-:1", "thermal:0.5", "prc:1", "tmsv:lambda=0.5", "tmsv:r=1",
/// "schmidt:0.8,0.6", "amplitudes:1,1".
StateSpec parse_state(const std::string& text);
std::string label(const StateSpec& s);
FreeKind parse_free_kind(const std::string& text);

Json to_json(const StateSpec& s);
Json to_json(const StateRequest& r);
StateRequest state_request_from_json(const Json& j);

Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);
Json to_json(const CVector& v);

/// "CVRM", u32 version, u64 rows, u64 cols, then little-endian f64 (re, im)
/// pairs in row-major order.
std::string matrix_to_binary(const CMatrix& m);
CMatrix matrix_from_binary(const std::string& bytes);

Json to_json(const CoherentGrid& g, bool with_extra = false);
CoherentGrid grid_from_json(const Json& j, CoherentGrid base = {});
Json to_json(const FreeSetModel& f);
FreeSetModel free_model_from_json(const Json& j);

Json to_json(const Maximizer& m);
Json to_json(const FreeValueResult& f);
Json to_json(const RobustnessBounds& b);
Json to_json(const Witness& w);
Witness witness_from_json(const Json& j);
Json to_json(const SolverReport& r, bool with_cuts);
SolverConfig solver_config_from_json(const Json& j, SolverConfig base = {});

Json to_json(const DiscriminationTask& t);
DiscriminationTask task_from_json(const Json& j);
Json to_json(const AdvantageReport& a);

/// Finite doubles as numbers, infinities as "inf" / "-inf".
Json number(double x);

Json parse_json(const std::string& text);
std::string read_file(const std::filesystem::path& p);
/// Writes to a sibling temporary and renames, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& p, const std::string& content);

}  // namespace cvr::io
