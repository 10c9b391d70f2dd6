#include "cvr/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cvr::io {

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::Schema, what); }

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    schema("not a number: '" + s + "'");
  }
  if (pos != s.size()) schema("not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v) || v < 0 || v > 1e6) schema("not a non-negative integer: '" + s + "'");
  return static_cast<int>(v);
}

cplx to_complex(std::string s) {
  if (s.empty()) schema("empty complex number");
  if (s.back() != 'i') return {to_double(s), 0.0};
  s.pop_back();
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E')
      return {to_double(s.substr(0, k)), to_double(s.substr(k))};
  }
  if (s.empty() || s == "+") return {0.0, 1.0};
  if (s == "-") return {0.0, -1.0};
  return {0.0, to_double(s)};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt(cplx z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i";
}

Json cnum(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx cnum_from(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) schema("complex entries are [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

double real_from(const Json& j, const char* key) {
  if (!j.contains(key)) schema(std::string("missing field '") + key + "'");
  const Json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  schema(std::string("field '") + key + "' must be a number");
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    schema(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

// ---------------------------------------------------------------------------

StateSpec parse_state(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) schema("state spec needs 'kind:params', got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  if (kind == "fock") return spec::Fock{to_int(arg)};
  if (kind == "coherent") return spec::Coherent{to_complex(arg)};
  if (kind == "squeezed") return spec::Squeezed{to_double(arg)};
  if (kind == "cat+" || kind == "cat") return spec::Cat{to_complex(arg), true};
  if (kind == "cat-") return spec::Cat{to_complex(arg), false};
  if (kind == "thermal") return spec::Thermal{to_double(arg)};
  if (kind == "prc") return spec::PhaseRandomizedCoherent{to_double(arg)};
  if (kind == "tmsv") {
    if (arg.rfind("lambda=", 0) == 0) return spec::TwoModeSqueezed{to_double(arg.substr(7))};
    if (arg.rfind("r=", 0) == 0) return spec::TwoModeSqueezed{std::tanh(to_double(arg.substr(2)) / 2.0)};
    return spec::TwoModeSqueezed{to_double(arg)};
  }
  if (kind == "schmidt") {
    spec::Schmidt s;
    for (const auto& p : split(arg, ',')) s.coefficients.push_back(to_double(p));
    return s;
  }
  if (kind == "amplitudes") {
    spec::Amplitudes a;
    for (const auto& p : split(arg, ',')) a.values.push_back(to_complex(p));
    return a;
  }
  schema("unknown state kind '" + kind + "'");
}

std::string label(const StateSpec& s) {
  return std::visit(
      overloaded{[](const spec::Fock& x) { return "fock:" + std::to_string(x.n); },
                 [](const spec::Coherent& x) { return "coherent:" + fmt(x.alpha); },
                 [](const spec::Squeezed& x) { return "squeezed:" + fmt(x.r); },
                 [](const spec::Cat& x) { return std::string(x.plus ? "cat+:" : "cat-:") + fmt(x.alpha); },
                 [](const spec::Thermal& x) { return "thermal:" + fmt(x.nbar); },
                 [](const spec::PhaseRandomizedCoherent& x) { return "prc:" + fmt(x.nbar); },
                 [](const spec::TwoModeSqueezed& x) { return "tmsv:lambda=" + fmt(x.lambda); },
                 [](const spec::Schmidt& x) {
                   std::string out = "schmidt:";
                   for (std::size_t i = 0; i < x.coefficients.size(); ++i) out += (i ? "," : "") + fmt(x.coefficients[i]);
                   return out;
                 },
                 [](const spec::Amplitudes& x) {
                   std::string out = "amplitudes:";
                   for (std::size_t i = 0; i < x.values.size(); ++i) out += (i ? "," : "") + fmt(x.values[i]);
                   return out;
                 }},
      s);
}

FreeKind parse_free_kind(const std::string& text) {
  if (text == "classical") return FreeKind::Classical;
  if (text == "incoherent") return FreeKind::Incoherent;
  if (text == "separable") return FreeKind::Separable;
  schema("unknown free set '" + text + "'");
}

Json to_json(const StateSpec& s) {
  Json params = Json::object();
  std::visit(overloaded{[&](const spec::Fock& x) { params["n"] = x.n; },
                        [&](const spec::Coherent& x) { params["alpha"] = cnum(x.alpha); },
                        [&](const spec::Squeezed& x) { params["r"] = x.r; },
                        [&](const spec::Cat& x) { params["alpha"] = cnum(x.alpha); },
                        [&](const spec::Thermal& x) { params["nbar"] = x.nbar; },
                        [&](const spec::PhaseRandomizedCoherent& x) { params["nbar"] = x.nbar; },
                        [&](const spec::TwoModeSqueezed& x) { params["lambda"] = x.lambda; },
                        [&](const spec::Schmidt& x) { params["coefficients"] = x.coefficients; },
                        [&](const spec::Amplitudes& x) {
                          Json a = Json::array();
                          for (cplx z : x.values) a.push_back(cnum(z));
                          params["values"] = a;
                        }},
             s);
  return Json{{"kind", kind_name(s)}, {"params", params}};
}

Json to_json(const StateRequest& r) {
  Json j = to_json(r.spec);
  j["dim"] = r.dim;
  j["tail_cap"] = r.policy.tail_cap;
  return j;
}

StateRequest state_request_from_json(const Json& j) {
  if (!j.is_object()) schema("state must be an object {kind, params, dim}");
  if (!j.contains("kind") || !j["kind"].is_string()) schema("state needs a string 'kind'");
  const auto kind = j["kind"].get<std::string>();
  const Json params = j.contains("params") ? j["params"] : Json::object();
  if (!params.is_object()) schema("'params' must be an object");
  StateRequest r;
  if (kind == "fock") {
    const double n = real_from(params, "n");
    if (n < 0 || n != std::floor(n)) schema("fock 'n' must be a non-negative integer");
    r.spec = spec::Fock{static_cast<int>(n)};
  } else if (kind == "coherent") {
    if (!params.contains("alpha")) schema("coherent needs 'alpha'");
    r.spec = spec::Coherent{cnum_from(params["alpha"])};
  } else if (kind == "squeezed") {
    r.spec = spec::Squeezed{real_from(params, "r")};
  } else if (kind == "cat_plus" || kind == "cat_minus") {
    if (!params.contains("alpha")) schema("cat needs 'alpha'");
    r.spec = spec::Cat{cnum_from(params["alpha"]), kind == "cat_plus"};
  } else if (kind == "thermal") {
    r.spec = spec::Thermal{real_from(params, "nbar")};
  } else if (kind == "phase_randomized_coherent") {
    r.spec = spec::PhaseRandomizedCoherent{real_from(params, "nbar")};
  } else if (kind == "tmsv") {
    r.spec = spec::TwoModeSqueezed{real_from(params, "lambda")};
  } else if (kind == "schmidt") {
    r.spec = spec::Schmidt{get_or<std::vector<double>>(params, "coefficients", {})};
  } else if (kind == "amplitudes") {
    if (!params.contains("values") || !params["values"].is_array()) schema("amplitudes needs 'values'");
    spec::Amplitudes a;
    for (const Json& z : params["values"]) a.values.push_back(cnum_from(z));
    r.spec = a;
  } else {
    schema("unknown state kind '" + kind + "'");
  }
  r.dim = static_cast<int>(real_from(j, "dim"));
  r.policy.tail_cap = j.contains("tail_cap") ? real_from(j, "tail_cap") : TruncationPolicy{}.tail_cap;
  return r;
}

// ---------------------------------------------------------------------------

Json to_json(const CMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(cnum(m(i, k)));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Json to_json(const CVector& v) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(cnum(v(i)));
  return data;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_object()) schema("matrix must be an object {rows, cols, data}");
  const double rows = real_from(j, "rows"), cols = real_from(j, "cols");
  if (rows < 0 || cols < 0 || rows != std::floor(rows) || cols != std::floor(cols)) schema("bad matrix shape");
  if (!j.contains("data") || !j["data"].is_array()) schema("matrix needs a 'data' array");
  const auto r = static_cast<Eigen::Index>(rows), c = static_cast<Eigen::Index>(cols);
  if (static_cast<Eigen::Index>(j["data"].size()) != r * c) schema("matrix data length does not match its shape");
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = cnum_from(j["data"][static_cast<std::size_t>(i * c + k)]);
  return m;
}

namespace {
void put_u32(std::string& s, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}
void put_u64(std::string& s, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}
std::uint64_t get_u(const std::string& s, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[at + static_cast<std::size_t>(b)])) << (8 * b);
  return v;
}
}  // namespace

std::string matrix_to_binary(const CMatrix& m) {
  std::string out = "CVRM";
  put_u32(out, 1);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      put_u64(out, std::bit_cast<std::uint64_t>(m(i, k).real()));
      put_u64(out, std::bit_cast<std::uint64_t>(m(i, k).imag()));
    }
  return out;
}

CMatrix matrix_from_binary(const std::string& bytes) {
  if (bytes.size() < 24 || bytes.compare(0, 4, "CVRM") != 0) schema("not a CVRM matrix file");
  if (get_u(bytes, 4, 4) != 1) schema("unsupported CVRM version");
  const std::uint64_t r = get_u(bytes, 8, 8), c = get_u(bytes, 16, 8);
  if (r > (1u << 20) || c > (1u << 20) || bytes.size() != 24 + 16 * r * c) schema("CVRM size does not match its shape");
  CMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  std::size_t at = 24;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      const double re = std::bit_cast<double>(get_u(bytes, at, 8));
      const double im = std::bit_cast<double>(get_u(bytes, at + 8, 8));
      m(i, k) = {re, im};
      at += 16;
    }
  return m;
}

// ---------------------------------------------------------------------------

Json to_json(const CoherentGrid& g, bool with_extra) {
  Json j{{"radius", g.radius},
         {"radial_step", g.radial_step},
         {"angular_count", g.angular_count},
         {"refinement", {{"starts", g.refinement.starts},
                         {"initial_step", g.refinement.initial_step},
                         {"max_iters", g.refinement.max_iters},
                         {"tolerance", g.refinement.tolerance}}},
         {"level", g.level},
         {"extra_points", g.extra.size()}};
  if (with_extra) {
    Json e = Json::array();
    for (cplx z : g.extra) e.push_back(cnum(z));
    j["extra"] = e;
  }
  return j;
}

CoherentGrid grid_from_json(const Json& j, CoherentGrid g) {
  if (!j.is_object()) schema("grid must be an object");
  if (j.contains("radius")) g.radius = real_from(j, "radius");
  if (j.contains("radial_step")) g.radial_step = real_from(j, "radial_step");
  if (j.contains("angular_count")) g.angular_count = static_cast<int>(real_from(j, "angular_count"));
  if (j.contains("refinement")) {
    const Json& r = j["refinement"];
    if (!r.is_object()) schema("grid 'refinement' must be an object");
    g.refinement.starts = get_or<int>(r, "starts", g.refinement.starts);
    g.refinement.initial_step = get_or<double>(r, "initial_step", g.refinement.initial_step);
    g.refinement.max_iters = get_or<int>(r, "max_iters", g.refinement.max_iters);
    g.refinement.tolerance = get_or<double>(r, "tolerance", g.refinement.tolerance);
  }
  if (j.contains("extra")) {
    if (!j["extra"].is_array()) schema("grid 'extra' must be an array");
    for (const Json& z : j["extra"]) g.extra.push_back(cnum_from(z));
  }
  try {
    g.validate();
  } catch (const Error& e) {
    schema(std::string("invalid grid: ") + e.what());
  }
  return g;
}

Json to_json(const FreeSetModel& f) {
  Json j{{"kind", kind_name(f.kind)}};
  if (f.kind == FreeKind::Classical) j["grid"] = to_json(f.grid);
  if (f.kind == FreeKind::Separable) j["dims"] = f.dims;
  j["tolerance"] = f.tolerance;
  return j;
}

FreeSetModel free_model_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) schema("free set needs a string 'kind'");
  FreeSetModel f;
  f.kind = parse_free_kind(j["kind"].get<std::string>());
  if (j.contains("grid")) f.grid = grid_from_json(j["grid"]);
  if (j.contains("dims")) f.dims = get_or<std::vector<int>>(j, "dims", {});
  if (f.kind == FreeKind::Separable && f.dims.size() != 2) schema("separable model needs two 'dims'");
  f.tolerance = j.contains("tolerance") ? real_from(j, "tolerance") : f.tolerance;
  return f;
}

Json to_json(const Maximizer& m) {
  return std::visit(overloaded{[](cplx a) { return Json{{"type", "coherent"}, {"alpha", cnum(a)}}; },
                               [](int n) { return Json{{"type", "basis"}, {"index", n}}; },
                               [](const ProductMaximizer& p) {
                                 return Json{{"type", "product"}, {"left", to_json(p.left)}, {"right", to_json(p.right)}};
                               }},
                    m);
}

Json to_json(const FreeValueResult& f) {
  return Json{{"value", number(f.value)}, {"certification", to_string(f.certified)}, {"maximizer", to_json(f.maximizer)}};
}

Json to_json(const RobustnessBounds& b) {
  return Json{{"lower", number(b.lower)},
              {"upper", number(b.upper)},
              {"gap", number(b.gap())},
              {"relative_gap", number(b.relative_gap())},
              {"lower_method", to_string(b.lower_method)},
              {"upper_method", to_string(b.upper_method)},
              {"lower_certified", b.lower_certified},
              {"note", b.note}};
}

Json to_json(const Witness& w) {
  return Json{{"schema_version", kSchemaVersion},
              {"rescaled", w.rescaled},
              {"free_value", to_json(w.free_value)},
              {"operator", to_json(w.op)}};
}

Witness witness_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("operator")) schema("witness needs an 'operator' matrix");
  Witness w;
  w.op = matrix_from_json(j["operator"]);
  if (w.op.rows() != w.op.cols()) schema("witness operator must be square");
  w.rescaled = get_or<bool>(j, "rescaled", false);
  if (j.contains("free_value") && j["free_value"].is_object()) w.free_value.value = real_from(j["free_value"], "value");
  return w;
}

Json to_json(const SolverReport& r, bool with_cuts) {
  Json j{{"bounds", to_json(r.bounds)},
         {"iterations", r.iterations},
         {"cuts", r.cuts},
         {"lp_value", number(r.lp_value)},
         {"min_eigenvalue", number(r.min_eigenvalue)},
         {"termination", to_string(r.termination)},
         {"truncation_tail", r.truncation_tail},
         {"witness_free_value", to_json(r.witness.free_value)}};
  Json support = Json::array();
  for (Eigen::Index i = 0; i < r.weights.size(); ++i) {
    if (!(r.weights(i) > 1e-12)) continue;
    Json e{{"weight", r.weights(i)}};
    if (static_cast<std::size_t>(i) < r.points.size()) e["alpha"] = cnum(r.points[static_cast<std::size_t>(i)]);
    else e["index"] = i;
    support.push_back(e);
  }
  j["primal_support"] = support;
  if (with_cuts) {
    Json cuts = Json::array();
    for (const CVector& v : r.cut_log) cuts.push_back(to_json(v));
    j["cut_log"] = cuts;
  }
  return j;
}

SolverConfig solver_config_from_json(const Json& j, SolverConfig c) {
  if (!j.is_object()) schema("solver config must be an object");
  static const char* known[] = {"cut_tol", "max_cuts", "gap_tol", "refinement_rounds", "polish_iters", "product_atoms", "seed", "emit_cuts"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) schema("unknown solver option '" + key + "'");
  }
  c.cut_tol = get_or<double>(j, "cut_tol", c.cut_tol);
  c.max_cuts = get_or<int>(j, "max_cuts", c.max_cuts);
  c.gap_tol = get_or<double>(j, "gap_tol", c.gap_tol);
  c.refinement_rounds = get_or<int>(j, "refinement_rounds", c.refinement_rounds);
  c.polish_iters = get_or<int>(j, "polish_iters", c.polish_iters);
  c.product_atoms = get_or<int>(j, "product_atoms", c.product_atoms);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.emit_cuts = get_or<bool>(j, "emit_cuts", c.emit_cuts);
  if (!(c.cut_tol > 0) || c.max_cuts < 1 || !(c.gap_tol > 0) || c.refinement_rounds < 0 || c.polish_iters < 0 || c.product_atoms < 0)
    schema("solver options out of range");
  return c;
}

// ---------------------------------------------------------------------------

Json to_json(const DiscriminationTask& t) {
  Json ens = Json::array();
  for (std::size_t i = 0; i < t.probs.size(); ++i) {
    Json ch{{"type", channel_name(t.channels[i])}};
    std::visit(overloaded{[](const channel::Identity&) {},
                          [&](const channel::Replacer& r) { ch["target"] = to_json(r.target); },
                          [&](const channel::Kraus& k) {
                            Json ops = Json::array();
                            for (const CMatrix& a : k.ops) ops.push_back(to_json(a));
                            ch["kraus"] = ops;
                          }},
               t.channels[i]);
    ens.push_back(Json{{"probability", t.probs[i]}, {"channel", ch}});
  }
  Json povm = Json::array();
  for (const CMatrix& m : t.povm) povm.push_back(to_json(m));
  return Json{{"schema_version", kSchemaVersion}, {"ensemble", ens}, {"povm", povm}};
}

DiscriminationTask task_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("ensemble") || !j.contains("povm")) schema("task needs 'ensemble' and 'povm'");
  if (!j["ensemble"].is_array() || !j["povm"].is_array()) schema("task 'ensemble' and 'povm' must be arrays");
  DiscriminationTask t;
  for (const Json& e : j["ensemble"]) {
    if (!e.is_object() || !e.contains("channel")) schema("ensemble entries need 'probability' and 'channel'");
    t.probs.push_back(real_from(e, "probability"));
    const Json& ch = e["channel"];
    const auto type = get_or<std::string>(ch, "type", "");
    if (type == "identity") {
      t.channels.emplace_back(channel::Identity{});
    } else if (type == "replacer") {
      if (!ch.contains("target")) schema("replacer needs 'target'");
      t.channels.emplace_back(channel::Replacer{matrix_from_json(ch["target"])});
    } else if (type == "kraus") {
      if (!ch.contains("kraus") || !ch["kraus"].is_array()) schema("kraus channel needs a 'kraus' array");
      channel::Kraus k;
      for (const Json& a : ch["kraus"]) k.ops.push_back(matrix_from_json(a));
      t.channels.emplace_back(std::move(k));
    } else {
      schema("unknown channel type '" + type + "'");
    }
  }
  for (const Json& m : j["povm"]) t.povm.push_back(matrix_from_json(m));
  return t;
}

Json to_json(const AdvantageReport& a) {
  return Json{{"p_rho", a.p_rho}, {"p_free_best", a.p_free_best}, {"ratio", a.ratio}, {"free", to_json(a.free)}};
}

// ---------------------------------------------------------------------------

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) schema("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error(ErrorKind::InvalidParameter, "short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace cvr::io
