#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cclab/error.hpp"
#include "cclab/families.hpp"
#include "cclab/fixtures.hpp"

// Fixture documents as JSON and sweeps as CSV.
//
//   {"schema_version": "1", "kind": <fixture kind>, "name": ..., "description": ...,
//    "payload": {...}}
//
// Every array is {"shape": [...], "data": [...]} in row-major order.

namespace cclab {

inline constexpr const char* kSchemaVersion = "1";

namespace io {

using json = nlohmann::json;

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ParseError(where + ": expected a non-negative integer");
  const auto v = j.get<long long>();
  if (v < 0) throw ParseError(where + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

template <std::size_t R>
json to_json(const Array<R>& a) {
  json shape = json::array();
  for (std::size_t s : a.shape()) shape.push_back(s);
  return {{"shape", shape}, {"data", a.data()}};
}

inline json to_json(const Vector& v) { return {{"shape", {v.size()}}, {"data", v}}; }

template <std::size_t R>
Array<R> array_from(const json& j, const std::string& where, const typename Array<R>::Shape& expect) {
  const json& sh = field(j, "shape", where);
  const json& da = field(j, "data", where);
  if (!sh.is_array() || sh.size() != R) throw ParseError(where + ": shape must have rank " + std::to_string(R));
  typename Array<R>::Shape shape{};
  std::size_t total = 1;
  for (std::size_t k = 0; k < R; ++k) {
    shape[k] = count(sh[k], where + ".shape");
    total *= shape[k];
  }
  if (shape != expect) {
    std::string want, got;
    for (std::size_t k = 0; k < R; ++k) {
      want += (k ? "x" : "") + std::to_string(expect[k]);
      got += (k ? "x" : "") + std::to_string(shape[k]);
    }
    throw ParseError(where + ": shape " + got + " does not match the expected " + want);
  }
  if (!da.is_array() || da.size() != total)
    throw ParseError(where + ": data length " + std::to_string(da.is_array() ? da.size() : 0) + " does not match shape");
  Array<R> a(shape);
  std::vector<double>& out = a.data();
  for (std::size_t k = 0; k < total; ++k) out[k] = number(da[k], where + ".data");
  return a;
}

inline Vector vector_from(const json& j, const std::string& where, std::size_t n) {
  const Array<1> a = array_from<1>(j, where, {n});
  return a.data();
}

inline json to_json(const CurvatureTensor& r) { return to_json(r.array()); }

inline CurvatureTensor tensor_from(const json& j, const std::string& where, std::size_t n) {
  CurvatureTensor r(n);
  const Array4 a = array_from<4>(j, where, {n, n, n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t m = 0; m < n; ++m) r(i, k, l, m) = a(i, k, l, m);
  return r;
}

/// Tensor whose dimension is read from its own shape.
inline CurvatureTensor tensor_from(const json& j, const std::string& where) {
  const json& sh = field(j, "shape", where);
  if (!sh.is_array() || sh.size() != 4) throw ParseError(where + ": curvature tensor must have rank 4");
  return tensor_from(j, where, count(sh[0], where + ".shape"));
}

// --- Lie algebras -----------------------------------------------------------

inline json to_json(const LieAlgebraData& g) {
  return {{"name", g.name}, {"dim", g.dim}, {"structure_constants", to_json(g.c)}, {"inner_product", to_json(g.ip)}};
}

inline LieAlgebraData algebra_from(const json& j, const std::string& where) {
  LieAlgebraData g;
  g.name = j.contains("name") ? text(j["name"], where + ".name") : std::string("algebra");
  g.dim = count(field(j, "dim", where), where + ".dim");
  g.c = array_from<3>(field(j, "structure_constants", where), where + ".structure_constants", {g.dim, g.dim, g.dim});
  g.ip = array_from<2>(field(j, "inner_product", where), where + ".inner_product", {g.dim, g.dim});
  return g;
}

inline json to_json(const ReductiveSplit& s) {
  return {{"algebra", to_json(s.algebra)}, {"dim_k", s.dim_k}, {"basis", to_json(s.basis)}};
}

inline ReductiveSplit split_from(const json& j, const std::string& where) {
  ReductiveSplit s;
  s.algebra = algebra_from(field(j, "algebra", where), where + ".algebra");
  s.dim_k = count(field(j, "dim_k", where), where + ".dim_k");
  if (s.dim_k > s.algebra.dim) throw ParseError(where + ": dim_k exceeds the algebra dimension");
  const std::size_t n = s.algebra.dim;
  s.basis = j.contains("basis") ? array_from<2>(j["basis"], where + ".basis", {n, n}) : identity(n);
  return s;
}

// --- Submersion data --------------------------------------------------------

inline json to_json(const SubmersionPointData& d) {
  return {{"p", d.p},
          {"b", d.b},
          {"fiber_curvature", to_json(d.rv)},
          {"base_curvature", to_json(d.rb)},
          {"A", to_json(d.a)},
          {"T", to_json(d.t)},
          {"DT_vert", to_json(d.dt_vert)},
          {"DT_horiz", to_json(d.dt_horiz)},
          {"DA_vert", to_json(d.da_vert)},
          {"DA_horiz", to_json(d.da_horiz)},
          {"DA_vert2", to_json(d.da_vert2)}};
}

/// Zero arrays may be omitted; DA_vert2 is derived from DA_vert if absent.
inline SubmersionPointData submersion_from(const json& j, const std::string& where) {
  const std::size_t p = count(field(j, "p", where), where + ".p");
  const std::size_t b = count(field(j, "b", where), where + ".b");
  SubmersionPointData d = SubmersionPointData::zeros(p, b);
  auto opt4 = [&](const char* key, Array4& dst) {
    if (j.contains(key)) dst = array_from<4>(j[key], where + "." + key, dst.shape());
  };
  auto opt3 = [&](const char* key, Array3& dst) {
    if (j.contains(key)) dst = array_from<3>(j[key], where + "." + key, dst.shape());
  };
  if (j.contains("fiber_curvature")) d.rv = tensor_from(j["fiber_curvature"], where + ".fiber_curvature", p);
  if (j.contains("base_curvature")) d.rb = tensor_from(j["base_curvature"], where + ".base_curvature", b);
  opt3("A", d.a);
  opt3("T", d.t);
  opt4("DT_vert", d.dt_vert);
  opt4("DT_horiz", d.dt_horiz);
  opt4("DA_vert", d.da_vert);
  opt4("DA_horiz", d.da_horiz);
  if (j.contains("DA_vert2"))
    opt4("DA_vert2", d.da_vert2);
  else
    derive_da_vert2(d);
  return d;
}

inline json to_json(const WarpData& w) {
  return {{"f", w.f}, {"grad_f", to_json(w.grad_f)}, {"hess_f", to_json(w.hess_f)},
          {"h", w.h}, {"grad_h", to_json(w.grad_h)}, {"hess_h", to_json(w.hess_h)}};
}

inline WarpData warp_from(const json& j, const std::string& where, std::size_t b) {
  WarpData w = WarpData::zeros(b);
  if (j.contains("f")) w.f = number(j["f"], where + ".f");
  if (j.contains("h")) w.h = number(j["h"], where + ".h");
  if (j.contains("grad_f")) w.grad_f = vector_from(j["grad_f"], where + ".grad_f", b);
  if (j.contains("grad_h")) w.grad_h = vector_from(j["grad_h"], where + ".grad_h", b);
  if (j.contains("hess_f")) w.hess_f = array_from<2>(j["hess_f"], where + ".hess_f", {b, b});
  if (j.contains("hess_h")) w.hess_h = array_from<2>(j["hess_h"], where + ".hess_h", {b, b});
  return w;
}

inline json to_json(const DoubleFibrationData& df) {
  return {{"dims", {{"alpha", df.n_alpha}, {"i", df.n_i}, {"I", df.n_I}}}, {"c", df.c}, {"data", to_json(df.data)}};
}

inline DoubleFibrationData double_fibration_from(const json& j, const std::string& where) {
  const json& dims = field(j, "dims", where);
  DoubleFibrationData df;
  df.n_alpha = count(field(dims, "alpha", where + ".dims"), where + ".dims.alpha");
  df.n_i = count(field(dims, "i", where + ".dims"), where + ".dims.i");
  df.n_I = count(field(dims, "I", where + ".dims"), where + ".dims.I");
  df.c = j.contains("c") ? number(j["c"], where + ".c") : 0.0;
  df.data = submersion_from(field(j, "data", where), where + ".data");
  if (df.data.p != df.n_i + df.n_I || df.data.b != df.n_alpha)
    throw ParseError(where + ": dims do not match the data's p and b");
  return df;
}

// --- Families ---------------------------------------------------------------

inline json to_json(const InvariantFunction& f) {
  return {{"value", f.value}, {"grad", to_json(f.grad)}, {"hess", to_json(f.hess)}};
}

inline InvariantFunction function_from(const json& j, const std::string& where, std::size_t b) {
  InvariantFunction f = InvariantFunction::constant(b, number(field(j, "value", where), where + ".value"));
  if (j.contains("grad")) f.grad = vector_from(j["grad"], where + ".grad", b);
  if (j.contains("hess")) f.hess = array_from<2>(j["hess"], where + ".hess", {b, b});
  return f;
}

inline json to_json(const PrincipalBundleData& pb) {
  return {{"base", to_json(pb.base)},         {"algebra", to_json(pb.algebra)},
          {"A", to_json(pb.a)},               {"DA_vert", to_json(pb.da_vert)},
          {"DA_horiz", to_json(pb.da_horiz)}};
}

inline PrincipalBundleData principal_from(const json& j, const std::string& where) {
  PrincipalBundleData pb;
  pb.base = tensor_from(field(j, "base", where), where + ".base");
  pb.algebra = algebra_from(field(j, "algebra", where), where + ".algebra");
  const std::size_t p = pb.algebra.dim, b = pb.base.n();
  pb.a = array_from<3>(field(j, "A", where), where + ".A", {p, b, b});
  pb.da_vert = j.contains("DA_vert") ? array_from<4>(j["DA_vert"], where + ".DA_vert", {p, p, b, b}) : Array4({p, p, b, b});
  pb.da_horiz =
      j.contains("DA_horiz") ? array_from<4>(j["DA_horiz"], where + ".DA_horiz", {b, b, b, p}) : Array4({b, b, b, p});
  return pb;
}

inline json to_json(const FamilySpec& s) {
  json j = {{"family", to_string(s.kind)}, {"presale", s.presale}};
  if (s.double_fibration) j["double_fibration"] = to_json(*s.double_fibration);
  if (s.submersion) j["submersion"] = to_json(*s.submersion);
  if (s.principal) j["principal"] = to_json(*s.principal);
  if (s.tensor) j["tensor"] = to_json(*s.tensor);
  if (s.kind == FamilyKind::example3_product) j["torus_rank"] = s.torus_rank;
  if (s.kind == FamilyKind::theorem3) j["blocks"] = s.blocks;
  if (!s.functions.empty()) {
    json fs = json::array();
    for (const auto& f : s.functions) fs.push_back(to_json(f));
    j["functions"] = fs;
  }
  return j;
}

inline FamilySpec family_from(const json& j, const std::string& where) {
  FamilySpec s;
  try {
    s.kind = family_kind_from_string(text(field(j, "family", where), where + ".family"));
  } catch (const DomainError& e) {
    throw ParseError(where + ": " + e.what());
  }
  if (j.contains("presale")) {
    if (!j["presale"].is_boolean()) throw ParseError(where + ".presale: expected a boolean");
    s.presale = j["presale"].get<bool>();
  }
  std::size_t b = 0;
  switch (s.kind) {
    case FamilyKind::theorem1:
    case FamilyKind::theorem2:
      s.double_fibration = double_fibration_from(field(j, "double_fibration", where), where + ".double_fibration");
      b = s.double_fibration->n_alpha;
      break;
    case FamilyKind::theorem3: {
      s.submersion = submersion_from(field(j, "submersion", where), where + ".submersion");
      b = s.submersion->b;
      const json& bl = field(j, "blocks", where);
      if (!bl.is_array() || bl.size() != 4) throw ParseError(where + ".blocks: expected four block dimensions");
      for (std::size_t k = 0; k < 4; ++k) s.blocks[k] = count(bl[k], where + ".blocks");
      break;
    }
    case FamilyKind::example3_product:
      s.tensor = tensor_from(field(j, "tensor", where), where + ".tensor");
      s.torus_rank = count(field(j, "torus_rank", where), where + ".torus_rank");
      break;
    case FamilyKind::example5_principal:
      s.principal = principal_from(field(j, "principal", where), where + ".principal");
      break;
    case FamilyKind::example2_scaled_quotient:
      s.tensor = tensor_from(field(j, "tensor", where), where + ".tensor");
      break;
  }
  if (j.contains("functions")) {
    const json& fs = j["functions"];
    if (!fs.is_array()) throw ParseError(where + ".functions: expected an array");
    for (std::size_t k = 0; k < fs.size(); ++k)
      s.functions.push_back(function_from(fs[k], where + ".functions[" + std::to_string(k) + "]", b));
  }
  return s;
}

}  // namespace io

// --- Documents --------------------------------------------------------------

inline nlohmann::json fixture_to_json(const Fixture& fx) {
  using io::to_json;
  nlohmann::json payload = std::visit(
      [](const auto& p) -> nlohmann::json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SubmersionFixture>) {
          nlohmann::json j = to_json(p.data);
          j["warp"] = to_json(p.warp);
          return j;
        } else {
          return to_json(p);
        }
      },
      fx.payload);
  return {{"schema_version", kSchemaVersion},
          {"kind", to_string(fx.kind())},
          {"name", fx.name},
          {"description", fx.description},
          {"payload", payload}};
}

inline std::string write_fixture(const Fixture& fx) { return fixture_to_json(fx).dump(2) + "\n"; }

inline Fixture fixture_from_json(const nlohmann::json& j) {
  using namespace io;
  const std::string ver = text(field(j, "schema_version", "document"), "schema_version");
  if (ver != kSchemaVersion) throw ParseError("unsupported schema_version '" + ver + "'");
  const FixtureKind kind = fixture_kind_from_string(text(field(j, "kind", "document"), "kind"));
  const json& p = field(j, "payload", "document");
  Fixture fx;
  fx.name = j.contains("name") ? text(j["name"], "name") : std::string();
  fx.description = j.contains("description") ? text(j["description"], "description") : std::string();
  switch (kind) {
    case FixtureKind::lie_algebra: fx.payload = algebra_from(p, "payload"); break;
    case FixtureKind::reductive_split: fx.payload = split_from(p, "payload"); break;
    case FixtureKind::submersion_point: {
      SubmersionFixture sf;
      sf.data = submersion_from(p, "payload");
      sf.warp = p.contains("warp") ? warp_from(p["warp"], "payload.warp", sf.data.b) : WarpData::zeros(sf.data.b);
      fx.payload = sf;
      break;
    }
    case FixtureKind::double_fibration: fx.payload = double_fibration_from(p, "payload"); break;
    case FixtureKind::family_spec: fx.payload = family_from(p, "payload"); break;
  }
  return fx;
}

inline Fixture read_fixture_text(const std::string& s) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(s);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return fixture_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed fixture: ") + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ParseError("write failed for '" + path + "'");
}

inline Fixture read_fixture(const std::string& path) { return read_fixture_text(read_text_file(path)); }

// --- Sweep CSV --------------------------------------------------------------

inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string write_sweep_csv(const SweepResult& r) {
  std::string out = "eps,min_eig,max_eig,min_sec,max_sec\n";
  for (const auto& row : r.rows)
    out += format_g12(row.eps) + "," + format_g12(row.min_eig) + "," + format_g12(row.max_eig) + "," +
           format_g12(row.min_sec) + "," + format_g12(row.max_sec) + "\n";
  const auto& s = r.summary;
  const auto& t = s.thresholds;
  out += "# classified=" + std::string(to_string(s.classified)) + "\n";
  out += "# inf_min_eig=" + format_g12(s.inf_min_eig) + "\n";
  out += "# tail_slope=" + format_g12(s.tail_slope) + "\n";
  out += "# threshold_slope=" + format_g12(t.slope) + "\n";
  out += "# threshold_almost_coeff=" + format_g12(t.almost_coeff) + "\n";
  out += "# threshold_almost_power=" + format_g12(t.almost_power) + "\n";
  out += "# threshold_tail_decades=" + format_g12(t.tail_decades) + "\n";
  return out;
}

inline SweepResult read_sweep_csv(const std::string& text) {
  auto parse = [](const std::string& s, const std::string& what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ParseError("bad number '" + s + "' in " + what);
      return v;
    } catch (const std::logic_error&) {
      if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
      throw ParseError("bad number '" + s + "' in " + what);
    }
  };
  SweepResult r;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "eps,min_eig,max_eig,min_sec,max_sec") throw ParseError("sweep CSV: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
      auto& s = r.summary;
      if (key == "classified")
        s.classified = classification_from_string(val);
      else if (key == "inf_min_eig")
        s.inf_min_eig = parse(val, key);
      else if (key == "tail_slope")
        s.tail_slope = parse(val, key);
      else if (key == "threshold_slope")
        s.thresholds.slope = parse(val, key);
      else if (key == "threshold_almost_coeff")
        s.thresholds.almost_coeff = parse(val, key);
      else if (key == "threshold_almost_power")
        s.thresholds.almost_power = parse(val, key);
      else if (key == "threshold_tail_decades")
        s.thresholds.tail_decades = parse(val, key);
      continue;
    }
    std::vector<double> v;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(parse(cell, "sweep row"));
    if (v.size() != 5) throw ParseError("sweep CSV: row needs 5 columns: '" + line + "'");
    r.rows.push_back({v[0], v[1], v[2], v[3], v[4]});
  }
  return r;
}

/// Grid syntax a:b:log:n, from a down to b inclusive.
inline std::vector<double> parse_grid(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  if (parts.size() != 4 || parts[2] != "log") throw ParseError("grid must look like a:b:log:n, got '" + s + "'");
  double a = 0, b = 0;
  long n = 0;
  try {
    std::size_t u1 = 0, u2 = 0, u3 = 0;
    a = std::stod(parts[0], &u1);
    b = std::stod(parts[1], &u2);
    n = std::stol(parts[3], &u3);
    if (u1 != parts[0].size() || u2 != parts[1].size() || u3 != parts[3].size()) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    throw ParseError("grid must look like a:b:log:n, got '" + s + "'");
  }
  if (!(a > 0.0) || !(b > 0.0) || !(a > b) || n < 2 || !std::isfinite(a))
    throw ParseError("grid needs a > b > 0 and n >= 2, got '" + s + "'");
  return log_grid(a, b, static_cast<std::size_t>(n));
}

}  // namespace cclab
