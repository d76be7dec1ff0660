#pragma once
// JSON (de)serialization for the CLI: algebras, hermitian elements, states,
// balls, Lip-norms, metric spaces and tunnels, plus deterministic report
// emission (9 significant digits, bounds always as [lb, ub] pairs).

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qmet/approx.hpp"
#include "qmet/propinquity.hpp"

namespace qmet {

using Json = nlohmann::ordered_json;

// Exit-code discipline: 2 input error, 3 invalid mathematical object,
// 4 precondition failure, 5 internal gap not closed.
struct CliError {
  int code;
  std::string msg;
};

// ---------------------------------------------------------------------------
// Loading

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{2, "cannot open " + path};
  try {
    Json j;
    in >> j;
    return j;
  } catch (const std::exception& e) {
    throw CliError{2, path + ": " + e.what()};
  }
}

inline const Json& need(const Json& j, const char* key) {
  if (!j.contains(key))
    throw CliError{2, std::string("missing key \"") + key + "\""};
  return j.at(key);
}

inline Algebra parse_algebra(const Json& j) {
  const Json& b = need(j, "blocks");
  if (!b.is_array() || b.empty()) throw CliError{2, "algebra: blocks array"};
  std::vector<int> blocks;
  for (const auto& v : b) {
    if (!v.is_number_integer() || v.get<int>() <= 0)
      throw CliError{2, "algebra: block sizes must be positive integers"};
    blocks.push_back(v.get<int>());
  }
  return Algebra(blocks);
}

// one block: rows of [re, im] pairs
inline Mat parse_block(const Json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw CliError{2, std::string(what) + ": block shape"};
  Mat m(n, n);
  for (int r = 0; r < n; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw CliError{2, std::string(what) + ": block shape"};
    for (int c = 0; c < n; ++c) {
      const Json& e = row.at(c);
      if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() ||
          !e.at(1).is_number())
        throw CliError{2, std::string(what) + ": entries must be [re, im]"};
      m(r, c) = cxd(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

inline std::vector<Mat> parse_blocks(const Algebra& a, const Json& j,
                                     const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != a.num_blocks())
    throw CliError{2, std::string(what) + ": wrong number of blocks"};
  std::vector<Mat> m;
  for (int k = 0; k < a.num_blocks(); ++k)
    m.push_back(parse_block(j.at(k), a.blocks[k], what));
  return m;
}

inline Element parse_element(const Algebra& a, const Json& j) {
  Element e(a, parse_blocks(a, need(j, "blocks"), "element"));
  for (const Mat& b : e.m)
    if ((b - b.adjoint()).norm() > 1e-9)
      throw CliError{3, "element: not hermitian"};
  return e;
}

inline State parse_state(const Algebra& a, const Json& j) {
  State s(a);
  s.rho = parse_blocks(a, need(j, "densities"), "state");
  double tr = 0.0;
  for (const Mat& b : s.rho) {
    if ((b - b.adjoint()).norm() > 1e-9)
      throw CliError{3, "state: density not hermitian"};
    if (lambda_min(b) < -1e-9) throw CliError{3, "state: density not positive"};
    tr += b.trace().real();
  }
  if (std::abs(tr - 1.0) > 1e-8) throw CliError{3, "state: trace != 1"};
  return s;
}

// ball: {"type":"vrep","base_state":...,"generators":[element,...]}
//    or {"type":"hrep","functionals":[element,...],
//        "spectral":[{"affine":[[...]],"bound":c}]}
inline BallPtr parse_ball(const Algebra& a, const Json& j) {
  const std::string type = need(j, "type").get<std::string>();
  const int d = coord_dim(a);
  if (type == "vrep") {
    const Json& g = need(j, "generators");
    if (!g.is_array()) throw CliError{2, "ball: generators array"};
    RMat G(d, static_cast<int>(g.size()));
    for (int k = 0; k < G.cols(); ++k)
      G.col(k) = to_coords(parse_element(a, g.at(k)));
    return std::make_shared<VRepBall>(G, unit_coords(a));
  }
  if (type == "hrep") {
    const Json& f = need(j, "functionals");
    if (!f.is_array() || f.empty()) throw CliError{2, "ball: functionals array"};
    std::vector<MaxBall::Term> terms;
    for (const auto& fj : f) {
      const RVec y = to_coords(parse_element(a, fj));
      RMat P(1, d);
      P.row(0) = y.transpose();
      terms.push_back(
          {P, std::make_shared<OpNormBall>(Algebra::commutative(1), 1.0)});
    }
    if (j.contains("spectral"))
      for (const auto& sj : j.at("spectral")) {
        const Json& aff = need(sj, "affine");
        if (!aff.is_array() || static_cast<int>(aff.size()) != d)
          throw CliError{2, "ball: spectral affine must be coord_dim x coord_dim"};
        RMat P(d, d);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) P(r, c) = aff.at(r).at(c).get<double>();
        const double bound = need(sj, "bound").get<double>();
        if (bound <= 0) throw CliError{2, "ball: spectral bound <= 0"};
        terms.push_back({P, std::make_shared<OpNormBall>(a, bound)});
      }
    return std::make_shared<MaxBall>(d, std::move(terms));
  }
  throw CliError{2, "ball: type must be vrep or hrep"};
}

inline MetricSpace parse_metric(const Json& j) {
  MetricSpace X;
  const Json& pts = need(j, "points");
  for (const auto& p : pts) X.labels.push_back(p.get<std::string>());
  const Json& dm = need(j, "dist");
  const int n = static_cast<int>(X.labels.size());
  if (!dm.is_array() || static_cast<int>(dm.size()) != n)
    throw CliError{2, "metric: dist shape"};
  X.d = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(dm.at(i).size()) != n)
      throw CliError{2, "metric: dist shape"};
    for (int k = 0; k < n; ++k) X.d(i, k) = dm.at(i).at(k).get<double>();
  }
  try {
    X.validate();
  } catch (const std::exception& e) {
    throw CliError{3, e.what()};
  }
  return X;
}

// Lip-norm: {"algebra":...,"ball":...,"constants":{"C":..,"D":..},"mu":state?}
// or the commutative shorthand {"metric":{"points":[...],"dist":[[...]]}}.
inline LipNorm parse_lipnorm(const Json& j) {
  if (j.contains("metric")) return lip_from_metric(parse_metric(j.at("metric")));
  const Algebra a = parse_algebra(need(j, "algebra"));
  Permissible F{1.0, 0.0};
  if (j.contains("constants")) {
    F.C = need(j.at("constants"), "C").get<double>();
    F.D = need(j.at("constants"), "D").get<double>();
    if (!F.valid()) throw CliError{3, "constants: need C >= 1, D >= 0"};
  }
  LipNorm L;
  try {
    L = LipNorm(a, parse_ball(a, need(j, "ball")), F);
  } catch (const std::invalid_argument& e) {
    throw CliError{3, e.what()};
  }
  if (j.contains("mu")) L.base = parse_state(a, j.at("mu"));
  if (j.at("ball").contains("base_state"))
    L.base = parse_state(a, j.at("ball").at("base_state"));
  return L;
}

// ---------------------------------------------------------------------------
// Serialization back to JSON (round-trips through the schemas above)

inline Json algebra_json(const Algebra& a) { return Json{{"blocks", a.blocks}}; }

inline Json blocks_json(const std::vector<Mat>& m) {
  Json out = Json::array();
  for (const Mat& b : m) {
    Json bj = Json::array();
    for (int r = 0; r < b.rows(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < b.cols(); ++c)
        row.push_back(Json::array({b(r, c).real(), b(r, c).imag()}));
      bj.push_back(row);
    }
    out.push_back(bj);
  }
  return out;
}

inline Json element_json(const Element& e) {
  return Json{{"blocks", blocks_json(e.m)}};
}

inline Json state_json(const State& s) {
  return Json{{"densities", blocks_json(s.rho)}};
}

inline Json lipnorm_json(const LipNorm& L) {
  const VRepBall* v = L.vrep();
  if (!v) throw CliError{2, "only VRep Lip-norms are serializable"};
  Json gens = Json::array();
  for (int k = 0; k < v->G.cols(); ++k)
    gens.push_back(element_json(from_coords(L.alg, v->G.col(k))));
  return Json{{"algebra", algebra_json(L.alg)},
              {"ball",
               Json{{"type", "vrep"},
                    {"base_state", state_json(L.base)},
                    {"generators", gens}}},
              {"constants", Json{{"C", L.F.C}, {"D", L.F.D}}}};
}

inline Json bracket_json(const Bracket& b) {
  return Json::array({b.lb, b.ub});
}

// ---------------------------------------------------------------------------
// Deterministic emission: every number with 9 significant digits

inline std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline void emit_json(const Json& j, std::ostream& os, int indent = 0) {
  const std::string pad(indent, ' '), pad2(indent + 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      size_t k = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++k) {
        os << pad2 << Json(it.key()).dump() << ": ";
        emit_json(it.value(), os, indent + 2);
        os << (k + 1 < j.size() ? ",\n" : "\n");
      }
      os << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[";
      for (size_t k = 0; k < j.size(); ++k) {
        emit_json(j.at(k), os, indent + 2);
        if (k + 1 < j.size()) os << ", ";
      }
      os << "]";
      return;
    }
    case Json::value_t::number_float:
      os << fmt9(j.get<double>());
      return;
    default:
      os << j.dump();
      return;
  }
}

inline void emit_flat(const Json& j, const std::string& prefix,
                      std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      emit_flat(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(),
                rows);
  } else if (j.is_array()) {
    for (size_t k = 0; k < j.size(); ++k)
      emit_flat(j.at(k), prefix + "[" + std::to_string(k) + "]", rows);
  } else if (j.is_number_float()) {
    rows.push_back({prefix, fmt9(j.get<double>())});
  } else {
    rows.push_back({prefix, j.dump()});
  }
}

inline void emit_report(const Json& j, const std::string& format,
                        std::ostream& os) {
  if (format == "json") {
    emit_json(j, os);
    os << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  emit_flat(j, "", rows);
  if (format == "csv") {
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << k << "," << v << "\n";
    return;
  }
  if (format == "table") {
    size_t w = 0;
    for (const auto& [k, v] : rows) w = std::max(w, k.size());
    for (const auto& [k, v] : rows)
      os << k << std::string(w - k.size() + 2, ' ') << v << "\n";
    return;
  }
  throw CliError{2, "format must be json, csv or table"};
}

}  // namespace qmet
