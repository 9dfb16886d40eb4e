#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tilekit/error.hpp"
#include "tilekit/graph.hpp"
#include "tilekit/lp.hpp"
#include "tilekit/rational.hpp"
#include "tilekit/regularity.hpp"
#include "tilekit/tiler.hpp"

namespace tilekit {

using Json = nlohmann::ordered_json;

inline Json to_json(const VertexRef& v) { return Json::array({v.part, v.index}); }

inline VertexRef vertex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ConstructionError("vertex must be [part, index], got " + j.dump());
  return {j[0].get<int>(), j[1].get<int>()};
}

// {"k": 3, "n": 2, "edges": [[[1,1],[2,1]], ...]}
inline Json to_json(const KPartiteGraph& g) {
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back(Json::array({to_json(u), to_json(v)}));
  return Json{{"k", g.k()}, {"n", g.n()}, {"edges", std::move(edges)}};
}

inline KPartiteGraph graph_from_json(const Json& j) {
  try {
    const int k = j.at("k").get<int>(), n = j.at("n").get<int>();
    if (k < 2) throw ConstructionError("k must be at least 2");
    if (n < 1) throw ConstructionError("n must be at least 1");
    KPartiteGraph::Builder b(k, n);
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ConstructionError("edge must be a pair of vertices: " + e.dump());
      b.add_edge(vertex_from_json(e[0]), vertex_from_json(e[1]));
    }
    return std::move(b).build();
  } catch (const nlohmann::json::exception& ex) {
    throw ConstructionError(std::string("malformed graph JSON: ") + ex.what());
  }
}

inline Json to_json(const Rational& r) { return r.to_string(); }

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ParameterError("rationals are written as \"p/q\" strings or integers, got " + j.dump());
}

inline Json to_json(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.to_string());
  return a;
}

inline Json to_json(const LinearProgram& lp) {
  Json rows = Json::array();
  for (const auto& row : lp.rows) {
    Json r = Json::array();
    for (const auto& t : row) r.push_back(Json::array({t.column, t.coef.to_string()}));
    rows.push_back(std::move(r));
  }
  return Json{{"sense", lp.sense == Sense::maximize ? "max" : "min"},
              {"objective", to_json(lp.objective)},
              {"rows", std::move(rows)},
              {"rhs", to_json(lp.rhs)}};
}

inline LinearProgram lp_from_json(const Json& j) {
  try {
    LinearProgram lp;
    const auto sense = j.at("sense").get<std::string>();
    if (sense == "max") lp.sense = Sense::maximize;
    else if (sense == "min") lp.sense = Sense::minimize;
    else throw ParameterError("sense must be \"max\" or \"min\"");
    for (const auto& c : j.at("objective")) lp.objective.push_back(rational_from_json(c));
    for (const auto& r : j.at("rows")) {
      std::vector<Term> row;
      for (const auto& t : r) row.push_back({t.at(0).get<int>(), rational_from_json(t.at(1))});
      lp.rows.push_back(std::move(row));
    }
    for (const auto& b : j.at("rhs")) lp.rhs.push_back(rational_from_json(b));
    lp.validate();
    return lp;
  } catch (const nlohmann::json::exception& ex) {
    throw ParameterError(std::string("malformed LP JSON: ") + ex.what());
  }
}

inline Json to_json(const LPSolution& s) {
  Json j{{"status", to_string(s.status)}, {"pivots", s.pivots}};
  if (s.status == LPStatus::optimal || s.status == LPStatus::feasible) {
    j["objective"] = s.objective.to_string();
    j["values"] = to_json(s.values);
    j["basis"] = s.basis;
    j["tight_rows"] = s.tight_rows;
    j["row_duals"] = to_json(s.row_duals);
  }
  if (!s.farkas.empty()) j["farkas"] = to_json(s.farkas);
  if (!s.ray.empty()) {
    j["values"] = to_json(s.values);
    j["ray"] = to_json(s.ray);
  }
  return j;
}

inline Json to_json(const Tiling& t) {
  Json tiles = Json::array();
  for (const auto& tile : t.tiles) {
    Json a = Json::array();
    for (const auto& v : tile) a.push_back(to_json(v));
    tiles.push_back(std::move(a));
  }
  return Json{{"h", t.h}, {"tiles", std::move(tiles)}};
}

inline Tiling tiling_from_json(const Json& j) {
  try {
    Tiling t;
    t.h = j.at("h").get<int>();
    for (const auto& tile : j.at("tiles")) {
      std::vector<VertexRef> vs;
      for (const auto& v : tile) vs.push_back(vertex_from_json(v));
      t.tiles.push_back(std::move(vs));
    }
    return t;
  } catch (const nlohmann::json::exception& ex) {
    throw ParameterError(std::string("malformed tiling JSON: ") + ex.what());
  }
}

inline Json to_json(const RegularityCertificate& c) {
  Json j{{"kind", to_string(c.kind)}, {"epsilon", c.epsilon.to_string()}, {"vacuous", c.vacuous}};
  j["density"] = c.density ? Json(c.density->to_string()) : Json(nullptr);
  j["density_radius"] = c.density_radius.to_string();
  if (c.kind == CertificateKind::kr_good_pairs) {
    j["good_pairs"] = c.good_pairs;
    j["good_pair_bound"] = c.good_pair_bound.to_string();
    j["refined"] = c.refined;
    j["source_epsilon"] = c.source_epsilon.to_string();
  }
  if (c.kind == CertificateKind::slicing_derived) {
    j["parent_epsilon"] = c.parent_epsilon->to_string();
    j["alpha"] = c.alpha.to_string();
  }
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParameterError(path + ": " + ex.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  out << text;
}

}  // namespace tilekit
