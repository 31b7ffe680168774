#pragma once

// JSON encodings for the library types. Vertex indices are 1-based in JSON
// and 0-based in memory. Edge lists are accepted in any order with either
// endpoint first; loading normalizes, sorts into the canonical order, and
// collapses duplicates (duplicate edges carrying different values are an
// error). Serialization uses ordered maps and round-trip-safe doubles, so a
// report parses back into the same values bit for bit.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "closedness.hpp"
#include "facered.hpp"
#include "graph.hpp"
#include "matcore.hpp"
#include "solver.hpp"
#include "symmat.hpp"

namespace minface {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& jfield(const Json& j, const char* key, const char* who) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(std::string(who) + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline int jint(const Json& j, const char* what) {
  if (!j.is_number_integer())
    throw std::invalid_argument(std::string(what) + " must be an integer");
  return j.get<int>();
}

inline double jnum(const Json& j, const char* what) {
  if (!j.is_number()) throw std::invalid_argument(std::string(what) + " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
  return v;
}

inline bool jbool(const Json& j, const char* what) {
  if (!j.is_boolean()) throw std::invalid_argument(std::string(what) + " must be a boolean");
  return j.get<bool>();
}

inline Json edge_to_json(const Edge& e) { return Json::array({e.first + 1, e.second + 1}); }

inline Edge edge_from_json(const Json& j, const char* who) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument(std::string(who) + ": edge must be a pair [i, j]");
  int i = jint(j.at(0), "edge endpoint");
  int k = jint(j.at(1), "edge endpoint");
  return Edge{i - 1, k - 1};
}

inline void check_edge_range(const Edge& e, int n, const char* who) {
  if (e.first < 0 || e.first >= n || e.second < 0 || e.second >= n)
    throw std::invalid_argument(std::string(who) + ": edge [" + std::to_string(e.first + 1) + "," +
                                std::to_string(e.second + 1) + "] has an endpoint outside 1.." +
                                std::to_string(n));
}

inline Json matrix_to_json(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (long i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const Json& j, const char* who) {
  if (!j.is_array()) throw std::invalid_argument(std::string(who) + ": expected an array of rows");
  const long r = long(j.size());
  long c = -1;
  Eigen::MatrixXd M;
  for (long i = 0; i < r; ++i) {
    const Json& row = j.at(std::size_t(i));
    if (!row.is_array()) throw std::invalid_argument(std::string(who) + ": row is not an array");
    if (c < 0) {
      c = long(row.size());
      M = Eigen::MatrixXd(r, c);
    } else if (long(row.size()) != c) {
      throw std::invalid_argument(std::string(who) + ": ragged rows");
    }
    for (long k = 0; k < c; ++k) M(i, k) = jnum(row.at(std::size_t(k)), "matrix entry");
  }
  if (r == 0) M = Eigen::MatrixXd(0, 0);
  return M;
}

inline const char* cone_name(Cone c) { return c == Cone::PSD ? "psd" : "edm"; }

inline Cone cone_from_name(const Json& j, const char* who) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "psd") return Cone::PSD;
    if (s == "edm") return Cone::EDM;
  }
  throw std::invalid_argument(std::string(who) + ": cone must be \"psd\" or \"edm\"");
}

inline const char* ambient_name(Ambient a) { return a == Ambient::Full ? "full" : "centered"; }

inline Ambient ambient_from_name(const Json& j, const char* who) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "full") return Ambient::Full;
    if (s == "centered") return Ambient::Centered;
  }
  throw std::invalid_argument(std::string(who) + ": ambient must be \"full\" or \"centered\"");
}

}  // namespace detail

inline Json graph_to_json(const PatternGraph& g) {
  Json j;
  j["n"] = g.n;
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back(detail::edge_to_json(e));
  j["edges"] = std::move(edges);
  return j;
}

inline PatternGraph graph_from_json(const Json& j) {
  int n = detail::jint(detail::jfield(j, "n", "graph"), "graph n");
  const Json& ej = detail::jfield(j, "edges", "graph");
  if (!ej.is_array()) throw std::invalid_argument("graph: \"edges\" must be an array");
  std::vector<Edge> edges;
  edges.reserve(ej.size());
  for (const Json& e : ej) {
    Edge edge = detail::edge_from_json(e, "graph");
    detail::check_edge_range(edge, n, "graph");
    edges.push_back(edge);
  }
  return build_pattern(n, edges);
}

inline Json partial_to_json(const PartialMatrix& a) {
  Json j = graph_to_json(a.pattern);
  j["values"] = a.values;
  return j;
}

// Loads a partial matrix, normalizing edges into canonical order with their
// values. Duplicate edges with identical values collapse; a duplicate with a
// different value is rejected.
inline PartialMatrix partial_from_json(const Json& j) {
  int n = detail::jint(detail::jfield(j, "n", "partial matrix"), "n");
  const Json& ej = detail::jfield(j, "edges", "partial matrix");
  const Json& vj = detail::jfield(j, "values", "partial matrix");
  if (!ej.is_array() || !vj.is_array())
    throw std::invalid_argument("partial matrix: \"edges\" and \"values\" must be arrays");
  if (ej.size() != vj.size())
    throw std::invalid_argument("partial matrix: " + std::to_string(vj.size()) + " values for " +
                                std::to_string(ej.size()) + " edges");
  std::vector<std::pair<Edge, double>> entries;
  entries.reserve(ej.size());
  for (std::size_t k = 0; k < ej.size(); ++k) {
    Edge e = detail::edge_from_json(ej.at(k), "partial matrix");
    detail::check_edge_range(e, n, "partial matrix");
    if (e.first > e.second) std::swap(e.first, e.second);
    entries.emplace_back(e, detail::jnum(vj.at(k), "partial matrix value"));
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Edge> edges;
  std::vector<double> values;
  for (const auto& [e, v] : entries) {
    if (!edges.empty() && edges.back() == e) {
      if (values.back() != v)
        throw std::invalid_argument("partial matrix: edge [" + std::to_string(e.first + 1) + "," +
                                    std::to_string(e.second + 1) +
                                    "] is listed twice with different values");
      continue;
    }
    edges.push_back(e);
    values.push_back(v);
  }
  PatternGraph g = build_pattern(n, edges);
  return make_partial(std::move(g), std::move(values));
}

inline Json symmat_to_json(const SymMatrix& X) {
  Json j;
  j["n"] = X.size();
  j["rows"] = detail::matrix_to_json(X.dense());
  return j;
}

inline SymMatrix symmat_from_json(const Json& j) {
  int n = detail::jint(detail::jfield(j, "n", "matrix"), "matrix n");
  Eigen::MatrixXd M = detail::matrix_from_json(detail::jfield(j, "rows", "matrix"), "matrix rows");
  if (M.rows() != n || M.cols() != n)
    throw std::invalid_argument("matrix: \"rows\" is not " + std::to_string(n) + "x" +
                                std::to_string(n));
  return SymMatrix::from_dense(M);  // validates symmetry
}

inline Json face_to_json(const FaceRep& f) {
  Json j;
  j["n"] = f.n;
  j["ambient"] = detail::ambient_name(f.ambient);
  j["rank"] = f.rank();
  j["basis"] = detail::matrix_to_json(f.basis);
  j["exposing"] = symmat_to_json(f.exposing);
  return j;
}

inline FaceRep face_from_json(const Json& j) {
  FaceRep f;
  f.n = detail::jint(detail::jfield(j, "n", "face"), "face n");
  f.ambient = detail::ambient_from_name(detail::jfield(j, "ambient", "face"), "face");
  f.basis = detail::matrix_from_json(detail::jfield(j, "basis", "face"), "face basis");
  if (f.basis.size() == 0) f.basis = Eigen::MatrixXd(f.n, 0);
  f.exposing = symmat_from_json(detail::jfield(j, "exposing", "face"));
  if (int(f.basis.rows()) != f.n || f.exposing.size() != f.n)
    throw std::invalid_argument("face: basis/exposing dimensions disagree with n");
  int declared = detail::jint(detail::jfield(j, "rank", "face"), "face rank");
  if (declared != f.rank()) throw std::invalid_argument("face: declared rank mismatch");
  return f;
}

inline Json exposer_to_json(const CliqueExposer& ce) {
  Json j;
  Json chi = Json::array();
  for (int v : ce.clique) chi.push_back(v + 1);
  j["clique"] = std::move(chi);
  j["ambient"] = detail::ambient_name(ce.ambient);
  j["local_rank"] = ce.local_rank;
  j["local"] = symmat_to_json(ce.local);
  j["lifted"] = symmat_to_json(ce.lifted);
  return j;
}

inline CliqueExposer exposer_from_json(const Json& j) {
  CliqueExposer ce;
  const Json& chi = detail::jfield(j, "clique", "exposer");
  if (!chi.is_array()) throw std::invalid_argument("exposer: \"clique\" must be an array");
  for (const Json& v : chi) ce.clique.push_back(detail::jint(v, "clique vertex") - 1);
  ce.ambient = detail::ambient_from_name(detail::jfield(j, "ambient", "exposer"), "exposer");
  ce.local_rank = detail::jint(detail::jfield(j, "local_rank", "exposer"), "local_rank");
  ce.local = symmat_from_json(detail::jfield(j, "local", "exposer"));
  ce.lifted = symmat_from_json(detail::jfield(j, "lifted", "exposer"));
  return ce;
}

inline Json certificate_to_json(const AuxCertificate& c) {
  Json j;
  j["cone"] = detail::cone_name(c.cone);
  Json edges = Json::array();
  for (const auto& e : c.edges) edges.push_back(detail::edge_to_json(e));
  j["edges"] = std::move(edges);
  j["v"] = c.v;
  j["inner"] = c.inner;
  j["lifted"] = symmat_to_json(c.lifted);
  return j;
}

inline AuxCertificate certificate_from_json(const Json& j) {
  AuxCertificate c;
  c.cone = detail::cone_from_name(detail::jfield(j, "cone", "certificate"), "certificate");
  const Json& ej = detail::jfield(j, "edges", "certificate");
  if (!ej.is_array()) throw std::invalid_argument("certificate: \"edges\" must be an array");
  for (const Json& e : ej) c.edges.push_back(detail::edge_from_json(e, "certificate"));
  const Json& vj = detail::jfield(j, "v", "certificate");
  if (!vj.is_array() || vj.size() != c.edges.size())
    throw std::invalid_argument("certificate: \"v\" must align with \"edges\"");
  for (const Json& v : vj) c.v.push_back(detail::jnum(v, "certificate entry"));
  c.inner = detail::jnum(detail::jfield(j, "inner", "certificate"), "certificate inner");
  c.lifted = symmat_from_json(detail::jfield(j, "lifted", "certificate"));
  return c;
}

inline Json sd_bound_to_json(SdBound b) {
  switch (b) {
    case SdBound::Zero: return Json(0);
    case SdBound::One: return Json(1);
    case SdBound::Unknown: return Json("unknown");
    default: return Json(nullptr);
  }
}

inline SdBound sd_bound_from_json(const Json& j) {
  if (j.is_null()) return SdBound::NotEvaluated;
  if (j.is_string() && j.get<std::string>() == "unknown") return SdBound::Unknown;
  if (j.is_number_integer()) {
    int v = j.get<int>();
    if (v == 0) return SdBound::Zero;
    if (v == 1) return SdBound::One;
  }
  throw std::invalid_argument("sd_bound must be 0, 1, \"unknown\", or null");
}

inline Json reduction_to_json(const ReductionReport& r) {
  Json j;
  j["cone"] = detail::cone_name(r.cone);
  j["chordal_guarantee"] = r.chordal_guarantee;
  j["slater_holds"] = r.slater_holds;
  j["slater_on_face"] = r.slater_on_face ? Json(*r.slater_on_face) : Json(nullptr);
  j["sd_bound"] = sd_bound_to_json(r.sd_bound);
  j["face"] = face_to_json(r.face);
  Json cliques = Json::array();
  for (const auto& chi : r.cliques) {
    Json c = Json::array();
    for (int v : chi) c.push_back(v + 1);
    cliques.push_back(std::move(c));
  }
  j["cliques"] = std::move(cliques);
  Json exposers = Json::array();
  for (const auto& ce : r.exposers) exposers.push_back(exposer_to_json(ce));
  j["exposers"] = std::move(exposers);
  j["certificate"] = r.certificate ? certificate_to_json(*r.certificate) : Json(nullptr);
  return j;
}

inline ReductionReport reduction_from_json(const Json& j) {
  ReductionReport r;
  r.cone = detail::cone_from_name(detail::jfield(j, "cone", "reduction"), "reduction");
  r.chordal_guarantee =
      detail::jbool(detail::jfield(j, "chordal_guarantee", "reduction"), "chordal_guarantee");
  r.slater_holds = detail::jbool(detail::jfield(j, "slater_holds", "reduction"), "slater_holds");
  const Json& sof = detail::jfield(j, "slater_on_face", "reduction");
  if (!sof.is_null()) r.slater_on_face = detail::jbool(sof, "slater_on_face");
  r.sd_bound = sd_bound_from_json(detail::jfield(j, "sd_bound", "reduction"));
  r.face = face_from_json(detail::jfield(j, "face", "reduction"));
  const Json& cj = detail::jfield(j, "cliques", "reduction");
  if (!cj.is_array()) throw std::invalid_argument("reduction: \"cliques\" must be an array");
  for (const Json& c : cj) {
    std::vector<int> chi;
    if (!c.is_array()) throw std::invalid_argument("reduction: clique must be an array");
    for (const Json& v : c) chi.push_back(detail::jint(v, "clique vertex") - 1);
    r.cliques.push_back(std::move(chi));
  }
  const Json& ej = detail::jfield(j, "exposers", "reduction");
  if (!ej.is_array()) throw std::invalid_argument("reduction: \"exposers\" must be an array");
  for (const Json& e : ej) r.exposers.push_back(exposer_from_json(e));
  const Json& cert = detail::jfield(j, "certificate", "reduction");
  if (!cert.is_null()) r.certificate = certificate_from_json(cert);
  return r;
}

inline Json closedness_to_json(const ClosednessReport& r) {
  Json j;
  j["cone"] = detail::cone_name(r.cone);
  j["closed"] = r.closed;
  j["witness_edge"] = r.witness_edge ? detail::edge_to_json(*r.witness_edge) : Json(nullptr);
  j["witness"] = r.witness ? partial_to_json(*r.witness) : Json(nullptr);
  return j;
}

inline ClosednessReport closedness_from_json(const Json& j) {
  ClosednessReport r;
  r.cone = detail::cone_from_name(detail::jfield(j, "cone", "closedness"), "closedness");
  r.closed = detail::jbool(detail::jfield(j, "closed", "closedness"), "closed");
  const Json& we = detail::jfield(j, "witness_edge", "closedness");
  if (!we.is_null()) r.witness_edge = detail::edge_from_json(we, "closedness");
  const Json& w = detail::jfield(j, "witness", "closedness");
  if (!w.is_null()) r.witness = partial_from_json(w);
  return r;
}

inline Json witness_check_to_json(const WitnessCheck& c) {
  Json j;
  j["bridge"] = detail::edge_to_json(c.bridge);
  j["loop_end"] = c.loop_end + 1;
  j["free_end"] = c.free_end + 1;
  j["certified_infeasible"] = c.certified;
  Json steps = Json::array();
  for (const auto& s : c.steps) {
    Json t;
    t["eps"] = s.eps;
    t["lambda"] = s.lambda;
    t["min_eig"] = s.min_eig;
    t["proj_err"] = s.proj_err;
    t["ok"] = s.ok;
    steps.push_back(std::move(t));
  }
  j["steps"] = std::move(steps);
  j["all_ok"] = c.all_ok;
  return j;
}

inline WitnessCheck witness_check_from_json(const Json& j) {
  WitnessCheck c;
  c.bridge = detail::edge_from_json(detail::jfield(j, "bridge", "witness check"), "witness check");
  c.loop_end = detail::jint(detail::jfield(j, "loop_end", "witness check"), "loop_end") - 1;
  c.free_end = detail::jint(detail::jfield(j, "free_end", "witness check"), "free_end") - 1;
  c.certified =
      detail::jbool(detail::jfield(j, "certified_infeasible", "witness check"), "certified");
  const Json& steps = detail::jfield(j, "steps", "witness check");
  if (!steps.is_array()) throw std::invalid_argument("witness check: \"steps\" must be an array");
  for (const Json& t : steps) {
    WitnessStep s;
    s.eps = detail::jnum(detail::jfield(t, "eps", "witness step"), "eps");
    s.lambda = detail::jnum(detail::jfield(t, "lambda", "witness step"), "lambda");
    s.min_eig = detail::jnum(detail::jfield(t, "min_eig", "witness step"), "min_eig");
    s.proj_err = detail::jnum(detail::jfield(t, "proj_err", "witness step"), "proj_err");
    s.ok = detail::jbool(detail::jfield(t, "ok", "witness step"), "ok");
    c.steps.push_back(s);
  }
  c.all_ok = detail::jbool(detail::jfield(j, "all_ok", "witness check"), "all_ok");
  return c;
}

inline Json realization_to_json(const Realization& r) {
  Json j;
  j["dim"] = r.dim;
  j["points"] = detail::matrix_to_json(r.points);
  j["max_err"] = r.max_err;
  return j;
}

inline Realization realization_from_json(const Json& j) {
  Realization r;
  r.dim = detail::jint(detail::jfield(j, "dim", "realization"), "dim");
  r.points = detail::matrix_from_json(detail::jfield(j, "points", "realization"), "points");
  r.max_err = detail::jnum(detail::jfield(j, "max_err", "realization"), "max_err");
  if (r.points.size() != 0 && int(r.points.cols()) != r.dim)
    throw std::invalid_argument("realization: points width disagrees with dim");
  return r;
}

}  // namespace minface
