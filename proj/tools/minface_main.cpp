// Command-line surface for the facial-reduction toolkit. Reads one JSON
// input per invocation, writes a status report to standard output, and
// reserves standard error for diagnostics. Exit codes: 0 success, 1 analytic
// infeasibility, 2 undetermined (iteration budget exhausted), 3 input error.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <minface/minface.hpp>

namespace {

using namespace minface;

struct Options {
  std::string command;
  std::string input;
  std::string output;  // empty means standard output
  std::string format = "json";
  std::string cone = "psd";
  std::string dual;          // multiplier file for `complete`
  std::vector<int> bridge;   // 1-based endpoints for `witness`
  double tol_rank = 1e-9;
  double tol = 1e-9;
  int max_iter = 50000;
  std::uint64_t seed = kDefaultSeed;
  int trials = 20;
};

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON in ") + path + ": " + e.what());
  }
}

Cone cone_of(const Options& o) {
  if (o.cone == "psd") return Cone::PSD;
  if (o.cone == "edm") return Cone::EDM;
  throw std::invalid_argument("cone must be \"psd\" or \"edm\"");
}

bool command_uses_cone(const std::string& cmd) {
  return cmd == "analyze" || cmd == "complete" || cmd == "certify";
}

Json config_json(const Options& o) {
  Json c;
  c["input"] = o.input;
  if (command_uses_cone(o.command)) c["cone"] = o.cone;
  if (!o.dual.empty()) c["dual"] = o.dual;
  if (!o.bridge.empty()) c["bridge"] = o.bridge;
  c["tol_rank"] = o.tol_rank;
  c["tol"] = o.tol;
  c["max_iter"] = o.max_iter;
  c["seed"] = o.seed;
  c["trials"] = o.trials;
  c["format"] = o.format;
  return c;
}

Json envelope(const Options& o, const char* status) {
  Json j;
  j["tool"] = "minface";
  j["version"] = kVersion;
  j["command"] = o.command;
  j["config"] = config_json(o);
  j["status"] = status;
  return j;
}

std::string render_text(const Json& j) {
  std::ostringstream os;
  std::function<void(const Json&, const std::string&)> walk = [&](const Json& v,
                                                                  const std::string& key) {
    if (v.is_object()) {
      for (auto it = v.begin(); it != v.end(); ++it)
        walk(it.value(), key.empty() ? it.key() : key + "." + it.key());
    } else {
      os << key << " = " << v.dump() << "\n";
    }
  };
  walk(j, "");
  return os.str();
}

void emit(const Options& o, const Json& report) {
  std::string out = o.format == "text" ? render_text(report) : report.dump(2) + "\n";
  if (o.output.empty()) {
    std::cout << out;
  } else {
    std::ofstream f(o.output);
    if (!f) throw std::invalid_argument("cannot open output file: " + o.output);
    f << out;
  }
}

void raise_on_failure(const SolveStatus& st, const char* what) {
  if (st.outcome == SolveOutcome::Infeasible)
    throw InfeasibleError(std::string(what) + ": Farkas certificate found",
                          st.certificate.value_or(Eigen::VectorXd()), st.pairing);
  if (st.outcome == SolveOutcome::Undetermined)
    throw UndeterminedError(std::string(what) + ": iteration budget exhausted", st.iterations,
                            st.residual);
}

Json cmd_analyze(const Options& o) {
  PatternGraph g = graph_from_json(load_json(o.input));
  ClosednessReport rep = classify(g, cone_of(o));
  ChordalityResult ch = is_chordal(g);
  Json result;
  result["closedness"] = closedness_to_json(rep);
  result["chordal"] = ch.chordal;
  if (ch.chordal) {
    Json ord = Json::array();
    for (int v : ch.order.order) ord.push_back(v + 1);
    result["elimination_order"] = std::move(ord);
    Json cliques = Json::array();
    for (const auto& chi : maximal_cliques_chordal(g, ch.order)) {
      Json c = Json::array();
      for (int v : chi) c.push_back(v + 1);
      cliques.push_back(std::move(c));
    }
    result["cliques"] = std::move(cliques);
    result["chordless_cycle"] = nullptr;
  } else {
    Json cyc = Json::array();
    for (int v : ch.counterexample_cycle) cyc.push_back(v + 1);
    result["elimination_order"] = nullptr;
    result["cliques"] = nullptr;
    result["chordless_cycle"] = std::move(cyc);
  }
  return result;
}

Json cmd_witness(const Options& o) {
  PatternGraph g = graph_from_json(load_json(o.input));
  Edge bridge;
  if (!o.bridge.empty()) {
    bridge = Edge{o.bridge[0] - 1, o.bridge[1] - 1};
    if (bridge.first > bridge.second) std::swap(bridge.first, bridge.second);
  } else {
    std::optional<Edge> b = first_bridging_edge(g);
    if (!b)
      throw std::invalid_argument(
          "the projected cone is closed for this pattern: no bridging edge exists");
    bridge = *b;
  }
  PartialMatrix w = construct_witness(g, bridge);
  WitnessCheck check = verify_witness(w, bridge);
  Json result;
  result["witness"] = partial_to_json(w);
  result["check"] = witness_check_to_json(check);
  return result;
}

Json cmd_reduce(const Options& o, Cone cone) {
  PartialMatrix a = partial_from_json(load_json(o.input));
  RankTolerance rt{o.tol_rank};
  ReductionReport rpt = cone == Cone::PSD ? minimal_face_psd(a, rt) : minimal_face_edm(a, rt);
  if (rpt.chordal_guarantee && !rpt.slater_holds)
    rpt.certificate = aux_certificate(a, rpt.exposers, rt);
  return reduction_to_json(rpt);
}

Json cmd_certify(const Options& o) {
  PartialMatrix a = partial_from_json(load_json(o.input));
  RankTolerance rt{o.tol_rank};
  SolverOptions so{o.tol, o.max_iter, o.seed};
  ReductionReport rpt = singularity_degree_bound(a, cone_of(o), rt, so, o.trials);
  Json result;
  result["sd_bound"] = sd_bound_to_json(rpt.sd_bound);
  result["chordal_guarantee"] = rpt.chordal_guarantee;
  result["slater_holds"] = rpt.slater_holds;
  result["slater_on_face"] = rpt.slater_on_face ? Json(*rpt.slater_on_face) : Json(nullptr);
  result["face_rank"] = rpt.face.rank();
  result["ambient_max_rank"] = rpt.face.ambient_max_rank();
  result["certificate"] = rpt.certificate ? certificate_to_json(*rpt.certificate) : Json(nullptr);
  return result;
}

Json cmd_complete(const Options& o) {
  PartialMatrix a = partial_from_json(load_json(o.input));
  Cone cone = cone_of(o);
  RankTolerance rt{o.tol_rank};
  SolverOptions so{o.tol, o.max_iter, o.seed};
  Json result;
  std::optional<bool> dual_valid;
  if (!o.dual.empty()) {
    Json dj = load_json(o.dual);
    if (!dj.is_array())
      throw std::invalid_argument("dual file must hold a JSON array of multipliers");
    if (dj.size() != a.pattern.edges.size())
      throw std::invalid_argument("dual multipliers must align with the pattern edges (" +
                                  std::to_string(a.pattern.edges.size()) + " expected)");
    Eigen::VectorXd y(long(dj.size()));
    for (std::size_t k = 0; k < dj.size(); ++k) {
      if (!dj.at(k).is_number())
        throw std::invalid_argument("dual multipliers must be numbers");
      y(long(k)) = dj.at(k).get<double>();
    }
    if (cone != Cone::PSD)
      throw std::invalid_argument("dual multiplier check is defined for the psd cone");
    AffineSystem full = reduce_constraints(a, full_face(a.pattern.n, Ambient::Full));
    SolverOptions pre = so;
    pre.max_iter = 0;  // candidate check only, no iteration
    SolveStatus st = ap_solve(full, pre, {y});
    if (st.outcome == SolveOutcome::Infeasible)
      throw InfeasibleError("supplied multipliers certify infeasibility",
                            st.certificate.value_or(y), st.pairing);
    dual_valid = false;
  }
  if (cone == Cone::PSD) {
    ReductionReport rpt = minimal_face_psd(a, rt);
    SymMatrix X(a.pattern.n);
    if (rpt.chordal_guarantee) {
      X = max_rank_completion(a, rpt, rt, so, std::max(1, o.trials));
    } else {
      AffineSystem sys = reduce_constraints(a, rpt.face);
      SolveStatus st = ap_solve(sys, so);
      raise_on_failure(st, "completion on the reduced face");
      Eigen::MatrixXd Xd = rpt.face.basis * st.point * rpt.face.basis.transpose();
      X = SymMatrix::symmetrized(Xd);
    }
    result["completion"] = symmat_to_json(X);
    result["rank"] = numerical_rank(X, rt);
    result["face_rank"] = rpt.face.rank();
    result["max_rank_guarantee"] = rpt.chordal_guarantee;
  } else {
    ReductionReport rpt = minimal_face_edm(a, rt);
    AffineSystem sys = reduce_constraints(a, rpt.face);
    SolveStatus st = ap_solve(sys, so);
    raise_on_failure(st, "completion on the reduced face");
    Eigen::MatrixXd Gm = rpt.face.basis * st.point * rpt.face.basis.transpose();
    SymMatrix D = kappa(SymMatrix::symmetrized(Gm));
    result["completion"] = symmat_to_json(D);
    result["gram_rank"] = rank_of_reduced(st.point, rt);
    result["face_rank"] = rpt.face.rank();
    result["max_rank_guarantee"] = false;
  }
  if (dual_valid) result["dual_valid"] = *dual_valid;
  return result;
}

Json cmd_realize(const Options& o) {
  SymMatrix D = symmat_from_json(load_json(o.input));
  Realization r = edm_realize(D, RankTolerance{o.tol_rank});
  return realization_to_json(r);
}

int fail(const Options& o, const char* status, const std::string& msg, Json extra, int code) {
  Json j = envelope(o, status);
  j["error"] = msg;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  try {
    emit(o, j);
  } catch (const std::exception&) {
    // fall through to the stderr diagnostic
  }
  std::cerr << "minface: " << msg << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"facial reduction toolkit for PSD and EDM matrix completion"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.add_option("--tol-rank", o.tol_rank, "relative eigenvalue cutoff for numerical rank")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", o.tol, "solver feasibility tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", o.max_iter, "alternating-projection iteration budget")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "seed for randomized rank sampling");
  app.add_option("--trials", o.trials, "randomized trials for rank sampling")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("-o,--output", o.output, "write the report to a file instead of stdout");

  auto add_input = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->add_option("input", o.input, "input JSON file")->required();
  };
  CLI::App* analyze =
      app.add_subcommand("analyze", "closedness of the projected cone plus pattern structure");
  add_input(analyze);
  analyze->add_option("--cone", o.cone, "psd or edm")->check(CLI::IsMember({"psd", "edm"}));
  CLI::App* witness =
      app.add_subcommand("witness", "construct and verify a non-closedness witness");
  add_input(witness);
  witness->add_option("--bridge", o.bridge, "bridging edge endpoints (1-based)")->expected(2);
  CLI::App* reduce_psd =
      app.add_subcommand("reduce-psd", "clique facial reduction of a partial PSD matrix");
  add_input(reduce_psd);
  CLI::App* reduce_edm =
      app.add_subcommand("reduce-edm", "clique facial reduction of a partial distance matrix");
  add_input(reduce_edm);
  CLI::App* complete = app.add_subcommand("complete", "solve the completion on the reduced face");
  add_input(complete);
  complete->add_option("--cone", o.cone, "psd or edm")->check(CLI::IsMember({"psd", "edm"}));
  complete->add_option("--dual", o.dual, "multiplier file checked as an infeasibility certificate");
  CLI::App* certify =
      app.add_subcommand("certify", "bound the singularity degree with a certificate");
  add_input(certify);
  certify->add_option("--cone", o.cone, "psd or edm")->check(CLI::IsMember({"psd", "edm"}));
  CLI::App* realize = app.add_subcommand("realize", "embed a distance matrix as points");
  add_input(realize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    Json result;
    if (o.command == "analyze") result = cmd_analyze(o);
    else if (o.command == "witness") result = cmd_witness(o);
    else if (o.command == "reduce-psd") result = cmd_reduce(o, Cone::PSD);
    else if (o.command == "reduce-edm") result = cmd_reduce(o, Cone::EDM);
    else if (o.command == "complete") result = cmd_complete(o);
    else if (o.command == "certify") result = cmd_certify(o);
    else if (o.command == "realize") result = cmd_realize(o);
    Json report = envelope(o, "ok");
    report["result"] = std::move(result);
    emit(o, report);
    return 0;
  } catch (const InfeasibleError& e) {
    Json extra;
    extra["pairing"] = e.pairing();
    std::vector<double> cert(e.certificate().data(),
                             e.certificate().data() + e.certificate().size());
    extra["certificate"] = cert;
    return fail(o, "infeasible", e.what(), extra, 1);
  } catch (const UndeterminedError& e) {
    Json extra;
    extra["iterations"] = e.iterations();
    extra["residual"] = e.residual();
    return fail(o, "undetermined", e.what(), extra, 2);
  } catch (const std::domain_error& e) {
    return fail(o, "infeasible", e.what(), Json::object(), 1);
  } catch (const std::invalid_argument& e) {
    return fail(o, "input-error", e.what(), Json::object(), 3);
  } catch (const nlohmann::json::exception& e) {
    return fail(o, "input-error", e.what(), Json::object(), 3);
  } catch (const std::exception& e) {
    return fail(o, "error", e.what(), Json::object(), 3);
  }
}
