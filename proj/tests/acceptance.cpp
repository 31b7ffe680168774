// Acceptance drill for the facial-reduction toolkit: one line per criterion,
// nonzero exit if any fails. Each criterion owns a wall-clock budget; going
// over budget is a failure even when the math checks out.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <minface/minface.hpp>

#include "support.hpp"

using namespace minface;
namespace ts = testsupport;

namespace {

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

struct CliOut {
  int exit_code = -1;
  Json json;
};

CliOut cli(const std::string& args) {
  std::string cmd = std::string(MINFACE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  expect(pipe != nullptr, "popen failed for: " + cmd);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int rc = pclose(pipe);
  CliOut r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  expect(!out.empty(), "no output from: " + cmd);
  r.json = Json::parse(out);
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(MINFACE_FIXTURES_DIR) + "/" + name;
}

// Chordal PSD instances kept for the singularity-degree criterion.
struct SlaterFailing {
  PartialMatrix a;
  Cone cone;
};
std::vector<SlaterFailing> g_slater_failing;

// -------------------------------------------------------------------------
// 1. Limit instance on the looped 4-cycle: an exact primal-dual pair at the
//    attainable parameter, and a Farkas refutation at the limit.
void criterion1() {
  const double r2 = std::sqrt(2.0);
  PatternGraph g = build_pattern(
      4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 1}, {1, 2}, {2, 3}, {0, 3}});

  // Sign matrix of the cycle: squares to 2I.
  SymMatrix C(4);
  C.set(0, 1, 1.0);
  C.set(1, 2, 1.0);
  C.set(2, 3, 1.0);
  C.set(0, 3, -1.0);

  SymMatrix Xhat = SymMatrix::identity(4);
  Xhat *= r2;
  Xhat += C;
  expect(Xhat.min_eigenvalue() >= -1e-10, "Xhat is not PSD within 1e-10");

  // Data at eps-hat = sqrt(2) - 1: looped diagonal 1 + eps-hat, cycle +-1.
  const double d = 1.0 + (r2 - 1.0);
  PartialMatrix a_hat = make_partial(g, {d, 1.0, -1.0, d, 1.0, d, 1.0, d});
  PartialMatrix proj = project(Xhat, g);
  for (std::size_t k = 0; k < proj.values.size(); ++k)
    expect(proj.values[k] == a_hat.values[k],
           "projection of Xhat differs from the data at edge index " + std::to_string(k));

  // Complementary dual point: Zhat = (I - C/sqrt(2)) / 4.
  SymMatrix Zhat = SymMatrix::identity(4);
  SymMatrix Cs = C;
  Cs *= -1.0 / r2;
  Zhat += Cs;
  Zhat *= 0.25;
  expect(Zhat.min_eigenvalue() >= -1e-10, "Zhat is not PSD within 1e-10");
  expect(std::abs(Xhat.trace_inner(Zhat)) <= 1e-10, "<Xhat, Zhat> is not zero within 1e-10");

  // At eps = 0 the same pattern is infeasible; the alternating multiplier
  // certifies it with pairing 1 - sqrt(2).
  PartialMatrix a0 = make_partial(g, {1, 1, -1, 1, 1, 1, 1, 1});
  AffineSystem sys = reduce_constraints(a0, full_face(4, Ambient::Full));
  const double s = 1.0 / (2.0 * r2);
  Eigen::VectorXd y(8);
  y << 0.25, -s, s, 0.25, -s, 0.25, -s, 0.25;
  SolveStatus st = ap_solve(sys, {}, {y});
  expect(st.outcome == SolveOutcome::Infeasible, "limit data was not refuted");
  expect(std::abs(st.pairing - (1.0 - r2)) <= 1e-12,
         "pairing " + std::to_string(st.pairing) + " is not 1 - sqrt(2) within 1e-12");
}

// -------------------------------------------------------------------------
// 2. Chordal 4x4 path: face rank and basis, exposer sum up to one positive
//    scalar, and the certified singularity-degree bound, all via the CLI.
void criterion2() {
  CliOut red = cli("reduce-psd " + fixture("path4_chain.json"));
  expect(red.exit_code == 0, "reduce-psd exited with code " + std::to_string(red.exit_code));
  ReductionReport rpt = reduction_from_json(red.json.at("result"));
  expect(rpt.face.rank() == 2, "face rank is not 2");

  Eigen::MatrixXd span(4, 2);
  span << 0, 1, 0, 1, 0, 1, 1, 0;
  span.col(1) /= std::sqrt(3.0);
  expect(ts::principal_angle(rpt.face.basis, span) < 1e-9,
         "face basis does not match the expected column space");

  SymMatrix Y(4);
  for (const auto& ce : rpt.exposers) Y += ce.lifted;
  Eigen::MatrixXd M(4, 4);
  M << 1, -1, 0, 0, -1, 2, -1, 0, 0, -1, 1, 0, 0, 0, 0, 0;
  const double c = Y(0, 0);
  expect(c > 0.0, "exposer sum has a nonpositive leading entry");
  double rel = (Y.dense() - c * M).cwiseAbs().maxCoeff() / (c * 2.0);
  expect(rel < 1e-10, "exposer sum deviates from the displayed matrix; rel " +
                          std::to_string(rel));

  CliOut cert = cli("certify " + fixture("path4_chain.json") + " --cone psd");
  expect(cert.exit_code == 0, "certify exited with code " + std::to_string(cert.exit_code));
  expect(cert.json.at("result").at("sd_bound") == 1, "sd_bound is not 1");
}

// -------------------------------------------------------------------------
// 3. Hand-specified auxiliary systems in S^3, and the two-step instance whose
//    first reduction still fails Slater.
void criterion3() {
  SymMatrix E11(3), E33(3), A3(3);
  E11.set(0, 0, 1.0);
  E33.set(2, 2, 1.0);
  A3.set(1, 1, 1.0);
  A3.set(0, 2, 0.5);

  Eigen::VectorXd b2(2), v2(2);
  b2 << 1.0, 0.0;
  v2 << 0.0, 1.0;
  expect(verify_aux_generic({E11, E33}, b2, v2), "v = (0,1) was not accepted");
  v2 << 1.0, 0.0;
  expect(!verify_aux_generic({E11, E33}, b2, v2), "v = (1,0) was not rejected");

  Eigen::VectorXd b3(3), v3(3);
  b3 << 1.0, 0.0, 0.0;
  v3 << 0.0, 1.0, 0.0;
  expect(verify_aux_generic({E11, E33, A3}, b3, v3), "v = (0,1,0) was not accepted");

  // Reducing by v = (0,1,0) exposes e3; in the remaining 2x2 coordinates the
  // constraints read X_11 = 1, X_22 = 0, which still fails Slater: no
  // completion exceeds rank 1 in a 2-dimensional ambient space.
  PatternGraph g = build_pattern(2, {{0, 0}, {1, 1}});
  PartialMatrix reduced = make_partial(g, {1.0, 0.0});
  ReductionReport rpt = minimal_face_psd(reduced);
  expect(rpt.face.rank() == 1, "reduced face rank is not 1");
  RankSample s = sample_max_rank(reduced, rpt.face, 20);
  expect(s.max_rank == 1, "oracle max rank is not 1");
  expect(s.max_rank < 2, "Slater unexpectedly holds after one reduction");
}

// -------------------------------------------------------------------------
// 4. Operator identities, 1000 random trials each.
void criterion4() {
  ts::Rng rng(401);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + int(rng() % 7);
    SymMatrix X = ts::dyadic_symmetric(rng, n);
    SymMatrix D = ts::dyadic_symmetric(rng, n);

    // Adjoint identity of the hollowing operator.
    double lhs = kappa(X).trace_inner(D);
    double rhs = X.trace_inner(kappa_adjoint(D));
    expect(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)),
           "hollowing adjoint identity failed");

    // Adjoint identity of the coordinate projection under the factor-2 inner
    // product; exact on the dyadic grid.
    PatternGraph g = ts::random_pattern(rng, n, 0.5, 0.5);
    std::vector<double> bvals;
    for (std::size_t k = 0; k < g.edges.size(); ++k) bvals.push_back(ts::dyadic(rng));
    PartialMatrix b = make_partial(g, bvals);
    expect(edge_inner(g, project(X, g).values, b.values) ==
               X.trace_inner(adjoint_project(b)),
           "projection adjoint identity failed");

    // Exact range facts.
    SymMatrix KX = kappa(X);
    for (int i = 0; i < n; ++i)
      expect(KX(i, i) == 0.0, "kappa output has a nonzero diagonal entry");
    Eigen::VectorXd rowsum = kappa_adjoint(D).dense() * Eigen::VectorXd::Ones(n);
    expect(rowsum.cwiseAbs().maxCoeff() == 0.0, "kappa_adjoint output is not centered");
  }

  ts::Rng rng2(402);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + int(rng2() % 6);
    SymMatrix H = ts::dyadic_hollow(rng2, n);
    SymMatrix H2 = kappa(kappa_pinv(H));
    expect((H2.dense() - H.dense()).cwiseAbs().maxCoeff() <=
               1e-10 * std::max(1.0, H.max_abs()),
           "kappa o kappa_pinv is not the identity on hollow matrices");

    SymMatrix S = ts::dyadic_symmetric(rng2, n);
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) -
                        Eigen::MatrixXd::Constant(n, n, 1.0 / double(n));
    SymMatrix Cn = SymMatrix::symmetrized(J * S.dense() * J);
    SymMatrix C2 = kappa_pinv(kappa(Cn));
    expect((C2.dense() - Cn.dense()).cwiseAbs().maxCoeff() <=
               1e-10 * std::max(1.0, Cn.max_abs()),
           "kappa_pinv o kappa is not the identity on centered matrices");
  }

  // Laplacian: agreement of the two formulas and kernel exactly span{e} on
  // connected positive weightings.
  ts::Rng rng3(403);
  int done = 0;
  while (done < 1000) {
    int n = 2 + int(rng3() % 7);
    PatternGraph g = ts::random_pattern(rng3, n, 0.6, 0.0);
    std::vector<double> w;
    for (std::size_t k = 0; k < g.edges.size(); ++k)
      w.push_back(0.25 + std::abs(ts::dyadic(rng3)));
    PartialMatrix a = make_partial(g, w);
    SymMatrix L = laplacian(a);
    expect((L.dense() * 2.0 - kappa_adjoint(adjoint_project(a)).dense())
               .cwiseAbs()
               .maxCoeff() <= 1e-12,
           "laplacian disagrees with its adjoint-composition formula");
    if (connected_components(g).size() != 1) continue;
    ++done;
    Eigen::VectorXd ev = L.eigenvalues();
    double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    expect(std::abs(ev(0)) <= 1e-10 * scale, "laplacian kernel misses the ones vector");
    expect(n < 2 || ev(1) > 1e-10 * scale,
           "laplacian of a connected weighting has a repeated zero eigenvalue");
  }
}

// -------------------------------------------------------------------------
// 5. Exhaustive closedness for n <= 4, witnesses verified where not closed.
void criterion5() {
  for (int n = 1; n <= 4; ++n) {
    for (const PatternGraph& g : ts::all_patterns(n)) {
      bool bridging = false;
      for (const auto& e : g.edges)
        if (e.first != e.second && g.has_loop(e.first) != g.has_loop(e.second))
          bridging = true;
      ClosednessReport rep = classify(g, Cone::PSD);
      expect(rep.closed == l_separated(g), "classify disagrees with l_separated");
      expect(rep.closed == !bridging, "closedness disagrees with the bridging-edge scan");
      if (rep.closed) continue;
      WitnessCheck chk = verify_witness(*rep.witness, *rep.witness_edge, {1.0, 0.1, 0.01});
      expect(chk.certified, "witness is missing the no-completion certificate");
      expect(chk.all_ok, "witness failed a perturbation step");
      for (const WitnessStep& stp : chk.steps)
        expect(stp.ok && stp.min_eig > 0.0 && stp.proj_err <= stp.eps,
               "witness step out of tolerance");
    }
  }
}

// -------------------------------------------------------------------------
// 6. Oracle equivalence on seeded chordal PSD instances.
void criterion6() {
  const int kInstances = 50;
  int agree = 0;
  for (int i = 0; i < kInstances; ++i) {
    ts::Rng rng(1000 + std::uint64_t(i));
    int k = 1 + (i % 3);
    int n = 6 + (i % 7);
    // Planted rank at or below the tree width, so every instance lands on a
    // proper face and the sampling oracle works on the reduced system.
    int rank = 1 + ((i / 3) % k);
    PatternGraph g = ts::random_ktree(rng, n, k, /*with_loops=*/true);
    PartialMatrix a = ts::planted_psd_instance(rng, g, rank);
    ReductionReport rpt = minimal_face_psd(a);
    expect(rpt.chordal_guarantee, "k-tree pattern was not recognized as chordal");
    if (!rpt.slater_holds) g_slater_failing.push_back({a, Cone::PSD});

    const SymMatrix& Y = rpt.face.exposing;
    bool hit = false;
    try {
      RankSample s = sample_max_rank(a, rpt.face, 20);
      expect(s.max_rank <= rpt.face.rank(), "oracle rank exceeds the face rank");
      hit = s.max_rank == rpt.face.rank();
      expect((Y.dense() * s.avg_ambient.dense()).norm() <= 1e-7,
             "averaged oracle point leaves the face");
    } catch (const UndeterminedError&) {
      // a stalled instance counts against the agreement ratio below
    }

    // Fresh solver runs from this criterion's own starts: every feasible
    // point must be annihilated by the exposer.
    AffineSystem sys = reduce_constraints(a, rpt.face);
    for (int t = 0; t < 3; ++t) {
      Eigen::MatrixXd W = ts::dyadic_matrix(rng, rpt.face.rank(), rpt.face.rank());
      SolveStatus st = ap_solve(sys, {}, {}, Eigen::MatrixXd(W * W.transpose()));
      if (st.outcome != SolveOutcome::Feasible) continue;
      Eigen::MatrixXd X = rpt.face.basis * st.point * rpt.face.basis.transpose();
      expect((Y.dense() * X).norm() <= 1e-7, "oracle feasible point leaves the face");
    }
    if (hit) ++agree;
  }
  expect(agree * 100 >= kInstances * 95,
         "face rank matched the oracle on only " + std::to_string(agree) + "/" +
             std::to_string(kInstances) + " instances");
}

// -------------------------------------------------------------------------
// 7. Distance pipeline on seeded chordal instances of planar points.
void criterion7() {
  for (int i = 0; i < 20; ++i) {
    ts::Rng rng(2000 + std::uint64_t(i));
    int k = 3 + (i % 2);
    int n = 6 + (i % 5);
    PatternGraph g = ts::random_ktree(rng, n, k, /*with_loops=*/false);
    PartialMatrix a = ts::planted_edm_instance(rng, g, 2);
    ReductionReport rpt = minimal_face_edm(a);
    expect(rpt.chordal_guarantee, "k-tree pattern was not recognized as chordal");
    expect(rpt.face.rank() == 2,
           "face rank " + std::to_string(rpt.face.rank()) + " is not 2 on instance " +
               std::to_string(i));
    g_slater_failing.push_back({a, Cone::EDM});

    AffineSystem sys = reduce_constraints(a, rpt.face);
    SolveStatus st = ap_solve(sys);
    expect(st.outcome == SolveOutcome::Feasible,
           "completion solve did not converge on instance " + std::to_string(i));
    SymMatrix D = kappa(SymMatrix::symmetrized(
        rpt.face.basis * st.point * rpt.face.basis.transpose()));
    Realization real = edm_realize(D);
    for (std::size_t e = 0; e < a.pattern.edges.size(); ++e) {
      auto [p, q] = a.pattern.edges[e];
      double d2 = (real.points.row(p) - real.points.row(q)).squaredNorm();
      expect(std::abs(d2 - a.values[e]) <= 1e-6,
             "realized distance drifts from the data on instance " + std::to_string(i));
    }
  }
}

// -------------------------------------------------------------------------
// 8. Singularity-degree contract on every Slater-failing chordal instance
//    accumulated from criteria 6 and 7.
void criterion8() {
  expect(!g_slater_failing.empty(), "no Slater-failing instances were collected");
  for (std::size_t i = 0; i < g_slater_failing.size(); ++i) {
    const auto& inst = g_slater_failing[i];
    ReductionReport rpt = singularity_degree_bound(inst.a, inst.cone);
    expect(rpt.sd_bound == SdBound::One,
           "bound is not one on collected instance " + std::to_string(i));
    expect(rpt.certificate.has_value(), "certificate missing on instance " + std::to_string(i));
    const AuxCertificate& cert = *rpt.certificate;
    double scale = std::max(1.0, cert.lifted.max_abs());
    expect(cert.lifted.min_eigenvalue() >= -1e-9 * scale,
           "certificate matrix is not PSD on instance " + std::to_string(i));
    expect(cert.lifted.frob_norm() > 1e-9, "certificate matrix vanishes");
    expect(std::abs(cert.inner) <= 1e-9 * edge_norm(inst.a),
           "certificate pairing exceeds tolerance on instance " + std::to_string(i));
    expect(rpt.slater_on_face == true,
           "reduced problem is not strictly feasible on instance " + std::to_string(i));
  }
}

struct Criterion {
  int number;
  const char* label;
  double budget_sec;  // 0 means no stated budget
  std::function<void()> body;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "limit instance: exact pair and Farkas refutation", 1.0, criterion1},
      {2, "chordal path: face, exposer sum, certified bound", 1.0, criterion2},
      {3, "hand auxiliary systems and the degree-two instance", 1.0, criterion3},
      {4, "operator identities, 1000 trials each", 10.0, criterion4},
      {5, "exhaustive closedness for n <= 4", 30.0, criterion5},
      {6, "oracle equivalence on 50 chordal PSD instances", 300.0, criterion6},
      {7, "distance pipeline on 20 planar instances", 120.0, criterion7},
      {8, "singularity-degree contract on collected instances", 0.0, criterion8},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.body();
    } catch (const Failure& f) {
      error = f.what;
    } catch (const std::exception& e) {
      error = std::string("unexpected exception: ") + e.what();
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    if (error.empty() && c.budget_sec > 0.0 && sec > c.budget_sec) {
      std::ostringstream os;
      os << "exceeded budget: " << sec << " s > " << c.budget_sec << " s";
      error = os.str();
    }
    if (error.empty()) {
      line << "[PASS] criterion " << c.number << ": " << c.label << " (" << sec << " s)";
    } else {
      line << "[FAIL] criterion " << c.number << ": " << c.label << " (" << sec
           << " s): " << error;
      ++failures;
    }
    std::cout << line.str() << "\n";
  }
  return failures == 0 ? 0 : 1;
}
