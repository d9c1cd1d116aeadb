// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "cartan/connection.hpp"
#include "cartan/verify.hpp"
#include "golden.hpp"
#include "random_expr.hpp"

#ifndef CARTAN_CLI
#define CARTAN_CLI "cartan"
#endif

using namespace cartan;
using verify::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

jetpde::JetPDE schrodinger(int n) {
  jetpde::PDESpec s;
  s.n = n;
  return jetpde::flatten(s);
}

expr::EquivOptions pinned() {
  expr::EquivOptions o;
  o.trials = 20;
  o.tol = 1e-9;
  o.seed = 0x5eed;
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome golden(int n) {
  jetpde::JetPDE p = schrodinger(n);
  auto bad = testing::compareGolden("construct_" + std::to_string(n) + "d.golden", p, pinned());
  json report = connection::runConstruct(p, connection::GaugePolicy::named("paper-canonical"), expr::Expr(1),
                                         forms::TorsionConvention::ScaleActsLeft);
  bool torsionOk = report["torsion"].contains("epsilon");
  std::string detail = "n=" + std::to_string(n) + " mismatches=" + std::to_string(bad.size());
  for (const auto& m : bad) detail += " [" + m.key + "]";
  return {bad.empty() && torsionOk, detail};
}

Outcome criterion1() { return golden(1); }

Outcome criterion2() {
  Outcome two = golden(2);
  Outcome three = golden(3);
  return {two.pass && three.pass, two.detail + "; " + three.detail};
}

Outcome criterion3() {
  jetpde::JetPDE p = schrodinger(1);
  json r = verify::gaugeReport(p, p.ws["lambda"], 0x5eed, 50);
  int passed = r["passed"].get<int>();
  return {r["pass"].get<bool>() && passed == 50, std::to_string(passed) + "/50 samples"};
}

Outcome criterion4() {
  jetpde::JetPDE p = schrodinger(1);
  testing::ExprGenerator gen(p.ws, 0x5eed);
  int passed = 0;
  for (int trial = 0; trial < 20; ++trial) {
    expr::Expr a = p.ws["a"] * expr::exp(gen(1));
    connection::TransformedPDE tp = connection::applyGroup(p, forms::GroupElement(a, {gen(2)}));
    connection::ConnectionSolution cs = connection::matchConnection(tp);
    expr::Expr div = forms::covariantDivergence(cs.omega, p.jetVector(), p.eta);
    if (cs.residualConstraints.empty() && expr::equiv(div, tp.transformed, pinned())) ++passed;
  }
  return {passed == 20, std::to_string(passed) + "/20 pairs"};
}

Outcome criterion5() {
  json r = verify::vacuumReport({});
  return {r["pass"].get<bool>(), "order=" + fmt(r["order"].get<double>()) +
                                     " positive=" + (r["positive"].get<bool>() ? "yes" : "no")};
}

Outcome criterion6() {
  json r = verify::splitReport({});
  return {r["pass"].get<bool>(),
          "mismatch=" + fmt(r["finestMismatch"].get<double>()) + " order=" + fmt(r["order"].get<double>())};
}

Outcome criterion7() {
  json r = verify::continuityReport({});
  return {r["pass"].get<bool>(), "order=" + fmt(r["order"].get<double>()) +
                                     " perturbedOrder=" + fmt(r["perturbedOrder"].get<double>()) +
                                     " ratio=" + fmt(r["finestRatio"].get<double>())};
}

Outcome criterion8() {
  json r = verify::madelungReport({});
  const json& pw = r["planeWave"];
  const json& h = r["harmonic"];
  bool hj = pw["hamiltonJacobiResidual"].get<double>() < 1e-10;
  return {r["pass"].get<bool>() && hj, "planeWaveHJ=" + fmt(pw["hamiltonJacobiResidual"].get<double>()) +
                                           " orders=" + fmt(h["continuityOrder"].get<double>()) + "," +
                                           fmt(h["hamiltonJacobiOrder"].get<double>())};
}

Outcome criterion9() {
  json r = verify::normReport({});
  double worst = 0;
  for (const auto& row : r["table"]) worst = std::max(worst, row["maxDriftPerStep"].get<double>());
  return {r["pass"].get<bool>() && worst < 1e-12, "maxDriftPerStep=" + fmt(worst)};
}

Outcome criterion10() {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("cartan_acceptance_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(dir);
  auto run = [&](const std::string& name) {
    fs::path out = dir / name;
    std::string cmd = std::string("\"") + CARTAN_CLI + "\" report --seed 7 --out \"" + out.string() + "\" 2>/dev/null";
    int status = std::system(cmd.c_str());
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return std::make_pair(status, ss.str());
  };
  auto [s1, first] = run("a.json");
  auto [s2, second] = run("b.json");
  fs::remove_all(dir);
  bool same = !first.empty() && first == second;
  return {s1 == 0 && s2 == 0 && same, std::to_string(first.size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limitSeconds;
  };
  const Criterion criteria[] = {
      {1, "golden 1+1 construction", criterion1, 5},
      {2, "golden 1+n construction (n=2,3)", criterion2, 10},
      {3, "gauge consistency", criterion3, 0},
      {4, "round-trip matching", criterion4, 0},
      {5, "vacuum BVP", criterion5, 2},
      {6, "split-system equivalence", criterion6, 30},
      {7, "continuity form", criterion7, 0},
      {8, "Madelung", criterion8, 0},
      {9, "norm conservation", criterion9, 0},
      {10, "determinism", criterion10, 0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool inTime = c.limitSeconds <= 0 || seconds < c.limitSeconds;
    bool pass = o.pass && inTime;
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " C" << c.id << " " << c.name << ": " << o.detail << " ("
              << fmt(seconds) << " s" << (c.limitSeconds > 0 ? ", limit " + fmt(c.limitSeconds) + " s" : "")
              << ")\n";
  }
  return failures == 0 ? 0 : 1;
}
