#pragma once

#include <map>
#include <string>
#include <vector>

#include "cartan/config.hpp"
#include "cartan/connection.hpp"

#ifndef CARTAN_GOLDEN_DIR
#define CARTAN_GOLDEN_DIR "tests/golden"
#endif

namespace cartan::testing {

/// Quantities of the paper-canonical pipeline on the general element,
/// under the key names used by the golden files.
inline std::map<std::string, expr::Expr> constructValues(const jetpde::JetPDE& p) {
  using namespace connection;
  std::map<std::string, expr::Expr> out;
  TransformedPDE tp = applyGroup(p, generalElement(p));
  out["coeffV"] = tp.coeffV;
  for (int i = 1; i <= p.n; ++i) out["coeffV" + std::to_string(i)] = tp.coeffVi[i - 1];
  ConnectionSolution cs = matchConnection(tp);
  for (int c = 0; c <= p.n; ++c) {
    const std::string cn = p.coordinate(c)->name;
    out["alpha_" + cn] = cs.alpha.component(cn);
    for (int i = 1; i <= p.n; ++i) out["beta" + std::to_string(i) + "_" + cn] = cs.beta[i - 1].component(cn);
  }
  TorsionSolution ts = torsionConstraints(embedWeyl(cs, p));
  for (int c = 0; c <= p.n; ++c) out["eps_" + p.coordinate(c)->name] = ts.epsilon.component(p.coordinate(c)->name);
  expr::Expr sum;
  for (const auto& c : ts.constraints) sum = sum + c;
  out["constraint_sum"] = sum;
  out["vacuum"] = specializeProlongation(p, ts.constraints);
  return out;
}

struct GoldenMismatch {
  std::string key;
  std::string expected;
  std::string actual;
};

/// Compares every key of a golden file under equiv; missing keys count as
/// mismatches.
inline std::vector<GoldenMismatch> compareGolden(const std::string& file, const jetpde::JetPDE& p,
                                                 const expr::EquivOptions& options = {}) {
  Config golden = Config::load(std::string(CARTAN_GOLDEN_DIR) + "/" + file);
  auto values = constructValues(p);
  std::vector<GoldenMismatch> bad;
  for (const auto& key : golden.keys()) {
    std::string text = golden.getString(key, "");
    auto it = values.find(key);
    if (it == values.end()) {
      bad.push_back({key, text, "<missing>"});
      continue;
    }
    expr::Expr expected = expr::parse(text, p.ws);
    if (!expr::equiv(it->second, expected, options)) bad.push_back({key, text, expr::render(it->second)});
  }
  return bad;
}

}  // namespace cartan::testing
