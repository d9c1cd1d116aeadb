#include "cartan/jetpde.hpp"

#include <optional>

#include "cartan/equiv.hpp"

namespace cartan::jetpde {

std::string coordinateName(int n, int i) {
  if (i == 0) return "t";
  return n == 1 ? "x" : "x" + std::to_string(i);
}

std::string jetName(int i) { return i == 0 ? "v" : "v" + std::to_string(i); }

std::string indexedName(const std::string& stem, int n, int i) {
  return n == 1 ? stem : stem + std::to_string(i);
}

Workspace schrodingerWorkspace(int n) {
  if (n < 1) throw expr::SymbolicError("dimension must be at least 1");
  Workspace ws;
  std::vector<std::string> spatial;
  for (int i = 0; i <= n; ++i) {
    ws.declareCoordinate(coordinateName(n, i));
    if (i > 0) spatial.push_back(coordinateName(n, i));
  }
  for (int i = 0; i <= n; ++i) ws.declareJet(jetName(i));
  ws.declareFunction("a");
  for (int i = 1; i <= n; ++i) ws.declareFunction(indexedName("b", n, i));
  ws.declareFunction("e");
  for (int i = 1; i <= n; ++i) ws.declareFunction(indexedName("f", n, i));
  if (n > 1) ws.declareFunction("f");
  ws.declareFunction("g");
  ws.declareFunction("V");
  for (int i = 0; i <= n; ++i) ws.declareFunction("eps_" + coordinateName(n, i));
  ws.declareFunction("n", spatial);
  for (const char* p : {"lambda", "k", "omega"}) ws.declareParameter(p);
  return ws;
}

PDESpec PDESpec::fromConfig(const Config& config) {
  PDESpec s;
  s.n = static_cast<int>(config.getInt("dimension", 1));
  if (s.n < 1) throw ConfigError("dimension must be at least 1");
  for (long v : config.getIntList("signs")) {
    if (v != 1 && v != -1) throw ConfigError("signs must be +1 or -1");
    s.signs.push_back(static_cast<int>(v));
  }
  if (!s.signs.empty() && static_cast<int>(s.signs.size()) != s.n) {
    throw ConfigError("signs must list one entry per spatial dimension");
  }
  std::string time = config.getString("time", "schrodinger");
  if (time == "schrodinger") {
    s.time = TimeCoefficient::Schrodinger;
  } else if (time == "diffusion") {
    s.time = TimeCoefficient::Diffusion;
  } else {
    throw ConfigError("time must be schrodinger or diffusion");
  }
  s.potential = config.getString("potential", "V");
  s.lowerOrder = config.getString("lower_order", "");
  return s;
}

Expr JetPDE::leading() const {
  Expr out = timeCoefficient * expr::totalDerivative(ws["v"], coordinate(0));
  for (int i = 1; i <= n; ++i) out = out + eta[i] * expr::totalDerivative(Expr::symbol(jet(i)), coordinate(i));
  return out;
}

std::vector<Expr> JetPDE::jetVector() const {
  std::vector<Expr> u;
  for (int i = 0; i <= n; ++i) u.push_back(Expr::symbol(jet(i)));
  return u;
}

bool containsJetDerivative(const Expr& ex) {
  bool found = false;
  expr::mapSymbols(ex, [&](const Expr& s) -> std::optional<Expr> {
    if (s.isDerivative() && s.sym()->kind == expr::SymbolKind::Jet) found = true;
    return std::nullopt;
  });
  return found;
}

LinearSplit splitLinear(const Expr& ex, const std::vector<SymbolRef>& jets) {
  if (containsJetDerivative(ex)) throw NonlinearityError("expression contains derivatives of jet variables");
  Bindings zero;
  for (const auto& j : jets) zero[j->name] = Expr(0);
  LinearSplit out;
  out.remainder = expr::substitute(ex, zero);
  Expr rebuilt = out.remainder;
  for (const auto& j : jets) {
    Bindings unit = zero;
    unit[j->name] = Expr(1);
    Expr c = expr::substitute(ex, unit) - out.remainder;
    out.coeffs.push_back(c);
    rebuilt = rebuilt + c * Expr::symbol(j);
  }
  if (!expr::isIdenticallyZero(ex - rebuilt)) throw NonlinearityError("expression is not linear in the jet variables");
  return out;
}

JetPDE flatten(const PDESpec& spec) {
  JetPDE p;
  p.ws = schrodingerWorkspace(spec.n);
  p.n = spec.n;
  p.timeCoefficient = spec.time == TimeCoefficient::Schrodinger ? Expr::imaginaryUnit() : Expr(1);
  p.signs = spec.signs.empty() ? std::vector<int>(spec.n, 1) : spec.signs;
  if (static_cast<int>(p.signs.size()) != spec.n) throw expr::SymbolicError("one sign per spatial dimension");
  p.potential = expr::parse(spec.potential, p.ws);
  if (containsKind(p.potential, expr::SymbolKind::Jet)) throw expr::KindMismatchError("potential depends on jet variables");
  p.lowerOrder = spec.lowerOrder.empty() ? -p.potential * p.ws["v"] : expr::parse(spec.lowerOrder, p.ws);

  LinearSplit split = splitLinear(p.lowerOrder, p.ws.jets());
  if (!expr::isIdenticallyZero(split.remainder)) throw NonlinearityError("lower-order part has a source term");

  p.eta.push_back(p.timeCoefficient);
  for (int s : p.signs) p.eta.push_back(Expr(std::int64_t{s}));
  p.residual = p.leading() + p.lowerOrder;
  return p;
}

Bindings prolong(const JetPDE& p, const Expr& u) {
  if (containsKind(u, expr::SymbolKind::Jet)) throw expr::KindMismatchError("prolong: section depends on jet variables");
  Bindings b{{"v", u}};
  for (int i = 1; i <= p.n; ++i) b[jetName(i)] = expr::differentiate(u, p.coordinate(i));
  return b;
}

Expr residualOnSection(const JetPDE& p, const Expr& u) { return expr::substitute(p.residual, prolong(p, u)); }

Expr secondOrderResidual(const JetPDE& p, const Expr& u) {
  Expr out = p.timeCoefficient * expr::differentiate(u, p.coordinate(0));
  for (int i = 1; i <= p.n; ++i) out = out + p.eta[i] * expr::differentiate(u, p.coordinate(i), 2);
  return out + expr::substitute(p.lowerOrder, prolong(p, u));
}

}  // namespace cartan::jetpde
