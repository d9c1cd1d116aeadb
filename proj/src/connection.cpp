#include "cartan/connection.hpp"

#include <optional>

#include "cartan/equiv.hpp"

namespace cartan::connection {

using expr::Bindings;
using expr::differentiate;
using expr::isIdenticallyZero;
using expr::substitute;
using expr::toPrefix;

namespace {

Expr lnDerivative(const Expr& e, const expr::SymbolRef& c) { return differentiate(expr::ln(e), c); }

/// Linear coefficient of `ex` in the function symbol `name` (appearing
/// without derivatives): ex = coeff * name + rest.
std::pair<Expr, Expr> linearIn(const Expr& ex, const std::string& name) {
  Expr rest = substitute(ex, {{name, Expr(0)}});
  Expr coeff = substitute(ex, {{name, Expr(1)}}) - rest;
  return {coeff, rest};
}

void appendDistinct(std::vector<Expr>& list, const Expr& c) {
  for (const auto& e : list) {
    if (expr::equiv(e, c) || expr::equiv(e, -c)) return;
  }
  list.push_back(c);
}

JetPDE leadingOnly(const JetPDE& p) {
  JetPDE q = p;
  q.lowerOrder = Expr(0);
  q.residual = q.leading();
  return q;
}

}  // namespace

Expr contactSubstitute(const JetPDE& p, const Expr& ex) {
  return expr::mapSymbols(ex, [&](const Expr& s) -> std::optional<Expr> {
    if (!s.isDerivative() || s.sym()->name != "v") return std::nullopt;
    const auto& o = s.orders();
    int total = 0;
    int dir = -1;
    for (std::size_t k = 0; k < o.size(); ++k) {
      total += o[k];
      if (o[k] == 1) dir = static_cast<int>(k);
    }
    if (total != 1 || dir < 1) return std::nullopt;
    return Expr::symbol(p.jet(dir));
  });
}

Expr TransformedPDE::reconstruction() const {
  Expr out = base.leading() + coeffV * base.ws["v"];
  for (int i = 1; i <= base.n; ++i) out = out + coeffVi[i - 1] * Expr::symbol(base.jet(i));
  return out;
}

TransformedPDE applyGroup(const JetPDE& p, const GroupElement& g) {
  if (static_cast<int>(g.dimension()) != p.n + 1) throw forms::DimensionError("group dimension must be n + 1");
  Expr v = p.ws["v"];
  Bindings b{{"v", g.a() * v}};
  for (int i = 1; i <= p.n; ++i) b[jetpde::jetName(i)] = g.b()[i - 1] * v + g.a() * Expr::symbol(p.jet(i));
  Expr t = contactSubstitute(p, substitute(p.residual, b)) / g.a();
  jetpde::LinearSplit split = jetpde::splitLinear(t - p.leading(), p.ws.jets());
  if (!isIdenticallyZero(split.remainder)) throw expr::SymbolicError("transformed equation lost its leading part");
  TransformedPDE tp{p, g, t, split.coeffs[0], {}};
  tp.coeffVi.assign(split.coeffs.begin() + 1, split.coeffs.end());
  return tp;
}

GaugePolicy GaugePolicy::named(const std::string& name) {
  if (name == "paper-canonical") return {PolicyKind::PaperCanonical, Expr(0), Expr(0)};
  if (name == "zero-alpha-t") return {PolicyKind::ZeroAlphaT, Expr(0), Expr(0)};
  throw PolicyError("unknown gauge policy '" + name + "'");
}

std::string GaugePolicy::name() const {
  switch (kind) {
    case PolicyKind::PaperCanonical:
      return "paper-canonical";
    case PolicyKind::ZeroAlphaT:
      return "zero-alpha-t";
    case PolicyKind::Custom:
      return "custom";
  }
  return "";
}

ConnectionSolution matchConnection(const TransformedPDE& tp, const GaugePolicy& policy) {
  const JetPDE& p = tp.base;
  Frame frame = Frame::base(p.ws);
  const int n = p.n;
  const Expr& a = tp.g.a();

  GaugeChoice choice{policy, Expr(0), Expr(0), {}};
  if (policy.kind != PolicyKind::ZeroAlphaT) choice.alphaT = p.timeCoefficient * differentiate(a, p.coordinate(0)) / a;
  std::vector<Expr> own;
  Expr ownSum;
  for (int i = 1; i <= n; ++i) {
    own.push_back(p.eta[i] * differentiate(tp.g.b()[i - 1], p.coordinate(i)) / a);
    ownSum = ownSum + own.back();
  }
  Expr share = (tp.coeffV - choice.alphaT - ownSum) / Expr(std::int64_t{n});
  for (int i = 0; i < n; ++i) choice.betaDiagonal.push_back(own[i] + share);
  if (policy.kind == PolicyKind::Custom) {
    choice.alphaT = choice.alphaT + policy.f;
    for (auto& b : choice.betaDiagonal) b = b - policy.f / Expr(std::int64_t{n});
    choice.betaT = policy.g;
  }

  ConnectionSolution cs;
  std::vector<Expr> alphaCoeffs{choice.alphaT};
  for (const auto& c : tp.coeffVi) alphaCoeffs.push_back(c);
  cs.alpha = KForm::oneForm(frame, alphaCoeffs);
  cs.omega = MatrixForm(n + 1, n + 1, 1, frame);
  for (int i = 0; i <= n; ++i) cs.omega.set(i, i, cs.alpha);
  for (int i = 1; i <= n; ++i) {
    std::vector<Expr> coeffs(n + 1, Expr(0));
    coeffs[0] = choice.betaT;
    coeffs[i] = choice.betaDiagonal[i - 1];
    cs.beta.push_back(KForm::oneForm(frame, coeffs));
    cs.omega.set(i, 0, cs.beta.back());
  }
  cs.gaugeChoice = choice;

  Expr vSum = choice.alphaT;
  for (const auto& b : choice.betaDiagonal) vSum = vSum + b;
  if (!isIdenticallyZero(vSum - tp.coeffV)) cs.residualConstraints.push_back(vSum - tp.coeffV);
  return cs;
}

MatrixForm WeylConnection::matrix() const {
  std::size_t m = omega.rows() + 1;
  MatrixForm w(m, m, 1, frame);
  w.set(0, 0, epsilon.promoted(frame));
  for (std::size_t i = 0; i < omega.rows(); ++i) {
    w.set(i + 1, 0, theta(i, 0).promoted(frame));
    for (std::size_t j = 0; j < omega.cols(); ++j) w.set(i + 1, j + 1, omega(i, j).promoted(frame));
  }
  w.markWeyl();
  return w;
}

WeylConnection WeylConnection::withEpsilon(const KForm& eps) const {
  WeylConnection out = *this;
  out.epsilon = eps.promoted(frame);
  return out;
}

WeylConnection embedWeyl(const ConnectionSolution& cs, const JetPDE& p) {
  WeylConnection w;
  w.frame = Frame::extended(p.ws);
  Frame base = Frame::base(p.ws);
  std::vector<Expr> eps;
  for (int i = 0; i <= p.n; ++i) eps.push_back(p.ws["eps_" + p.coordinate(i)->name]);
  w.epsilon = KForm::oneForm(base, eps).promoted(w.frame);
  w.theta = MatrixForm(p.n + 1, 1, 1, w.frame);
  for (int i = 0; i <= p.n; ++i) w.theta.set(i, 0, KForm::differential(w.frame, p.jet(i)->name));
  w.omega = cs.omega.promoted(w.frame);
  return w;
}

GaugeConstraints gaugeSubgroupConstraints(const JetPDE& p, const Expr& lambda) {
  JetPDE lead = leadingOnly(p);
  Frame frame = Frame::base(p.ws);
  const int n = p.n;
  Expr e = p.ws["e"];
  std::vector<Expr> fs;
  for (int i = 1; i <= n; ++i) fs.push_back(p.ws[jetpde::indexedName("f", n, i)]);
  GroupElement h(e, fs, forms::GroupFlavor::H0Candidate);

  TransformedPDE th = applyGroup(lead, h);
  Expr mcSide = forms::covariantDivergence(forms::maurerCartan(h, frame), lead.jetVector(), lead.eta) - lead.leading();
  jetpde::LinearSplit mc = jetpde::splitLinear(mcSide, p.ws.jets());

  GaugeConstraints out;
  out.lambda = lambda;
  Bindings solved;
  for (int i = 1; i <= n; ++i) {
    Expr eq = th.coeffVi[i - 1] - lambda * mc.coeffs[i];
    const std::string name = fs[i - 1].sym()->name;
    auto [coeff, rest] = linearIn(eq, name);
    if (dependsOn(coeff, name) || isIdenticallyZero(coeff)) throw expr::SymbolicError("cannot solve for " + name);
    Expr sol = -rest / coeff;
    out.f.push_back(sol);
    solved[name] = sol;
  }
  out.scalarConstraint = substitute(th.coeffV - lambda * mc.coeffs[0], solved);

  // The two printed forms, with the time coefficient in place of i.
  const auto& t = p.coordinate(0);
  Expr lt = lnDerivative(e, t);
  Expr squares;
  Expr seconds;
  for (int i = 1; i <= n; ++i) {
    Expr li = lnDerivative(e, p.coordinate(i));
    squares = squares + li * li;
    seconds = seconds + differentiate(li, p.coordinate(i));
  }
  Expr one(1);
  Expr head = (p.timeCoefficient - lambda) * lt;
  out.printed.push_back({"printed-1d", head - (lambda - one) * squares - seconds});
  out.printed.push_back({"printed-nd", head - squares - (lambda - one) * seconds});
  if (lambda == one) out.printed.push_back({"stated-lambda1", head - seconds - squares});
  for (auto& pc : out.printed) pc.equivalent = expr::equiv(pc.expression, out.scalarConstraint);
  return out;
}

TorsionSolution torsionConstraints(const WeylConnection& w, TorsionConvention convention) {
  for (std::size_t i = 0; i < w.theta.rows(); ++i) {
    if (!forms::isZeroForm(forms::exteriorDerivative(w.theta(i, 0)))) throw forms::FormError("theta is not holonomic");
  }
  MatrixForm torsion = forms::torsionBlock(w.matrix(), convention);

  // Unknowns: the coefficient functions of eps.
  std::vector<std::string> unknowns;
  std::vector<int> slots;
  for (const auto& [idx, c] : w.epsilon.terms()) {
    if (c.op() != expr::Op::Symbol || c.sym()->kind != expr::SymbolKind::Function || c.isDerivative()) {
      throw forms::FormError("eps must have placeholder function coefficients");
    }
    unknowns.push_back(c.sym()->name);
    slots.push_back(idx[0]);
  }
  const std::size_t m = unknowns.size();
  Bindings zero;
  for (const auto& u : unknowns) zero[u] = Expr(0);

  struct Row {
    std::vector<Expr> coeffs;
    Expr rest;
    Expr original;
  };
  std::vector<Row> rows;
  for (std::size_t r = 0; r < torsion.rows(); ++r) {
    for (const auto& [idx, c] : torsion(r, 0).terms()) {
      Row row{{}, substitute(c, zero), c};
      for (const auto& u : unknowns) {
        Bindings unit = zero;
        unit[u] = Expr(1);
        row.coeffs.push_back(substitute(c, unit) - row.rest);
      }
      rows.push_back(std::move(row));
    }
  }

  // Gauss-Jordan with numeric pivots.
  std::vector<int> pivotRow(m, -1);
  std::vector<bool> used(rows.size(), false);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (used[r] || !rows[r].coeffs[k].isNumber() || rows[r].coeffs[k].isZero()) continue;
      pivotRow[k] = static_cast<int>(r);
      used[r] = true;
      Expr pivot = rows[r].coeffs[k];
      for (auto& c : rows[r].coeffs) c = c / pivot;
      rows[r].rest = rows[r].rest / pivot;
      for (std::size_t q = 0; q < rows.size(); ++q) {
        if (q == r || rows[q].coeffs[k].isZero()) continue;
        Expr factor = rows[q].coeffs[k];
        for (std::size_t j = 0; j < m; ++j) rows[q].coeffs[j] = rows[q].coeffs[j] - factor * rows[r].coeffs[j];
        rows[q].rest = rows[q].rest - factor * rows[r].rest;
      }
      break;
    }
  }

  TorsionSolution out;
  out.convention = convention;
  out.unknowns = static_cast<int>(m);
  for (int pr : pivotRow) out.rank += pr >= 0 ? 1 : 0;
  if (out.rank < out.unknowns) {
    throw UnsolvableEpsilonError("torsion equations do not determine eps (rank " + std::to_string(out.rank) + " of " +
                                     std::to_string(m) + ")",
                                 out.rank);
  }
  Bindings solution;
  Frame base(std::vector<expr::SymbolRef>(w.frame.coords().begin(), w.frame.coords().begin() + w.frame.baseCount()));
  out.epsilon = KForm(base, 1);
  for (std::size_t k = 0; k < m; ++k) {
    const Row& row = rows[static_cast<std::size_t>(pivotRow[k])];
    for (std::size_t j = 0; j < m; ++j) {
      if (j != k && !row.coeffs[j].isZero()) throw UnsolvableEpsilonError("eps components are coupled", out.rank);
    }
    Expr value = -row.rest;
    if (containsKind(value, expr::SymbolKind::Jet)) throw forms::FormError("eps would depend on jet variables");
    solution[unknowns[k]] = value;
    out.epsilon.add({slots[k]}, value);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (used[r]) continue;
    Expr c = substitute(rows[r].original, solution);
    if (!isIdenticallyZero(c)) appendDistinct(out.constraints, c);
  }
  return out;
}

Expr specializeProlongation(const JetPDE& p, const std::vector<Expr>& constraints) {
  Bindings b;
  for (int i = 1; i <= p.n; ++i) b[jetpde::indexedName("b", p.n, i)] = differentiate(p.ws["a"], p.coordinate(i));
  Expr total;
  for (const auto& c : constraints) total = total + substitute(c, b);
  return total;
}

bool ConsistencyReport::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

ConsistencyReport checkGaugeConsistency(const WeylConnection& w, const GroupElement& h, const JetPDE& p,
                                        const std::optional<Expr>& lambda) {
  ConsistencyReport report;
  const Frame& frame = w.frame;
  const std::size_t m = w.theta.rows();
  MatrixForm W = w.matrix();
  if (h.dimension() != m) throw forms::DimensionError("group element does not match the connection");
  MatrixForm gauged = forms::adConjugate(h, W) + forms::weylMaurerCartan(h, frame);

  KForm scale = w.epsilon + forms::exteriorDerivative(KForm::scalar(frame, expr::ln(h.a())));
  report.checks.push_back({"scale", forms::equivForms(gauged(0, 0), scale), "eps + d ln(e)"});

  MatrixForm solder = forms::matrixWedge(h.inverse(frame), w.theta);
  bool solderOk = true;
  for (std::size_t i = 0; i < m; ++i) solderOk = solderOk && forms::equivForms(gauged(i + 1, 0), h.a() * solder(i, 0));
  report.checks.push_back({"solder", solderOk, "e h^-1 theta"});

  MatrixForm expected = w.omega + forms::maurerCartan(h, frame);
  bool connOk = forms::equivMatrixForms(gauged.block(1, 1, m, m), expected);
  report.checks.push_back({"connection", connOk, "omega + h^-1 dh"});

  if (lambda) {
    JetPDE lead = leadingOnly(p);
    TransformedPDE th = applyGroup(lead, h);
    Expr mcSide =
        forms::covariantDivergence(forms::maurerCartan(h, Frame::base(p.ws)), lead.jetVector(), lead.eta) - lead.leading();
    jetpde::LinearSplit mc = jetpde::splitLinear(mcSide, p.ws.jets());
    bool ok = true;
    for (int i = 1; i <= p.n; ++i) ok = ok && expr::equiv(th.coeffVi[i - 1], *lambda * mc.coeffs[i]);
    report.checks.push_back({"proportionality", ok, "v_i coefficients equal lambda times the Maurer-Cartan ones"});
  }
  return report;
}

GroupElement generalElement(const JetPDE& p) {
  std::vector<Expr> b;
  for (int i = 1; i <= p.n; ++i) b.push_back(p.ws[jetpde::indexedName("b", p.n, i)]);
  return GroupElement(p.ws["a"], b);
}

std::string toString(TorsionConvention c) {
  return c == TorsionConvention::ScaleActsLeft ? "scale-acts-left" : "matrix-product";
}

nlohmann::ordered_json toJson(const ConsistencyReport& r) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"block", c.block}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return {{"pass", r.pass()}, {"checks", checks}};
}

nlohmann::ordered_json runConstruct(const JetPDE& p, const GaugePolicy& policy, const Expr& lambda,
                                    TorsionConvention convention) {
  using json = nlohmann::ordered_json;
  TransformedPDE tp = applyGroup(p, generalElement(p));
  ConnectionSolution cs = matchConnection(tp, policy);
  WeylConnection w = embedWeyl(cs, p);
  GaugeConstraints gc = gaugeSubgroupConstraints(p, lambda);

  json report;
  json coeffVi = json::array();
  for (const auto& c : tp.coeffVi) coeffVi.push_back(toPrefix(c));
  report["transformedPDE"] = {{"residual", toPrefix(p.residual)}, {"coeffV", toPrefix(tp.coeffV)}, {"coeffVi", coeffVi}};
  report["connection"] = forms::toJson(cs.omega);

  json betaDiag = json::array();
  for (const auto& b : cs.gaugeChoice.betaDiagonal) betaDiag.push_back(toPrefix(b));
  report["gaugeChoice"] = {{"policy", policy.name()},
                           {"alphaT", toPrefix(cs.gaugeChoice.alphaT)},
                           {"betaT", toPrefix(cs.gaugeChoice.betaT)},
                           {"betaDiagonal", betaDiag},
                           {"freeFamily", "alpha_t + f, beta_ii - f/n, beta_t = g"}};

  json fs = json::array();
  for (const auto& f : gc.f) fs.push_back(toPrefix(f));
  json printed = json::array();
  for (const auto& pc : gc.printed) {
    printed.push_back({{"label", pc.label}, {"expression", toPrefix(pc.expression)}, {"equivalent", pc.equivalent}});
  }
  report["gaugeConstraints"] = {
      {"lambda", toPrefix(gc.lambda)}, {"f", fs}, {"scalarConstraint", toPrefix(gc.scalarConstraint)}, {"printed", printed}};

  json torsion;
  try {
    TorsionSolution ts = torsionConstraints(w, convention);
    json constraints = json::array();
    for (const auto& c : ts.constraints) constraints.push_back(toPrefix(c));
    torsion = {{"convention", toString(convention)},
               {"epsilon", forms::toJson(ts.epsilon)},
               {"rank", ts.rank},
               {"constraints", constraints}};
    report["torsion"] = torsion;
    report["vacuumResidual"] = toPrefix(specializeProlongation(p, ts.constraints));
  } catch (const UnsolvableEpsilonError& err) {
    report["torsion"] = {{"convention", toString(convention)}, {"error", err.what()}, {"rank", err.rank()}};
    report["vacuumResidual"] = nullptr;
  }
  return report;
}

}  // namespace cartan::connection
